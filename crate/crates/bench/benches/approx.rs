use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mg1tail_core::{
    evaluate_grid, Approximator, HeavySumMode, IntegratedTailModel, QueueModel, RwApprox,
};
use std::hint::black_box;

fn models() -> Vec<(&'static str, QueueModel)> {
    [
        ("pareto", IntegratedTailModel::pareto(3.0, 1.0)),
        ("weibull", IntegratedTailModel::weibull(0.5, 1.0)),
        ("lognormal", IntegratedTailModel::lognormal(0.0, 1.0)),
    ]
    .into_iter()
    .map(|(name, d)| (name, QueueModel::new(d.unwrap()).unwrap()))
    .collect()
}

fn report(c: &mut Criterion) {
    let mut g = c.benchmark_group("report");
    for (name, qm) in models() {
        for x in [50.0, 1000.0] {
            let ap = Approximator::new(&qm);
            g.bench_with_input(BenchmarkId::new(name, x), &x, |b, &x| {
                b.iter(|| ap.report(black_box(0.9), black_box(x)).unwrap())
            });
        }
    }
    g.finish();
}

fn heavy_sum_modes(c: &mut Criterion) {
    let qm = QueueModel::new(IntegratedTailModel::pareto(3.0, 1.0).unwrap()).unwrap();
    let mut g = c.benchmark_group("heavy_sum");
    for (label, mode) in [("exact", HeavySumMode::Exact), ("simplified", HeavySumMode::Simplified)] {
        let ap = Approximator::new(&qm).with_mode(mode);
        g.bench_function(label, |b| {
            b.iter(|| ap.heavy_sum(black_box(0.999), black_box(1e5)).unwrap())
        });
    }
    g.finish();
}

fn grid(c: &mut Criterion) {
    let qm = QueueModel::new(IntegratedTailModel::lognormal(0.0, 1.0).unwrap()).unwrap();
    let rho: Vec<f64> = (1..=10).map(|i| 0.09 * i as f64).collect();
    let x: Vec<f64> = (0..10).map(|i| 10f64.powf(0.3 * i as f64)).collect();
    c.bench_function("grid_10x10_lognormal", |b| {
        b.iter(|| evaluate_grid(&qm, black_box(&rho), black_box(&x)))
    });
}

fn rw_tail(c: &mut Criterion) {
    let qm = QueueModel::new(IntegratedTailModel::weibull(0.5, 1.0).unwrap()).unwrap();
    let rw = RwApprox::new(&qm);
    c.bench_function("rw_tail_weibull_n50", |b| {
        b.iter(|| rw.rw_tail(black_box(200.0), black_box(50)).unwrap())
    });
}

criterion_group!(benches, report, heavy_sum_modes, grid, rw_tail);
criterion_main!(benches);
