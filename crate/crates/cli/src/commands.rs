use std::fmt::Write as _;
use std::io::Write as _;

use mg1tail_core::{
    conditional_mc_estimate, evaluate_grid_with, ApproximationReport, Approximator, HeavySumMode, LambdaPoly,
    QueueModel, RwApprox, ThresholdSet,
};

use crate::error::CliError;
use crate::grid::{n_grid, rho_grid, x_grid};
use crate::output::{num, sink, RowErrors};
use crate::{model, Command, Common, SimArgs};

const APPROX_HEADER: [&str; 8] = [
    "rho",
    "x",
    "logZ",
    "logA",
    "log_ht",
    "log_htr",
    "region",
    "fallback_flags",
];

pub fn dispatch(cmd: &Command) -> Result<(), CliError> {
    match cmd {
        Command::Params { common, csv, poly } => params(common, *csv, *poly),
        Command::Thresholds { common, x } => thresholds(common, x),
        Command::Approx {
            common,
            rho,
            x,
            simplified,
        } => approx(common, rho, x, *simplified),
        Command::Rwtail { common, n, x, eps } => rwtail(common, n, x, *eps),
        Command::Simulate {
            common,
            rho,
            x,
            sim,
        } => simulate(common, *rho, x, sim),
        Command::Compare {
            common,
            rho,
            x,
            simplified,
            sim,
        } => compare(common, rho, x, *simplified, sim),
        Command::Figure {
            common,
            rho,
            x,
            simplified,
            sim,
        } => figure(common, *rho, x, *simplified, sim),
    }
}

fn approximator(qm: &QueueModel, simplified: bool) -> Approximator<'_> {
    let ap = Approximator::new(qm);
    if simplified {
        ap.with_mode(HeavySumMode::Simplified)
    } else {
        ap
    }
}

fn approx_fields(r: &ApproximationReport) -> Vec<String> {
    vec![
        num(r.rho),
        num(r.x),
        num(r.log_z),
        num(r.log_a),
        num(r.log_heavy_tail),
        num(r.log_heavy_traffic),
        r.region.to_string(),
        r.terms.flags.to_string(),
    ]
}

fn with_error(mut header: Vec<&'static str>) -> Vec<&'static str> {
    header.push("error");
    header
}

/// A failed row keeps its coordinates, blanks the rest and carries the message.
fn failed_row(lead: &[String], width: usize, msg: String) -> Vec<String> {
    let mut row = lead.to_vec();
    row.resize(width, String::new());
    row.push(msg);
    row
}

fn params(common: &Common, as_csv: bool, poly: bool) -> Result<(), CliError> {
    let qm = model::load(common.model.as_deref())?;
    let mut rows: Vec<(String, f64)> = vec![("mu".into(), qm.mu), ("sigma2".into(), qm.sigma2)];
    rows.extend(
        qm.gamma
            .iter()
            .enumerate()
            .map(|(i, g)| (format!("gamma_{}", i + 1), *g)),
    );
    rows.extend(
        qm.lambda
            .iter()
            .enumerate()
            .map(|(i, l)| (format!("lambda_{}", i + 2), *l)),
    );
    rows.push(("r".into(), qm.r));
    rows.push(("kappa".into(), qm.kappa as f64));
    if poly {
        let p = LambdaPoly::new(&qm);
        rows.extend(
            p.coeff
                .iter()
                .enumerate()
                .map(|(i, c)| (format!("c_{}", i + 2), *c)),
        );
        rows.extend(p.a.iter().enumerate().map(|(j, a)| (format!("a_{j}"), *a)));
        rows.extend(
            p.u_series_coeffs(qm.kappa)
                .into_iter()
                .enumerate()
                .map(|(n, b)| (format!("b_{}", n + 1), b)),
        );
    }
    let family = qm.dist.family().to_string();
    if as_csv {
        let mut w = sink(common.out.as_deref())?;
        w.write_record(["name", "value"])?;
        w.write_record(["family", family.as_str()])?;
        for (k, v) in &rows {
            let v = if k == "kappa" { qm.kappa.to_string() } else { num(*v) };
            w.write_record([k.as_str(), v.as_str()])?;
        }
        w.flush()?;
    } else {
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0).max(6);
        let mut text = format!("{:<width$}  {family}\n", "family");
        for (k, v) in &rows {
            if k == "kappa" {
                writeln!(text, "{k:<width$}  {}", qm.kappa).unwrap();
            } else {
                writeln!(text, "{k:<width$}  {v:.10e}").unwrap();
            }
        }
        let mut w: Box<dyn std::io::Write> = match &common.out {
            Some(p) => Box::new(std::fs::File::create(p)?),
            None => Box::new(std::io::stdout().lock()),
        };
        w.write_all(text.as_bytes())?;
        w.flush()?;
    }
    Ok(())
}

fn thresholds(common: &Common, x: &str) -> Result<(), CliError> {
    let qm = model::load(common.model.as_deref())?;
    let xs = x_grid(x)?;
    let ts = ThresholdSet::new(&qm);
    let mut w = sink(common.out.as_deref())?;
    let header = [
        "x",
        "K_r",
        "M",
        "N",
        "omega1_inv",
        "omega2_inv",
        "b_inv",
        "rho_star",
    ];
    w.write_record(with_error(header.to_vec()))?;
    let mut errs = RowErrors::default();
    for &x in &xs {
        match ts.row(x) {
            Ok(r) => w.write_record([
                num(r.x),
                r.k_r.to_string(),
                r.m.to_string(),
                r.n.to_string(),
                num(r.omega1_inv),
                num(r.omega2_inv),
                num(r.b_inv),
                num(r.rho_star),
                String::new(),
            ])?,
            Err(e) => {
                let msg = errs.record(&format!("x={x}"), &e);
                w.write_record(failed_row(&[num(x)], header.len(), msg))?
            }
        }
    }
    w.flush()?;
    errs.finish()
}

fn approx(common: &Common, rho: &str, x: &str, simplified: bool) -> Result<(), CliError> {
    let qm = model::load(common.model.as_deref())?;
    let (rhos, xs) = (rho_grid(rho)?, x_grid(x)?);
    let ap = approximator(&qm, simplified);
    let results = evaluate_grid_with(&ap, &rhos, &xs);
    let mut w = sink(common.out.as_deref())?;
    w.write_record(with_error(APPROX_HEADER.to_vec()))?;
    let mut errs = RowErrors::default();
    let pairs = rhos.iter().flat_map(|&r| xs.iter().map(move |&x| (r, x)));
    for ((r, x), res) in pairs.zip(results) {
        match res {
            Ok(rep) => {
                let mut row = approx_fields(&rep);
                row.push(String::new());
                w.write_record(row)?
            }
            Err(e) => {
                let msg = errs.record(&format!("rho={r} x={x}"), &e);
                w.write_record(failed_row(&[num(r), num(x)], APPROX_HEADER.len(), msg))?
            }
        }
    }
    w.flush()?;
    errs.finish()
}

fn rwtail(common: &Common, n: &str, x: &str, eps: Option<f64>) -> Result<(), CliError> {
    let qm = model::load(common.model.as_deref())?;
    let (ns, xs) = (n_grid(n)?, x_grid(x)?);
    let rw = match eps {
        Some(e) => RwApprox::with_eps(&qm, e)?,
        None => RwApprox::new(&qm),
    };
    let mut w = sink(common.out.as_deref())?;
    w.write_record(with_error(vec!["n", "x", "branch", "log_value"]))?;
    let mut errs = RowErrors::default();
    for &n in &ns {
        for &x in &xs {
            match rw.rw_tail(x, n) {
                Ok(t) => w.write_record([
                    n.to_string(),
                    num(x),
                    t.branch.to_string(),
                    num(t.log_value),
                    String::new(),
                ])?,
                Err(e) => {
                    let msg = errs.record(&format!("n={n} x={x}"), &e);
                    w.write_record(failed_row(&[n.to_string(), num(x)], 4, msg))?
                }
            }
        }
    }
    w.flush()?;
    errs.finish()
}

fn sim_fields(est: &mg1tail_core::SimulationEstimate) -> [String; 4] {
    [
        num(est.estimate),
        num(est.std_error),
        est.reps.to_string(),
        est.seed.to_string(),
    ]
}

fn simulate(common: &Common, rho: f64, x: &str, sim: &SimArgs) -> Result<(), CliError> {
    let qm = model::load(common.model.as_deref())?;
    rho_grid(&rho.to_string())?;
    let xs = x_grid(x)?;
    let mut w = sink(common.out.as_deref())?;
    w.write_record(with_error(vec!["x", "est", "se", "reps", "seed"]))?;
    let mut errs = RowErrors::default();
    for &x in &xs {
        match conditional_mc_estimate(&qm.dist, rho, x, sim.reps, sim.seed) {
            Ok(est) => {
                let mut row = vec![num(x)];
                row.extend(sim_fields(&est));
                row.push(String::new());
                w.write_record(row)?
            }
            Err(e) => {
                let msg = errs.record(&format!("x={x}"), &e);
                w.write_record(failed_row(&[num(x)], 5, msg))?
            }
        }
    }
    w.flush()?;
    errs.finish()
}

fn compare(
    common: &Common,
    rho: &str,
    x: &str,
    simplified: bool,
    sim: &SimArgs,
) -> Result<(), CliError> {
    let qm = model::load(common.model.as_deref())?;
    let (rhos, xs) = (rho_grid(rho)?, x_grid(x)?);
    let ap = approximator(&qm, simplified);
    let results = evaluate_grid_with(&ap, &rhos, &xs);
    let mut header = APPROX_HEADER.to_vec();
    header.extend(["est", "se", "reps", "seed"]);
    let width = header.len();
    let mut w = sink(common.out.as_deref())?;
    w.write_record(with_error(header))?;
    let mut errs = RowErrors::default();
    let pairs = rhos.iter().flat_map(|&r| xs.iter().map(move |&x| (r, x)));
    for ((r, x), res) in pairs.zip(results) {
        let est = conditional_mc_estimate(&qm.dist, r, x, sim.reps, sim.seed);
        let what = format!("rho={r} x={x}");
        match (res, est) {
            (Ok(rep), Ok(est)) => {
                let mut row = approx_fields(&rep);
                row.extend(sim_fields(&est));
                row.push(String::new());
                w.write_record(row)?
            }
            (Err(e), _) | (_, Err(e)) => {
                let msg = errs.record(&what, &e);
                w.write_record(failed_row(&[num(r), num(x)], width, msg))?
            }
        }
    }
    w.flush()?;
    errs.finish()
}

fn figure(
    common: &Common,
    rho: f64,
    x: &str,
    simplified: bool,
    sim: &SimArgs,
) -> Result<(), CliError> {
    let qm = model::load(common.model.as_deref())?;
    rho_grid(&rho.to_string())?;
    let xs = x_grid(x)?;
    let ap = approximator(&qm, simplified);
    let results = evaluate_grid_with(&ap, &[rho], &xs);
    let mut w = sink(common.out.as_deref())?;
    let header = [
        "x",
        "log10_sim",
        "log10_Z",
        "log10_A",
        "log10_ht",
        "log10_htr",
    ];
    w.write_record(with_error(header.to_vec()))?;
    let mut errs = RowErrors::default();
    let l10 = std::f64::consts::LN_10;
    for (&x, res) in xs.iter().zip(results) {
        let est = conditional_mc_estimate(&qm.dist, rho, x, sim.reps, sim.seed);
        match (res, est) {
            (Ok(rep), Ok(est)) => w.write_record([
                num(x),
                num(est.estimate.log10()),
                num(rep.log_z / l10),
                num(rep.log_a / l10),
                num(rep.log_heavy_tail / l10),
                num(rep.log_heavy_traffic / l10),
                String::new(),
            ])?,
            (Err(e), _) | (_, Err(e)) => {
                let msg = errs.record(&format!("x={x}"), &e);
                w.write_record(failed_row(&[num(x)], header.len(), msg))?
            }
        }
    }
    w.flush()?;
    errs.finish()
}
