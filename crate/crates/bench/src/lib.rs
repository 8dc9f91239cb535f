//! Benchmarks live under `benches/`; run them with `cargo bench -p mg1tail-bench`.
