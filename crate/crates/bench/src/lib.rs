//! Criterion benchmarks for the simulator live in `benches/`; run them with
//! `cargo bench -p spinorbit-bench`.

/// Bench program shared by the DSL benchmarks.
pub const FIG1_BENCH: &str = include_str!("../../../fixtures/fig1.bench");
