//! Criterion benchmarks for the schedulers live in `benches/`; run them with
//! `cargo bench -p cran-idnc-bench`.
