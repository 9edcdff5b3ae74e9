//! Criterion benchmarks for the bridge model and the error-budget channels;
//! run with `cargo bench -p piezobridge-bench`.
