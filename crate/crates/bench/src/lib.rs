//! Criterion benchmarks for the `bitideal` crate live under `benches/`.
