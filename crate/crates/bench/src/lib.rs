//! Criterion benchmarks for the coding kernels live in `benches/`.
