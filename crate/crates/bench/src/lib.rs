//! Criterion benchmarks for the `sparsekl` kernels live in `benches/`.
