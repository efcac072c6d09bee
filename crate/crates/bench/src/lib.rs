//! Criterion benchmarks for the estimation and detection kernels; see `benches/`.
