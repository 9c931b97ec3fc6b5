//! Criterion benchmarks for stftpr-core; see `benches/`.
