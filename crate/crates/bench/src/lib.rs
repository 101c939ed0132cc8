//! Criterion benchmarks for provar-core live in `benches/`.
