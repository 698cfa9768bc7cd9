//! Benchmarks for hfsum-core live in `benches/`.
