//! Benchmarks for the closure transforms live in `benches/`.
