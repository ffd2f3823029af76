//! Criterion benchmarks for quadbubble-core live in `benches/`.
