//! No library code; this package exists to host the criterion benchmarks in
//! `benches/`.
