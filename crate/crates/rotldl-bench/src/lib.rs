//! Shared fixtures for the criterion benchmarks.

use rotldl::{uniform_sym, Mt19937, PackedSymMatrix};

/// Deterministic uniform test matrix for a benchmark case.
pub fn bench_matrix(n: usize, seed: u32) -> PackedSymMatrix {
    let mut rng = Mt19937::new(seed);
    uniform_sym(&mut rng, n)
}

/// Deterministic right-hand side.
pub fn bench_rhs(n: usize, seed: u32) -> Vec<f64> {
    let mut rng = Mt19937::new(seed);
    (0..n).map(|_| rng.next_uniform_pm1()).collect()
}
