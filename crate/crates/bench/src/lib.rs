//! Inputs shared by the benchmarks.

use rand::Rng;
use rorbk_core::generate::{generate_system, GeneratorSpec};
use rorbk_core::rng::{seeded, standard_normal};
use rorbk_core::{LinearSystem, MatrixHandle, SparseMatrix};

/// Dense `1 + U[0, 1)` system, the desk-scale comparison case.
pub fn dense_system(m: usize, n: usize) -> LinearSystem {
    generate_system(&GeneratorSpec::OnePlusRand { m, n }, 1).expect("valid dimensions")
}

/// Sparse `m×n` with about `per_row` normal entries per row.
pub fn sparse_matrix(m: usize, n: usize, per_row: usize) -> MatrixHandle {
    let mut rng = seeded(2);
    let mut trip = Vec::with_capacity(m * per_row);
    for i in 0..m {
        for _ in 0..per_row {
            trip.push((i, rng.random_range(0..n), standard_normal(&mut rng)));
        }
    }
    SparseMatrix::from_triplets(m, n, &trip)
        .expect("indices in range")
        .into()
}
