//! Regularized block Kaczmarz solvers for consistent linear systems `A x = b`.
//!
//! The centerpiece is ROR-BK ([`solvers::RorBk`]): regularized projections
//! onto contiguous row blocks sampled by how orthogonal each block is to all
//! others, interleaved with a projection onto the rows that currently carry
//! the largest residuals. It is also available as the inner iteration of a
//! flexible AB-GMRES solver ([`fgmres`]).

pub mod analysis;
pub mod blocking;
pub mod error;
pub mod fgmres;
pub mod generate;
pub mod linalg;
pub mod mtx;
pub mod rng;
pub mod solvers;
pub mod system;

pub use error::{Error, Result};
pub use linalg::{DenseMatrix, MatrixHandle, SparseMatrix};
pub use solvers::{SolverConfig, SolverKind, SolverReport};
pub use system::LinearSystem;
