//! Matrix storage, products and the regularized block projection kernel.

mod block;
mod dense;
mod handle;
mod sparse;
pub mod vector;

pub use block::{
    factor_block, factor_block_on, regularized_apply, regularized_gram, spd_solve, BlockFactor,
    BlockKind, GramSide, RowBlock, PINV_JITTER,
};
pub use dense::DenseMatrix;
pub use handle::{matvec, matvec_transpose, MatrixHandle, RowView};
pub use sparse::SparseMatrix;
