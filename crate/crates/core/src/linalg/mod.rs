//! Dense linear algebra for small real symmetric and complex matrices.
//!
//! Everything here is a pure function on owned values. The eigensolver is a
//! cyclic Jacobi iteration, which is accurate and deterministic for the
//! matrix orders used by the manifolds (up to a few dozen).

mod cholesky;
mod complex;
mod eigen;
mod sym;

pub use cholesky::{cholesky, Cholesky};
pub use complex::{complex_eig_2x2, complex_eigenvalues, CMatrix};
pub use eigen::{log_eigenvalues, mat_exp, mat_log, mat_pow, sym_eig, EigenDecomposition, EXP_LIMIT, MAX_SWEEPS};
pub use sym::{pd_tolerance, sym_dim, sym_order, sym_unvec, sym_vec, CoordVector, PdMatrix, SymMatrix};

pub(crate) use eigen::check_positive;
pub(crate) use sym::{dist2_sq, matmul, norm2};
