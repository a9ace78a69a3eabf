//! Numeric substrate: signed-log scalars, log-factorials, dense Hermitian
//! eigensolvers and least-squares line fits.

mod eigen;
mod fit;
mod slog;

pub use eigen::{
    gram_spectrum, hermitian_eigenvalues, hermitian_eigenvalues_with, tridiagonal_eigenvalues,
    EigenMethod, HermitianMatrix,
};
pub use fit::{linear_fit, FitResult};
pub use slog::{ln_factorial, ln_factorial_table, log_binomial, slog_sum, SignedLog};
