//! Dense linear-algebra kernels for small matrices.

mod eigen;
mod expm;
mod lyapunov;
mod matrix;
mod symplectic;

pub use eigen::{eigenvalues, spectral_abscissa};
pub use expm::matrix_exp;
pub use lyapunov::{lyapunov_residual, solve_algebraic_lyapunov};
pub use matrix::SquareMatrix;
pub use symplectic::{min_symplectic_eigenvalue, symplectic_eigenvalues, SymplecticForm};
