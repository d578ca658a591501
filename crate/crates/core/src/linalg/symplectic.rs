use super::{eigenvalues, SquareMatrix};
use crate::error::{Error, Result};

/// Canonical symplectic form: `[[0, 1], [-1, 0]]` on each consecutive
/// (position, momentum) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm(SquareMatrix);

impl SymplecticForm {
    pub fn new(modes: usize) -> Self {
        let mut m = SquareMatrix::zeros(2 * modes);
        for k in 0..modes {
            m[(2 * k, 2 * k + 1)] = 1.0;
            m[(2 * k + 1, 2 * k)] = -1.0;
        }
        Self(m)
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.0
    }
}

/// Symplectic eigenvalues of a positive-definite covariance matrix, sorted
/// ascending, one per mode. A Gaussian state in the symmetrised convention
/// is physical iff all of them are `>= 1/2`.
pub fn symplectic_eigenvalues(v: &SquareMatrix) -> Result<Vec<f64>> {
    let n = v.dim();
    if n % 2 != 0 {
        return Err(Error::Domain(format!("odd dimension {n}")));
    }
    if v.cholesky().is_none() {
        return Err(Error::Domain(
            "covariance matrix is not positive definite".into(),
        ));
    }
    let omega = SymplecticForm::new(n / 2);
    let mut abs: Vec<f64> = eigenvalues(&(omega.matrix() * v))?
        .iter()
        .map(|z| z.norm())
        .collect();
    abs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(abs.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect())
}

pub fn min_symplectic_eigenvalue(v: &SquareMatrix) -> Result<f64> {
    Ok(symplectic_eigenvalues(v)?[0])
}
