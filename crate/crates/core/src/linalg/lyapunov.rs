use super::{eigenvalues, SquareMatrix};
use crate::error::{Error, Result};

/// Solves `A V + V A^T + D = 0` for symmetric `V`.
///
/// The system is vectorised column-major, `(I (x) A + A (x) I) vec(V) = -vec(D)`,
/// and solved densely. `A` must be Hurwitz. The residual is checked against
/// `1e-10 * (|A| |V| + |D|)` (Frobenius) before returning.
pub fn solve_algebraic_lyapunov(a: &SquareMatrix, d: &SquareMatrix) -> Result<SquareMatrix> {
    let n = a.dim();
    if d.dim() != n {
        return Err(Error::Domain("dimension mismatch".into()));
    }
    let max_re = eigenvalues(a)?
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    if max_re >= 0.0 {
        return Err(Error::NotHurwitz { max_re });
    }

    let nn = n * n;
    // column-major vec index: (i, j) -> i + j n
    let mut k = SquareMatrix::zeros(nn);
    for j in 0..n {
        for i in 0..n {
            let row = i + j * n;
            for m in 0..n {
                // (A V)_{ij} = sum_m A_{im} V_{mj}
                k[(row, m + j * n)] += a[(i, m)];
                // (V A^T)_{ij} = sum_m V_{im} A_{jm}
                k[(row, i + m * n)] += a[(j, m)];
            }
        }
    }
    let mut rhs = vec![0.0; nn];
    for j in 0..n {
        for i in 0..n {
            rhs[i + j * n] = -d[(i, j)];
        }
    }
    let x = k.solve(&rhs)?;
    let v = SquareMatrix::from_fn(n, |i, j| x[i + j * n]).symmetrized();

    let residual = lyapunov_residual(a, &v, d);
    let bound = 1e-10 * (a.frobenius_norm() * v.frobenius_norm() + d.frobenius_norm());
    if !(residual <= bound) {
        return Err(Error::Residual { residual, bound });
    }
    Ok(v)
}

/// `|A V + V A^T + D|_F`
pub fn lyapunov_residual(a: &SquareMatrix, v: &SquareMatrix, d: &SquareMatrix) -> f64 {
    let av = a * v;
    (&(&av + &(v * &a.transpose())) + d).frobenius_norm()
}
