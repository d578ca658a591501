#![allow(dead_code)]

use optosync::linalg::{matrix_exp, SquareMatrix, SymplecticForm};
use optosync::CovarianceMatrix;
use rand::Rng;

/// `S diag(nu) S^T` with `S = exp(Omega H)` for a random symmetric `H`,
/// which is symplectic, and every `nu >= 1/2`. Mode pairs follow the
/// quadrature ordering (q1,p1), (x1,y1), (q2,p2), (x2,y2).
pub fn random_physical_covariance<R: Rng>(rng: &mut R, squeeze: f64) -> CovarianceMatrix {
    let mut h = SquareMatrix::zeros(8);
    for i in 0..8 {
        for j in i..8 {
            let x = rng.gen_range(-squeeze..squeeze);
            h[(i, j)] = x;
            h[(j, i)] = x;
        }
    }
    let omega = SymplecticForm::new(4);
    let s = matrix_exp(&(omega.matrix() * &h), 1.0);
    let mut nu = [0.0; 8];
    for k in 0..4 {
        let v = 0.5 + rng.gen_range(0.0..2.0);
        nu[2 * k] = v;
        nu[2 * k + 1] = v;
    }
    let v = &(&s * &SquareMatrix::from_diagonal(&nu)) * &s.transpose();
    CovarianceMatrix::from_square(&v.symmetrized()).unwrap()
}

/// Block-diagonal rotation `R(a) (+) 1 (+) R(b) (+) 1` acting on the
/// mechanical pairs, with `q' = q cos + p sin`, `p' = p cos - q sin`.
pub fn mechanical_rotation(a: f64, b: f64) -> SquareMatrix {
    let mut r = SquareMatrix::identity(8);
    for (k, phi) in [(0usize, a), (4usize, b)] {
        let (s, c) = phi.sin_cos();
        r[(k, k)] = c;
        r[(k, k + 1)] = s;
        r[(k + 1, k)] = -s;
        r[(k + 1, k + 1)] = c;
    }
    r
}

pub fn rotate(v: &CovarianceMatrix, r: &SquareMatrix) -> SquareMatrix {
    &(r * &v.to_square()) * &r.transpose()
}

pub fn rel_frobenius(a: &SquareMatrix, b: &SquareMatrix) -> f64 {
    (a - b).frobenius_norm() / b.frobenius_norm()
}
