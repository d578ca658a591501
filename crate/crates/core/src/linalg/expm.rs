//! Matrix exponential by scaling and squaring with a diagonal Padé core.
//!
//! Degree selection and the backward-error thresholds follow Higham's 2005
//! scheme: the lowest of the degrees 3, 5, 7, 9 whose threshold covers the
//! one-norm is used directly, otherwise the matrix is scaled by `2^-s` into
//! the degree-13 region and the result squared `s` times.

use super::SquareMatrix;

const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA_13: f64 = 5.371920351148152;

const PADE_3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE_5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE_7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE_9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE_13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Returns `exp(a * t)`.
pub fn matrix_exp(a: &SquareMatrix, t: f64) -> SquareMatrix {
    let at = a.scale(t);
    let n = at.dim();
    let norm = at.norm_one();
    if norm == 0.0 {
        return SquareMatrix::identity(n);
    }

    for &(m, theta) in &THETA {
        if norm <= theta {
            let coeffs: &[f64] = match m {
                3 => &PADE_3,
                5 => &PADE_5,
                7 => &PADE_7,
                _ => &PADE_9,
            };
            return pade_low(&at, coeffs);
        }
    }

    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let scaled = at.scale(2f64.powi(-s));
    let mut x = pade_13(&scaled);
    for _ in 0..s {
        x = &x * &x;
    }
    x
}

fn pade_low(a: &SquareMatrix, b: &[f64]) -> SquareMatrix {
    let n = a.dim();
    let a2 = a * a;
    let mut u_inner = SquareMatrix::identity(n).scale(b[1]);
    let mut v = SquareMatrix::identity(n).scale(b[0]);
    let mut power = SquareMatrix::identity(n);
    let degree = b.len() - 1;
    for k in 1..=degree / 2 {
        power = &power * &a2;
        v = &v + &power.scale(b[2 * k]);
        u_inner = &u_inner + &power.scale(b[2 * k + 1]);
    }
    let u = a * &u_inner;
    rational(&u, &v)
}

fn pade_13(a: &SquareMatrix) -> SquareMatrix {
    let b = &PADE_13;
    let n = a.dim();
    let id = SquareMatrix::identity(n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let u_hi = &(&a6.scale(b[13]) + &a4.scale(b[11])) + &a2.scale(b[9]);
    let u_lo = &(&(&a6.scale(b[7]) + &a4.scale(b[5])) + &a2.scale(b[3])) + &id.scale(b[1]);
    let u = a * &(&(&a6 * &u_hi) + &u_lo);

    let v_hi = &(&a6.scale(b[12]) + &a4.scale(b[10])) + &a2.scale(b[8]);
    let v_lo = &(&(&a6.scale(b[6]) + &a4.scale(b[4])) + &a2.scale(b[2])) + &id.scale(b[0]);
    let v = &(&a6 * &v_hi) + &v_lo;
    rational(&u, &v)
}

fn rational(u: &SquareMatrix, v: &SquareMatrix) -> SquareMatrix {
    let p = v + u;
    let q = v - u;
    // q is well conditioned inside the Padé thresholds
    q.solve_matrix(&p).expect("Padé denominator singular")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_err(a: &SquareMatrix, b: &SquareMatrix) -> f64 {
        (a - b).frobenius_norm() / b.frobenius_norm()
    }

    #[test]
    fn zero_gives_identity() {
        let e = matrix_exp(&SquareMatrix::zeros(4), 3.0);
        assert_eq!(e, SquareMatrix::identity(4));
    }

    #[test]
    fn diagonal() {
        for &(a, b) in &[(0.001, -0.002), (0.3, -1.2), (2.0, -4.5), (30.0, -50.0)] {
            let e = matrix_exp(&SquareMatrix::from_diagonal(&[a, b]), 1.0);
            assert!((e[(0, 0)] - a.exp()).abs() <= 1e-12 * a.exp());
            assert!((e[(1, 1)] - b.exp()).abs() <= 1e-12 * b.exp().max(1e-300));
            assert_eq!(e[(0, 1)], 0.0);
        }
    }

    #[test]
    fn rotation_generator() {
        let w = 1.3;
        let a = SquareMatrix::from_rows(&[[0.0, w], [-w, 0.0]]).unwrap();
        for &t in &[0.01, 0.5, 2.0, 17.0, 400.0] {
            let e = matrix_exp(&a, t);
            let (s, c) = (w * t).sin_cos();
            let exact = SquareMatrix::from_rows(&[[c, s], [-s, c]]).unwrap();
            assert!(rel_err(&e, &exact) < 1e-10, "t = {t}");
        }
    }

    #[test]
    fn nilpotent_is_exact_polynomial() {
        let a =
            SquareMatrix::from_rows(&[[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]]).unwrap();
        let e = matrix_exp(&a, 2.0);
        let exact =
            SquareMatrix::from_rows(&[[1.0, 2.0, 2.0], [0.0, 1.0, 2.0], [0.0, 0.0, 1.0]]).unwrap();
        assert!(rel_err(&e, &exact) < 1e-14);
    }
}
