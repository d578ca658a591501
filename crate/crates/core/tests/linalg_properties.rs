use num_complex::Complex64;
use optosync::linalg::{
    eigenvalues, lyapunov_residual, matrix_exp, solve_algebraic_lyapunov, spectral_abscissa,
    symplectic_eigenvalues, SquareMatrix, SymplecticForm,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> SquareMatrix {
    SquareMatrix::from_fn(n, |_, _| rng.gen_range(-scale..scale))
}

/// Skew part minus a positive-definite part: always Hurwitz.
fn random_hurwitz(rng: &mut ChaCha8Rng, n: usize) -> SquareMatrix {
    let b = random_matrix(rng, n, 1.0);
    let m = random_matrix(rng, n, 1.0);
    let skew = &b - &b.transpose();
    let spd = &(&m * &m.transpose()) + &SquareMatrix::identity(n).scale(0.05);
    &skew - &spd
}

fn rel(a: &SquareMatrix, b: &SquareMatrix) -> f64 {
    (a - b).frobenius_norm() / b.frobenius_norm().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exponential_is_additive_in_time(seed in any::<u64>(), s in 0.0..2.0f64, t in 0.0..2.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_matrix(&mut rng, 8, 1.0);
        let lhs = matrix_exp(&a, s + t);
        let rhs = &matrix_exp(&a, s) * &matrix_exp(&a, t);
        prop_assert!(rel(&lhs, &rhs) < 1e-11, "{}", rel(&lhs, &rhs));
    }

    #[test]
    fn exponential_inverse(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_matrix(&mut rng, 8, 2.0);
        let p = &matrix_exp(&a, 1.0) * &matrix_exp(&a, -1.0);
        prop_assert!(rel(&p, &SquareMatrix::identity(8)) < 1e-10);
    }

    #[test]
    fn exponential_derivative(seed in any::<u64>(), t in 0.1..1.5f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_matrix(&mut rng, 6, 1.0);
        let h = 1e-4;
        let fd = (&matrix_exp(&a, t + h) - &matrix_exp(&a, t - h)).scale(0.5 / h);
        let exact = &a * &matrix_exp(&a, t);
        prop_assert!(rel(&fd, &exact) < 1e-7, "{}", rel(&fd, &exact));
    }

    #[test]
    fn eigenvalue_power_sums_match_traces(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_matrix(&mut rng, 8, 1.0);
        let a2 = &a * &a;
        let ev = eigenvalues(&a).unwrap();
        prop_assert_eq!(ev.len(), 8);
        let tr1: f64 = (0..8).map(|i| a[(i, i)]).sum();
        let tr2: f64 = (0..8).map(|i| a2[(i, i)]).sum();
        let s1: Complex64 = ev.iter().sum();
        let s2: Complex64 = ev.iter().map(|l| l * l).sum();
        prop_assert!((s1.re - tr1).abs() < 1e-10 && s1.im.abs() < 1e-10);
        prop_assert!((s2.re - tr2).abs() < 1e-9 && s2.im.abs() < 1e-9);
    }

    #[test]
    fn lyapunov_solution_satisfies_equation(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_hurwitz(&mut rng, 8);
        let m = random_matrix(&mut rng, 8, 1.0);
        let d = &m * &m.transpose();
        let v = solve_algebraic_lyapunov(&a, &d).unwrap();
        let bound = 1e-10 * (a.frobenius_norm() * v.frobenius_norm() + d.frobenius_norm());
        prop_assert!(lyapunov_residual(&a, &v, &d) <= bound);
        prop_assert!(v.asymmetry() <= 1e-12 * v.max_abs());
        prop_assert!(v.symmetrized().cholesky().is_some() || d.cholesky().is_none());
    }

    #[test]
    fn symplectic_eigenvalues_survive_symplectic_congruence(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut nu: Vec<f64> = (0..4).map(|_| rng.gen_range(0.5..3.0)).collect();
        let mut diag = Vec::new();
        for &x in &nu {
            diag.extend([x, x]);
        }
        let h = random_matrix(&mut rng, 8, 0.4);
        let h = (&h + &h.transpose()).scale(0.5);
        let s = matrix_exp(&(SymplecticForm::new(4).matrix() * &h), 1.0);
        let v = &(&s * &SquareMatrix::from_diagonal(&diag)) * &s.transpose();
        let got = symplectic_eigenvalues(&v.symmetrized()).unwrap();
        nu.sort_by(f64::total_cmp);
        for (g, e) in got.iter().zip(&nu) {
            prop_assert!((g - e).abs() < 1e-9 * e, "{} vs {}", g, e);
        }
    }
}

#[test]
fn lyapunov_solution_is_the_stationary_integral() {
    // For Hurwitz A, V = int_0^inf exp(As) D exp(A^T s) ds. Approximate the
    // integral with composite Simpson over [0, T] using the exponential.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let a = random_hurwitz(&mut rng, 4);
    let m = random_matrix(&mut rng, 4, 1.0);
    let d = &m * &m.transpose();
    let v = solve_algebraic_lyapunov(&a, &d).unwrap();
    let decay = -spectral_abscissa(&a).unwrap();
    let t_max = 40.0 / decay;
    let n = 4000;
    let h = t_max / n as f64;
    let mut integral = SquareMatrix::zeros(4);
    for k in 0..=n {
        let e = matrix_exp(&a, k as f64 * h);
        let f = &(&e * &d) * &e.transpose();
        let w = if k == 0 || k == n {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        integral = &integral + &f.scale(w * h / 3.0);
    }
    assert!(rel(&integral, &v) < 1e-8, "{}", rel(&integral, &v));
}

#[test]
fn unstable_drift_rejected() {
    let a = SquareMatrix::from_rows(&[[0.1, 1.0], [-1.0, 0.1]]).unwrap();
    assert!(solve_algebraic_lyapunov(&a, &SquareMatrix::identity(2)).is_err());
}
