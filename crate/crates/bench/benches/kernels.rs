use criterion::{criterion_group, criterion_main, Criterion};
use optosync::linalg::{
    eigenvalues, matrix_exp, solve_algebraic_lyapunov, symplectic_eigenvalues, SquareMatrix,
};
use optosync::{
    build_diffusion, build_drift, default_initial_covariance, integrate_coupled, ClassicalState,
    SystemParams,
};
use std::hint::black_box;

fn limit_cycle_state() -> ClassicalState {
    ClassicalState::from_array(&[3000.0, -2500.0, 20.0, 140.0, 2900.0, -2600.0, 25.0, 130.0])
}

fn kernels(c: &mut Criterion) {
    let p = SystemParams::default();
    let a = build_drift(&p, &limit_cycle_state());
    let a_sq = SquareMatrix::from_fn(8, |i, j| a.0[i][j]);
    let v = default_initial_covariance(&p).to_square();

    c.bench_function("matrix_exp 8x8", |b| {
        b.iter(|| matrix_exp(black_box(&a_sq), 1.0))
    });
    c.bench_function("eigenvalues 8x8", |b| {
        b.iter(|| eigenvalues(black_box(&a_sq)).unwrap())
    });
    c.bench_function("symplectic_eigenvalues 8x8", |b| {
        b.iter(|| symplectic_eigenvalues(black_box(&v)).unwrap())
    });

    let mut red = p;
    red.delta1 = 1.0;
    red.delta2 = red.omega2;
    red.drive1 = 10.0;
    red.drive2 = 10.0;
    let stable = build_drift(&red, &ClassicalState::default());
    let stable = SquareMatrix::from_fn(8, |i, j| stable.0[i][j]);
    let d = build_diffusion(&red).to_square();
    c.bench_function("algebraic lyapunov 8x8", |b| {
        b.iter(|| solve_algebraic_lyapunov(black_box(&stable), &d))
    });

    let v0 = default_initial_covariance(&p);
    c.bench_function("coupled integration 1000 steps", |b| {
        b.iter(|| integrate_coupled(&p, &ClassicalState::default(), &v0, 1.0, 1e-3, 1000).unwrap())
    });
}

criterion_group!(benches, kernels);
criterion_main!(benches);
