//! Linearised Gaussian fluctuations around the mean-field trajectory.
//!
//! The covariance matrix obeys `dV/dtau = A(tau) V + V A(tau)^T + D`, where
//! the drift `A` is rebuilt from the instantaneous mean values at every
//! Runge-Kutta stage, so mean values and second moments advance as one
//! 72-component system.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::classical::{rhs_array, validate_grid, ClassicalState, ClassicalTrajectory};
use crate::error::{Error, Result};
use crate::linalg::{min_symplectic_eigenvalue, SquareMatrix};
use crate::model::{effective_coupling, effective_detuning, Quadrature as Q, SystemParams};
use crate::ode::{rk4_step, step_plan};

pub type Mat8 = [[f64; 8]; 8];

/// Tolerance below 1/2 tolerated on the smallest symplectic eigenvalue
/// before a snapshot is flagged.
pub const PHYSICALITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftMatrix(pub Mat8);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionMatrix {
    pub diagonal: [f64; 8],
}

/// Symmetrised second moments `(<z_i z_j + z_j z_i>)/2` of the quadrature
/// fluctuations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceMatrix(Mat8);

fn mat8_to_square(m: &Mat8) -> SquareMatrix {
    SquareMatrix::from_fn(8, |i, j| m[i][j])
}

fn square_to_mat8(m: &SquareMatrix) -> Result<Mat8> {
    if m.dim() != 8 {
        return Err(Error::Domain(format!(
            "expected 8x8 matrix, got {}x{}",
            m.dim(),
            m.dim()
        )));
    }
    let mut out = [[0.0; 8]; 8];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = m[(i, j)];
        }
    }
    Ok(out)
}

impl DriftMatrix {
    pub fn to_square(&self) -> SquareMatrix {
        mat8_to_square(&self.0)
    }

    pub fn from_square(m: &SquareMatrix) -> Result<Self> {
        Ok(Self(square_to_mat8(m)?))
    }

    pub fn get(&self, row: Q, col: Q) -> f64 {
        self.0[row.idx()][col.idx()]
    }
}

impl DiffusionMatrix {
    pub fn zero() -> Self {
        Self { diagonal: [0.0; 8] }
    }

    pub fn to_square(&self) -> SquareMatrix {
        SquareMatrix::from_diagonal(&self.diagonal)
    }
}

impl CovarianceMatrix {
    /// Accepts a finite matrix that is symmetric to within 1e-12.
    pub fn new(m: Mat8) -> Result<Self> {
        let mut worst = 0.0f64;
        for i in 0..8 {
            for j in 0..8 {
                if !m[i][j].is_finite() {
                    return Err(Error::Domain(format!(
                        "non-finite covariance entry ({i}, {j})"
                    )));
                }
                worst = worst.max((m[i][j] - m[j][i]).abs());
            }
        }
        if worst > 1e-12 {
            return Err(Error::Domain(format!(
                "covariance asymmetry {worst:e} exceeds 1e-12"
            )));
        }
        Ok(Self(m))
    }

    pub fn from_square(m: &SquareMatrix) -> Result<Self> {
        Self::new(square_to_mat8(m)?)
    }

    pub fn diagonal(d: [f64; 8]) -> Self {
        let mut m = [[0.0; 8]; 8];
        for i in 0..8 {
            m[i][i] = d[i];
        }
        Self(m)
    }

    pub fn vacuum() -> Self {
        Self::diagonal([0.5; 8])
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[i][j]
    }

    pub fn as_array(&self) -> &Mat8 {
        &self.0
    }

    pub fn to_square(&self) -> SquareMatrix {
        mat8_to_square(&self.0)
    }

    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..8 {
            for j in i + 1..8 {
                worst = worst.max((self.0[i][j] - self.0[j][i]).abs());
            }
        }
        worst
    }

    pub fn min_symplectic_eigenvalue(&self) -> Result<f64> {
        min_symplectic_eigenvalue(&self.to_square())
    }

    /// Covariance with subsystems 1 and 2 exchanged.
    pub fn swapped(&self) -> Self {
        let perm = |i: usize| (i + 4) % 8;
        let mut m = [[0.0; 8]; 8];
        for i in 0..8 {
            for j in 0..8 {
                m[i][j] = self.0[perm(i)][perm(j)];
            }
        }
        Self(m)
    }

    /// Upper triangle, row by row (36 entries).
    pub fn upper_triangle(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(36);
        for i in 0..8 {
            for j in i..8 {
                out.push(self.0[i][j]);
            }
        }
        out
    }
}

/// Drift matrix of the linearised fluctuations, with the effective detuning
/// and field-enhanced coupling taken from `state`.
pub fn build_drift(params: &SystemParams, state: &ClassicalState) -> DriftMatrix {
    let (d1, d2) = effective_detuning(params, state.q1s, state.q2s);
    let (g1, g2) = effective_coupling(params, state.alpha1, state.alpha2);
    drift_from_parts(
        params,
        d1,
        d2,
        SQRT_2 * g1.re,
        SQRT_2 * g1.im,
        SQRT_2 * g2.re,
        SQRT_2 * g2.im,
    )
}

#[inline]
fn drift_from_parts(
    p: &SystemParams,
    d1: f64,
    d2: f64,
    re1: f64,
    im1: f64,
    re2: f64,
    im2: f64,
) -> DriftMatrix {
    use Q::*;
    let mut a = [[0.0; 8]; 8];
    let mut set = |r: Q, c: Q, v: f64| a[r.idx()][c.idx()] = v;

    set(Q1, P1, p.omega1);

    set(P1, Q1, -p.omega1);
    set(P1, P1, -p.gamma_m1);
    set(P1, X1, re1);
    set(P1, Y1, im1);
    set(P1, Q2, -p.chi_c);

    set(X1, Q1, -im1);
    set(X1, X1, -p.kappa1);
    set(X1, Y1, d1);
    set(X1, Y2, p.tunnel_j);

    set(Y1, Q1, re1);
    set(Y1, X1, -d1);
    set(Y1, Y1, -p.kappa1);
    set(Y1, X2, -p.tunnel_j);

    set(Q2, P2, p.omega2);

    set(P2, Q1, -p.chi_c);
    set(P2, Q2, -p.omega2);
    set(P2, P2, -p.gamma_m2);
    set(P2, X2, re2);
    set(P2, Y2, im2);

    set(X2, Y1, p.tunnel_j);
    set(X2, Q2, -im2);
    set(X2, X2, -p.kappa2);
    set(X2, Y2, d2);

    set(Y2, X1, -p.tunnel_j);
    set(Y2, Q2, re2);
    set(Y2, X2, -d2);
    set(Y2, Y2, -p.kappa2);

    DriftMatrix(a)
}

#[inline]
fn drift_from_array(p: &SystemParams, y: &[f64]) -> DriftMatrix {
    let d1 = p.delta1 - p.g1 * y[0];
    let d2 = p.delta2 - p.g2 * y[4];
    let s1 = SQRT_2 * p.g1;
    let s2 = SQRT_2 * p.g2;
    drift_from_parts(p, d1, d2, s1 * y[2], s1 * y[3], s2 * y[6], s2 * y[7])
}

/// Markovian noise: `diag(0, gamma_m1 (2 n_th + 1), kappa1, kappa1, 0,
/// gamma_m2 (2 n_th + 1), kappa2, kappa2)`.
pub fn build_diffusion(params: &SystemParams) -> DiffusionMatrix {
    let thermal = 2.0 * params.n_th + 1.0;
    DiffusionMatrix {
        diagonal: [
            0.0,
            params.gamma_m1 * thermal,
            params.kappa1,
            params.kappa1,
            0.0,
            params.gamma_m2 * thermal,
            params.kappa2,
            params.kappa2,
        ],
    }
}

/// `A V + V A^T + D`, computed as `P + P^T + D` with `P = A V` so that the
/// result is exactly symmetric when `V` is.
pub fn lyapunov_rhs(v: &CovarianceMatrix, a: &DriftMatrix, d: &DiffusionMatrix) -> Mat8 {
    lyapunov_rhs_raw(&v.0, &a.0, &d.diagonal)
}

#[inline]
fn lyapunov_rhs_raw(v: &Mat8, a: &Mat8, d: &[f64; 8]) -> Mat8 {
    let mut p = [[0.0; 8]; 8];
    for i in 0..8 {
        for k in 0..8 {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..8 {
                p[i][j] += aik * v[k][j];
            }
        }
    }
    let mut out = [[0.0; 8]; 8];
    for i in 0..8 {
        for j in 0..8 {
            out[i][j] = p[i][j] + p[j][i];
        }
        out[i][i] += d[i];
    }
    out
}

/// Thermal mechanical variances `n_th + 1/2`, vacuum optical variances `1/2`.
pub fn default_initial_covariance(params: &SystemParams) -> CovarianceMatrix {
    let m = params.n_th + 0.5;
    CovarianceMatrix::diagonal([m, m, 0.5, 0.5, m, m, 0.5, 0.5])
}

/// Mean-field trajectory with a covariance snapshot per stored point.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledTrajectory {
    pub classical: ClassicalTrajectory,
    pub covariances: Vec<CovarianceMatrix>,
    /// Smallest symplectic eigenvalue per snapshot; NaN if `V` lost
    /// positive definiteness.
    pub min_symplectic: Vec<f64>,
    /// Set where the smallest symplectic eigenvalue fell below
    /// `1/2 - PHYSICALITY_TOLERANCE`.
    pub physicality_warnings: Vec<bool>,
}

impl CoupledTrajectory {
    pub fn len(&self) -> usize {
        self.covariances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.covariances.is_empty()
    }

    pub fn warning_count(&self) -> usize {
        self.physicality_warnings.iter().filter(|w| **w).count()
    }

    fn push(&mut self, tau: f64, state: ClassicalState, v: CovarianceMatrix) {
        let nu = v.min_symplectic_eigenvalue().unwrap_or(f64::NAN);
        self.classical.push(tau, state);
        self.covariances.push(v);
        self.min_symplectic.push(nu);
        self.physicality_warnings
            .push(!(nu >= 0.5 - PHYSICALITY_TOLERANCE));
    }
}

const COUPLED_DIM: usize = 72;

fn pack(state: &ClassicalState, v: &Mat8) -> [f64; COUPLED_DIM] {
    let mut y = [0.0; COUPLED_DIM];
    y[..8].copy_from_slice(&state.to_array());
    for i in 0..8 {
        y[8 + 8 * i..16 + 8 * i].copy_from_slice(&v[i]);
    }
    y
}

fn unpack_cov(y: &[f64; COUPLED_DIM]) -> Mat8 {
    let mut v = [[0.0; 8]; 8];
    for i in 0..8 {
        v[i].copy_from_slice(&y[8 + 8 * i..16 + 8 * i]);
    }
    v
}

fn symmetrize(v: &mut Mat8) {
    for i in 0..8 {
        for j in i + 1..8 {
            let m = 0.5 * (v[i][j] + v[j][i]);
            v[i][j] = m;
            v[j][i] = m;
        }
    }
}

fn coupled_rhs(y: &[f64; COUPLED_DIM], p: &SystemParams, d: &[f64; 8]) -> [f64; COUPLED_DIM] {
    let mut classical = [0.0; 8];
    classical.copy_from_slice(&y[..8]);
    let dc = rhs_array(&classical, p);
    let a = drift_from_array(p, &y[..8]);
    let dv = lyapunov_rhs_raw(&unpack_cov(y), &a.0, d);
    let mut out = [0.0; COUPLED_DIM];
    out[..8].copy_from_slice(&dc);
    for i in 0..8 {
        out[8 + 8 * i..16 + 8 * i].copy_from_slice(&dv[i]);
    }
    out
}

/// Co-integrates mean values and covariance with one RK4 step over all 72
/// components, symmetrising `V` after each full step.
pub fn integrate_coupled(
    params: &SystemParams,
    initial_state: &ClassicalState,
    initial_v: &CovarianceMatrix,
    t_end: f64,
    dt: f64,
    decimate: usize,
) -> Result<CoupledTrajectory> {
    match integrate_coupled_partial(params, initial_state, initial_v, t_end, dt, decimate)? {
        (traj, None) => Ok(traj),
        (_, Some(tau)) => Err(Error::Diverged { tau }),
    }
}

/// Like [`integrate_coupled`], but on divergence returns the stored prefix
/// together with the failure time.
pub fn integrate_coupled_partial(
    params: &SystemParams,
    initial_state: &ClassicalState,
    initial_v: &CovarianceMatrix,
    t_end: f64,
    dt: f64,
    decimate: usize,
) -> Result<(CoupledTrajectory, Option<f64>)> {
    validate_grid(t_end, dt, decimate)?;
    if !initial_state.is_finite() {
        return Err(Error::Domain("non-finite initial state".into()));
    }
    let nu0 = initial_v.min_symplectic_eigenvalue()?;
    if nu0 < 0.5 - PHYSICALITY_TOLERANCE {
        return Err(Error::Domain(format!(
            "initial covariance is not physical (min symplectic eigenvalue {nu0})"
        )));
    }
    let d = build_diffusion(params).diagonal;
    let (steps, h) = step_plan(t_end, dt);
    let cap = steps / decimate + 2;
    let mut out = CoupledTrajectory {
        classical: ClassicalTrajectory::with_capacity(cap, decimate),
        covariances: Vec::with_capacity(cap),
        min_symplectic: Vec::with_capacity(cap),
        physicality_warnings: Vec::with_capacity(cap),
    };
    out.push(0.0, *initial_state, *initial_v);

    let mut y = pack(initial_state, &initial_v.0);
    for k in 1..=steps {
        y = rk4_step(&y, h, |s| coupled_rhs(s, params, &d));
        let tau = k as f64 * h;
        if !y.iter().all(|x| x.is_finite()) {
            return Ok((out, Some(tau)));
        }
        let mut v = unpack_cov(&y);
        symmetrize(&mut v);
        for i in 0..8 {
            y[8 + 8 * i..16 + 8 * i].copy_from_slice(&v[i]);
        }
        if k % decimate == 0 || k == steps {
            let mut c = [0.0; 8];
            c.copy_from_slice(&y[..8]);
            out.push(tau, ClassicalState::from_array(&c), CovarianceMatrix(v));
        }
    }
    Ok((out, None))
}

/// RK4 integration of `dV/dtau = A V + V A^T + D` with `A` held fixed.
/// Returns `(tau, V)` at every `decimate`-th step and at `t_end`.
pub fn integrate_covariance_frozen(
    a: &DriftMatrix,
    d: &DiffusionMatrix,
    initial_v: &CovarianceMatrix,
    t_end: f64,
    dt: f64,
    decimate: usize,
) -> Result<Vec<(f64, CovarianceMatrix)>> {
    validate_grid(t_end, dt, decimate)?;
    let (steps, h) = step_plan(t_end, dt);
    let mut out = vec![(0.0, *initial_v)];
    let mut y = [0.0; 64];
    for i in 0..8 {
        y[8 * i..8 * i + 8].copy_from_slice(&initial_v.0[i]);
    }
    let to_mat = |y: &[f64; 64]| {
        let mut v = [[0.0; 8]; 8];
        for i in 0..8 {
            v[i].copy_from_slice(&y[8 * i..8 * i + 8]);
        }
        v
    };
    for k in 1..=steps {
        y = rk4_step(&y, h, |s| {
            let dv = lyapunov_rhs_raw(&to_mat(s), &a.0, &d.diagonal);
            let mut o = [0.0; 64];
            for i in 0..8 {
                o[8 * i..8 * i + 8].copy_from_slice(&dv[i]);
            }
            o
        });
        let tau = k as f64 * h;
        let mut v = to_mat(&y);
        if !v.iter().flatten().all(|x| x.is_finite()) {
            return Err(Error::Diverged { tau });
        }
        symmetrize(&mut v);
        for i in 0..8 {
            y[8 * i..8 * i + 8].copy_from_slice(&v[i]);
        }
        if k % decimate == 0 || k == steps {
            out.push((tau, CovarianceMatrix(v)));
        }
    }
    Ok(out)
}
