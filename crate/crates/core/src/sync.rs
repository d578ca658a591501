//! Quantum synchronisation figures of merit evaluated on covariance
//! snapshots.
//!
//! All three measures read only the mechanical block (indices 0, 1, 4, 5)
//! of the covariance matrix. Written with 1-based labels 1 = q1, 2 = p1,
//! 5 = q2, 6 = p2:
//!
//! * complete: `[ (V11 + V22 + V55 + V66 - 2 V15 - 2 V26) / 2 ]^-1`
//! * phi-shifted: as above with `+2 V25 sin(phi) - 2 V16 sin(phi)
//!   - 2 V26 cos(phi) - 2 V15 cos(phi)` in place of the cross terms
//! * phase: `1 / (2 <p'_-^2>)` where `p'_j = p_j cos(phi_j) - q_j sin(phi_j)`

use serde::{Deserialize, Serialize};

use crate::classical::window_start;
use crate::error::{Error, Result};
use crate::fluctuation::{CoupledTrajectory, CovarianceMatrix};

/// Denominators with magnitude below this map to `+inf`.
pub const DENOMINATOR_FLOOR: f64 = 1e-12;

const Q1: usize = 0;
const P1: usize = 1;
const Q2: usize = 4;
const P2: usize = 5;

fn invert(den: f64) -> Result<f64> {
    if den.abs() < DENOMINATOR_FLOOR {
        Ok(f64::INFINITY)
    } else if den < 0.0 || den.is_nan() {
        Err(Error::NonPhysicalCovariance(den))
    } else {
        Ok(1.0 / den)
    }
}

/// Complete synchronisation `<q_-^2 + p_-^2>^-1`.
pub fn sync_complete(v: &CovarianceMatrix) -> Result<f64> {
    let g = |i, j| v.get(i, j);
    let den =
        0.5 * (g(Q1, Q1) + g(P1, P1) + g(Q2, Q2) + g(P2, P2) - 2.0 * g(Q1, Q2) - 2.0 * g(P1, P2));
    invert(den)
}

/// Complete synchronisation up to a phase-space rotation `phi` of the
/// second resonator.
pub fn sync_phi(v: &CovarianceMatrix, phi: f64) -> Result<f64> {
    let g = |i, j| v.get(i, j);
    let (s, c) = phi.sin_cos();
    // Same summation order as `sync_complete`, so phi = 0 reproduces it exactly.
    let den = 0.5
        * (g(Q1, Q1) + g(P1, P1) + g(Q2, Q2) + g(P2, P2)
            - 2.0 * g(Q1, Q2) * c
            - 2.0 * g(P1, P2) * c
            + 2.0 * g(P1, Q2) * s
            - 2.0 * g(Q1, P2) * s);
    invert(den)
}

/// Phase synchronisation with each resonator rotated into the frame of its
/// classical phase.
pub fn sync_phase(v: &CovarianceMatrix, phi1: f64, phi2: f64) -> Result<f64> {
    let g = |i, j| v.get(i, j);
    let (s1, c1) = phi1.sin_cos();
    let (s2, c2) = phi2.sin_cos();
    let den = g(Q1, Q1) * s1 * s1 + g(P1, P1) * c1 * c1 + g(Q2, Q2) * s2 * s2 + g(P2, P2) * c2 * c2
        - 2.0 * g(Q1, P1) * c1 * s1
        - 2.0 * g(Q1, Q2) * s1 * s2
        + 2.0 * g(Q1, P2) * s1 * c2
        + 2.0 * g(P1, Q2) * c1 * s2
        - 2.0 * g(P1, P2) * c1 * c2
        - 2.0 * g(Q2, P2) * c2 * s2;
    invert(den)
}

/// How the angle in [`sync_phi`] is chosen per sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "value", rename_all = "snake_case")]
pub enum PhiMode {
    /// A constant angle, radians.
    Fixed(f64),
    /// The instantaneous classical difference `phi1 - phi2`.
    ClassicalDifference,
    /// Each resonator rotated into its own classical frame, i.e. the
    /// angle `phi2 - phi1`.
    PerResonator,
}

impl Default for PhiMode {
    fn default() -> Self {
        PhiMode::ClassicalDifference
    }
}

impl PhiMode {
    pub fn angle(&self, phi1: f64, phi2: f64) -> f64 {
        match *self {
            PhiMode::Fixed(phi) => phi,
            PhiMode::ClassicalDifference => phi1 - phi2,
            PhiMode::PerResonator => phi2 - phi1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyncSample {
    pub tau: f64,
    pub s_c: f64,
    pub s_phi: f64,
    pub s_p: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub dphi_unwrapped: f64,
    pub min_symplectic_eig: f64,
}

impl SyncSample {
    /// True when any measure saturated to `+inf`.
    pub fn saturated(&self) -> bool {
        self.s_c.is_infinite() || self.s_phi.is_infinite() || self.s_p.is_infinite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowStats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl WindowStats {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Self {
        let (mut sum, mut n, mut min, mut max) = (0.0, 0usize, f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            sum += v;
            n += 1;
            min = min.min(v);
            max = max.max(v);
        }
        Self {
            mean: sum / n as f64,
            min,
            max,
        }
    }

    pub fn max_min_ratio(&self) -> f64 {
        self.max / self.min
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyAggregates {
    pub window_fraction: f64,
    pub s_c: WindowStats,
    pub s_phi: WindowStats,
    pub s_p: WindowStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyncSeries {
    pub samples: Vec<SyncSample>,
    pub steady: SteadyAggregates,
}

impl SyncSeries {
    /// Aggregates over a different trailing window.
    pub fn aggregate(&self, window_fraction: f64) -> Result<SteadyAggregates> {
        aggregate(&self.samples, window_fraction)
    }
}

fn aggregate(samples: &[SyncSample], window_fraction: f64) -> Result<SteadyAggregates> {
    let w = &samples[window_start(samples.len(), window_fraction)?..];
    Ok(SteadyAggregates {
        window_fraction,
        s_c: WindowStats::of(w.iter().map(|s| s.s_c)),
        s_phi: WindowStats::of(w.iter().map(|s| s.s_phi)),
        s_p: WindowStats::of(w.iter().map(|s| s.s_p)),
    })
}

/// Evaluates every measure at every snapshot. `S_p` always uses the
/// instantaneous classical phases.
pub fn sync_series(
    traj: &CoupledTrajectory,
    phi_mode: PhiMode,
    window_fraction: f64,
) -> Result<SyncSeries> {
    if traj.is_empty() {
        return Err(Error::InsufficientData("empty trajectory".into()));
    }
    let dphi = traj.classical.unwrapped_phase_difference();
    let mut samples = Vec::with_capacity(traj.len());
    for k in 0..traj.len() {
        let v = &traj.covariances[k];
        let (phi1, phi2) = traj.classical.phases[k];
        samples.push(SyncSample {
            tau: traj.classical.times[k],
            s_c: sync_complete(v)?,
            s_phi: sync_phi(v, phi_mode.angle(phi1, phi2))?,
            s_p: sync_phase(v, phi1, phi2)?,
            phi1,
            phi2,
            dphi_unwrapped: dphi[k],
            min_symplectic_eig: traj.min_symplectic[k],
        });
    }
    let steady = aggregate(&samples, window_fraction)?;
    Ok(SyncSeries { samples, steady })
}
