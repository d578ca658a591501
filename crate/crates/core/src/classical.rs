//! Nonlinear mean-field dynamics of the two driven cavities and their
//! Coulomb-coupled mechanical resonators, plus phase and limit-cycle
//! diagnostics on the resulting trajectories.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{effective_detuning, SystemParams};
use crate::ode::{rk4_step, step_plan};

/// Mean values of the mechanical quadratures and cavity amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ClassicalState {
    pub q1s: f64,
    pub p1s: f64,
    pub alpha1: Complex64,
    pub q2s: f64,
    pub p2s: f64,
    pub alpha2: Complex64,
}

impl ClassicalState {
    /// Flat layout `[q1, p1, re a1, im a1, q2, p2, re a2, im a2]`.
    pub fn to_array(&self) -> [f64; 8] {
        [
            self.q1s,
            self.p1s,
            self.alpha1.re,
            self.alpha1.im,
            self.q2s,
            self.p2s,
            self.alpha2.re,
            self.alpha2.im,
        ]
    }

    pub fn from_array(y: &[f64; 8]) -> Self {
        Self {
            q1s: y[0],
            p1s: y[1],
            alpha1: Complex64::new(y[2], y[3]),
            q2s: y[4],
            p2s: y[5],
            alpha2: Complex64::new(y[6], y[7]),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
    }

    /// Subsystem-exchanged copy.
    pub fn swapped(&self) -> Self {
        Self {
            q1s: self.q2s,
            p1s: self.p2s,
            alpha1: self.alpha2,
            q2s: self.q1s,
            p2s: self.p1s,
            alpha2: self.alpha1,
        }
    }
}

/// Right-hand side of the mean-field equations on the flat layout.
#[inline]
pub(crate) fn rhs_array(y: &[f64; 8], p: &SystemParams) -> [f64; 8] {
    let [q1, p1, a1, b1, q2, p2, a2, b2] = *y;
    let (d1, d2) = effective_detuning(p, q1, q2);
    [
        p.omega1 * p1,
        -p.omega1 * q1 + p.g1 * (a1 * a1 + b1 * b1) - p.chi_c * q2 - p.gamma_m1 * p1,
        -p.kappa1 * a1 + d1 * b1 + p.tunnel_j * b2 + p.drive1,
        -p.kappa1 * b1 - d1 * a1 - p.tunnel_j * a2,
        p.omega2 * p2,
        -p.omega2 * q2 + p.g2 * (a2 * a2 + b2 * b2) - p.chi_c * q1 - p.gamma_m2 * p2,
        -p.kappa2 * a2 + d2 * b2 + p.tunnel_j * b1 + p.drive2,
        -p.kappa2 * b2 - d2 * a2 - p.tunnel_j * a1,
    ]
}

/// Time derivative of the mean values.
pub fn classical_rhs(state: &ClassicalState, params: &SystemParams) -> ClassicalState {
    ClassicalState::from_array(&rhs_array(&state.to_array(), params))
}

/// Decimated mean-field trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<ClassicalState>,
    pub phases: Vec<(f64, f64)>,
    pub decimate: usize,
}

impl ClassicalTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub(crate) fn with_capacity(cap: usize, decimate: usize) -> Self {
        Self {
            times: Vec::with_capacity(cap),
            states: Vec::with_capacity(cap),
            phases: Vec::with_capacity(cap),
            decimate,
        }
    }

    pub(crate) fn push(&mut self, tau: f64, state: ClassicalState) {
        self.times.push(tau);
        self.phases.push(mechanical_phase(&state));
        self.states.push(state);
    }

    /// Unwrapped `phi1 - phi2` at every stored point.
    pub fn unwrapped_phase_difference(&self) -> Vec<f64> {
        unwrap_phase(self.phases.iter().map(|(a, b)| a - b))
    }

    /// First index of the trailing `fraction` of stored samples.
    pub fn window_start(&self, fraction: f64) -> Result<usize> {
        window_start(self.len(), fraction)
    }
}

pub(crate) fn window_start(len: usize, fraction: f64) -> Result<usize> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Domain(format!(
            "window fraction must lie in (0, 1], got {fraction}"
        )));
    }
    if len == 0 {
        return Err(Error::InsufficientData("empty trajectory".into()));
    }
    let count = ((len as f64) * fraction).round().max(1.0) as usize;
    Ok(len - count.min(len))
}

pub(crate) fn validate_grid(t_end: f64, dt: f64, decimate: usize) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Domain(format!("dt must be positive, got {dt}")));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::Domain(format!(
            "t_end must be positive, got {t_end}"
        )));
    }
    if decimate == 0 {
        return Err(Error::Domain("decimate must be at least 1".into()));
    }
    Ok(())
}

/// Integrates the mean-field equations with fixed-step RK4 from `tau = 0`
/// to `t_end`, keeping every `decimate`-th step and always the final one.
pub fn integrate_classical(
    params: &SystemParams,
    initial: &ClassicalState,
    t_end: f64,
    dt: f64,
    decimate: usize,
) -> Result<ClassicalTrajectory> {
    match integrate_classical_partial(params, initial, t_end, dt, decimate)? {
        (traj, None) => Ok(traj),
        (_, Some(tau)) => Err(Error::Diverged { tau }),
    }
}

/// Like [`integrate_classical`], but on divergence returns the stored prefix
/// together with the failure time instead of an error.
pub fn integrate_classical_partial(
    params: &SystemParams,
    initial: &ClassicalState,
    t_end: f64,
    dt: f64,
    decimate: usize,
) -> Result<(ClassicalTrajectory, Option<f64>)> {
    validate_grid(t_end, dt, decimate)?;
    if !initial.is_finite() {
        return Err(Error::Domain("non-finite initial state".into()));
    }
    let (steps, h) = step_plan(t_end, dt);
    let mut traj = ClassicalTrajectory::with_capacity(steps / decimate + 2, decimate);
    let mut y = initial.to_array();
    traj.push(0.0, *initial);
    for k in 1..=steps {
        y = rk4_step(&y, h, |s| rhs_array(s, params));
        let tau = k as f64 * h;
        if !y.iter().all(|v| v.is_finite()) {
            return Ok((traj, Some(tau)));
        }
        if k % decimate == 0 || k == steps {
            traj.push(tau, ClassicalState::from_array(&y));
        }
    }
    Ok((traj, None))
}

/// Phase-space angles `atan2(p_js, q_js)` in `(-pi, pi]`; the origin maps to 0.
pub fn mechanical_phase(state: &ClassicalState) -> (f64, f64) {
    (angle(state.q1s, state.p1s), angle(state.q2s, state.p2s))
}

fn angle(q: f64, p: f64) -> f64 {
    if q == 0.0 && p == 0.0 {
        return 0.0;
    }
    let a = p.atan2(q);
    if a == -PI {
        PI
    } else {
        a
    }
}

/// Wraps to `(-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    let mut y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y <= -PI {
        y += 2.0 * PI;
    }
    y
}

/// Continuous phase built by accumulating principal-value increments.
pub fn unwrap_phase(values: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    let mut prev_raw = 0.0;
    for v in values {
        match out.last() {
            None => out.push(wrap_angle(v)),
            Some(&last) => out.push(last + wrap_angle(v - prev_raw)),
        }
        prev_raw = v;
    }
    out
}

/// Default locking threshold on the circular standard deviation, radians.
pub const LOCK_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseLocking {
    /// Circular mean of `phi1 - phi2`, radians.
    pub mean: f64,
    /// Circular standard deviation `sqrt(-2 ln R)`.
    pub circular_std: f64,
    /// Unwrapped `phi1 - phi2` at the end of the window minus its start.
    pub drift: f64,
    pub locked: bool,
}

/// Phase-difference statistics over the trailing `window_fraction` of `traj`.
pub fn phase_locking_metric(
    traj: &ClassicalTrajectory,
    window_fraction: f64,
    threshold: f64,
) -> Result<PhaseLocking> {
    let start = traj.window_start(window_fraction)?;
    let n = traj.len() - start;
    if n < 10 {
        return Err(Error::InsufficientData(format!(
            "{n} samples in locking window, need 10"
        )));
    }
    let unwrapped = traj.unwrapped_phase_difference();
    let window = &unwrapped[start..];
    let (s, c) = window
        .iter()
        .fold((0.0, 0.0), |(s, c), x| (s + x.sin(), c + x.cos()));
    let (s, c) = (s / n as f64, c / n as f64);
    let r = (s * s + c * c).sqrt().min(1.0);
    let circular_std = if r > 0.0 {
        (-2.0 * r.ln()).sqrt()
    } else {
        f64::INFINITY
    };
    Ok(PhaseLocking {
        mean: s.atan2(c),
        circular_std,
        drift: window[n - 1] - window[0],
        locked: circular_std < threshold,
    })
}

/// Default bound on per-cycle amplitude variation for a closed orbit.
pub const CLOSED_ORBIT_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonatorCycle {
    /// Largest phase-space radius `sqrt(q^2 + p^2)` in the window.
    pub amplitude: f64,
    pub period: f64,
    /// `(max - min) / mean` of the per-cycle radii.
    pub amplitude_variation: f64,
    pub cycles: usize,
    pub closed_orbit: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitCycleSummary {
    pub resonators: [ResonatorCycle; 2],
}

/// Orbit statistics per resonator over the trailing `window_fraction`.
///
/// Cycles are delimited by upward crossings of `q_js` through its window
/// mean, located by linear interpolation.
pub fn limit_cycle_summary(
    traj: &ClassicalTrajectory,
    window_fraction: f64,
) -> Result<LimitCycleSummary> {
    let start = traj.window_start(window_fraction)?;
    let times = &traj.times[start..];
    let states = &traj.states[start..];
    let one = resonator_cycle(times, states.iter().map(|s| (s.q1s, s.p1s)).collect())?;
    let two = resonator_cycle(times, states.iter().map(|s| (s.q2s, s.p2s)).collect())?;
    Ok(LimitCycleSummary {
        resonators: [one, two],
    })
}

fn resonator_cycle(times: &[f64], qp: Vec<(f64, f64)>) -> Result<ResonatorCycle> {
    let n = qp.len();
    if n < 3 {
        return Err(Error::InsufficientData(format!("{n} samples in window")));
    }
    let center = qp.iter().map(|x| x.0).sum::<f64>() / n as f64;
    let mut crossings: Vec<(usize, f64)> = Vec::new();
    for k in 1..n {
        let (a, b) = (qp[k - 1].0 - center, qp[k].0 - center);
        if a < 0.0 && b >= 0.0 {
            let frac = a / (a - b);
            crossings.push((k, times[k - 1] + frac * (times[k] - times[k - 1])));
        }
    }
    if crossings.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "{} full cycles in window, need 3",
            crossings.len().saturating_sub(1)
        )));
    }
    let radii: Vec<f64> = crossings
        .windows(2)
        .map(|w| {
            qp[w[0].0..w[1].0]
                .iter()
                .map(|(q, p)| q.hypot(*p))
                .fold(0.0, f64::max)
        })
        .collect();
    let max = radii.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = radii.iter().cloned().fold(f64::INFINITY, f64::min);
    let mean = radii.iter().sum::<f64>() / radii.len() as f64;
    let variation = if mean > 0.0 {
        (max - min) / mean
    } else {
        f64::INFINITY
    };
    let cycles = crossings.len() - 1;
    let period = (crossings[cycles].1 - crossings[0].1) / cycles as f64;
    let amplitude = qp.iter().map(|(q, p)| q.hypot(*p)).fold(0.0, f64::max);
    Ok(ResonatorCycle {
        amplitude,
        period,
        amplitude_variation: variation,
        cycles,
        closed_orbit: variation < CLOSED_ORBIT_TOLERANCE,
    })
}

/// Zero-lag Pearson correlation of the cavity quadratures
/// `x_j = sqrt(2) Re(alpha_j)` over the trailing window.
pub fn cavity_cross_correlation(traj: &ClassicalTrajectory, window_fraction: f64) -> Result<f64> {
    let start = traj.window_start(window_fraction)?;
    let x1: Vec<f64> = traj.states[start..].iter().map(|s| s.alpha1.re).collect();
    let x2: Vec<f64> = traj.states[start..].iter().map(|s| s.alpha2.re).collect();
    pearson(&x1, &x2).ok_or_else(|| {
        Error::InsufficientData("cavity quadrature has zero variance in window".into())
    })
}

pub(crate) fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len() as f64;
    if a.len() < 2 {
        return None;
    }
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        return None;
    }
    Some(sab / (saa * sbb).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Written term by term from the mean-field equations in complex form,
    /// independently of `rhs_array`.
    fn reference_rhs(s: &ClassicalState, p: &SystemParams) -> ClassicalState {
        let i = Complex64::i();
        let d1 = p.delta1 - p.g1 * s.q1s;
        let d2 = p.delta2 - p.g2 * s.q2s;
        ClassicalState {
            q1s: p.omega1 * s.p1s,
            p1s: -p.omega1 * s.q1s + p.g1 * s.alpha1.norm_sqr()
                - p.chi_c * s.q2s
                - p.gamma_m1 * s.p1s,
            alpha1: -(i * d1 + p.kappa1) * s.alpha1 - i * p.tunnel_j * s.alpha2 + p.drive1,
            q2s: p.omega2 * s.p2s,
            p2s: -p.omega2 * s.q2s + p.g2 * s.alpha2.norm_sqr()
                - p.chi_c * s.q1s
                - p.gamma_m2 * s.p2s,
            alpha2: -(i * d2 + p.kappa2) * s.alpha2 - i * p.tunnel_j * s.alpha1 + p.drive2,
        }
    }

    #[test]
    fn zero_state_is_fixed_without_drive() {
        let mut p = SystemParams::default();
        p.drive1 = 0.0;
        p.drive2 = 0.0;
        let d = classical_rhs(&ClassicalState::default(), &p);
        assert_eq!(d, ClassicalState::default());
    }

    #[test]
    fn single_cavity_term() {
        let mut p = SystemParams::decoupled();
        p.delta1 = -1.0;
        p.kappa1 = 0.15;
        let s = ClassicalState {
            alpha1: Complex64::new(1.0, 0.0),
            ..Default::default()
        };
        let d = classical_rhs(&s, &p);
        assert!((d.alpha1 - Complex64::new(-0.15, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn matches_reference_expression() {
        let p = SystemParams::default();
        let states = [
            ClassicalState {
                q1s: 13.7,
                p1s: -41.2,
                alpha1: Complex64::new(20.1, 140.3),
                q2s: -7.9,
                p2s: 88.0,
                alpha2: Complex64::new(-30.4, 101.9),
            },
            ClassicalState {
                q1s: -250.0,
                p1s: 3.0,
                alpha1: Complex64::new(-1.0, 0.5),
                q2s: 301.5,
                p2s: -0.25,
                alpha2: Complex64::new(75.0, -12.0),
            },
        ];
        for s in &states {
            let a = classical_rhs(s, &p).to_array();
            let b = reference_rhs(s, &p).to_array();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() <= 1e-14 * y.abs().max(1.0), "{x} vs {y}");
            }
        }
    }

    #[test]
    fn phase_quadrants() {
        let ph = |q, p| {
            mechanical_phase(&ClassicalState {
                q1s: q,
                p1s: p,
                ..Default::default()
            })
            .0
        };
        assert_eq!(ph(1.0, 0.0), 0.0);
        assert!((ph(0.0, 1.0) - PI / 2.0).abs() < 1e-15);
        assert!((ph(-1.0, -1.0) + 3.0 * PI / 4.0).abs() < 1e-15);
        assert_eq!(ph(0.0, 0.0), 0.0);
        assert_eq!(ph(-1.0, -0.0), PI);
    }

    #[test]
    fn unwrap_removes_jumps() {
        let raw: Vec<f64> = (0..200).map(|k| wrap_angle(0.1 * k as f64)).collect();
        let u = unwrap_phase(raw);
        for (k, x) in u.iter().enumerate() {
            assert!((x - 0.1 * k as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn decoupled_cavity_relaxes_to_fixed_point() {
        let mut p = SystemParams::default();
        p.g1 = 0.0;
        p.g2 = 0.0;
        p.tunnel_j = 0.0;
        p.chi_c = 0.0;
        let t_end = 10.0 / p.kappa1 * 2.0;
        let traj = integrate_classical(&p, &ClassicalState::default(), t_end, 1e-2, 10).unwrap();
        let last = traj.states.last().unwrap();
        let fixed1 = Complex64::new(p.drive1, 0.0) / Complex64::new(p.kappa1, p.delta1);
        let fixed2 = Complex64::new(p.drive2, 0.0) / Complex64::new(p.kappa2, p.delta2);
        let d = classical_rhs(last, &p);
        assert!((last.alpha1 - fixed1).norm() < 1e-8 * fixed1.norm() * 10.0);
        assert!((last.alpha2 - fixed2).norm() < 1e-8 * fixed2.norm() * 10.0);
        assert!(d.alpha1.norm() < 1e-8 * 150.0 && d.alpha2.norm() < 1e-8 * 150.0);
    }

    #[test]
    fn trajectory_grid_and_final_point() {
        let p = SystemParams::default();
        let traj = integrate_classical(&p, &ClassicalState::default(), 1.05, 0.01, 10).unwrap();
        assert_eq!(traj.len(), 12);
        assert!((traj.times.last().unwrap() - 1.05).abs() < 1e-12);
        assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(traj.phases.len(), traj.states.len());
    }

    #[test]
    fn bad_grid_rejected() {
        let p = SystemParams::default();
        let s = ClassicalState::default();
        assert!(integrate_classical(&p, &s, 1.0, 0.0, 1).is_err());
        assert!(integrate_classical(&p, &s, -1.0, 0.1, 1).is_err());
        assert!(integrate_classical(&p, &s, 1.0, 0.1, 0).is_err());
    }

    #[test]
    fn divergence_reports_time() {
        let mut p = SystemParams::decoupled();
        p.gamma_m1 = -50.0; // anti-damped, blows up
        let s = ClassicalState {
            p1s: 1.0,
            ..Default::default()
        };
        match integrate_classical(&p, &s, 100.0, 0.01, 1) {
            Err(Error::Diverged { tau }) => assert!(tau > 0.0 && tau < 100.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn free_ringdown_period() {
        let mut p = SystemParams::decoupled();
        p.omega2 = 1.3;
        let s = ClassicalState {
            q1s: 1.0,
            q2s: 1.0,
            ..Default::default()
        };
        let traj = integrate_classical(&p, &s, 200.0, 1e-3, 20).unwrap();
        let lc = limit_cycle_summary(&traj, 0.5).unwrap();
        for (r, w) in lc.resonators.iter().zip([1.0, 1.3]) {
            let exact = 2.0 * PI / w;
            assert!(
                (r.period - exact).abs() < 0.01 * exact,
                "{} vs {exact}",
                r.period
            );
            assert!(r.closed_orbit);
        }
    }

    #[test]
    fn damped_ringdown_is_not_closed() {
        let mut p = SystemParams::decoupled();
        p.gamma_m1 = 0.05;
        p.gamma_m2 = 0.05;
        let s = ClassicalState {
            q1s: 1.0,
            q2s: 0.5,
            ..Default::default()
        };
        let traj = integrate_classical(&p, &s, 150.0, 1e-2, 2).unwrap();
        let lc = limit_cycle_summary(&traj, 0.5).unwrap();
        for r in lc.resonators {
            assert!(!r.closed_orbit);
            assert!(r.amplitude < 1.0);
        }
    }

    #[test]
    fn too_short_window_is_insufficient() {
        let p = SystemParams::decoupled();
        let s = ClassicalState {
            q1s: 1.0,
            q2s: 1.0,
            ..Default::default()
        };
        let traj = integrate_classical(&p, &s, 5.0, 1e-2, 1).unwrap();
        assert!(matches!(
            limit_cycle_summary(&traj, 0.5),
            Err(Error::InsufficientData(_))
        ));
        let tiny = integrate_classical(&p, &s, 0.05, 1e-2, 1).unwrap();
        assert!(matches!(
            phase_locking_metric(&tiny, 1.0, LOCK_THRESHOLD),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn identical_subsystems_lock_at_zero() {
        let mut p = SystemParams::default();
        p.omega2 = 1.0;
        p.delta2 = p.delta1;
        let traj = integrate_classical(&p, &ClassicalState::default(), 200.0, 1e-2, 10).unwrap();
        for s in &traj.states {
            assert_eq!(s.q1s, s.q2s);
            assert_eq!(s.alpha1, s.alpha2);
        }
        let m = phase_locking_metric(&traj, 0.5, LOCK_THRESHOLD).unwrap();
        assert!(m.locked);
        assert_eq!(m.mean, 0.0);
        assert_eq!(m.drift, 0.0);
    }

    #[test]
    fn pearson_basics() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert!((pearson(&a, &[2.0, 4.0, 6.0, 8.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson(&a, &[-1.0, -2.0, -3.0, -4.0]).unwrap() + 1.0).abs() < 1e-15);
        assert!(pearson(&a, &[1.0; 4]).is_none());
    }
}
