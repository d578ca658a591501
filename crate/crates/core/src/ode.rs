//! Fixed-step classical Runge-Kutta on flat state arrays.

/// Step count and step size that land exactly on `t_end`.
pub(crate) fn step_plan(t_end: f64, dt: f64) -> (usize, f64) {
    let ratio = t_end / dt;
    let rounded = ratio.round();
    let n = if (ratio - rounded).abs() <= 1e-9 * ratio.max(1.0) {
        rounded
    } else {
        ratio.ceil()
    };
    let n = (n as usize).max(1);
    (n, t_end / n as f64)
}

#[inline]
pub(crate) fn rk4_step<const N: usize>(
    y: &[f64; N],
    h: f64,
    mut f: impl FnMut(&[f64; N]) -> [f64; N],
) -> [f64; N] {
    let k1 = f(y);
    let k2 = f(&axpy(y, 0.5 * h, &k1));
    let k3 = f(&axpy(y, 0.5 * h, &k2));
    let k4 = f(&axpy(y, h, &k3));
    let mut out = *y;
    let w = h / 6.0;
    for i in 0..N {
        out[i] += w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

#[inline]
fn axpy<const N: usize>(y: &[f64; N], a: f64, k: &[f64; N]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] += a * k[i];
    }
    out
}
