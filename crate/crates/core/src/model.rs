//! Parameter set, unit convention and derived couplings.
//!
//! Every rate and drive is expressed in units of the first mechanical
//! frequency, so `omega1 == 1` and the time variable is `tau = omega1 * t`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of each fluctuation quadrature in every 8x8 matrix and 8-vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(usize)]
pub enum Quadrature {
    Q1 = 0,
    P1 = 1,
    X1 = 2,
    Y1 = 3,
    Q2 = 4,
    P2 = 5,
    X2 = 6,
    Y2 = 7,
}

impl Quadrature {
    pub const ALL: [Quadrature; 8] = [
        Quadrature::Q1,
        Quadrature::P1,
        Quadrature::X1,
        Quadrature::Y1,
        Quadrature::Q2,
        Quadrature::P2,
        Quadrature::X2,
        Quadrature::Y2,
    ];
    pub const MECHANICAL: [usize; 4] = [0, 1, 4, 5];
    pub const OPTICAL: [usize; 4] = [2, 3, 6, 7];

    #[inline]
    pub const fn idx(self) -> usize {
        self as usize
    }

    pub const fn label(self) -> &'static str {
        match self {
            Quadrature::Q1 => "q1",
            Quadrature::P1 => "p1",
            Quadrature::X1 => "x1",
            Quadrature::Y1 => "y1",
            Quadrature::Q2 => "q2",
            Quadrature::P2 => "p2",
            Quadrature::X2 => "x2",
            Quadrature::Y2 => "y2",
        }
    }
}

/// Physical parameters, all in units of `omega1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    pub omega1: f64,
    pub omega2: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub g1: f64,
    pub g2: f64,
    pub gamma_m1: f64,
    pub gamma_m2: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub tunnel_j: f64,
    pub chi_c: f64,
    pub drive1: f64,
    pub drive2: f64,
    pub n_th: f64,
}

impl Default for SystemParams {
    /// The blue-detuned base parameter set used throughout the figures,
    /// with `chi_c = 0.4`.
    fn default() -> Self {
        let omega2 = 1.005;
        Self {
            omega1: 1.0,
            omega2,
            delta1: -1.0,
            delta2: -omega2,
            g1: 1e-3,
            g2: 1e-3,
            gamma_m1: 1e-3,
            gamma_m2: 1e-3,
            kappa1: 0.15,
            kappa2: 0.15,
            tunnel_j: 0.02,
            chi_c: 0.4,
            drive1: 150.0,
            drive2: 150.0,
            n_th: 0.0,
        }
    }
}

impl SystemParams {
    pub const FIELD_NAMES: [&'static str; 15] = [
        "omega1", "omega2", "delta1", "delta2", "g1", "g2", "gamma_m1", "gamma_m2", "kappa1",
        "kappa2", "tunnel_j", "chi_c", "drive1", "drive2", "n_th",
    ];

    /// Everything switched off: free, undamped, undriven resonators.
    pub fn decoupled() -> Self {
        Self {
            omega1: 1.0,
            omega2: 1.0,
            delta1: 0.0,
            delta2: 0.0,
            g1: 0.0,
            g2: 0.0,
            gamma_m1: 0.0,
            gamma_m2: 0.0,
            kappa1: 0.0,
            kappa2: 0.0,
            tunnel_j: 0.0,
            chi_c: 0.0,
            drive1: 0.0,
            drive2: 0.0,
            n_th: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for name in Self::FIELD_NAMES {
            let v = self.get(name).unwrap();
            if !v.is_finite() {
                return Err(Error::Config(format!("`{name}` must be finite, got {v}")));
            }
        }
        if self.omega1 != 1.0 {
            return Err(Error::Config(format!(
                "`omega1` is the frequency unit and must be exactly 1, got {}",
                self.omega1
            )));
        }
        for (name, v) in [
            ("omega2", self.omega2),
            ("kappa1", self.kappa1),
            ("kappa2", self.kappa2),
            ("gamma_m1", self.gamma_m1),
            ("gamma_m2", self.gamma_m2),
            ("n_th", self.n_th),
        ] {
            if v < 0.0 {
                return Err(Error::Config(format!(
                    "`{name}` must be non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "omega1" => self.omega1,
            "omega2" => self.omega2,
            "delta1" => self.delta1,
            "delta2" => self.delta2,
            "g1" => self.g1,
            "g2" => self.g2,
            "gamma_m1" => self.gamma_m1,
            "gamma_m2" => self.gamma_m2,
            "kappa1" => self.kappa1,
            "kappa2" => self.kappa2,
            "tunnel_j" => self.tunnel_j,
            "chi_c" => self.chi_c,
            "drive1" => self.drive1,
            "drive2" => self.drive2,
            "n_th" => self.n_th,
            _ => return None,
        })
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let slot = match name {
            "omega1" => &mut self.omega1,
            "omega2" => &mut self.omega2,
            "delta1" => &mut self.delta1,
            "delta2" => &mut self.delta2,
            "g1" => &mut self.g1,
            "g2" => &mut self.g2,
            "gamma_m1" => &mut self.gamma_m1,
            "gamma_m2" => &mut self.gamma_m2,
            "kappa1" => &mut self.kappa1,
            "kappa2" => &mut self.kappa2,
            "tunnel_j" => &mut self.tunnel_j,
            "chi_c" => &mut self.chi_c,
            "drive1" => &mut self.drive1,
            "drive2" => &mut self.drive2,
            "n_th" => &mut self.n_th,
            _ => return Err(Error::Config(format!("unknown parameter `{name}`"))),
        };
        *slot = value;
        Ok(())
    }

    /// Subsystem-exchanged copy (1 <-> 2).
    pub fn swapped(&self) -> Self {
        Self {
            omega1: self.omega2,
            omega2: self.omega1,
            delta1: self.delta2,
            delta2: self.delta1,
            g1: self.g2,
            g2: self.g1,
            gamma_m1: self.gamma_m2,
            gamma_m2: self.gamma_m1,
            kappa1: self.kappa2,
            kappa2: self.kappa1,
            drive1: self.drive2,
            drive2: self.drive1,
            ..*self
        }
    }
}

/// Electrostatic geometry of the two charged resonators, in any consistent
/// unit system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoulombGeometry {
    pub c1: f64,
    pub c2: f64,
    pub v1: f64,
    pub v2: f64,
    pub r0: f64,
    pub eps0: f64,
}

/// `C1 V1 C2 V2 / (2 pi eps0 r0^3)`: the bilinear `q1 q2` coefficient left
/// after expanding the Coulomb energy to second order and dropping the
/// constant, linear and frequency-renormalising terms.
pub fn coulomb_coupling(geom: &CoulombGeometry) -> Result<f64> {
    if !(geom.r0 > 0.0) {
        return Err(Error::Domain(format!(
            "r0 must be positive, got {}",
            geom.r0
        )));
    }
    if !(geom.eps0 > 0.0) {
        return Err(Error::Domain(format!(
            "eps0 must be positive, got {}",
            geom.eps0
        )));
    }
    let charge_product = (geom.c1 * geom.v1) * (geom.c2 * geom.v2);
    Ok(charge_product / (2.0 * PI * geom.eps0 * geom.r0.powi(3)))
}

/// Displacement-shifted detunings `Delta_j - g_j q_js`.
#[inline]
pub fn effective_detuning(params: &SystemParams, q1s: f64, q2s: f64) -> (f64, f64) {
    (
        params.delta1 - params.g1 * q1s,
        params.delta2 - params.g2 * q2s,
    )
}

/// Field-enhanced couplings `G_j = g_j alpha_j`.
#[inline]
pub fn effective_coupling(
    params: &SystemParams,
    alpha1: Complex64,
    alpha2: Complex64,
) -> (Complex64, Complex64) {
    (alpha1 * params.g1, alpha2 * params.g2)
}
