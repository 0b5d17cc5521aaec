//! Parameter types for single squeezed vacua and their superpositions.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{JanusError, Result};

/// Reduce an angle into `[0, 2π)`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// One squeezed vacuum `|r e^{iθ}⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeParam {
    r: f64,
    theta: f64,
}

impl SqueezeParam {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !r.is_finite() || r < 0.0 {
            return Err(JanusError::InvalidParameter(format!(
                "squeezing magnitude must be finite and >= 0, got {r}"
            )));
        }
        if !theta.is_finite() {
            return Err(JanusError::InvalidParameter(format!(
                "squeezing phase must be finite, got {theta}"
            )));
        }
        if r.tanh() >= 1.0 {
            return Err(JanusError::InvalidParameter(format!(
                "tanh(r) rounds to 1 for r = {r}"
            )));
        }
        Ok(Self {
            r,
            theta: wrap_angle(theta),
        })
    }

    pub fn vacuum() -> Self {
        Self { r: 0.0, theta: 0.0 }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `tanh r · e^{iθ}`
    pub fn alpha(&self) -> C64 {
        C64::from_polar(self.r.tanh(), self.theta)
    }

    /// `tanh² r`
    pub fn x(&self) -> f64 {
        let t = self.r.tanh();
        t * t
    }

    pub fn sinh2(&self) -> f64 {
        let s = self.r.sinh();
        s * s
    }
}

/// A superposition `|χ| |ξ⟩ + |η| e^{iδ} |ζ⟩` of two squeezed vacua.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JanusParams {
    pub xi: SqueezeParam,
    pub zeta: SqueezeParam,
    chi_mag: f64,
    eta_mag: f64,
    delta: f64,
}

impl JanusParams {
    pub fn new(
        xi: SqueezeParam,
        zeta: SqueezeParam,
        chi_mag: f64,
        eta_mag: f64,
        delta: f64,
    ) -> Result<Self> {
        for (name, v) in [("|chi|", chi_mag), ("|eta|", eta_mag)] {
            if !v.is_finite() || v < 0.0 {
                return Err(JanusError::InvalidParameter(format!(
                    "{name} must be finite and >= 0, got {v}"
                )));
            }
        }
        if chi_mag == 0.0 && eta_mag == 0.0 {
            return Err(JanusError::InvalidParameter(
                "|chi| and |eta| cannot both be zero".into(),
            ));
        }
        if !delta.is_finite() {
            return Err(JanusError::InvalidParameter(format!(
                "superposition phase must be finite, got {delta}"
            )));
        }
        Ok(Self {
            xi,
            zeta,
            chi_mag,
            eta_mag,
            delta: wrap_angle(delta),
        })
    }

    /// Build a normalized superposition, recovering `|χ|` from the
    /// normalization constraint (larger root).
    pub fn normalized(
        xi: SqueezeParam,
        zeta: SqueezeParam,
        eta_mag: f64,
        delta: f64,
    ) -> Result<Self> {
        let chi = crate::analytic::solve_chi(eta_mag, &xi, &zeta, delta)?;
        Self::new(xi, zeta, chi, eta_mag, delta)
    }

    pub fn chi_mag(&self) -> f64 {
        self.chi_mag
    }

    pub fn eta_mag(&self) -> f64 {
        self.eta_mag
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Relative orientation `Δ = θ − φ`, reduced into `[0, 2π)`.
    pub fn orientation(&self) -> f64 {
        wrap_angle(self.xi.theta() - self.zeta.theta())
    }

    pub fn chi(&self) -> C64 {
        C64::new(self.chi_mag, 0.0)
    }

    pub fn eta(&self) -> C64 {
        C64::from_polar(self.eta_mag, self.delta)
    }

    /// `χ η* = |χ||η| e^{−iδ}`
    pub fn chi_eta_conj(&self) -> C64 {
        C64::from_polar(self.chi_mag * self.eta_mag, -self.delta)
    }
}

/// Shorthand variables shared by all closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedVars {
    /// `tanh² r`
    pub x: f64,
    /// `tanh² s`
    pub y: f64,
    /// `tanh r · tanh s · e^{iΔ}`
    pub z: C64,
    pub orientation: f64,
    /// `(1 + 2 sinh² r)^{-1/2}`, only for equal squeezing.
    pub k: Option<f64>,
    /// `2 K |χ||η|`, only for equal squeezing.
    pub l: Option<f64>,
}

/// Modulus and phase of `cosh² r − sinh² r e^{iΔ} = f^{1/2} e^{iγ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseGeometry {
    pub f: f64,
    pub gamma: f64,
}
