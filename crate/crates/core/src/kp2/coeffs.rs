use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{Frame, ModelParams};

/// `a_t ∂ξ∂τA + a_4 ∂ξ⁴A + a_n ∂ξ(A ∂ξA) + a_e ∂η²A = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KP2Coefficients {
    pub a_t: f64,
    pub a_4: f64,
    pub a_n: f64,
    pub a_e: f64,
}

impl KP2Coefficients {
    /// The solver needs `a_t > 0`; the other coefficients only need to be finite.
    pub fn new(a_t: f64, a_4: f64, a_n: f64, a_e: f64) -> Result<Self> {
        let c = Self { a_t, a_4, a_n, a_e };
        if ![a_t, a_4, a_n, a_e].iter().all(|v| v.is_finite()) || a_t <= 0.0 {
            return Err(Error::Domain(format!("invalid KP-II coefficients {c:?}")));
        }
        Ok(c)
    }

    /// Horizontal propagation: `(2c1, c1²/12, 2α1, c2²)`.
    pub fn horizontal(p: &ModelParams) -> Self {
        Self { a_t: 2.0 * p.c1, a_4: p.c1 * p.c1 / 12.0, a_n: 2.0 * p.alpha1, a_e: p.c2 * p.c2 }
    }

    /// Diagonal propagation: `(2c*, c*²/48, α1, c*²)` with `c* = c1/√2`.
    pub fn diagonal(p: &ModelParams) -> Result<Self> {
        p.require_diagonal_mode()?;
        let cs = p.c1_star();
        Ok(Self { a_t: 2.0 * cs, a_4: cs * cs / 48.0, a_n: p.alpha1, a_e: cs * cs })
    }

    pub fn for_frame(frame: Frame, p: &ModelParams) -> Result<Self> {
        match frame {
            Frame::Horizontal => Ok(Self::horizontal(p)),
            Frame::Diagonal => Self::diagonal(p),
        }
    }

    /// `∂τA + ∂ξ(A²) + ∂ξ³A + ∂ξ⁻¹∂η²A = 0`.
    pub fn normalized() -> Self {
        Self { a_t: 1.0, a_4: 1.0, a_n: 2.0, a_e: 1.0 }
    }

    /// Same equation divided through by `a_t`.
    pub fn unit_time(&self) -> Self {
        Self { a_t: 1.0, a_4: self.a_4 / self.a_t, a_n: self.a_n / self.a_t, a_e: self.a_e / self.a_t }
    }

    /// Frequency of the linear mode `exp(i(kξ + lη - ωτ))`.
    pub fn dispersion(&self, k: f64, l: f64) -> f64 {
        (self.a_e * l * l - self.a_4 * k.powi(4)) / (self.a_t * k)
    }

    /// KdV coefficients `(β, γ)` of `A_τ + β A_ξξξ + γ (A²)_ξ = 0`.
    pub fn kdv(&self) -> (f64, f64) {
        (self.a_4 / self.a_t, self.a_n / (2.0 * self.a_t))
    }
}

/// Change of variables `A = amp·B(x, y, s)` with `ξ = xi·x`, `η = eta·y`, `τ = tau·s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scaling {
    pub amp: f64,
    pub xi: f64,
    pub eta: f64,
    pub tau: f64,
}

impl Scaling {
    pub fn identity() -> Self {
        Self { amp: 1.0, xi: 1.0, eta: 1.0, tau: 1.0 }
    }

    pub fn inverse(&self) -> Self {
        Self { amp: 1.0 / self.amp, xi: 1.0 / self.xi, eta: 1.0 / self.eta, tau: 1.0 / self.tau }
    }

    /// Coefficients of the equation satisfied by `B`, divided through by its `∂x∂s` coefficient.
    pub fn transform(&self, c: &KP2Coefficients) -> KP2Coefficients {
        let (a, p, q, r) = (self.amp, self.xi, self.eta, self.tau);
        KP2Coefficients {
            a_t: 1.0,
            a_4: c.a_4 * r / (c.a_t * p.powi(3)),
            a_n: c.a_n * a * r / (c.a_t * p),
            a_e: c.a_e * p * r / (c.a_t * q * q),
        }
    }

    /// `(ξ, η, τ, A) -> (x, y, s, B)`.
    pub fn to_scaled(&self, xi: f64, eta: f64, tau: f64, a: f64) -> (f64, f64, f64, f64) {
        (xi / self.xi, eta / self.eta, tau / self.tau, a / self.amp)
    }

    pub fn from_scaled(&self, x: f64, y: f64, s: f64, b: f64) -> (f64, f64, f64, f64) {
        (x * self.xi, y * self.eta, s * self.tau, b * self.amp)
    }
}

/// Scaling that maps `c` onto [`KP2Coefficients::normalized`], keeping `ξ` unscaled.
pub fn normalize(c: &KP2Coefficients) -> Result<Scaling> {
    if !(c.a_t > 0.0 && c.a_4 > 0.0 && c.a_n > 0.0 && c.a_e > 0.0) {
        return Err(Error::Domain(format!("normalization needs positive coefficients, got {c:?}")));
    }
    Ok(Scaling { amp: 2.0 * c.a_4 / c.a_n, xi: 1.0, eta: (c.a_e / c.a_4).sqrt(), tau: c.a_t / c.a_4 })
}
