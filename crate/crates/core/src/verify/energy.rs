use serde::{Deserialize, Serialize};

use super::sampled::{perturbation_diagonal, perturbation_horizontal, SampledAnsatz};
use crate::error::Result;
use crate::lattice::{l2_norm, LatticeState, LatticeStateD, LatticeStateH};
use crate::params::ModelParams;

/// Modified energy of horizontal perturbations `(U1, U2, V1, V2, W, Z)`; `a` and `u_eps` are
/// the sampled `A` and `U_ε`.
pub fn energy_horizontal_perturbation(p: &LatticeStateH, a: &[f64], u_eps: &[f64], params: &ModelParams, eps: f64) -> f64 {
    let (c1s, c2s) = (params.c1 * params.c1, params.c2 * params.c2);
    let (a1, a2) = (params.alpha1 * eps * eps, params.alpha2 * eps * eps);
    let mut acc = 0.0;
    for i in 0..p.grid.len() {
        let (u1, u2, v1, v2, w, z) = (p.u1[i], p.u2[i], p.v1[i], p.v2[i], p.w[i], p.z[i]);
        let quad = w * w + z * z + c1s * u1 * u1 + c2s * u2 * u2 + c1s * v1 * v1 + c2s * v2 * v2;
        let cub1 = 2.0 * a[i] * u1 * u1 + (2.0 / 3.0) * (u1 * u1 * u1 + v2 * v2 * v2);
        let cub2 = a[i] * v1 * v1 + u1 * v1 * v1 + u2 * u2 * v2 + 2.0 * u_eps[i] * u2 * v2;
        acc += 0.5 * (quad + a1 * cub1 + a2 * cub2);
    }
    acc
}

/// Modified energy of diagonal perturbations `(L, D, X, Y, U, V)`.
pub fn energy_diagonal_perturbation(p: &LatticeStateD, s: &SampledAnsatz, params: &ModelParams, eps: f64) -> Result<f64> {
    let (le, de, xe, ye) = (s.get("L")?, s.get("D")?, s.get("X")?, s.get("Y")?);
    let h = 0.5 * params.c1 * params.c1;
    let k2 = 2.0 * params.alpha1 * eps * eps;
    let k3 = (2.0 / 3.0) * params.alpha1 * eps * eps;
    let mut acc = 0.0;
    for i in 0..p.grid.len() {
        let (l, d, x, y, u, v) = (p.al[i], p.ad[i], p.ax[i], p.ay[i], p.u[i], p.v[i]);
        acc += 0.5 * (u * u + v * v)
            + h * (l * l + d * d + x * x + y * y)
            + k2 * (l * l * le[i] + d * d * de[i] + x * x * xe[i] - y * y * ye[i])
            + k3 * (l * l * l + d * d * d + x * x * x - y * y * y);
    }
    Ok(acc)
}

/// `E(t)` of a horizontal lattice state measured against the sampled ansatz.
pub fn energy_horizontal(state: &LatticeStateH, s: &SampledAnsatz, params: &ModelParams) -> Result<f64> {
    let p = perturbation_horizontal(state, s)?;
    Ok(energy_horizontal_perturbation(&p, s.get("A")?, s.get("U")?, params, s.eps))
}

pub fn energy_diagonal(state: &LatticeStateD, s: &SampledAnsatz, params: &ModelParams) -> Result<f64> {
    let p = perturbation_diagonal(state, s)?;
    energy_diagonal_perturbation(&p, s, params, s.eps)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coercivity {
    /// `Σ ‖perturbation‖² / (2E)`; zero for zero perturbations, infinite when `E <= 0` otherwise.
    pub ratio: f64,
    /// `E <= 0` with a nonzero perturbation: the energy is not coercive at this `ε`.
    pub failed: bool,
    /// Ratio above the configured `K0`.
    pub above_k0: bool,
}

pub fn coercivity_check<S: LatticeState>(perturbation: &S, energy: f64, k0: Option<f64>) -> Coercivity {
    let sq: f64 = perturbation.fields().iter().map(|f| l2_norm(f).powi(2)).sum();
    let (ratio, failed) = if sq == 0.0 {
        (0.0, false)
    } else if energy <= 0.0 {
        (f64::INFINITY, true)
    } else {
        (sq / (2.0 * energy), false)
    };
    Coercivity { ratio, failed, above_k0: k0.is_some_and(|k| ratio > k) }
}
