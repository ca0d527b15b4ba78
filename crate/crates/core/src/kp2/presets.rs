use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::KP2Coefficients;
use crate::error::{Error, Result};
use crate::spectral::{SpectralField2D, SpectralGrid};

/// Named initial data. Centers default to the middle of the box. Every preset is returned
/// with its ξ-mean removed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialData {
    Zero,
    LineSoliton {
        speed: f64,
        #[serde(default)]
        center: Option<f64>,
    },
    PerturbedLineSoliton {
        speed: f64,
        /// Amplitude of the transverse displacement of the crest.
        delta: f64,
        /// Number of transverse periods across the box.
        #[serde(default = "one")]
        mode: u32,
        #[serde(default)]
        center: Option<f64>,
    },
    GaussianZeroMean {
        amplitude: f64,
        sigma_xi: f64,
        sigma_eta: f64,
        #[serde(default)]
        center_xi: Option<f64>,
        #[serde(default)]
        center_eta: Option<f64>,
    },
}

fn one() -> u32 {
    1
}

/// KdV line soliton `3c/(2γ) sech²(√(c/β)/2 · s)` of `A_τ + β A_ξξξ + γ (A²)_ξ = 0`, summed
/// over periodic images within the box.
pub fn line_soliton_profile(coeffs: &KP2Coefficients, speed: f64, s: f64, lx: f64) -> f64 {
    let (beta, gamma) = coeffs.kdv();
    let amp = 3.0 * speed / (2.0 * gamma);
    let kappa = (speed / beta).sqrt() / 2.0;
    let s = s - lx * (s / lx).round();
    (-2..=2).map(|m| sech2(kappa * (s + m as f64 * lx))).sum::<f64>() * amp
}

fn sech2(x: f64) -> f64 {
    if x.abs() > 350.0 {
        0.0
    } else {
        1.0 / x.cosh().powi(2)
    }
}

impl InitialData {
    pub fn name(&self) -> &'static str {
        match self {
            InitialData::Zero => "zero",
            InitialData::LineSoliton { .. } => "line-soliton",
            InitialData::PerturbedLineSoliton { .. } => "perturbed-line-soliton",
            InitialData::GaussianZeroMean { .. } => "gaussian-zero-mean",
        }
    }

    pub fn build(&self, grid: &Arc<SpectralGrid>, coeffs: &KP2Coefficients) -> Result<SpectralField2D> {
        let (lx, ly) = (grid.lx, grid.ly);
        let f = match *self {
            InitialData::Zero => SpectralField2D::zeros(grid),
            InitialData::LineSoliton { speed, center } => {
                soliton_checks(coeffs, speed)?;
                let xc = center.unwrap_or(lx / 2.0);
                SpectralField2D::from_fn(grid, |x, _| line_soliton_profile(coeffs, speed, x - xc, lx))
            }
            InitialData::PerturbedLineSoliton { speed, delta, mode, center } => {
                soliton_checks(coeffs, speed)?;
                let xc = center.unwrap_or(lx / 2.0);
                let m = mode as f64;
                SpectralField2D::from_fn(grid, |x, y| {
                    let shift = delta * (2.0 * PI * m * y / ly).cos();
                    line_soliton_profile(coeffs, speed, x - xc - shift, lx)
                })
            }
            InitialData::GaussianZeroMean { amplitude, sigma_xi, sigma_eta, center_xi, center_eta } => {
                if !(sigma_xi > 0.0 && sigma_eta > 0.0) {
                    return Err(Error::Config("gaussian widths must be positive".into()));
                }
                let (xc, yc) = (center_xi.unwrap_or(lx / 2.0), center_eta.unwrap_or(ly / 2.0));
                SpectralField2D::from_fn(grid, |x, y| {
                    let s = (x - xc) / sigma_xi;
                    let r = (y - yc) / sigma_eta;
                    amplitude * s * (-0.5 * s * s - 0.5 * r * r).exp()
                })
            }
        };
        Ok(f.zero_mean_project())
    }
}

fn soliton_checks(coeffs: &KP2Coefficients, speed: f64) -> Result<()> {
    if !(speed > 0.0 && speed.is_finite()) {
        return Err(Error::Config(format!("soliton speed must be positive, got {speed}")));
    }
    if coeffs.a_4 <= 0.0 || coeffs.a_n == 0.0 {
        return Err(Error::Domain("line solitons need a_4 > 0 and a_n != 0".into()));
    }
    Ok(())
}
