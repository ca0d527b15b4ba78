use serde::{Deserialize, Serialize};

use crate::ansatz::{LatticeGeometry, LatticeSampler};
use crate::error::{Error, Result};
use crate::lattice::l2_norm;
use crate::params::{Frame, ModelParams};
use crate::spectral::SpectralField2D;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingRow {
    pub eps: f64,
    pub nj: usize,
    pub nk: usize,
    pub lattice_l2: f64,
    pub hs: f64,
    /// `‖sample(U)‖_{ℓ²} ε^{3/2} / ‖U‖_{H^s}`; zero when `U = 0`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingTable {
    pub s: f64,
    pub rows: Vec<SamplingRow>,
}

impl SamplingTable {
    pub fn max_ratio(&self) -> f64 {
        self.rows.iter().fold(0.0, |m, r| m.max(r.ratio))
    }

    pub fn min_ratio(&self) -> f64 {
        self.rows.iter().fold(f64::INFINITY, |m, r| m.min(r.ratio))
    }

    /// `(max - min)/max` across the rows; zero for an all-zero table.
    pub fn spread(&self) -> f64 {
        let max = self.max_ratio();
        if max == 0.0 {
            0.0
        } else {
            (max - self.min_ratio()) / max
        }
    }
}

/// Compares lattice samples of `u` against its `H^s` norm for each `ε`. The box of `u` must be
/// commensurate with every `ε` in the list.
pub fn sampling_bound_check(u: &SpectralField2D, s: f64, eps_list: &[f64]) -> Result<SamplingTable> {
    if !(s > 1.0) {
        return Err(Error::Domain(format!("sampling bound needs s > 1, got {s}")));
    }
    let hs = u.hs_norm(s, &[])?;
    let unit = ModelParams::new(1.0, 1.0, 0.0, 0.0)?;
    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let geom = LatticeGeometry::for_grid(Frame::Horizontal, &unit, eps, u.grid())?;
        let lattice_l2 = l2_norm(&LatticeSampler::new(geom).sample(u, 0.0)?);
        let ratio = if hs == 0.0 { 0.0 } else { lattice_l2 * eps.powf(1.5) / hs };
        rows.push(SamplingRow { eps, nj: geom.nj, nk: geom.nk, lattice_l2, hs, ratio });
    }
    Ok(SamplingTable { s, rows })
}
