use rayon::prelude::*;

use super::grid::row;
use super::{GridSpec, LatticeState};
use crate::error::Result;
use crate::params::ModelParams;

/// Strains `u1 = x[j+1,k] - x[j,k]`, `u2 = x[j,k+1] - x[j,k]`, `v1`, `v2` (same for `y`)
/// and velocities `w = dx/dt`, `z = dy/dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeStateH {
    pub grid: GridSpec,
    pub t: f64,
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
    pub v1: Vec<f64>,
    pub v2: Vec<f64>,
    pub w: Vec<f64>,
    pub z: Vec<f64>,
}

impl LatticeState for LatticeStateH {
    const FIELD_NAMES: [&'static str; 6] = ["u1", "u2", "v1", "v2", "w", "z"];

    fn zeros(grid: GridSpec) -> Self {
        let n = grid.len();
        Self {
            grid,
            t: 0.0,
            u1: vec![0.0; n],
            u2: vec![0.0; n],
            v1: vec![0.0; n],
            v2: vec![0.0; n],
            w: vec![0.0; n],
            z: vec![0.0; n],
        }
    }

    fn grid(&self) -> &GridSpec {
        &self.grid
    }

    fn time(&self) -> f64 {
        self.t
    }

    fn set_time(&mut self, t: f64) {
        self.t = t;
    }

    fn fields(&self) -> [&[f64]; 6] {
        [&self.u1, &self.u2, &self.v1, &self.v2, &self.w, &self.z]
    }

    fn fields_mut(&mut self) -> [&mut [f64]; 6] {
        [&mut self.u1, &mut self.u2, &mut self.v1, &mut self.v2, &mut self.w, &mut self.z]
    }

    fn rhs_into(&self, params: &ModelParams, out: &mut Self) -> Result<()> {
        rhs_horizontal_into(self, params, out)
    }

    fn hamiltonian(&self, params: &ModelParams) -> f64 {
        hamiltonian_horizontal(self, params)
    }
}

/// Time derivative of the horizontal strain system.
pub fn rhs_horizontal(state: &LatticeStateH, params: &ModelParams) -> Result<LatticeStateH> {
    let mut out = LatticeStateH::zeros(state.grid);
    out.t = state.t;
    rhs_horizontal_into(state, params, &mut out)?;
    Ok(out)
}

fn rhs_horizontal_into(s: &LatticeStateH, p: &ModelParams, out: &mut LatticeStateH) -> Result<()> {
    s.check_dims()?;
    if out.grid != s.grid {
        *out = LatticeStateH::zeros(s.grid);
    }
    out.t = s.t;
    let (nj, nk) = (s.grid.nj, s.grid.nk);
    let (c1s, c2s, a1, a2) = (p.c1 * p.c1, p.c2 * p.c2, p.alpha1, p.alpha2);
    let [du1, du2, dv1, dv2, dw, dz] = out.fields_mut();

    du1.par_chunks_mut(nj)
        .zip(du2.par_chunks_mut(nj))
        .zip(dv1.par_chunks_mut(nj))
        .zip(dv2.par_chunks_mut(nj))
        .zip(dw.par_chunks_mut(nj))
        .zip(dz.par_chunks_mut(nj))
        .enumerate()
        .for_each(|(k, (((((du1, du2), dv1), dv2), dw), dz))| {
            let kp = if k + 1 == nk { 0 } else { k + 1 };
            let km = if k == 0 { nk - 1 } else { k - 1 };

            let (w, w_up) = (row(&s.w, k, nj), row(&s.w, kp, nj));
            let (z, z_up) = (row(&s.z, k, nj), row(&s.z, kp, nj));
            let u1 = row(&s.u1, k, nj);
            let v1 = row(&s.v1, k, nj);
            let (u2, u2_dn) = (row(&s.u2, k, nj), row(&s.u2, km, nj));
            let (v2, v2_dn) = (row(&s.v2, k, nj), row(&s.v2, km, nj));
            for j in 0..nj {
                let jp = if j + 1 == nj { 0 } else { j + 1 };
                let jm = if j == 0 { nj - 1 } else { j - 1 };
                du1[j] = w[jp] - w[j];
                du2[j] = w_up[j] - w[j];
                dv1[j] = z[jp] - z[j];
                dv2[j] = z_up[j] - z[j];
                dw[j] = c1s * (u1[j] - u1[jm])
                    + c2s * (u2[j] - u2_dn[j])
                    + a1 * (u1[j] * u1[j] - u1[jm] * u1[jm])
                    + a2 * (u2[j] * v2[j] - u2_dn[j] * v2_dn[j] + 0.5 * v1[j] * v1[j]
                        - 0.5 * v1[jm] * v1[jm]);
                dz[j] = c1s * (v2[j] - v2_dn[j])
                    + c2s * (v1[j] - v1[jm])
                    + a1 * (v2[j] * v2[j] - v2_dn[j] * v2_dn[j])
                    + a2 * (u1[j] * v1[j] - u1[jm] * v1[jm] + 0.5 * u2[j] * u2[j]
                        - 0.5 * u2_dn[j] * u2_dn[j]);
            }
        });
    Ok(())
}

#[inline]
fn spring(p: &ModelParams, r: f64, s: f64) -> f64 {
    0.5 * (p.c1 * p.c1 * r * r + p.c2 * p.c2 * s * s) + p.alpha1 * r * r * r / 3.0 + 0.5 * p.alpha2 * r * s * s
}

/// `H = Σ (w² + z²)/2 + V(u1, v1) + V(v2, u2)`, the lattice Hamiltonian written in strains.
pub fn hamiltonian_horizontal(s: &LatticeStateH, p: &ModelParams) -> f64 {
    let nj = s.grid.nj;
    let rows: Vec<f64> = (0..s.grid.nk)
        .into_par_iter()
        .map(|k| {
            let mut acc = 0.0;
            for i in k * nj..(k + 1) * nj {
                acc += 0.5 * (s.w[i] * s.w[i] + s.z[i] * s.z[i])
                    + spring(p, s.u1[i], s.v1[i])
                    + spring(p, s.v2[i], s.u2[i]);
            }
            acc
        })
        .collect();
    rows.iter().sum()
}
