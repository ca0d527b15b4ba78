use rayon::prelude::*;

use super::grid::row;
use super::{GridSpec, LatticeState};
use crate::error::Result;
use crate::params::ModelParams;

/// Strains and velocities of the two diagonal sublattices `x` and `chi`, indexed by `(m, n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeStateD {
    pub grid: GridSpec,
    pub t: f64,
    pub al: Vec<f64>,
    pub ad: Vec<f64>,
    pub ax: Vec<f64>,
    pub ay: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl LatticeState for LatticeStateD {
    const FIELD_NAMES: [&'static str; 6] = ["al", "ad", "ax", "ay", "u", "v"];

    fn zeros(grid: GridSpec) -> Self {
        let n = grid.len();
        Self {
            grid,
            t: 0.0,
            al: vec![0.0; n],
            ad: vec![0.0; n],
            ax: vec![0.0; n],
            ay: vec![0.0; n],
            u: vec![0.0; n],
            v: vec![0.0; n],
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
        [&self.al, &self.ad, &self.ax, &self.ay, &self.u, &self.v]
    }

    fn fields_mut(&mut self) -> [&mut [f64]; 6] {
        [&mut self.al, &mut self.ad, &mut self.ax, &mut self.ay, &mut self.u, &mut self.v]
    }

    fn rhs_into(&self, params: &ModelParams, out: &mut Self) -> Result<()> {
        rhs_diagonal_into(self, params, out)
    }

    fn hamiltonian(&self, params: &ModelParams) -> f64 {
        hamiltonian_diagonal(self, params)
    }
}

/// Time derivative of the diagonal strain system. Requires `c2 = c1`, `alpha2 = 2 alpha1`.
pub fn rhs_diagonal(state: &LatticeStateD, params: &ModelParams) -> Result<LatticeStateD> {
    let mut out = LatticeStateD::zeros(state.grid);
    rhs_diagonal_into(state, params, &mut out)?;
    Ok(out)
}

fn rhs_diagonal_into(s: &LatticeStateD, p: &ModelParams, out: &mut LatticeStateD) -> Result<()> {
    p.require_diagonal_mode()?;
    s.check_dims()?;
    if out.grid != s.grid {
        *out = LatticeStateD::zeros(s.grid);
    }
    out.t = s.t;
    let (nm, nn) = (s.grid.nj, s.grid.nk);
    let (c2, a2) = (p.c1 * p.c1, 2.0 * p.alpha1);
    let [dal, dad, dax, day, du, dv] = out.fields_mut();

    dal.par_chunks_mut(nm)
        .zip(dad.par_chunks_mut(nm))
        .zip(dax.par_chunks_mut(nm))
        .zip(day.par_chunks_mut(nm))
        .zip(du.par_chunks_mut(nm))
        .zip(dv.par_chunks_mut(nm))
        .enumerate()
        .for_each(|(n, (((((dal, dad), dax), day), du), dv))| {
            let np = if n + 1 == nn { 0 } else { n + 1 };
            let nmi = if n == 0 { nn - 1 } else { n - 1 };

            let (u, u_up) = (row(&s.u, n, nm), row(&s.u, np, nm));
            let v = row(&s.v, n, nm);
            let (al, ax, ay, ad) = (row(&s.al, n, nm), row(&s.ax, n, nm), row(&s.ay, n, nm), row(&s.ad, n, nm));
            let (ad_dn, ay_dn) = (row(&s.ad, nmi, nm), row(&s.ay, nmi, nm));
            for m in 0..nm {
                let mp = if m + 1 == nm { 0 } else { m + 1 };
                let mm = if m == 0 { nm - 1 } else { m - 1 };
                dal[m] = v[m] - u[m];
                dad[m] = u_up[mp] - v[m];
                dax[m] = u[mp] - v[m];
                day[m] = u_up[m] - v[m];
                let (l, d, x, y) = (al[m], ad_dn[mm], ax[mm], ay_dn[m]);
                du[m] = c2 * (l - d - x - y) + a2 * (l * l - d * d - x * x + y * y);
                let (l, d, x, y) = (al[m], ad[m], ax[m], ay[m]);
                dv[m] = c2 * (d - l + x + y) + a2 * (d * d - l * l + x * x - y * y);
            }
        });
    Ok(())
}

/// `H = Σ (u² + v²)/2 + P(al) + P(ad) + P(ax) + Q(ay)` with
/// `P(r) = c1² r²/2 + 2 alpha1 r³/3` and `Q(r) = c1² r²/2 - 2 alpha1 r³/3`.
pub fn hamiltonian_diagonal(s: &LatticeStateD, p: &ModelParams) -> f64 {
    let nm = s.grid.nj;
    let (h2, h3) = (0.5 * p.c1 * p.c1, 2.0 * p.alpha1 / 3.0);
    let pot = |r: f64| r * r * (h2 + h3 * r);
    let rows: Vec<f64> = (0..s.grid.nk)
        .into_par_iter()
        .map(|n| {
            let mut acc = 0.0;
            for i in n * nm..(n + 1) * nm {
                let y = s.ay[i];
                acc += 0.5 * (s.u[i] * s.u[i] + s.v[i] * s.v[i])
                    + pot(s.al[i])
                    + pot(s.ad[i])
                    + pot(s.ax[i])
                    + y * y * (h2 - h3 * y);
            }
            acc
        })
        .collect();
    rows.iter().sum()
}
