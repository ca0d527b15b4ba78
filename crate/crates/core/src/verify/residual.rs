use serde::{Deserialize, Serialize};

use crate::ansatz::{AnsatzBundle, LatticeGeometry, LatticeSampler};
use crate::error::Result;
use crate::lattice::{l2_norm, roll, GridSpec};
use crate::params::{Frame, ModelParams};
use crate::spectral::SpectralField2D;

/// One lattice residual field and its norms.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LatticeResidual {
    pub name: String,
    #[serde(skip)]
    pub values: Vec<f64>,
    pub l2: f64,
    pub sup: f64,
}

impl LatticeResidual {
    fn new(name: &str, values: Vec<f64>) -> Self {
        let sup = values.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        Self { name: name.to_string(), l2: l2_norm(&values), sup, values }
    }
}

/// Residuals left in the perturbation equations when the lattice sits on the ansatz.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualSet {
    pub frame: Frame,
    pub eps: f64,
    pub t: f64,
    pub fields: Vec<LatticeResidual>,
}

impl ResidualSet {
    pub fn get(&self, name: &str) -> Option<&LatticeResidual> {
        self.fields.iter().find(|r| r.name == name)
    }

    /// `(Σ ‖Res‖²)^{1/2}` over all families.
    pub fn aggregate_l2(&self) -> f64 {
        self.fields.iter().map(|r| r.l2 * r.l2).sum::<f64>().sqrt()
    }
}

/// `ε c ∂ξf - ε³ ∂τf`, the moving-frame time derivative of `f` with its sign flipped.
fn transport(b: &AnsatzBundle, name: &str) -> Result<SpectralField2D> {
    let eps = b.eps;
    Ok(b.get(name)?.derivative(1, 0).scale(eps * b.speed()).axpy(-eps.powi(3), b.get_tau(name)?))
}

fn sq(f: &[f64]) -> Vec<f64> {
    f.iter().map(|v| v * v).collect()
}

/// Evaluates every residual family of `bundle` on the sampler's lattice.
///
/// Linear parts are assembled in Fourier space with exact shifts and sampled once; the
/// quadratic parts are formed site by site from the sampled fields.
pub fn lattice_residuals(b: &AnsatzBundle, sampler: &LatticeSampler) -> Result<ResidualSet> {
    let eps = b.eps;
    let e2 = eps * eps;
    let p = &b.params;
    let t = b.t;
    let g: GridSpec = sampler.geom.grid_spec();
    let smp = |f: &SpectralField2D| sampler.sample(f, t);
    let f = |n: &str| b.get(n);
    let fields = match b.frame {
        Frame::Horizontal => {
            let (a, w, u) = (f("A")?, f("W")?, f("U")?);
            let (c1s, c2s) = (p.c1 * p.c1, p.c2 * p.c2);
            let res_u1 = &(&w.shift(eps, 0.0) - w) + &transport(b, "A")?;
            let res_u2 = &(&w.shift(0.0, e2) - w) + &transport(b, "U")?;
            let lin_w = (&(a - &a.shift(-eps, 0.0)).scale(c1s) + &(u - &u.shift(0.0, -e2)).scale(c2s))
                .axpy(1.0, &transport(b, "W")?);
            let sa = smp(a)?;
            let su = smp(u)?;
            let (sa2, su2) = (sq(&sa), sq(&su));
            let (sa2m, su2m) = (roll(&g, &sa2, -1, 0), roll(&g, &su2, 0, -1));
            let a1 = p.alpha1 * e2;
            let res_w: Vec<f64> = smp(&lin_w)?
                .into_iter()
                .enumerate()
                .map(|(i, l)| l + a1 * (sa2[i] - sa2m[i]))
                .collect();
            let a2 = 0.5 * p.alpha2 * e2;
            let res_z: Vec<f64> = (0..g.len()).map(|i| a2 * (su2[i] - su2m[i])).collect();
            vec![
                LatticeResidual::new("U1", smp(&res_u1)?),
                LatticeResidual::new("U2", smp(&res_u2)?),
                LatticeResidual::new("W", res_w),
                LatticeResidual::new("Z", res_z),
            ]
        }
        Frame::Diagonal => {
            let (l, d, x, y, u, v) = (f("L")?, f("D")?, f("X")?, f("Y")?, f("U")?, f("V")?);
            let c1s = p.c1 * p.c1;
            let res_d = &(&u.shift(eps, e2) - v) + &transport(b, "D")?;
            let res_x = &(&u.shift(eps, 0.0) - v) + &transport(b, "X")?;
            let res_y = &(&u.shift(0.0, e2) - v) + &transport(b, "Y")?;
            let lin_u = (&(&(l - &d.shift(-eps, -e2)) - &x.shift(-eps, 0.0)) - &y.shift(0.0, -e2))
                .scale(c1s)
                .axpy(1.0, &transport(b, "U")?);
            let lin_v = (&(&(d - l) + x) + y).scale(c1s).axpy(1.0, &transport(b, "V")?);
            let (sl, sd, sx, sy) = (sq(&smp(l)?), sq(&smp(d)?), sq(&smp(x)?), sq(&smp(y)?));
            let (sdm, sxm, sym) = (roll(&g, &sd, -1, -1), roll(&g, &sx, -1, 0), roll(&g, &sy, 0, -1));
            let k = 2.0 * p.alpha1 * e2;
            let res_u: Vec<f64> = smp(&lin_u)?
                .into_iter()
                .enumerate()
                .map(|(i, lin)| lin + k * (sl[i] - sdm[i] - sxm[i] + sym[i]))
                .collect();
            let res_v: Vec<f64> = smp(&lin_v)?
                .into_iter()
                .enumerate()
                .map(|(i, lin)| lin + k * (sd[i] - sl[i] + sx[i] - sy[i]))
                .collect();
            vec![
                LatticeResidual::new("D", smp(&res_d)?),
                LatticeResidual::new("X", smp(&res_x)?),
                LatticeResidual::new("Y", smp(&res_y)?),
                LatticeResidual::new("U", res_u),
                LatticeResidual::new("V", res_v),
            ]
        }
    };
    Ok(ResidualSet { frame: b.frame, eps, t, fields })
}

fn residual_at(frame: Frame, a: &SpectralField2D, params: &ModelParams, eps: f64) -> Result<ResidualSet> {
    let bundle = AnsatzBundle::build(frame, a, params, eps, 0.0)?;
    let geom = LatticeGeometry::for_grid(frame, params, eps, a.grid())?;
    lattice_residuals(&bundle, &LatticeSampler::new(geom))
}

/// `Res^{U1}`, `Res^{U2}`, `Res^W`, `Res^Z` for the KP-II state `a`; the lattice is read off
/// the continuum box, which must be commensurate with `eps`.
pub fn residual_horizontal(a: &SpectralField2D, params: &ModelParams, eps: f64) -> Result<ResidualSet> {
    residual_at(Frame::Horizontal, a, params, eps)
}

/// `Res^D`, `Res^X`, `Res^Y`, `Res^U`, `Res^V` in the diagonal frame.
pub fn residual_diagonal(a: &SpectralField2D, params: &ModelParams, eps: f64) -> Result<ResidualSet> {
    residual_at(Frame::Diagonal, a, params, eps)
}
