use std::collections::BTreeMap;

use crate::ansatz::{AnsatzBundle, LatticeSampler};
use crate::error::{Error, Result};
use crate::lattice::{LatticeState, LatticeStateD, LatticeStateH};
use crate::params::Frame;

/// Bundle fields evaluated at the lattice sites, without the `ε²` factor.
#[derive(Debug, Clone)]
pub struct SampledAnsatz {
    pub frame: Frame,
    pub eps: f64,
    pub t: f64,
    fields: BTreeMap<&'static str, Vec<f64>>,
}

impl SampledAnsatz {
    pub fn new(bundle: &AnsatzBundle, sampler: &LatticeSampler) -> Result<Self> {
        let mut fields = BTreeMap::new();
        for name in bundle.names() {
            fields.insert(name, sampler.sample(bundle.get(name)?, bundle.t)?);
        }
        Ok(Self { frame: bundle.frame, eps: bundle.eps, t: bundle.t, fields })
    }

    pub fn get(&self, name: &str) -> Result<&[f64]> {
        self.fields
            .get(name)
            .map(|v| v.as_slice())
            .ok_or_else(|| Error::Config(format!("sampled ansatz has no field {name}")))
    }
}

/// `(f - ε² a)/ε²`, written so that a state built as `ε² a` gives exact zeros.
fn perturb(field: &[f64], ansatz: Option<&[f64]>, e2: f64) -> Vec<f64> {
    match ansatz {
        Some(a) => field.iter().zip(a).map(|(f, a)| (f - e2 * a) / e2).collect(),
        None => field.iter().map(|f| f / e2).collect(),
    }
}

/// `U1 = u1/ε² - A`, `U2 = u2/ε² - U_ε`, `V1 = v1/ε²`, `V2 = v2/ε²`, `W = w/ε² - W_ε`, `Z = z/ε²`,
/// stored in the slots `u1, u2, v1, v2, w, z`.
pub fn perturbation_horizontal(state: &LatticeStateH, s: &SampledAnsatz) -> Result<LatticeStateH> {
    state.check_dims()?;
    let k = s.eps * s.eps;
    Ok(LatticeStateH {
        grid: state.grid,
        t: state.t,
        u1: perturb(&state.u1, Some(s.get("A")?), k),
        u2: perturb(&state.u2, Some(s.get("U")?), k),
        v1: perturb(&state.v1, None, k),
        v2: perturb(&state.v2, None, k),
        w: perturb(&state.w, Some(s.get("W")?), k),
        z: perturb(&state.z, None, k),
    })
}

/// `L = al/ε² - L_ε`, ..., `V = v/ε² - V_ε`, stored in the slots `al, ad, ax, ay, u, v`.
pub fn perturbation_diagonal(state: &LatticeStateD, s: &SampledAnsatz) -> Result<LatticeStateD> {
    state.check_dims()?;
    let k = s.eps * s.eps;
    Ok(LatticeStateD {
        grid: state.grid,
        t: state.t,
        al: perturb(&state.al, Some(s.get("L")?), k),
        ad: perturb(&state.ad, Some(s.get("D")?), k),
        ax: perturb(&state.ax, Some(s.get("X")?), k),
        ay: perturb(&state.ay, Some(s.get("Y")?), k),
        u: perturb(&state.u, Some(s.get("U")?), k),
        v: perturb(&state.v, Some(s.get("V")?), k),
    })
}
