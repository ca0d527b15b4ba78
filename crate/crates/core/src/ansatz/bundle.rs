use std::collections::BTreeMap;
use std::path::Path;

use super::expansion::*;
use crate::error::{Error, Result};
use crate::io::{write_snapshot, SnapshotMeta};
use crate::kp2::{second_tendency, tendency, KP2Coefficients};
use crate::params::{Frame, ModelParams};
use crate::spectral::SpectralField2D;

/// A field of the bundle together with its τ-derivative.
#[derive(Debug, Clone)]
pub struct BundleField {
    pub value: SpectralField2D,
    pub tau: SpectralField2D,
}

/// Every continuum field of the long-wave ansatz at one instant.
///
/// Horizontal bundles hold `A`, `W`, `U`; diagonal bundles hold `A`, `L`, `D`, `X`, `Y`, `U`, `V`.
#[derive(Debug, Clone)]
pub struct AnsatzBundle {
    pub frame: Frame,
    pub eps: f64,
    pub params: ModelParams,
    pub coeffs: KP2Coefficients,
    /// Lattice time of evaluation.
    pub t: f64,
    fields: BTreeMap<&'static str, BundleField>,
}

/// Expansions of the non-`A` bundle fields, in the order they are stored.
pub fn expansions(frame: Frame, params: &ModelParams, eps: f64) -> Vec<(&'static str, Expansion)> {
    match frame {
        Frame::Horizontal => vec![("W", w_expansion(params.c1, eps)), ("U", u_expansion(eps))],
        Frame::Diagonal => {
            let cs = params.c1_star();
            vec![
                ("L", l_expansion(eps)),
                ("D", d_expansion(eps)),
                ("X", x_expansion(eps)),
                ("Y", y_expansion(eps)),
                ("U", w_expansion(cs, eps)),
                ("V", v_expansion(cs, eps)),
            ]
        }
    }
}

impl AnsatzBundle {
    /// Builds the bundle from `A`; `∂τA` and `∂τ²A` come from the KP-II equation itself.
    pub fn build(frame: Frame, a: &SpectralField2D, params: &ModelParams, eps: f64, t: f64) -> Result<Self> {
        frame.check(params)?;
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Domain(format!("eps must be positive, got {eps}")));
        }
        a.check_zero_mean()?;
        let coeffs = KP2Coefficients::for_frame(frame, params)?;
        let at = tendency(a, &coeffs);
        let att = second_tendency(a, &at, &coeffs);
        let mut fields = BTreeMap::new();
        for (name, e) in expansions(frame, params, eps) {
            fields.insert(name, BundleField { value: e.eval(a, &at)?, tau: e.eval_tau(&at, &att)? });
        }
        fields.insert("A", BundleField { value: a.clone(), tau: at });
        Ok(Self { frame, eps, params: *params, coeffs, t, fields })
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.fields.keys().copied()
    }

    fn entry(&self, name: &str) -> Result<&BundleField> {
        self.fields
            .get(name)
            .ok_or_else(|| Error::Config(format!("{} bundle has no field {name}", self.frame.name())))
    }

    pub fn get(&self, name: &str) -> Result<&SpectralField2D> {
        Ok(&self.entry(name)?.value)
    }

    /// `∂τ` of the named field.
    pub fn get_tau(&self, name: &str) -> Result<&SpectralField2D> {
        Ok(&self.entry(name)?.tau)
    }

    /// Frame speed `c1` or `c1*`.
    pub fn speed(&self) -> f64 {
        self.frame.speed(&self.params)
    }

    /// Writes every field (values only) into `<stem>.bin` / `<stem>.json`.
    pub fn export(&self, stem: &Path) -> Result<()> {
        let a = self.get("A")?;
        let g = a.grid();
        let names: Vec<&str> = self.names().collect();
        let meta = SnapshotMeta {
            kind: format!("ansatz-{}", self.frame.name()),
            nx: g.nx,
            ny: g.ny,
            j0: 0,
            k0: 0,
            t: self.t,
            fields: names.iter().map(|s| s.to_string()).collect(),
            lengths: Some([g.lx, g.ly]),
            eps: Some(self.eps),
        };
        let data: Vec<&[f64]> = names.iter().map(|n| self.fields[n].value.values()).collect();
        write_snapshot(stem, &meta, &data)
    }
}

/// Horizontal `W_ε` with `∂τA` eliminated through KP-II.
#[allow(non_snake_case)]
pub fn horizontal_W(a: &SpectralField2D, params: &ModelParams, eps: f64) -> Result<SpectralField2D> {
    a.check_zero_mean()?;
    let at = tendency(a, &KP2Coefficients::horizontal(params));
    w_expansion(params.c1, eps).eval(a, &at)
}

/// Horizontal `U_ε`.
#[allow(non_snake_case)]
pub fn horizontal_U(a: &SpectralField2D, _params: &ModelParams, eps: f64) -> Result<SpectralField2D> {
    a.check_zero_mean()?;
    u_expansion(eps).eval(a, a)
}

pub fn horizontal_bundle(a: &SpectralField2D, params: &ModelParams, eps: f64) -> Result<AnsatzBundle> {
    AnsatzBundle::build(Frame::Horizontal, a, params, eps, 0.0)
}

pub fn diagonal_bundle(a: &SpectralField2D, params: &ModelParams, eps: f64) -> Result<AnsatzBundle> {
    AnsatzBundle::build(Frame::Diagonal, a, params, eps, 0.0)
}
