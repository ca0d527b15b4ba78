//! Versioned JSON run configuration.

use std::path::{Path, PathBuf};

use fpukp::kp2::InitialData;
use fpukp::{Frame, ModelParams};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;
pub const ENV_PREFIX: &str = "KP2FPU_";

/// Top-level fields that `KP2FPU_<FIELD>` may override. Values are parsed as JSON, falling
/// back to a plain string.
const ENV_FIELDS: &[&str] = &["eps", "eps_list", "tau0", "dt", "dtau", "stride", "seed", "e0", "k0"];

/// Handled by the argument parser rather than the config loader.
const FLAG_VARS: &[&str] = &["CONFIG", "OUT", "THREADS", "FRAME"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    pub frame: Frame,
    pub params: ModelParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub eps_list: Vec<f64>,
    #[serde(rename = "box")]
    pub domain: BoxSpec,
    pub grid: GridSize,
    pub tau0: f64,
    /// Lattice step; defaults to `min(0.05, 0.25/max(c1, c2))`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    pub dtau: f64,
    pub initial: InitialData,
    pub stride: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k0: Option<f64>,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub sampling: SamplingSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub lxi: f64,
    pub leta: f64,
    /// Snap the box to the nearest lattice-commensurate one for each `ε`. Without snapping an
    /// incommensurate box is an error.
    #[serde(default = "yes")]
    pub snap: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSize {
    pub nx: usize,
    pub ny: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    /// Minimum slope of `‖Res^W‖` (horizontal) or of the aggregate residual (diagonal).
    pub residual_slope: f64,
    /// Minimum slope of the max-over-time error sum.
    pub error_slope: f64,
    /// Exponent of the injected data in synthetic sweeps.
    pub synthetic_power: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { residual_slope: 3.3, error_slope: 2.3, synthetic_power: 2.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplingSpec {
    /// Sobolev index of the reference norm.
    pub s: f64,
    /// Number of random fields.
    pub count: usize,
    /// Largest wavenumber index in either direction.
    pub max_mode: u32,
}

impl Default for SamplingSpec {
    fn default() -> Self {
        Self { s: 2.0, count: 5, max_mode: 4 }
    }
}

fn yes() -> bool {
    true
}

impl RunConfig {
    /// Reads `path` and applies `KP2FPU_*` overrides taken from `vars`.
    pub fn load(path: &Path, vars: impl IntoIterator<Item = (String, String)>) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text, vars)
    }

    pub fn parse(text: &str, vars: impl IntoIterator<Item = (String, String)>) -> CliResult<Self> {
        let mut value: Value = serde_json::from_str(text).map_err(|e| CliError::config(".", e.to_string()))?;
        apply_env(&mut value, vars)?;
        let cfg: RunConfig = serde_path_to_error::deserialize(value).map_err(|e| {
            let path = e.path().to_string();
            CliError::config(path, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.version != SCHEMA_VERSION {
            return Err(CliError::config("version", format!("unsupported schema version {} (expected {SCHEMA_VERSION})", self.version)));
        }
        self.params.validate().map_err(|e| CliError::config("params", e.to_string()))?;
        self.frame.check(&self.params).map_err(|e| CliError::config("params", e.to_string()))?;
        for (i, &e) in self.eps_list.iter().enumerate() {
            check_eps(&format!("eps_list[{i}]"), e)?;
        }
        if let Some(e) = self.eps {
            check_eps("eps", e)?;
        }
        if self.eps.is_none() && self.eps_list.is_empty() {
            return Err(CliError::config(".", "missing field `eps` (or `eps_list`)"));
        }
        positive("box.lxi", self.domain.lxi)?;
        positive("box.leta", self.domain.leta)?;
        positive("tau0", self.tau0)?;
        positive("dtau", self.dtau)?;
        if let Some(dt) = self.dt {
            positive("dt", dt)?;
        }
        if self.stride == 0 {
            return Err(CliError::config("stride", "must be at least 1"));
        }
        for (name, n) in [("grid.nx", self.grid.nx), ("grid.ny", self.grid.ny)] {
            if n < 4 || n % 2 != 0 {
                return Err(CliError::config(name, format!("must be even and at least 4, got {n}")));
            }
        }
        if !(self.sampling.s > 1.0) {
            return Err(CliError::config("sampling.s", format!("must exceed 1, got {}", self.sampling.s)));
        }
        Ok(())
    }

    /// The single `ε` of a run: `eps`, or the only entry of `eps_list`.
    pub fn single_eps(&self) -> CliResult<f64> {
        match (self.eps, self.eps_list.as_slice()) {
            (Some(e), _) => Ok(e),
            (None, [e]) => Ok(*e),
            _ => Err(CliError::config("eps", "this command needs a single `eps`")),
        }
    }

    /// `eps_list` if present, otherwise `[eps]`.
    pub fn eps_values(&self) -> Vec<f64> {
        if self.eps_list.is_empty() {
            self.eps.into_iter().collect()
        } else {
            self.eps_list.clone()
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt.unwrap_or_else(|| self.params.default_dt())
    }
}

fn check_eps(path: &str, e: f64) -> CliResult<()> {
    if e > 0.0 && e < 1.0 {
        Ok(())
    } else {
        Err(CliError::config(path, format!("eps must lie in (0, 1), got {e}")))
    }
}

fn positive(path: &str, v: f64) -> CliResult<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::config(path, format!("must be positive and finite, got {v}")))
    }
}

fn apply_env(value: &mut Value, vars: impl IntoIterator<Item = (String, String)>) -> CliResult<()> {
    let obj = value.as_object_mut().ok_or_else(|| CliError::config(".", "config must be a JSON object"))?;
    for (key, raw) in vars {
        let Some(name) = key.strip_prefix(ENV_PREFIX) else { continue };
        if FLAG_VARS.contains(&name) {
            continue;
        }
        let field = name.to_ascii_lowercase();
        if !ENV_FIELDS.contains(&field.as_str()) {
            return Err(CliError::Usage(format!(
                "unknown override {key}; overridable fields are {}",
                ENV_FIELDS.iter().map(|f| format!("{ENV_PREFIX}{}", f.to_ascii_uppercase())).collect::<Vec<_>>().join(", ")
            )));
        }
        let v = serde_json::from_str(&raw).unwrap_or(Value::String(raw));
        obj.insert(field, v);
    }
    Ok(())
}
