//! Spring constants of the lattice and the propagation frame.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients of the nearest-neighbour spring potential
/// `V(r, s) = (c1² r² + c2² s²)/2 + alpha1 r³/3 + alpha2 r s²/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub c1: f64,
    pub c2: f64,
    pub alpha1: f64,
    pub alpha2: f64,
}

const MODE_TOL: f64 = 1e-12;

impl ModelParams {
    pub fn new(c1: f64, c2: f64, alpha1: f64, alpha2: f64) -> Result<Self> {
        let p = Self { c1, c2, alpha1, alpha2 };
        p.validate()?;
        Ok(p)
    }

    /// The reduction `c2 = c1`, `alpha2 = 2 alpha1` under which diagonal waves close on `x = y`.
    pub fn diagonal(c1: f64, alpha1: f64) -> Result<Self> {
        Self::new(c1, c1, alpha1, 2.0 * alpha1)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("c1", self.c1), ("c2", self.c2), ("alpha1", self.alpha1), ("alpha2", self.alpha2)] {
            if !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be finite, got {v}")));
            }
        }
        if self.c1 <= 0.0 || self.c2 <= 0.0 {
            return Err(Error::Domain(format!(
                "spring speeds must be positive, got c1 = {}, c2 = {}",
                self.c1, self.c2
            )));
        }
        Ok(())
    }

    /// Diagonal propagation speed `sqrt(c1² + c2²)/2`.
    pub fn c1_star(&self) -> f64 {
        (self.c1 * self.c1 + self.c2 * self.c2).sqrt() / 2.0
    }

    /// Transverse drift speed `sqrt(c1² - c2²)/2`; zero when `c2 >= c1`.
    pub fn c2_star(&self) -> f64 {
        (self.c1 * self.c1 - self.c2 * self.c2).max(0.0).sqrt() / 2.0
    }

    pub fn is_diagonal_mode(&self) -> bool {
        (self.c2 - self.c1).abs() <= MODE_TOL * self.c1
            && (self.alpha2 - 2.0 * self.alpha1).abs() <= MODE_TOL * self.alpha1.abs().max(1.0)
    }

    pub fn require_diagonal_mode(&self) -> Result<()> {
        if self.is_diagonal_mode() {
            Ok(())
        } else {
            Err(Error::Mode(format!(
                "c1 = {}, c2 = {}, alpha1 = {}, alpha2 = {}",
                self.c1, self.c2, self.alpha1, self.alpha2
            )))
        }
    }

    /// Default lattice time step `min(0.05, 0.25 / max(c1, c2))`.
    pub fn default_dt(&self) -> f64 {
        0.05_f64.min(0.25 / self.c1.max(self.c2))
    }
}

/// Propagation direction relative to the square lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    Horizontal,
    Diagonal,
}

impl Frame {
    /// Long-wave speed of the moving frame `xi = eps (j - speed t)`.
    pub fn speed(&self, params: &ModelParams) -> f64 {
        match self {
            Frame::Horizontal => params.c1,
            Frame::Diagonal => params.c1_star(),
        }
    }

    pub fn check(&self, params: &ModelParams) -> Result<()> {
        params.validate()?;
        match self {
            Frame::Horizontal => Ok(()),
            Frame::Diagonal => params.require_diagonal_mode(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Frame::Horizontal => "horizontal",
            Frame::Diagonal => "diagonal",
        }
    }
}

impl std::str::FromStr for Frame {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "horizontal" => Ok(Frame::Horizontal),
            "diagonal" => Ok(Frame::Diagonal),
            other => Err(Error::Config(format!("unknown frame '{other}' (expected horizontal or diagonal)"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_speeds() {
        let p = ModelParams::diagonal(1.0, 0.5).unwrap();
        assert!(p.is_diagonal_mode());
        assert!((p.c1_star() - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(p.c2_star(), 0.0);
    }

    #[test]
    fn general_speeds() {
        let p = ModelParams::new(2.0, 1.0, 1.0, 1.0).unwrap();
        assert!((p.c1_star() - 5f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((p.c2_star() - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert!(!p.is_diagonal_mode());
        assert!(matches!(p.require_diagonal_mode(), Err(Error::Mode(_))));
    }

    #[test]
    fn rejects_nonpositive_speed() {
        assert!(ModelParams::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, -1.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn default_dt_rule() {
        assert_eq!(ModelParams::new(1.0, 1.0, 0.0, 0.0).unwrap().default_dt(), 0.05);
        assert_eq!(ModelParams::new(10.0, 1.0, 0.0, 0.0).unwrap().default_dt(), 0.025);
    }
}
