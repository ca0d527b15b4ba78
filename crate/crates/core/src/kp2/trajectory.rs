use serde::{Deserialize, Serialize};

use super::{KP2Coefficients, Kp2Solver, SolverOptions};
use crate::error::{Error, Result};
use crate::spectral::SpectralField2D;

/// Ceiling on every data norm the well-posedness check looks at.
pub const HYPOTHESIS_BOUND: f64 = 1e8;

/// ξ-mean content, relative to the sup norm, below which `∂η²[∂ξ⁻²∂η²A0 + A0²]` counts as
/// mean-free. Its mean vanishes exactly for data whose ξ-mean of `A0²` is η-independent, but
/// the discrete square leaves roundoff near `1e-12`.
pub const HYPOTHESIS_MEAN_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormCheck {
    pub name: String,
    pub value: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub s: f64,
    pub checks: Vec<NormCheck>,
}

impl HypothesisReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn failures(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| !c.ok)
            .map(|c| format!("{} = {:.3e} (limit {:.0e})", c.name, c.value, HYPOTHESIS_BOUND))
            .collect()
    }
}

/// Discrete finiteness check of the data conditions: `A0 ∈ H^{s+9}`, `∂ξ⁻²∂η²A0 ∈ H^{s+9}`
/// and `∂ξ⁻¹∂η²[∂ξ⁻²∂η²A0 + A0²] ∈ H^{s+3}`. A norm that needs `∂ξ⁻¹` of a field with
/// nonzero ξ-mean is reported as infinite.
pub fn check_hypotheses(a0: &SpectralField2D, s: f64) -> HypothesisReport {
    let mut checks = Vec::new();
    let mut push = |name: &str, value: f64| {
        checks.push(NormCheck { name: name.into(), value, ok: value.is_finite() && value <= HYPOTHESIS_BOUND })
    };
    let inf = f64::INFINITY;
    push("|A0|_{H^{s+9}}", a0.hs_norm(s + 9.0, &[]).unwrap_or(inf));
    push("|dxi^-2 deta^2 A0|_{H^{s+9}}", a0.hs_norm(s + 9.0, &[(-2, 2)]).unwrap_or(inf));
    let third = a0
        .partial(-2, 2)
        .map(|d| &d + &a0.square())
        .and_then(|g| {
            let d = g.derivative(0, 2);
            if d.zero_mode_content() <= HYPOTHESIS_MEAN_TOL * d.sup_norm() {
                d.zero_mean_project().hs_norm(s + 3.0, &[(-1, 0)])
            } else {
                Ok(inf)
            }
        })
        .unwrap_or(inf);
    push("|dxi^-1 deta^2 [dxi^-2 deta^2 A0 + A0^2]|_{H^{s+3}}", third);
    HypothesisReport { s, checks }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kp2Diagnostics {
    pub tau: f64,
    pub l2: f64,
    /// `|‖A(τ)‖ - ‖A0‖| / ‖A0‖`, zero for zero data.
    pub l2_drift: f64,
    /// Largest kξ = 0 content relative to `sup|A|`.
    pub zero_mode: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<(f64, SpectralField2D)>,
    pub diagnostics: Vec<Kp2Diagnostics>,
    pub hypothesis: HypothesisReport,
}

impl Trajectory {
    pub fn max_l2_drift(&self) -> f64 {
        self.diagnostics.iter().fold(0.0, |m, d| m.max(d.l2_drift))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub solver: SolverOptions,
    /// Reject data that fails [`check_hypotheses`].
    pub enforce_hypotheses: bool,
    pub s: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { solver: SolverOptions::default(), enforce_hypotheses: true, s: 0.0 }
    }
}

pub fn diagnostics(a: &SpectralField2D, tau: f64, l2_0: f64) -> Kp2Diagnostics {
    let l2 = a.l2_norm();
    let sup = a.sup_norm();
    Kp2Diagnostics {
        tau,
        l2,
        l2_drift: if l2_0 > 0.0 { (l2 - l2_0).abs() / l2_0 } else { 0.0 },
        zero_mode: if sup > 0.0 { a.zero_mode_content() / sup } else { 0.0 },
    }
}

/// Integrates from `τ = 0` to `tau_end`, storing snapshots at every observer time in range.
pub fn solve(
    a0: &SpectralField2D,
    coeffs: &KP2Coefficients,
    tau_end: f64,
    dtau: f64,
    observers: &[f64],
    opts: &SolveOptions,
) -> Result<Trajectory> {
    let hypothesis = check_hypotheses(a0, opts.s);
    if opts.enforce_hypotheses && !hypothesis.ok() {
        return Err(Error::Rejected(hypothesis.failures()));
    }
    if !(tau_end >= 0.0) {
        return Err(Error::Domain(format!("tau_end must be >= 0, got {tau_end}")));
    }
    let mut solver = Kp2Solver::new(a0, *coeffs, dtau, opts.solver)?;
    let mut times: Vec<f64> = observers.iter().copied().filter(|&t| (0.0..=tau_end).contains(&t)).collect();
    times.push(tau_end);
    times.sort_by(f64::total_cmp);
    times.dedup();

    let start = solver.current();
    let l2_0 = start.l2_norm();
    let mut snapshots = Vec::new();
    let mut diags = Vec::new();
    for &t in &times {
        solver.advance_to(t)?;
        let a = solver.current();
        diags.push(diagnostics(&a, t, l2_0));
        if observers.contains(&t) {
            snapshots.push((t, a));
        }
    }
    Ok(Trajectory { snapshots, diagnostics: diags, hypothesis })
}
