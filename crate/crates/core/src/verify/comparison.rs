use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::energy::{coercivity_check, energy_diagonal_perturbation, energy_horizontal_perturbation};
use super::residual::{lattice_residuals, LatticeResidual};
use super::sampled::{perturbation_diagonal, perturbation_horizontal, SampledAnsatz};
use crate::ansatz::{lattice_state_from_bundle, AnsatzBundle, LatticeGeometry, LatticeSampler};
use crate::error::{Error, Result};
use crate::io::write_atomic;
use crate::kp2::{check_hypotheses, KP2Coefficients, Kp2Solver, SolverOptions};
use crate::lattice::{l2_norm, roll, AnyLatticeState, LatticeState, LatticeStateD, LatticeStateH, Rk4};
use crate::params::{Frame, ModelParams};
use crate::spectral::SpectralField2D;

/// Run parameters of one co-evolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparisonOptions {
    pub eps: f64,
    /// Horizon in slow time; the lattice runs to `t = τ0 ε⁻³`.
    pub tau0: f64,
    /// Nominal lattice step; shrunk so that a whole number of steps reaches the horizon.
    pub dt: f64,
    /// Nominal KP-II step.
    pub dtau: f64,
    /// Lattice steps between observations.
    pub stride: usize,
    /// A-priori energy level; the report records whether `E(t)` stayed below it.
    #[serde(default)]
    pub e0: Option<f64>,
    /// Coercivity constant; observations above it are flagged.
    #[serde(default)]
    pub k0: Option<f64>,
}

impl ComparisonOptions {
    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {v}")))
            }
        };
        pos("eps", self.eps)?;
        pos("tau0", self.tau0)?;
        pos("dt", self.dt)?;
        pos("dtau", self.dtau)?;
        if self.stride == 0 {
            return Err(Error::Config("stride must be at least 1".into()));
        }
        Ok(())
    }
}

/// Names of the six error components, in report order.
pub fn component_names(frame: Frame) -> [&'static str; 6] {
    match frame {
        Frame::Horizontal => ["u1", "u2", "v1", "v2", "w", "z"],
        Frame::Diagonal => ["al", "ad", "ax", "ay", "u", "v"],
    }
}

/// Names of the six leading-term diagnostics, in report order.
pub fn leading_names(frame: Frame) -> [&'static str; 6] {
    match frame {
        Frame::Horizontal => ["u1-e2A", "u2", "v1", "v2", "w+e2cA", "z"],
        Frame::Diagonal => ["u1-e2A", "u2", "xdot+e2cA", "v1-e2A", "v2", "chidot+e2cA"],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub t: f64,
    /// `‖field - ε² ansatz‖_{ℓ²}` for each lattice field.
    pub errors: [f64; 6],
    /// Distances to the leading-order profiles `ε²A`, `-ε²cA`, `0`.
    pub leading: [f64; 6],
    pub energy: f64,
    pub q: f64,
    pub hamiltonian: f64,
    pub coercivity: f64,
}

impl Observation {
    pub fn total_error(&self) -> f64 {
        self.errors.iter().sum()
    }

    pub fn total_leading(&self) -> f64 {
        self.leading.iter().sum()
    }

    fn is_finite(&self) -> bool {
        self.errors.iter().chain(&self.leading).chain(&[self.energy, self.q, self.hamiltonian]).all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunFailure {
    pub time: f64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualNorm {
    pub name: String,
    pub l2: f64,
    pub sup: f64,
}

impl From<&LatticeResidual> for ResidualNorm {
    fn from(r: &LatticeResidual) -> Self {
        Self { name: r.name.clone(), l2: r.l2, sup: r.sup }
    }
}

/// Outcome of one co-evolution of the lattice and the KP-II approximation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub frame: Frame,
    pub params: ModelParams,
    pub options: ComparisonOptions,
    pub nj: usize,
    pub nk: usize,
    pub steps: usize,
    pub dt_used: f64,
    pub components: Vec<String>,
    pub leading_components: Vec<String>,
    pub observations: Vec<Observation>,
    /// Residual norms at `t = 0`.
    pub residuals: Vec<ResidualNorm>,
    /// Largest `|E'|/(ε^{7/2}√E + ε³E)` over interior observations, by centered differences.
    pub energy_growth_ratio: Option<f64>,
    pub e0_exceeded: bool,
    pub coercivity_failed: bool,
    pub coercivity_above_k0: bool,
    pub failure: Option<RunFailure>,
}

impl ErrorReport {
    pub fn times(&self) -> Vec<f64> {
        self.observations.iter().map(|o| o.t).collect()
    }

    /// `max_t` of the summed error components.
    pub fn max_error(&self) -> f64 {
        self.observations.iter().fold(0.0, |m, o| m.max(o.total_error()))
    }

    pub fn max_leading(&self) -> f64 {
        self.observations.iter().fold(0.0, |m, o| m.max(o.total_leading()))
    }

    pub fn max_q(&self) -> f64 {
        self.observations.iter().fold(0.0, |m, o| m.max(o.q))
    }

    /// `max_t Q(t)/ε^{1/2}`.
    pub fn q_envelope(&self) -> f64 {
        self.max_q() / self.options.eps.sqrt()
    }

    pub fn completed(&self) -> bool {
        self.failure.is_none()
    }

    /// One row per observation: `t`, the six error components, `E`, `Q`, `H`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t");
        for c in &self.components {
            write!(s, ",err_{c}").unwrap();
        }
        s.push_str(",E,Q,H\n");
        for o in &self.observations {
            write!(s, "{:.16e}", o.t).unwrap();
            for v in o.errors.iter().chain([o.energy, o.q, o.hamiltonian].iter()) {
                write!(s, ",{v:.16e}").unwrap();
            }
            s.push('\n');
        }
        s
    }

    /// One row per observation: `t`, the six leading-term distances, their sum.
    pub fn leading_csv(&self) -> String {
        let mut s = String::from("t");
        for c in &self.leading_components {
            write!(s, ",{c}").unwrap();
        }
        s.push_str(",sum\n");
        for o in &self.observations {
            write!(s, "{:.16e}", o.t).unwrap();
            for v in o.leading.iter().chain([o.total_leading()].iter()) {
                write!(s, ",{v:.16e}").unwrap();
            }
            s.push('\n');
        }
        s
    }

    pub fn summary(&self) -> RunSummary {
        RunSummary {
            frame: self.frame,
            eps: self.options.eps,
            nj: self.nj,
            nk: self.nk,
            steps: self.steps,
            observations: self.observations.len(),
            max_error: self.max_error(),
            max_leading: self.max_leading(),
            max_q: self.max_q(),
            q_envelope: self.q_envelope(),
            energy_growth_ratio: self.energy_growth_ratio,
            e0_exceeded: self.e0_exceeded,
            coercivity_failed: self.coercivity_failed,
            coercivity_above_k0: self.coercivity_above_k0,
            residuals: self.residuals.clone(),
            failure: self.failure.clone(),
        }
    }

    /// Writes `errors.csv`, `leading.csv` and `summary.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        write_atomic(&dir.join("errors.csv"), self.to_csv().as_bytes())?;
        write_atomic(&dir.join("leading.csv"), self.leading_csv().as_bytes())?;
        let json = serde_json::to_string_pretty(&self.summary())?;
        write_atomic(&dir.join("summary.json"), json.as_bytes())
    }
}

/// Scalar digest of an [`ErrorReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub frame: Frame,
    pub eps: f64,
    pub nj: usize,
    pub nk: usize,
    pub steps: usize,
    pub observations: usize,
    pub max_error: f64,
    pub max_leading: f64,
    pub max_q: f64,
    pub q_envelope: f64,
    pub energy_growth_ratio: Option<f64>,
    pub e0_exceeded: bool,
    pub coercivity_failed: bool,
    pub coercivity_above_k0: bool,
    pub residuals: Vec<ResidualNorm>,
    pub failure: Option<RunFailure>,
}

/// Frame-specific measurements of a lattice state against the sampled ansatz.
trait Measure: LatticeState + Sized {
    fn from_any(s: AnyLatticeState) -> Result<Self>;
    fn perturbation(&self, s: &SampledAnsatz) -> Result<Self>;
    fn energy(p: &Self, s: &SampledAnsatz, params: &ModelParams) -> Result<f64>;
    fn leading(&self, s: &SampledAnsatz, params: &ModelParams) -> Result<[f64; 6]>;
}

fn dist(f: &[f64], a: &[f64], k: f64) -> f64 {
    f.iter().zip(a).map(|(x, y)| (x - k * y).powi(2)).sum::<f64>().sqrt()
}

impl Measure for LatticeStateH {
    fn from_any(s: AnyLatticeState) -> Result<Self> {
        match s {
            AnyLatticeState::Horizontal(s) => Ok(s),
            AnyLatticeState::Diagonal(_) => Err(Error::Config("expected a horizontal state".into())),
        }
    }

    fn perturbation(&self, s: &SampledAnsatz) -> Result<Self> {
        perturbation_horizontal(self, s)
    }

    fn energy(p: &Self, s: &SampledAnsatz, params: &ModelParams) -> Result<f64> {
        Ok(energy_horizontal_perturbation(p, s.get("A")?, s.get("U")?, params, s.eps))
    }

    fn leading(&self, s: &SampledAnsatz, params: &ModelParams) -> Result<[f64; 6]> {
        let a = s.get("A")?;
        let e2 = s.eps * s.eps;
        Ok([
            dist(&self.u1, a, e2),
            l2_norm(&self.u2),
            l2_norm(&self.v1),
            l2_norm(&self.v2),
            dist(&self.w, a, -e2 * params.c1),
            l2_norm(&self.z),
        ])
    }
}

impl Measure for LatticeStateD {
    fn from_any(s: AnyLatticeState) -> Result<Self> {
        match s {
            AnyLatticeState::Diagonal(s) => Ok(s),
            AnyLatticeState::Horizontal(_) => Err(Error::Config("expected a diagonal state".into())),
        }
    }

    fn perturbation(&self, s: &SampledAnsatz) -> Result<Self> {
        perturbation_diagonal(self, s)
    }

    fn energy(p: &Self, s: &SampledAnsatz, params: &ModelParams) -> Result<f64> {
        energy_diagonal_perturbation(p, s, params, s.eps)
    }

    fn leading(&self, s: &SampledAnsatz, params: &ModelParams) -> Result<[f64; 6]> {
        let a = s.get("A")?;
        let e2 = s.eps * s.eps;
        let cs = params.c1_star();
        let g = &self.grid;
        let add = |x: &[f64], y: &[f64]| -> Vec<f64> { x.iter().zip(y).map(|(p, q)| p + q).collect() };
        let sub = |x: &[f64], y: &[f64]| -> Vec<f64> { x.iter().zip(y).map(|(p, q)| p - q).collect() };
        let u1 = add(&self.ax, &self.al);
        let u2 = add(&self.ay, &self.al);
        let v1 = sub(&self.ad, &roll(g, &self.ay, 1, 0));
        let v2 = sub(&self.ad, &roll(g, &self.ax, 0, 1));
        Ok([
            dist(&u1, a, e2),
            l2_norm(&u2),
            dist(&self.u, a, -e2 * cs),
            dist(&v1, a, e2),
            l2_norm(&v2),
            dist(&self.v, a, -e2 * cs),
        ])
    }
}

/// Co-evolves the lattice from the full ansatz built on `a0` together with the KP-II
/// solution, observing every `stride` steps and at the horizon.
///
/// The box of `a0` must be commensurate with `eps`, and `a0` must pass the data check of
/// [`check_hypotheses`]. A blow-up on either side ends the run
/// early; the report then carries the observations made so far and the failure time.
pub fn run_comparison(a0: &SpectralField2D, params: &ModelParams, frame: Frame, opts: &ComparisonOptions) -> Result<ErrorReport> {
    opts.validate()?;
    frame.check(params)?;
    let hyp = check_hypotheses(a0, 0.0);
    if !hyp.ok() {
        return Err(Error::Rejected(hyp.failures()));
    }
    match frame {
        Frame::Horizontal => run::<LatticeStateH>(a0, params, frame, opts),
        Frame::Diagonal => run::<LatticeStateD>(a0, params, frame, opts),
    }
}

struct Observer<'a> {
    params: &'a ModelParams,
    sampler: LatticeSampler,
    k0: Option<f64>,
}

struct Measured {
    obs: Observation,
    coercivity_failed: bool,
    above_k0: bool,
}

impl Observer<'_> {
    fn observe<S: Measure>(&self, state: &S, a: &SpectralField2D, eps: f64) -> Result<Measured> {
        let frame = self.sampler.geom.frame;
        let bundle = AnsatzBundle::build(frame, a, self.params, eps, state.time())?;
        let s = SampledAnsatz::new(&bundle, &self.sampler)?;
        let p = state.perturbation(&s)?;
        let e2 = eps * eps;
        let mut errors = [0.0; 6];
        for (e, f) in errors.iter_mut().zip(p.fields()) {
            *e = e2 * l2_norm(f);
        }
        let energy = S::energy(&p, &s, self.params)?;
        let c = coercivity_check(&p, energy, self.k0);
        let obs = Observation {
            t: state.time(),
            errors,
            leading: state.leading(&s, self.params)?,
            energy,
            q: (2.0 * energy.max(0.0)).sqrt(),
            hamiltonian: state.hamiltonian(self.params),
            coercivity: c.ratio,
        };
        Ok(Measured { obs, coercivity_failed: c.failed, above_k0: c.above_k0 })
    }
}

fn run<S: Measure>(a0: &SpectralField2D, params: &ModelParams, frame: Frame, opts: &ComparisonOptions) -> Result<ErrorReport> {
    let eps = opts.eps;
    let e3 = eps.powi(3);
    let geom = LatticeGeometry::for_grid(frame, params, eps, a0.grid())?;
    let sampler = LatticeSampler::new(geom);
    let coeffs = KP2Coefficients::for_frame(frame, params)?;
    let mut solver = Kp2Solver::new(a0, coeffs, opts.dtau, SolverOptions::default())?;
    let a_start = solver.current();

    let bundle = AnsatzBundle::build(frame, &a_start, params, eps, 0.0)?;
    let residuals = lattice_residuals(&bundle, &sampler)?.fields.iter().map(ResidualNorm::from).collect();
    let mut state = S::from_any(lattice_state_from_bundle(&bundle, &sampler)?)?;
    drop(bundle);

    let horizon = opts.tau0 / e3;
    let steps = ((horizon / opts.dt) - 1e-9).ceil().max(1.0) as usize;
    let dt = horizon / steps as f64;

    let observer = Observer { params, sampler, k0: opts.k0 };
    let mut report = ErrorReport {
        frame,
        params: *params,
        options: *opts,
        nj: geom.nj,
        nk: geom.nk,
        steps,
        dt_used: dt,
        components: component_names(frame).iter().map(|s| s.to_string()).collect(),
        leading_components: leading_names(frame).iter().map(|s| s.to_string()).collect(),
        observations: Vec::new(),
        residuals,
        energy_growth_ratio: None,
        e0_exceeded: false,
        coercivity_failed: false,
        coercivity_above_k0: false,
        failure: None,
    };
    let record = |report: &mut ErrorReport, m: Measured| {
        report.e0_exceeded |= opts.e0.is_some_and(|e0| m.obs.energy > e0);
        report.coercivity_failed |= m.coercivity_failed;
        report.coercivity_above_k0 |= m.above_k0;
        report.observations.push(m.obs);
    };
    record(&mut report, observer.observe(&state, &a_start, eps)?);

    let mut rk = Rk4::new(&state);
    for n in 1..=steps {
        if let Err(e) = rk.step(&mut state, params, dt) {
            return fail(report, e);
        }
        state.set_time(n as f64 * dt);
        if n % opts.stride == 0 || n == steps {
            if let Err(e) = solver.advance_to(e3 * state.time()) {
                return fail(report, e);
            }
            let m = observer.observe(&state, &solver.current(), eps)?;
            if !m.obs.is_finite() {
                let last = report.observations.last().map_or(0.0, |o| o.t);
                return fail(report, Error::BlowUp { what: "error norms".into(), last_finite_time: last });
            }
            record(&mut report, m);
        }
    }
    report.energy_growth_ratio = energy_growth_ratio(&report.observations, eps);
    Ok(report)
}

fn fail(mut report: ErrorReport, e: Error) -> Result<ErrorReport> {
    match e {
        Error::BlowUp { what, last_finite_time } => {
            report.failure = Some(RunFailure { time: last_finite_time, message: format!("{what} overflowed") });
            report.energy_growth_ratio = energy_growth_ratio(&report.observations, report.options.eps);
            Ok(report)
        }
        other => Err(other),
    }
}

/// `max |E'|/(ε^{7/2}√E + ε³E)` with `E'` from centered differences; observations with
/// vanishing `E` are skipped.
pub fn energy_growth_ratio(obs: &[Observation], eps: f64) -> Option<f64> {
    let (k1, k2) = (eps.powf(3.5), eps.powi(3));
    let mut best: Option<f64> = None;
    for w in obs.windows(3) {
        let e = w[1].energy;
        if !(e > 0.0) {
            continue;
        }
        let de = (w[2].energy - w[0].energy) / (w[2].t - w[0].t);
        let den = k1 * e.sqrt() + k2 * e;
        if den > f64::MIN_POSITIVE {
            let r = de.abs() / den;
            best = Some(best.map_or(r, |b: f64| b.max(r)));
        }
    }
    best
}
