//! Pseudo-spectral KP-II solver on a periodic rectangle.

mod coeffs;
mod presets;
mod solver;
mod trajectory;

pub use coeffs::{normalize, KP2Coefficients, Scaling};
pub use presets::{line_soliton_profile, InitialData};
pub use solver::{kp2_step, linear_symbol, phi123, second_tendency, tendency, Kp2Solver, SolverOptions};
pub use trajectory::{
    check_hypotheses, diagnostics, solve, HypothesisReport, Kp2Diagnostics, NormCheck, SolveOptions, Trajectory,
    HYPOTHESIS_BOUND, HYPOTHESIS_MEAN_TOL,
};
