//! Residuals, modified energies, co-evolution error reports and convergence fits.

mod comparison;
mod energy;
mod fit;
mod residual;
mod sampled;
mod sampling;

pub use comparison::{
    component_names, energy_growth_ratio, leading_names, run_comparison, ComparisonOptions, ErrorReport, Observation,
    ResidualNorm, RunFailure, RunSummary,
};
pub use energy::{
    coercivity_check, energy_diagonal, energy_diagonal_perturbation, energy_horizontal, energy_horizontal_perturbation,
    Coercivity,
};
pub use fit::{fit_slope, SlopeFit};
pub use residual::{lattice_residuals, residual_diagonal, residual_horizontal, LatticeResidual, ResidualSet};
pub use sampled::{perturbation_diagonal, perturbation_horizontal, SampledAnsatz};
pub use sampling::{sampling_bound_check, SamplingRow, SamplingTable};
