//! Exact strain-variable dynamics of the two-dimensional vector FPU lattice.

mod diagonal;
mod grid;
mod horizontal;
mod integrate;

pub use diagonal::{hamiltonian_diagonal, rhs_diagonal, LatticeStateD};
pub use grid::{l2_norm, roll, GridSpec};
pub use horizontal::{hamiltonian_horizontal, rhs_horizontal, LatticeStateH};
pub use integrate::{step, Rk4};

use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Six periodic lattice fields evolving under a first-order strain system.
pub trait LatticeState: Clone + Send + Sync {
    const FIELD_NAMES: [&'static str; 6];

    fn zeros(grid: GridSpec) -> Self;
    fn grid(&self) -> &GridSpec;
    fn time(&self) -> f64;
    fn set_time(&mut self, t: f64);
    fn fields(&self) -> [&[f64]; 6];
    fn fields_mut(&mut self) -> [&mut [f64]; 6];

    /// Writes the time derivative of every field into `out`.
    fn rhs_into(&self, params: &ModelParams, out: &mut Self) -> Result<()>;

    fn hamiltonian(&self, params: &ModelParams) -> f64;

    fn check_dims(&self) -> Result<()> {
        let n = self.grid().len();
        for (name, f) in Self::FIELD_NAMES.iter().zip(self.fields()) {
            if f.len() != n {
                return Err(Error::Dimension(format!(
                    "field {name} has {} entries, grid {}x{} needs {n}",
                    f.len(),
                    self.grid().nj,
                    self.grid().nk
                )));
            }
        }
        Ok(())
    }

    fn all_finite(&self) -> bool {
        self.fields().iter().all(|f| f.iter().all(|v| v.is_finite()))
    }
}

/// Either frame's lattice state.
#[derive(Debug, Clone)]
pub enum AnyLatticeState {
    Horizontal(LatticeStateH),
    Diagonal(LatticeStateD),
}
