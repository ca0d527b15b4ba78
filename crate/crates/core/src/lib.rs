//! Two-dimensional vector FPU lattices, a periodic pseudo-spectral KP-II solver, and the
//! multi-order long-wave ansatz that ties the two together.

pub mod ansatz;
pub mod error;
pub mod io;
pub mod kp2;
pub mod lattice;
pub mod params;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use kp2::{KP2Coefficients, Kp2Solver};
pub use lattice::{GridSpec, LatticeState, LatticeStateD, LatticeStateH};
pub use params::{Frame, ModelParams};
pub use spectral::{SpectralField2D, SpectralGrid};
pub use verify::{ErrorReport, SlopeFit};
