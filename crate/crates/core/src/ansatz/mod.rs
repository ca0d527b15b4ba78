//! Multi-order long-wave ansatz built from a KP-II solution, and its sampling onto the lattice.

mod bundle;
mod expansion;
mod relations;
mod sample;

pub use bundle::{diagonal_bundle, expansions, horizontal_U, horizontal_W, horizontal_bundle, AnsatzBundle, BundleField};
pub use expansion::{
    d_expansion, l_expansion, term, u_expansion, v_expansion, w_expansion, x_expansion, y_expansion, Expansion, Term,
};
pub use relations::{defining_relation_residuals, RelationResidual};
pub use sample::{
    initial_lattice_state, lattice_state_from_bundle, sample_to_lattice, LatticeGeometry, LatticeSampler,
};
