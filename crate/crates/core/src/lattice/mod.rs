//! Exact linear algebra over `ℚ(v)` and `𝒵_𝔭`-lattice calculus.

mod lattice;
mod matrix;

pub use lattice::{
    membership_oracle_cramer, saturate_theta, span_from_generators, span_from_generators_tracked,
    tau_saturate, torsion_min_generators, Lattice, Membership,
};
pub use matrix::{clear_to_primitive, det_bareiss, solve_matrix, strip_rows, QvMatrix, Rref};

#[allow(unused_imports)]
pub(crate) use lattice::{lift_cyclo_to_zfp, reduce_frac_mod_tau};
