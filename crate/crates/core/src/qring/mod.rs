//! Exact arithmetic in `ℤ[v,v⁻¹]`, `ℚ(v)`, `𝒵_𝔭`, and the cyclotomic residue
//! fields, together with quantum-number combinatorics.

mod cyclo;
mod frac;
mod laurent;
mod prime;
mod quantum;

pub use cyclo::{cyclo_reduce, zeta_valuation, CycloElem};
pub use frac::{tau_valuation, zfp_is_unit, zfp_member, RingFrac, ZfpClass};
pub use laurent::{normalize_primitive, poly_gcd, LaurentPoly};
pub use prime::PrimeConfig;
pub use quantum::{
    cyclotomic_polynomial, cyclotomic_tau, quantum_binomial, quantum_factorial, quantum_integer,
};

pub(crate) use frac::mod_inverse;
pub use frac::poly_tau_valuation;
