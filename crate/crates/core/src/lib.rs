//! Exact computational engine for X-graded spaces with divided-power operators
//! over the quantum p-adic ring.
//!
//! The engine constructs and analyzes the interpolating family of indecomposable
//! highest-weight objects `S_Θ(λ)`: the Weyl object at `Θ = ∅`, the tilting object
//! at `Θ = ℕ`, and for each cyclotomic level `l ∈ Θ` an object that becomes tilting
//! after base change to the level-`l` localization.
//!
//! Module map:
//! - [`qring`]: arithmetic in `ℤ[v,v⁻¹]`, `ℚ(v)`, the local ring `𝒵_𝔭`, and
//!   cyclotomic residue fields; quantum integers and binomials.
//! - [`rootdata`]: Cartan data, weights, dominance order, Weyl characters.
//! - [`lattice`]: exact linear algebra over `ℚ(v)` and `𝒵_𝔭`-lattice calculus
//!   (membership, cyclotomic saturation, torsion quotients).
//! - [`xobj`]: the graded-object data model and the axiom checkers.
//! - [`hatops`]: the hat-space calculus and symbolic identity self-tests.
//! - [`builder`]: the recursive construction of `S_Θ(λ)`, morphism extension and
//!   intertwiner computation.
//! - [`analysis`]: Weyl-filtration multiplicities, tilting-at-level verdicts,
//!   contravariant forms, and the independent rank-one oracle.

pub mod analysis;
pub mod builder;
pub mod error;
pub mod hatops;
pub mod lattice;
pub mod qring;
pub mod rootdata;
pub mod xobj;

pub use error::{Error, Result};
pub use qring::{CycloElem, LaurentPoly, PrimeConfig, RingFrac, ZfpClass};
pub use rootdata::{Character, RootSystem, Weight};
pub use lattice::{Lattice, QvMatrix};
pub use xobj::GradedObject;
pub use builder::{build_s_theta, BuildTrace, ThetaSpec};
