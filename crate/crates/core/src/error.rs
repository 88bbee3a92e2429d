//! Error type shared by all engine modules.

use thiserror::Error;

/// Errors surfaced by the engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid root system: {0}")]
    InvalidRootSystem(String),

    #[error("prime constraint violated: {0}")]
    PrimeConstraint(String),

    #[error("weight {0} is not dominant")]
    NotDominant(String),

    #[error("valuation of zero is undefined")]
    UndefinedValuation,

    #[error("division is not exact")]
    InexactDivision,

    #[error("lattice is not certified")]
    NotCertified,

    #[error("not a torsion quotient: ranks {0} vs {1} differ over the fraction field")]
    NotATorsionQuotient(usize, usize),

    #[error("generator does not lie in the given lattice")]
    NotInLattice,

    #[error("torsion at a non-cyclotomic prime; object is outside the supported class")]
    NonCyclotomicTorsion,

    #[error("malformed object data: {0}")]
    MalformedObject(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
