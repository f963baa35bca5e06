use thiserror::Error;

use crate::fock::OccupationVector;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("atom number must be at least 1")]
    NoAtoms,

    #[error("invalid mode label {0}; expected -1, 0 or +1")]
    InvalidMode(i32),

    #[error("occupation {k:?} does not sum to N = {n}")]
    InvalidOccupation { k: OccupationVector, n: usize },

    #[error("DFS index C = {c} lies outside [-{n}, {n}]")]
    ChargeOutOfRange { c: i64, n: usize },

    /// The single-particle jump matrix has no eigenbasis at `mu = 0`.
    #[error("mu = 0 is a non-diagonalizable point of the jump operator")]
    NonDiagonalizable,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("closed-form sum overflowed for k = {k:?}, mu = {mu}")]
    Overflow { k: OccupationVector, mu: f64 },

    #[error("vectors are rank deficient: residual norm {residual:e} at position {index}")]
    RankDeficient { index: usize, residual: f64 },

    #[error("density matrix invariant violated at t = {time}: {what}")]
    InvariantViolation { time: f64, what: String },

    #[error("no threshold crossing found in [{lower}, {upper}]")]
    NoBracket { lower: f64, upper: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
