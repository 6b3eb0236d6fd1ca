//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("group orders must be a non-empty list")]
    EmptyOrders,

    #[error("group order at position {index} must be >= 1, got {order}")]
    NonPositiveOrder { index: usize, order: i64 },

    #[error("shape mismatch in {what}: expected {expected}, got {found}")]
    ShapeMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("residue {residue} at position {index} is not reduced modulo {order}")]
    UnreducedResidue {
        index: usize,
        residue: i64,
        order: usize,
    },

    #[error("invalid L^p exponent: p must satisfy 1 <= p <= inf")]
    InvalidExponent,

    #[error("window function must be nonzero")]
    ZeroWindow,

    #[error("window is not parity symmetric (R phi0 != +/- phi0)")]
    WindowWithoutParity,

    #[error("invalid cocycle table: {reason}")]
    InvalidCocycleTable { reason: String },

    #[error("internal consistency failure in {check}: residual {residual:e} exceeds {tol:e}")]
    ConsistencyFailure {
        check: &'static str,
        residual: f64,
        tol: f64,
    },

    #[error("shift by {shift} exhausts the window of radius {radius}; enlarge the window")]
    WindowExhaustion { shift: i64, radius: i64 },

    #[error("diagonal at offset {offset:?} has an unstructured tail; limit undefined for this class")]
    UnstructuredTail { offset: Vec<i64> },

    #[error("diagonal at offset {offset:?} has a periodic tail; a residue class is required")]
    ResidueClassRequired { offset: Vec<i64> },

    #[error("tail data inconsistent with window values at offset {offset:?}: deviation {deviation:e}")]
    TailInconsistent { offset: Vec<i64>, deviation: f64 },

    #[error("window too small: {what} requires at least {required}")]
    WindowTooSmall { what: &'static str, required: i64 },

    #[error("invalid parameter: {reason}")]
    InvalidParameter { reason: String },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
