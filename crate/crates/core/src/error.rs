use thiserror::Error;

use crate::tensor::Polarity;

/// Errors raised by tensor, channel and protocol operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("space mismatch: `{left}` cannot be joined with `{right}`")]
    SpaceMismatch { left: String, right: String },

    #[error("polarity mismatch: a contraction joins one open and one closed node, got {left:?} and {right:?}")]
    PolarityMismatch { left: Polarity, right: Polarity },

    #[error("leg {leg} does not exist on object `{object}` ({legs} legs)")]
    DanglingLeg { object: String, leg: usize, legs: usize },

    #[error("object {0} is not part of the diagram")]
    UnknownObject(usize),

    #[error("edge {0} is not an active edge of the diagram")]
    UnknownEdge(usize),

    #[error("leg {leg} of object {object} already takes part in an edge")]
    LegReused { object: usize, leg: usize },

    #[error("contraction order must list every edge exactly once")]
    NotAPermutation,

    #[error("data length {got} does not match the product of leg dimensions {expected}")]
    DataLength { expected: usize, got: usize },

    #[error("tensor data contains a non-finite entry")]
    NonFinite,

    #[error("space `{0}` must have dimension at least 1")]
    ZeroDimension(String),

    #[error("row and column legs must partition all {legs} legs")]
    BadPartition { legs: usize },

    #[error("matricization is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: deviation {deviation:e} exceeds {allowed:e}")]
    NotHermitian { deviation: f64, allowed: f64 },

    #[error("basis is not orthonormal: deviation {0:e}")]
    NotOrthonormal(f64),

    #[error("operator is not unitary: deviation {0:e}")]
    NotUnitary(f64),

    #[error("map is not an isometry: deviation {0:e}")]
    NotIsometry(f64),

    #[error("ket is not normalized: norm {0}")]
    NotNormalized(f64),

    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),

    #[error("object does not have the expected shape: {0}")]
    Shape(String),

    #[error("entangled ket is not invertible: Schmidt rank {rank} < {dim}")]
    NotInvertible { rank: usize, dim: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("operator must be nonzero")]
    ZeroOperator,

    #[error("protocol is not physically realizable: {0}")]
    Unrealizable(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
