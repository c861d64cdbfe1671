use thiserror::Error;

/// Errors raised by the linear-algebra layer, the protocol runners and the
/// analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("wire mismatch: {0}")]
    WireMismatch(String),

    #[error("unknown wire `{0}`")]
    UnknownWire(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),

    #[error("reduced states differ on the untouched wires (distance {0:.3e})")]
    ReducedMismatch(f64),

    #[error("malformed strategy: {0}")]
    MalformedStrategy(String),

    #[error("realizations do not reproduce the density matrices (deviation {0:.3e})")]
    RealizationMismatch(f64),

    #[error("expected {expected} parameters, got {got}")]
    BadParameterCount { expected: usize, got: usize },

    #[error("the two strategies deposit different states (distance {0:.3e})")]
    DepositMismatch(f64),

    #[error("attack is not a single unitary on the message and ancilla: {0}")]
    NotUnitaryAttack(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
