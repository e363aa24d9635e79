use thiserror::Error;

pub type Result<T> = std::result::Result<T, SpectralError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("index point {point:?} is not a node of the index grid")]
    IndexOffGrid { point: Vec<f64> },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("kernel coordinate system is ill-conditioned (condition estimate {condition:.3e}, limit {limit:.3e})")]
    IllConditioned { condition: f64, limit: f64 },

    #[error("family is not a basis: {0}")]
    NotABasis(String),

    /// The datum carries coordinate mass where the symbol vanishes.
    #[error("not divisible: coordinate mass {mass:.3e} at index {point:?} where |a| = {symbol_magnitude:.3e}")]
    NotDivisible {
        worst_index: usize,
        point: Vec<f64>,
        mass: f64,
        symbol_magnitude: f64,
    },

    #[error("symbol is not invertible: |l| = {symbol_magnitude:.3e} at index {point:?}")]
    NotInvertible {
        worst_index: usize,
        point: Vec<f64>,
        symbol_magnitude: f64,
    },

    #[error("grid has {points} points, dense oracles are capped at {limit}")]
    TooLarge { points: usize, limit: usize },

    #[error("unsupported finite-difference order {0} (expected 2 or 4)")]
    UnsupportedOrder(usize),

    #[error("measure argument mismatch: {0}")]
    ArgumentMismatch(String),

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
}
