use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate lattice state: density {rho} at cell ({x}, {y}) is not positive")]
    DegenerateState { x: usize, y: usize, rho: f64 },

    #[error("simulation became unstable (non-finite populations) at step {step}")]
    Unstable { step: usize },

    #[error("invalid boundary specification: {0}")]
    Boundary(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parameter vector has length {got}, ansatz expects {expected}")]
    ParameterLength { got: usize, expected: usize },

    #[error("vector length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("target vector has zero norm")]
    ZeroVector,

    #[error("{requested} qubits requested, limit is {limit}")]
    TooManyQubits { requested: usize, limit: usize },

    #[error("vector lengths differ ({expected} vs {got})")]
    LengthMismatch { expected: usize, got: usize },

    #[error("multi-product needs at least two non-empty vectors")]
    TooFewVectors,

    #[error("cost function returned a non-finite value at iteration {iteration}")]
    NonFiniteCost { iteration: usize },

    #[error("insufficient data: {got} records, at least {need} required")]
    InsufficientData { got: usize, need: usize },

    #[error("degenerate design matrix: {0}")]
    Degenerate(String),

    #[error("timing table row {row}: {message}")]
    Schema { row: usize, message: String },

    #[error("HBM capacity exceeded: {needed:.3e} bytes per GPU, capacity {capacity:.3e}")]
    HbmCapacity { needed: f64, capacity: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}
