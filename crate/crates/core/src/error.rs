use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("operands live on different grids")]
    GridMismatch,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("multiplier is not finite at resolved wavevector ({0}, {1})")]
    NonFiniteMultiplier(f64, f64),

    #[error("block index {j} outside resolved range [{min}, {max}]")]
    BlockOutOfRange { j: i32, min: i32, max: i32 },

    #[error("grid too coarse for a dyadic partition: {0} block(s) resolved, at least 3 needed")]
    TooCoarse(usize),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("placement overflow: {0}")]
    Placement(String),

    #[error("positivity of 1+h lost at t = {t:e}: min(1+h) = {min:e}")]
    Positivity { t: f64, min: f64 },

    #[error("non-finite state at t = {0:e}")]
    BlowUp(f64),

    #[error("time step {dt:e} exceeds the stability bound; suggested dt = {suggested:e}")]
    StepTooLarge { dt: f64, suggested: f64 },

    #[error("insufficient data: {0}")]
    Insufficient(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
