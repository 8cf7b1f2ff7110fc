use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("array size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("annulus |k| in [{lo:.6}, {hi:.6}] holds {found} lattice modes (need 6); smallest box length holding the annulus is {minimal_length:.6}")]
    EmptyAnnulus {
        lo: f64,
        hi: f64,
        found: usize,
        minimal_length: f64,
    },
    #[error("cutoff support radius {support:.6} does not fit in box of length {length:.6}")]
    CutoffDoesNotFit { support: f64, length: f64 },
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("quadrature did not converge: {0}")]
    QuadratureStall(String),
    #[error("time mismatch: state at t={state}, flows evaluated at t={flows}")]
    TimeMismatch { state: f64, flows: f64 },
    #[error("malformed checkpoint: {0}")]
    Checkpoint(String),
    #[error("empty diagnostics stream")]
    EmptyStream,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
