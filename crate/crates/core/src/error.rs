use thiserror::Error;

use crate::optim::OptimTrace;

pub type Result<T, E = GaborError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum GaborError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("signal length {0} is too short, at least 4 samples are required")]
    TooShort(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    /// The von Mises resultant vanished: the signal is spread uniformly along
    /// the named axis (or is identically zero).
    #[error("time-frequency mean is undefined along the {0} axis")]
    UndefinedMean(&'static str),

    #[error("Gabor system is not a frame (A/B = {ratio:e})")]
    NotAFrame { ratio: f64 },

    #[error("optimizer diverged at iteration {iteration}")]
    Divergence { iteration: usize },

    #[error("line search stalled at iteration {iteration}")]
    Stall {
        iteration: usize,
        trace: Box<OptimTrace>,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{percent:.3}% of the energy lies outside the retained band (limit 1%)")]
    OutOfBand { percent: f64 },

    #[error("round {round}: {source}")]
    Round {
        round: usize,
        #[source]
        source: Box<GaborError>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl GaborError {
    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        match self {
            GaborError::NotAFrame { .. }
            | GaborError::Divergence { .. }
            | GaborError::Stall { .. }
            | GaborError::UndefinedMean(_) => true,
            GaborError::Round { source, .. } => source.is_numerical(),
            _ => false,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        GaborError::InvalidParameter(msg.into())
    }
}

impl From<csv::Error> for GaborError {
    fn from(e: csv::Error) -> Self {
        if !e.is_io_error() {
            return GaborError::Parse(e.to_string());
        }
        match e.into_kind() {
            csv::ErrorKind::Io(io) => GaborError::Io(io),
            other => GaborError::Parse(format!("{other:?}")),
        }
    }
}

impl From<serde_json::Error> for GaborError {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() {
            GaborError::Io(e.into())
        } else {
            GaborError::Parse(e.to_string())
        }
    }
}
