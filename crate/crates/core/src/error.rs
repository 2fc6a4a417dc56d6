use thiserror::Error;

use crate::tracker::TrackRecord;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("chain length {0} is not supported (must be even and at least 2)")]
    InvalidLength(usize),

    #[error("chain length {len} exceeds the configured cap of {max}")]
    TooLarge { len: usize, max: usize },

    #[error("invalid symmetry sector: {0}")]
    InvalidSector(String),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("a real amplitude type was requested for the complex sector k = {momentum}")]
    ComplexSector { momentum: usize },

    #[error("dense eigensolver did not converge")]
    SolverFailure,

    #[error("{0} levels remain after trimming, at least 3 are needed")]
    TooFewLevels(usize),

    #[error("state is not normalized (norm = {0})")]
    NotNormalized(f64),

    #[error("scar state n = {n} vanishes on a chain of length {len}")]
    VanishingState { n: usize, len: usize },

    #[error("invalid scar label: {0}")]
    InvalidLabel(String),

    #[error("no sector pairing reproduced the Ising spectrum; attempted: {0}")]
    NoDualityMatch(String),

    #[error("unknown path preset {0:?}")]
    UnknownPath(String),

    #[error("invalid parameter path: {0}")]
    InvalidPath(String),

    #[error("tracked state lost at step {step} (t = {t}, h = {h})")]
    LostState {
        step: usize,
        t: f64,
        h: f64,
        record: Box<TrackRecord>,
    },
}

impl From<faer::linalg::evd::EvdError> for Error {
    fn from(_: faer::linalg::evd::EvdError) -> Self {
        Error::SolverFailure
    }
}

impl From<faer::linalg::svd::SvdError> for Error {
    fn from(_: faer::linalg::svd::SvdError) -> Self {
        Error::SolverFailure
    }
}
