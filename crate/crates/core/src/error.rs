use thiserror::Error;

use crate::sequence::ParseError;

/// Errors raised by the simulator and compiler.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid spin quantum number {0}: 2I must be a positive integer")]
    InvalidSpin(f64),

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix must be square with dimension >= 2, got {rows}x{cols}")]
    BadShape { rows: usize, cols: usize },

    #[error("unknown level label `{0}`")]
    UnknownLabel(String),

    #[error(
        "transition {0} is forbidden (|dm| = {1}); only single-quantum transitions can be driven"
    )]
    ForbiddenTransition(String, f64),

    #[error("invalid pulse: {0}")]
    InvalidPulse(String),

    #[error("shaped pulse cannot be calibrated: {0}")]
    Uncalibratable(String),

    #[error("density matrix is not a valid deviation matrix: {0}")]
    InvalidState(String),

    #[error("sequence contains non-unitary event `{0}`; use run_trajectory")]
    NonUnitary(&'static str),

    #[error("line at {freq_hz} Hz violates Nyquist limit {limit_hz} Hz")]
    Nyquist { freq_hz: f64, limit_hz: f64 },

    #[error("invalid acquisition parameters: {0}")]
    InvalidAcquisition(String),

    #[error("ambiguous readout: peak `{label}` integral {value:.3e} is below the noise floor")]
    AmbiguousReadout { label: String, value: f64 },

    #[error("ambiguous readout: lines {splitting_hz} Hz apart are not resolved at linewidth {linewidth_hz} Hz")]
    UnresolvedLines {
        splitting_hz: f64,
        linewidth_hz: f64,
    },

    #[error("invalid relaxation parameters: {0}")]
    InvalidRelaxation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{0}")]
    Parse(#[from] ParseError),
}

impl Error {
    /// Stable machine-readable identifier.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidSpin(_) => "invalid-spin",
            Error::NotHermitian(_) => "not-hermitian",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::BadShape { .. } => "bad-shape",
            Error::UnknownLabel(_) => "unknown-label",
            Error::ForbiddenTransition(..) => "forbidden-transition",
            Error::InvalidPulse(_) => "invalid-pulse",
            Error::Uncalibratable(_) => "uncalibratable",
            Error::InvalidState(_) => "invalid-state",
            Error::NonUnitary(_) => "non-unitary",
            Error::Nyquist { .. } => "nyquist",
            Error::InvalidAcquisition(_) => "invalid-acquisition",
            Error::AmbiguousReadout { .. } => "ambiguous-readout",
            Error::UnresolvedLines { .. } => "unresolved-lines",
            Error::InvalidRelaxation(_) => "invalid-relaxation",
            Error::InvalidArgument(_) => "invalid-argument",
            Error::Parse(e) => e.code.as_str(),
        }
    }

    /// Whether the error reports an unreadable spectrum rather than bad input.
    pub fn is_ambiguous(&self) -> bool {
        matches!(
            self,
            Error::AmbiguousReadout { .. } | Error::UnresolvedLines { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
