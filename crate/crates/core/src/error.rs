use thiserror::Error;

/// Errors raised by the gripper model, sizing and dataset routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input violated the operation's domain (non-positive size, negative torque, ...).
    #[error("invalid {field}: {reason}")]
    Domain { field: &'static str, reason: String },

    #[error("alpha {alpha_deg:.4} deg outside actuation range [{min_deg:.4}, {max_deg:.4}] deg")]
    AlphaOutOfRange {
        alpha_deg: f64,
        min_deg: f64,
        max_deg: f64,
    },

    /// Finger center coincides with the ring center, so the ABO triangle collapses.
    #[error("degenerate finger configuration: center distance d = {d:e} m")]
    DegenerateConfiguration { d: f64 },

    #[error("opening {opening:.6} m not reachable; achievable range [{min:.6}, {max:.6}] m")]
    UnreachableAperture { opening: f64, min: f64, max: f64 },

    /// cos(theta) <= 0: the finger force cannot produce a closing moment at this alpha.
    #[error("configuration at alpha {alpha_deg:.4} deg does not transmit a closing moment (cos theta = {cos_theta:.6})")]
    NonTransmitting { alpha_deg: f64, cos_theta: f64 },

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("integrity: {0}")]
    Integrity(String),

    #[error("no rotation model available: {0}")]
    UnavailableModel(String),

    #[error("invalid transition: event {event} not accepted in state {state}")]
    InvalidTransition { state: String, event: String },

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            field,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
