use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An input violated a documented precondition.
    #[error("validation failed: {0}")]
    Validation(String),

    /// Time-bin post-selection kept no amplitude at all.
    #[error("post-selection kept no amplitude (survival probability {0:e})")]
    EmptyPostSelection(f64),

    /// A sampling grid is too coarse to resolve the feature being measured.
    #[error("grid resolution too coarse: width spans {steps:.2} steps, need at least {required}")]
    Resolution { steps: f64, required: usize },

    /// A Monte Carlo run would exceed the configured event cap.
    #[error("expected {expected:.3e} events exceeds the cap of {cap}")]
    EventCap { expected: f64, cap: u64 },

    /// A least-squares fit could not be carried out.
    #[error("fit failed: {0}")]
    Fit(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Validation(msg.into()))
}
