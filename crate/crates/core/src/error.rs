use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A value is outside the domain an operation accepts.
    #[error("invalid {field}: {reason}")]
    InvalidInput { field: String, reason: String },

    #[error("occupant list is empty")]
    NoOccupants,

    /// The explicit integrator left the physically plausible range.
    #[error("simulation diverged at step {step} (t = {time}): room temperature {value}")]
    Diverged { step: usize, time: f64, value: f64 },

    #[error("config parse error: {0}")]
    Parse(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidInput {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub(crate) fn ensure_finite(field: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(
            field,
            format!("expected a finite number, got {value}"),
        ))
    }
}
