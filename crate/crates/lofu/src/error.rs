use thiserror::Error;

/// Errors produced anywhere in the engine.
///
/// The variants map onto the process exit codes used by the CLI:
/// truncation-class errors exit with 2, invalid input with 3 and failed
/// verification of an identity that should hold with 4.
#[derive(Debug, Error)]
pub enum LofuError {
    #[error("enumeration overflow in {what}: more than {cap} tuples")]
    EnumerationOverflow { what: String, cap: usize },

    #[error("truncation insufficient at stage `{stage}`: {detail}")]
    Truncation { stage: String, detail: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("verification failure: identity `{identity}` fails at {witness}")]
    Verification { identity: String, witness: String },
}

impl LofuError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        LofuError::InvalidInput(msg.into())
    }

    pub fn truncation(stage: impl Into<String>, detail: impl Into<String>) -> Self {
        LofuError::Truncation {
            stage: stage.into(),
            detail: detail.into(),
        }
    }

    pub fn verification(identity: impl Into<String>, witness: impl std::fmt::Debug) -> Self {
        LofuError::Verification {
            identity: identity.into(),
            witness: format!("{witness:?}"),
        }
    }

    /// Process exit code for the CLI contract.
    pub fn exit_code(&self) -> i32 {
        match self {
            LofuError::EnumerationOverflow { .. } => 2,
            LofuError::Truncation { .. } => 2,
            LofuError::InvalidInput(_) => 3,
            LofuError::Verification { .. } => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, LofuError>;
