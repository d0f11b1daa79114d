use thiserror::Error;

/// Problems with the invocation or the input document; exit code 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },

    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },

    #[error("input is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("schema violation at {pointer:?}: {message}")]
    Schema { pointer: String, message: String },

    #[error("invalid input at {pointer:?}: {message}")]
    Input { pointer: String, message: String },

    #[error("missing {pointer:?}: {reason}")]
    Missing { pointer: String, reason: String },

    #[error("unknown corpus entry {0:?}; available: {1}")]
    UnknownCorpus(String, String),

    #[error("invalid option: {0}")]
    Option(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

/// Failure while running a command: bad input, or a violated mathematical precondition.
#[derive(Debug)]
pub enum Outcome {
    Input(CliError),
    Math(String),
}

impl From<CliError> for Outcome {
    fn from(e: CliError) -> Self {
        Outcome::Input(e)
    }
}

impl Outcome {
    /// Precondition-type core errors are mathematical; the rest are input errors at `ptr`.
    pub fn from_core(e: courant_core::Error, ptr: &str) -> Self {
        use courant_core::Error as E;
        match e {
            E::Jacobi(_) | E::Singular | E::NonPolynomialInverse(_) | E::Precondition(_) => Outcome::Math(e.to_string()),
            other => Outcome::Input(CliError::Input { pointer: ptr.to_string(), message: other.to_string() }),
        }
    }
}
