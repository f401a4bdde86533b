use hahn_fde::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    /// A checked criterion (existence, convergence, stability bound) failed.
    pub const NOT_MET: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const SINGULAR: i32 = 3;
    pub const DIVERGENCE: i32 = 4;
    pub const STABILITY: i32 = 5;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Core(#[from] Error),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => exit::CONFIG,
            CliError::Core(Error::SingularParameters { .. }) => exit::SINGULAR,
            CliError::Core(Error::Divergence { .. }) => exit::DIVERGENCE,
            CliError::Core(Error::StabilityCondition { .. }) => exit::STABILITY,
            CliError::Core(
                Error::InvalidParameter { .. } | Error::Domain(_) | Error::OffGrid { .. } | Error::EmptyFamily,
            ) => exit::CONFIG,
            CliError::Core(_) | CliError::Io { .. } | CliError::Output(_) => exit::NOT_MET,
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}
