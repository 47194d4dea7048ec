use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const NUMERICAL: i32 = 3;
    pub const GEOMETRY: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Model(#[from] otima_core::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn io(path: impl std::fmt::Display, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_string(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        use otima_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::Io { .. } => exit::USAGE,
            CliError::Model(e) => match e {
                E::Geometry { .. } => exit::GEOMETRY,
                E::NonConvergence { .. }
                | E::AccuracyLoss { .. }
                | E::DegenerateDenominator { .. } => exit::NUMERICAL,
                E::Domain(_) | E::Unachievable { .. } | E::Degenerate(_) => exit::USAGE,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
