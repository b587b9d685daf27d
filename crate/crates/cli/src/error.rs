use std::path::PathBuf;

use hpspline::HpError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{0}")]
    Usage(String),

    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Model(#[from] HpError),
}

impl CliError {
    /// 2 for bad input, 3 for a fit that cannot be computed, 4 for sites
    /// outside the model domain, 1 for failed writes.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Parse { .. } | Self::Usage(_) | Self::Read { .. } => 2,
            Self::Write { .. } => 1,
            Self::Model(e) => match e {
                HpError::InvalidArgument(_) | HpError::Range(_) => 2,
                HpError::OutOfDomain { .. } => 4,
                HpError::Singular { .. }
                | HpError::DegenerateDf { .. }
                | HpError::NoSolution { .. }
                | HpError::InternalConsistency(_)
                | HpError::Accuracy(_) => 3,
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
