//! Process-level failure classification.
//!
//! Every command maps its errors onto two exit codes: 2 for anything wrong
//! with the invocation or its input files, 3 for requests that are
//! mathematically out of domain on well-formed input. The `verify` command
//! additionally exits 1 when the campaign itself reports failures; that path
//! is a successful run of the tool and is not modelled here.

use qrdiv::Error;

/// A command failure carrying its exit code.
#[derive(Debug, thiserror::Error)]
pub enum Failure {
    /// Unreadable files, malformed JSON, invalid flags or configuration.
    #[error("{0}")]
    Input(String),
    /// A computation that is undefined for the given orders or supports.
    #[error("{0}")]
    Domain(String),
}

impl Failure {
    /// The process exit code for this failure class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) => 2,
            Failure::Domain(_) => 3,
        }
    }

    /// An input failure annotated with the file it came from.
    pub fn in_file(path: &std::path::Path, message: impl std::fmt::Display) -> Self {
        Failure::Input(format!("{}: {message}", path.display()))
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Shape(_) | Error::Config(_) | Error::UnknownCheck { .. } => {
                Failure::Input(e.to_string())
            }
            Error::Domain(_)
            | Error::Support(_)
            | Error::Numerical(_)
            | Error::IterationLimit { .. } => Failure::Domain(e.to_string()),
        }
    }
}

/// Shorthand for command results: `Ok` carries the process exit code.
pub type CmdResult = Result<i32, Failure>;
