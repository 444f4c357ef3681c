//! Library side of the `sparsekl` command-line tool: problem-file handling
//! and the subcommands, each returning the process exit code contract
//! through [`Failure`].
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | other runtime failure (I/O, degenerate input, size guard) |
//! | 2 | unparsable problem file or argument |
//! | 3 | invalid solver configuration |
//! | 4 | `xbar` is not critical |
//! | 5 | `θ` not supported by `critical` |
//! | 6 | oracle mismatch |

pub mod commands;
pub mod problem;

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<sparsekl::Error> for Failure {
    fn from(e: sparsekl::Error) -> Self {
        let code = match e {
            sparsekl::Error::Config(_) => 3,
            sparsekl::Error::NotCritical { .. } => 4,
            _ => 1,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(1, format!("I/O error: {e}"))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::new(1, format!("CSV error: {e}"))
    }
}
