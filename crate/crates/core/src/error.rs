use thiserror::Error;

/// Errors raised by the extractor engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A precondition of an operation was not met (mismatched lengths,
    /// attributes outside the context, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// An explicit work budget was exhausted. The answer is unknown.
    #[error("resource limit exceeded: {what} reached {count} (limit {limit})")]
    Resource {
        what: &'static str,
        count: usize,
        limit: usize,
    },

    /// Malformed textual input.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    /// True for budget exhaustion, i.e. an "unknown" outcome.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Work budgets for the operations whose cost can be exponential.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of subset states built by determinization.
    pub max_states: usize,
    /// Maximum number of rows materialized by any enumeration.
    pub max_rows: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_states: 1_000_000,
            max_rows: 100_000,
        }
    }
}

impl Limits {
    pub(crate) fn check_states(&self, count: usize) -> Result<()> {
        if count > self.max_states {
            return Err(Error::Resource {
                what: "determinization states",
                count,
                limit: self.max_states,
            });
        }
        Ok(())
    }

    pub(crate) fn check_rows(&self, count: usize) -> Result<()> {
        if count > self.max_rows {
            return Err(Error::Resource {
                what: "enumerated rows",
                count,
                limit: self.max_rows,
            });
        }
        Ok(())
    }
}
