//! Exit codes: one per library error kind, plus usage and check failures.

use std::fmt;
use std::process::ExitCode;

use billiard_blocks::Error;

/// Verification ran but at least one check failed.
pub const CHECKS_FAILED: u8 = 1;
/// Bad invocation or unreadable input path.
pub const USAGE: u8 = 2;

pub fn code_of(e: &Error) -> u8 {
    match e {
        Error::Domain(_) => 10,
        Error::InvalidBlock(_) => 11,
        Error::Closure { .. } => 12,
        Error::ConstraintSolve { .. } => 13,
        Error::Convexity { .. } => 14,
        Error::EscapedWall { .. } => 15,
        Error::IterationCap { .. } => 16,
        Error::ClosureFailure { .. } => 17,
        Error::NoConvergence(_) => 18,
        Error::IllConditioned { .. } => 19,
        Error::NoDiscontinuity { .. } => 20,
        Error::NoOddJump { .. } => 21,
        Error::SupportExhausted { .. } => 22,
        Error::AngleWindowEmpty { .. } => 23,
        Error::MatchLost { .. } => 24,
        Error::Congruent { .. } => 25,
        Error::InvalidPermutation(_) => 26,
        Error::Config(_) => 27,
        Error::Parse { .. } => 28,
        Error::Io(_) => 29,
    }
}

/// Why a command stopped.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Lib { context: String, error: Error },
}

impl Failure {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            Failure::Usage(_) => USAGE,
            Failure::Lib { error, .. } => code_of(error),
        })
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Lib { context, error } if context.is_empty() => write!(f, "{error}"),
            Failure::Lib { context, error } => write!(f, "{context}: {error}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure::Lib { context: String::new(), error }
    }
}

pub trait Context<T> {
    fn context(self, what: impl Into<String>) -> Result<T, Failure>;
}

impl<T> Context<T> for Result<T, Error> {
    fn context(self, what: impl Into<String>) -> Result<T, Failure> {
        self.map_err(|error| Failure::Lib { context: what.into(), error })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_stay_clear_of_generic_ones() {
        for e in [
            Error::Domain("x".into()),
            Error::InvalidPermutation("rotation".into()),
            Error::Config("x".into()),
            Error::NoConvergence("x".into()),
        ] {
            let c = code_of(&e);
            assert!(c >= 10 && c != CHECKS_FAILED && c != USAGE);
        }
        assert_eq!(code_of(&Error::InvalidPermutation(String::new())), 26);
    }

    #[test]
    fn context_is_shown_before_the_error() {
        let r: Result<(), Error> = Err(Error::Config("bad rounds".into()));
        let f = r.context("run.toml").unwrap_err();
        let text = f.to_string();
        assert!(text.starts_with("run.toml") && text.contains("bad rounds"), "{text}");
    }
}
