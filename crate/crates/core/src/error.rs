use alloc::string::String;

/// Failure categories, each mapped to a distinct CLI exit code.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// Malformed or contradictory input.
    #[error("input error: {0}")]
    Input(String),
    /// A generator's images do not preserve the distances of its domain points.
    #[error("isometry violation in generator '{generator}': points {i} and {j} are {expected} apart but their images are {found} apart")]
    IsometryViolation {
        generator: String,
        i: usize,
        j: usize,
        expected: String,
        found: String,
    },
    /// A configured budget (copies, words, depth) would be exceeded.
    #[error("budget exceeded: {what} needs {needed}, budget is {budget}")]
    Resource {
        what: String,
        needed: u64,
        budget: u64,
    },
    /// A word was used outside the ball it was built for.
    #[error("outside ball: {0}")]
    OutOfBall(String),
    /// A mathematical invariant failed; this is a bug or a broken system.
    #[error("invariant breach: {0}")]
    Invariant(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    pub fn resource(what: impl Into<String>, needed: u64, budget: u64) -> Self {
        Error::Resource {
            what: what.into(),
            needed,
            budget,
        }
    }

    pub fn out_of_ball(msg: impl Into<String>) -> Self {
        Error::OutOfBall(msg.into())
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
