use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The operation is defined only for a narrower class of games.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A size guard tripped.
    #[error("resource limit: {0}")]
    Resource(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("not a stage equilibrium: player {player} gains {gain} by switching to {action}")]
    NotEquilibrium { player: usize, action: String, gain: String },

    #[error("target is not individually rational: player {player} can guarantee {minmax}")]
    NotIndividuallyRational { player: usize, minmax: String },

    #[error("no stage equilibrium pays player {player} above the minmax level")]
    NoGapEquilibrium { player: usize },

    #[error("horizon {n} is too short, the plan needs at least {needed} stages")]
    HorizonTooShort { n: usize, needed: usize },

    /// A condition that the algorithm's invariants rule out.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
