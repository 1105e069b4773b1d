use thiserror::Error;

use crate::game::Player;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("{value} is not a unit modulo {modulus}")]
    NotAUnit { value: u64, modulus: u64 },
    #[error("polynomial has unassigned coefficient at index {0}")]
    IncompletePolynomial(usize),
    #[error("out of scope: {0}")]
    OutOfScope(String),
    #[error("game is over")]
    GameOver,
    #[error("illegal move: {0}")]
    IllegalMove(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("strategy not applicable: {0}")]
    NotApplicable(String),
    #[error("requested role loses under optimal play; predicted winner is {0}")]
    RoleLoses(Player),
    #[error("Newton polygon needs nonzero constant and leading coefficients")]
    DegeneratePolygon,
    #[error("Hensel lifting precondition fails: {0}")]
    HenselNotApplicable(String),
    #[error("search limit {0} exhausted")]
    SearchLimit(u64),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn illegal(msg: impl Into<String>) -> Self {
        Error::IllegalMove(msg.into())
    }

    pub(crate) fn not_applicable(msg: impl Into<String>) -> Self {
        Error::NotApplicable(msg.into())
    }
}
