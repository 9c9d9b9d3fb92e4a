use alloc::string::String;
use alloc::vec::Vec;

use crate::game::Violation;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("index out of range: {0}")]
    Index(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid game: {}", join_violations(.0))]
    InvalidGame(Vec<Violation>),
    #[error("degenerate game: {0}")]
    Degenerate(String),
    #[error("no equilibrium: {0}")]
    NoEquilibrium(String),
    #[error("unsupported norm configuration: {0}")]
    UnsupportedNorm(String),
    #[error("generation failed after {attempts} attempts: {reason}")]
    GenerationFailed { attempts: usize, reason: String },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("simulation failed: {0}")]
    Simulation(String),
}

fn join_violations(v: &[Violation]) -> String {
    let mut out = String::new();
    for (i, violation) in v.iter().enumerate() {
        if i > 0 {
            out.push_str("; ");
        }
        out.push_str(&alloc::format!("{violation}"));
    }
    out
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
