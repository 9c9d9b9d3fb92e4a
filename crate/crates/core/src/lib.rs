//! Measures of control and cooperation for delegation games.
//!
//! A delegation game pairs a strategic-form game played by `n` agents with a
//! second payoff assignment over the same outcomes, representing the `n`
//! principals the agents act for. This crate computes
//!
//! * individual and collective alignment (how similar preferences are),
//! * individual and collective capability (how well the agents play),
//! * pure Nash and ε-Nash equilibria and the welfare quantities built on them,
//! * upper bounds on the principals' welfare regret in terms of those measures,
//! * random games with prescribed alignment values, and
//! * estimates of the measures from observed play.
//!
//! Everything here is pure computation over `alloc` collections; file formats,
//! experiment drivers and the command line live in the `delegation` crate.
//!
//! Payoff tensors are stored flat, indexed lexicographically with the first
//! player's strategy varying slowest.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod constructions;
pub mod equilibria;
mod error;
pub mod game;
pub mod generator;
pub mod inference;
pub mod measures;
pub mod norm;

pub use error::{Error, Result};
pub use game::{DelegationGame, Side, StrategyProfile, StrategySpace, UtilityVector, WelfareLandmarks};
pub use norm::{NormKind, NormalizationConfig, NormalizedUtility, ShiftKind};

/// Absolute slack used by set-membership tests (ε-best responses, welfare intervals).
pub const MEMBERSHIP_TOL: f64 = 1e-12;
