//! Nash implementation for two agents: monotonicity-type conditions on a
//! social choice rule, the classical integer-game mechanism that implements
//! it, and an entangled two-qubit variant in which agents can coordinate on
//! a Pareto-better outcome.
#![allow(clippy::needless_range_loop)]

pub mod engine;
pub mod error;
pub mod fixtures;
pub mod mechanism;
pub mod quantum;
pub mod scenario;
pub mod scr;

pub use error::{Error, Result};
