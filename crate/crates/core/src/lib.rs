//! Thompson sampling agents that stay robust when an adversary corrupts the
//! rewards they observe, together with the attacks, environments and
//! experiment harness used to measure them.

pub mod agents;
pub mod attacks;
pub mod budget;
pub mod env;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod rng;
pub mod round_log;

pub use error::{Error, Result};
