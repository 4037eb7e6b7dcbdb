//! Learning agents for the stochastic and linear-contextual settings.

pub mod linear;
pub mod stochastic;

use serde::{Deserialize, Serialize};

/// What the agent is told about the attacker's budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CorruptionKnowledge {
    /// The true corruption level `C`.
    Known(f64),
    Unknown,
}

/// Configured choice of a robustness hyperparameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Robustness {
    /// Derived from the true corruption level of the experiment.
    Known,
    /// Derived from the horizon only.
    Unknown,
    /// Used as given.
    Value(f64),
}

/// Index of the first maximum. NaN entries never win.
pub fn argmax_first(scores: &[f64]) -> usize {
    assert!(!scores.is_empty(), "argmax of an empty score vector");
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] || scores[best].is_nan() {
            best = i;
        }
    }
    best
}
