//! Ground-truth reward generators. Only these types see the true means or the
//! true reward parameter; regret is always computed here from pre-attack
//! quantities.

mod linear;
mod stochastic;

pub use linear::{sample_unit_ball, sample_unit_sphere, ContextGen, ContextSet, LinearEnvSpec};
pub use stochastic::{RewardFamily, StochasticEnvSpec};
