use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Reward distribution family for a stochastic arm.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum RewardFamily {
    #[default]
    Bernoulli,
    /// Gaussian with standard deviation `spread`, truncated symmetrically to
    /// `[mu - h, mu + h]` with `h = min(mu, 1 - mu)`. The symmetric window keeps
    /// the mean at exactly `mu` and the support inside `[0, 1]`.
    TruncatedGaussian { spread: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct StochasticEnvSpec {
    means: Vec<f64>,
    family: RewardFamily,
    best: f64,
}

impl StochasticEnvSpec {
    pub fn new(means: Vec<f64>, family: RewardFamily) -> Result<Self> {
        if means.len() < 2 {
            return Err(Error::config("env.means", "need at least 2 arms"));
        }
        if let Some(m) = means.iter().find(|m| !(0.0..=1.0).contains(*m)) {
            return Err(Error::config(
                "env.means",
                format!("every mean must lie in [0, 1], got {m}"),
            ));
        }
        if let RewardFamily::TruncatedGaussian { spread } = family {
            if !(spread.is_finite() && spread > 0.0) {
                return Err(Error::config(
                    "env.family.spread",
                    "spread must be finite and positive",
                ));
            }
        }
        let best = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(Self {
            means,
            family,
            best,
        })
    }

    pub fn arms(&self) -> usize {
        self.means.len()
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn family(&self) -> RewardFamily {
        self.family
    }

    /// Index of the lowest mean (lowest index on ties).
    pub fn worst_arm(&self) -> usize {
        let mut worst = 0;
        for (i, &m) in self.means.iter().enumerate() {
            if m < self.means[worst] {
                worst = i;
            }
        }
        worst
    }

    /// Draws the pre-attack reward of `arm`.
    pub fn sample_reward(&self, arm: usize, stream: &mut RngStream) -> Result<f64> {
        let mu = *self.means.get(arm).ok_or(Error::ArmOutOfRange {
            arm,
            arms: self.arms(),
        })?;
        Ok(match self.family {
            RewardFamily::Bernoulli => {
                if stream.next_uniform() < mu {
                    1.0
                } else {
                    0.0
                }
            }
            RewardFamily::TruncatedGaussian { spread } => {
                mu + symmetric_truncated_normal(spread, mu.min(1.0 - mu), stream)
            }
        })
    }

    /// `max_j mu_j - mu_arm`.
    pub fn regret_increment(&self, arm: usize) -> f64 {
        (self.best - self.means[arm]).max(0.0)
    }
}

/// Normal(0, spread^2) conditioned on `|z| <= half_width`, by rejection.
///
/// Narrow windows (relative to `spread`) use a uniform proposal, wide ones a
/// Gaussian proposal; either way acceptance stays above one half.
fn symmetric_truncated_normal(spread: f64, half_width: f64, stream: &mut RngStream) -> f64 {
    if half_width <= 0.0 {
        return 0.0;
    }
    let a = half_width / spread;
    if a < 1.0 {
        loop {
            let z = (2.0 * stream.next_uniform() - 1.0) * a;
            if stream.next_uniform() < (-0.5 * z * z).exp() {
                return z * spread;
            }
        }
    }
    loop {
        let z = stream.next_gaussian();
        if z.abs() <= a {
            return z * spread;
        }
    }
}
