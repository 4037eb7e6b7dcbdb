//! Gaussian-prior Thompson sampling (vanilla and corruption-optimistic) and a
//! UCB1 baseline for `N`-armed stochastic bandits.

use super::{argmax_first, CorruptionKnowledge};
use crate::rng::RngStream;

/// Common driving interface used by the harness.
pub trait StochasticPolicy {
    fn select(&mut self, t: usize, stream: &mut RngStream) -> usize;
    fn update(&mut self, arm: usize, reward_post: f64);
    fn counts(&self) -> &[u64];
}

/// Thompson sampling state. `c_bar = 0` is the vanilla algorithm.
///
/// Arm `i` is scored from `Normal(mu_hat_i + c_bar / (k_i + 1), 1 / (k_i + 1))`
/// where `mu_hat_i = sum_i / (k_i + 1)` is the posterior mean under a
/// standard-normal prior (zero for an unpulled arm).
#[derive(Debug, Clone, PartialEq)]
pub struct TsState {
    counts: Vec<u64>,
    reward_sums: Vec<f64>,
    c_bar: f64,
}

impl TsState {
    pub fn new(arms: usize, c_bar: f64) -> Self {
        assert!(arms >= 1);
        assert!(c_bar >= 0.0 && c_bar.is_finite(), "c_bar must be >= 0");
        Self {
            counts: vec![0; arms],
            reward_sums: vec![0.0; arms],
            c_bar,
        }
    }

    pub fn vanilla(arms: usize) -> Self {
        Self::new(arms, 0.0)
    }

    pub fn arms(&self) -> usize {
        self.counts.len()
    }

    pub fn c_bar(&self) -> f64 {
        self.c_bar
    }

    pub fn reward_sums(&self) -> &[f64] {
        &self.reward_sums
    }

    pub fn mu_hat(&self, arm: usize) -> f64 {
        self.reward_sums[arm] / (self.counts[arm] as f64 + 1.0)
    }

    /// Mean of the (optimistic) sampling distribution of `arm`.
    pub fn score_mean(&self, arm: usize) -> f64 {
        self.mu_hat(arm) + self.c_bar / (self.counts[arm] as f64 + 1.0)
    }

    pub fn score_variance(&self, arm: usize) -> f64 {
        1.0 / (self.counts[arm] as f64 + 1.0)
    }

    /// One posterior sample per arm, consuming one normal per arm in arm order.
    pub fn scores(&self, stream: &mut RngStream) -> Vec<f64> {
        (0..self.arms())
            .map(|i| {
                let z = stream.next_gaussian();
                self.score_mean(i) + z * self.score_variance(i).sqrt()
            })
            .collect()
    }

    pub fn record(&mut self, arm: usize, reward_post: f64) {
        self.reward_sums[arm] += reward_post;
        self.counts[arm] += 1;
    }
}

impl StochasticPolicy for TsState {
    fn select(&mut self, _t: usize, stream: &mut RngStream) -> usize {
        argmax_first(&self.scores(stream))
    }

    fn update(&mut self, arm: usize, reward_post: f64) {
        self.record(arm, reward_post);
    }

    fn counts(&self) -> &[u64] {
        &self.counts
    }
}

/// UCB1 with index `mean_i + c * sqrt(2 ln t / k_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UcbState {
    counts: Vec<u64>,
    reward_sums: Vec<f64>,
    exploration_const: f64,
}

impl UcbState {
    pub fn new(arms: usize, exploration_const: f64) -> Self {
        assert!(arms >= 1);
        assert!(exploration_const >= 0.0);
        Self {
            counts: vec![0; arms],
            reward_sums: vec![0.0; arms],
            exploration_const,
        }
    }

    pub fn index(&self, arm: usize, t: usize) -> f64 {
        let k = self.counts[arm] as f64;
        let mean = self.reward_sums[arm] / k;
        mean + self.exploration_const * (2.0 * (t as f64).ln() / k).sqrt()
    }

    /// Unpulled arms first (lowest index), then the largest index.
    pub fn choose(&self, t: usize) -> usize {
        assert!(t >= 1);
        if let Some(arm) = self.counts.iter().position(|&k| k == 0) {
            return arm;
        }
        let idx: Vec<f64> = (0..self.counts.len()).map(|i| self.index(i, t)).collect();
        argmax_first(&idx)
    }
}

impl StochasticPolicy for UcbState {
    fn select(&mut self, t: usize, _stream: &mut RngStream) -> usize {
        self.choose(t)
    }

    fn update(&mut self, arm: usize, reward_post: f64) {
        self.reward_sums[arm] += reward_post;
        self.counts[arm] += 1;
    }

    fn counts(&self) -> &[u64] {
        &self.counts
    }
}

/// Robustness level for Thompson sampling: `C` when the budget is known,
/// `sqrt(T ln N / N)` otherwise.
pub fn c_bar_for(knowledge: CorruptionKnowledge, horizon: usize, arms: usize) -> f64 {
    match knowledge {
        CorruptionKnowledge::Known(c) => c,
        CorruptionKnowledge::Unknown => {
            let n = arms as f64;
            (horizon as f64 * n.ln() / n).sqrt()
        }
    }
}
