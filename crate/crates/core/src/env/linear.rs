use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm};
use crate::rng::RngStream;

/// How arm contexts are produced each round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ContextGen {
    /// The same `N` vectors every round.
    FixedPool { pool: Vec<Vec<f64>> },
    /// `arms` fresh vectors per round, i.i.d. uniform in the closed unit ball.
    FreshUnitBall { arms: usize },
}

/// Contexts revealed at round `t`, one per arm.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextSet {
    pub t: usize,
    pub contexts: Vec<Vec<f64>>,
}

impl ContextSet {
    pub fn arms(&self) -> usize {
        self.contexts.len()
    }

    pub fn get(&self, arm: usize) -> &[f64] {
        &self.contexts[arm]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearEnvSpec {
    mu: Vec<f64>,
    noise_sigma: f64,
    contexts: ContextGen,
}

const NORM_SLACK: f64 = 1e-12;

impl LinearEnvSpec {
    pub fn new(mu: Vec<f64>, noise_sigma: f64, contexts: ContextGen) -> Result<Self> {
        let d = mu.len();
        if d == 0 {
            return Err(Error::config("env.mu", "dimension must be at least 1"));
        }
        if norm(&mu) > 1.0 + NORM_SLACK {
            return Err(Error::config(
                "env.mu",
                "reward parameter must have norm <= 1",
            ));
        }
        if !(noise_sigma.is_finite() && noise_sigma >= 0.0) {
            return Err(Error::config(
                "env.noise_sigma",
                "must be finite and nonnegative",
            ));
        }
        match &contexts {
            ContextGen::FixedPool { pool } => {
                if pool.is_empty() {
                    return Err(Error::config("env.contexts.pool", "pool is empty"));
                }
                for (i, x) in pool.iter().enumerate() {
                    if x.len() != d {
                        return Err(Error::config(
                            "env.contexts.pool",
                            format!("context {i} has dimension {}, expected {d}", x.len()),
                        ));
                    }
                    if norm(x) > 1.0 + NORM_SLACK {
                        return Err(Error::config(
                            "env.contexts.pool",
                            format!("context {i} lies outside the unit ball"),
                        ));
                    }
                }
            }
            ContextGen::FreshUnitBall { arms } => {
                if *arms == 0 {
                    return Err(Error::config("env.arms", "need at least 1 arm"));
                }
            }
        }
        Ok(Self {
            mu,
            noise_sigma,
            contexts,
        })
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn arms(&self) -> usize {
        match &self.contexts {
            ContextGen::FixedPool { pool } => pool.len(),
            ContextGen::FreshUnitBall { arms } => *arms,
        }
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn noise_sigma(&self) -> f64 {
        self.noise_sigma
    }

    pub fn context_gen(&self) -> &ContextGen {
        &self.contexts
    }

    /// Contexts for round `t`. Fresh contexts consume `arms * (d + 1)` draws.
    pub fn generate_contexts(&self, t: usize, stream: &mut RngStream) -> ContextSet {
        let contexts = match &self.contexts {
            ContextGen::FixedPool { pool } => pool.clone(),
            ContextGen::FreshUnitBall { arms } => (0..*arms)
                .map(|_| sample_unit_ball(self.dim(), stream))
                .collect(),
        };
        ContextSet { t, contexts }
    }

    /// `x^T mu + eps`, `eps ~ Normal(0, sigma^2)`. Always consumes one normal.
    pub fn sample_reward(&self, x: &[f64], stream: &mut RngStream) -> f64 {
        let eps = stream.next_gaussian();
        dot(x, &self.mu) + self.noise_sigma * eps
    }

    pub fn expected_reward(&self, x: &[f64]) -> f64 {
        dot(x, &self.mu)
    }

    /// `max_i x_i^T mu - x_arm^T mu`.
    pub fn regret_increment(&self, ctx: &ContextSet, arm: usize) -> f64 {
        let best = ctx
            .contexts
            .iter()
            .map(|x| self.expected_reward(x))
            .fold(f64::NEG_INFINITY, f64::max);
        (best - self.expected_reward(ctx.get(arm))).max(0.0)
    }

    /// Arm with the lowest expected reward in a fixed pool.
    pub fn worst_pool_arm(&self) -> Option<usize> {
        let ContextGen::FixedPool { pool } = &self.contexts else {
            return None;
        };
        let mut worst = 0;
        for (i, x) in pool.iter().enumerate() {
            if self.expected_reward(x) < self.expected_reward(&pool[worst]) {
                worst = i;
            }
        }
        Some(worst)
    }
}

/// Uniform direction from normalized Gaussians.
pub fn sample_unit_sphere(d: usize, stream: &mut RngStream) -> Vec<f64> {
    loop {
        let mut v = vec![0.0; d];
        stream.fill_gaussian(&mut v);
        let n = norm(&v);
        if n > 1e-300 {
            v.iter_mut().for_each(|x| *x /= n);
            return v;
        }
    }
}

/// Uniform in the closed unit ball: a sphere direction scaled by `U^(1/d)`.
pub fn sample_unit_ball(d: usize, stream: &mut RngStream) -> Vec<f64> {
    let mut v = sample_unit_sphere(d, stream);
    let radius = stream.next_uniform().powf(1.0 / d as f64);
    v.iter_mut().for_each(|x| *x *= radius);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{derive_stream, TAG_ENV};

    fn e(i: usize, d: usize) -> Vec<f64> {
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        v
    }

    fn neg(v: &[f64]) -> Vec<f64> {
        v.iter().map(|x| -x).collect()
    }

    #[test]
    fn fixed_pool_repeats() {
        let pool = vec![e(0, 2), e(1, 2), vec![0.3, -0.4]];
        let env =
            LinearEnvSpec::new(e(0, 2), 0.1, ContextGen::FixedPool { pool: pool.clone() }).unwrap();
        let mut s = derive_stream(1, 0, TAG_ENV);
        for t in 1..20 {
            assert_eq!(env.generate_contexts(t, &mut s).contexts, pool);
        }
    }

    #[test]
    fn fresh_contexts_in_ball_and_deterministic() {
        let env = LinearEnvSpec::new(e(0, 5), 0.1, ContextGen::FreshUnitBall { arms: 5 }).unwrap();
        let mut s = derive_stream(9, 0, TAG_ENV);
        for t in 1..2000 {
            for x in env.generate_contexts(t, &mut s).contexts {
                assert!(norm(&x) <= 1.0 + 1e-12);
            }
        }
        let a = env.generate_contexts(3, &mut derive_stream(9, 4, TAG_ENV));
        let b = env.generate_contexts(3, &mut derive_stream(9, 4, TAG_ENV));
        assert_eq!(a, b);
    }

    #[test]
    fn noiseless_reward_is_exact() {
        let env =
            LinearEnvSpec::new(vec![0.6, 0.8], 0.0, ContextGen::FreshUnitBall { arms: 2 }).unwrap();
        let mut s = derive_stream(1, 0, TAG_ENV);
        let x = [0.5, -0.25];
        assert_eq!(env.sample_reward(&x, &mut s), 0.6 * 0.5 - 0.8 * 0.25);
    }

    #[test]
    fn noisy_reward_means() {
        let env = LinearEnvSpec::new(e(0, 3), 0.1, ContextGen::FreshUnitBall { arms: 2 }).unwrap();
        let mut s = derive_stream(5, 0, TAG_ENV);
        let n = 100_000;
        let m1 = (0..n)
            .map(|_| env.sample_reward(&e(0, 3), &mut s))
            .sum::<f64>()
            / n as f64;
        assert!((m1 - 1.0).abs() <= 0.001 + 0.003, "{m1}");
        let m0 = (0..n)
            .map(|_| env.sample_reward(&[0.0; 3], &mut s))
            .sum::<f64>()
            / n as f64;
        assert!(m0.abs() <= 0.003, "{m0}");
    }

    #[test]
    fn linear_regret_increments() {
        let env = LinearEnvSpec::new(e(0, 2), 0.1, ContextGen::FreshUnitBall { arms: 2 }).unwrap();
        let same = ContextSet {
            t: 1,
            contexts: vec![vec![0.3, 0.1]; 3],
        };
        for arm in 0..3 {
            assert_eq!(env.regret_increment(&same, arm), 0.0);
        }
        let opposite = ContextSet {
            t: 1,
            contexts: vec![e(0, 2), neg(&e(0, 2))],
        };
        assert_eq!(env.regret_increment(&opposite, 1), 2.0);
        let ortho = ContextSet {
            t: 1,
            contexts: vec![e(0, 2), e(1, 2)],
        };
        assert_eq!(env.regret_increment(&ortho, 0), 0.0);
    }

    #[test]
    fn rejects_out_of_ball() {
        assert!(
            LinearEnvSpec::new(vec![1.0, 1.0], 0.1, ContextGen::FreshUnitBall { arms: 2 }).is_err()
        );
        assert!(LinearEnvSpec::new(
            e(0, 2),
            0.1,
            ContextGen::FixedPool {
                pool: vec![vec![2.0, 0.0]]
            }
        )
        .is_err());
        assert!(LinearEnvSpec::new(
            e(0, 2),
            0.1,
            ContextGen::FixedPool {
                pool: vec![vec![0.5, 0.0, 0.0]]
            }
        )
        .is_err());
    }
}
