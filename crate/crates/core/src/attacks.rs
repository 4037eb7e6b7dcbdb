//! Strong reward-poisoning adversaries.
//!
//! An attacker sees the pulled arm, its pre-attack reward and (in the
//! contextual setting) its context, then returns a corruption `c(t)` that the
//! [`BudgetLedger`] clips to the remaining budget. It never sees the agent's
//! internal randomness.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::budget::BudgetLedger;
use crate::rng::RngStream;

/// Which arm the attacker wants the agent to play.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TargetSpec {
    Index(usize),
    Named(TargetName),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetName {
    /// The arm with the lowest true mean.
    Worst,
}

impl Default for TargetSpec {
    fn default() -> Self {
        TargetSpec::Named(TargetName::Worst)
    }
}

/// Attack strategy and its parameters, as written in a config file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "strategy", deny_unknown_fields)]
pub enum AttackStrategy {
    None,
    /// Rewrites every non-target reward to `target_mean - margin`.
    Oracle {
        #[serde(default)]
        target: TargetSpec,
        margin: f64,
    },
    /// Keeps every non-target arm's observed mean below a lower confidence
    /// bound of the target's observed mean.
    JunStyle {
        #[serde(default)]
        target: TargetSpec,
        #[serde(default)]
        delta0: f64,
        sigma0: f64,
        delta_conf: f64,
    },
    /// Replaces every non-target reward with zero-mean Gaussian noise.
    GarcelonStyle {
        #[serde(default)]
        target: TargetSpec,
        noise_sigma: f64,
    },
}

impl AttackStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            AttackStrategy::None => "none",
            AttackStrategy::Oracle { .. } => "oracle",
            AttackStrategy::JunStyle { .. } => "jun_style",
            AttackStrategy::GarcelonStyle { .. } => "garcelon_style",
        }
    }

    pub fn target(&self) -> Option<TargetSpec> {
        match *self {
            AttackStrategy::None => None,
            AttackStrategy::Oracle { target, .. }
            | AttackStrategy::JunStyle { target, .. }
            | AttackStrategy::GarcelonStyle { target, .. } => Some(target),
        }
    }
}

/// What the attacker sees at round `t`, after the agent has acted.
#[derive(Debug, Clone, Copy)]
pub struct AttackObservation<'a> {
    pub t: usize,
    pub arm: usize,
    pub reward_pre: f64,
    pub context: Option<&'a [f64]>,
}

/// Per-arm statistics of the rewards the agent actually received.
#[derive(Debug, Clone, PartialEq)]
pub struct ShadowState {
    pub counts: Vec<u64>,
    pub sums: Vec<f64>,
}

impl ShadowState {
    pub fn new(arms: usize) -> Self {
        Self {
            counts: vec![0; arms],
            sums: vec![0.0; arms],
        }
    }

    /// Plain average of post-attack rewards; `None` for an unobserved arm.
    pub fn mean(&self, arm: usize) -> Option<f64> {
        (self.counts[arm] > 0).then(|| self.sums[arm] / self.counts[arm] as f64)
    }

    fn record(&mut self, arm: usize, reward_post: f64) {
        self.counts[arm] += 1;
        self.sums[arm] += reward_post;
    }
}

/// Resolved strategy: target index fixed, oracle knowledge attached.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Resolved {
    None,
    Oracle {
        target: usize,
        target_mean: f64,
        margin: f64,
    },
    Jun {
        target: usize,
        params: JunParams,
    },
    Garcelon {
        target: usize,
        noise_sigma: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JunParams {
    pub arms: usize,
    pub delta0: f64,
    pub sigma0: f64,
    pub delta_conf: f64,
}

impl JunParams {
    /// `sqrt((2 sigma0^2 / n) ln(pi^2 N n^2 / (3 delta_conf)))`, infinite at `n = 0`.
    pub fn beta(&self, n: u64) -> f64 {
        if n == 0 {
            return f64::INFINITY;
        }
        let n = n as f64;
        let arg = PI * PI * self.arms as f64 * n * n / (3.0 * self.delta_conf);
        (2.0 * self.sigma0 * self.sigma0 / n * arg.ln()).sqrt()
    }
}

/// A running attacker: strategy, budget ledger and shadow statistics.
#[derive(Debug, Clone)]
pub struct Attacker {
    strategy: Resolved,
    ledger: BudgetLedger,
    shadow: ShadowState,
}

impl Attacker {
    pub fn none(arms: usize) -> Self {
        Self {
            strategy: Resolved::None,
            ledger: BudgetLedger::new(0.0),
            shadow: ShadowState::new(arms),
        }
    }

    pub fn oracle(arms: usize, budget: f64, target: usize, target_mean: f64, margin: f64) -> Self {
        Self::with(
            arms,
            budget,
            Resolved::Oracle {
                target,
                target_mean,
                margin,
            },
        )
    }

    pub fn jun_style(
        arms: usize,
        budget: f64,
        target: usize,
        delta0: f64,
        sigma0: f64,
        delta_conf: f64,
    ) -> Self {
        Self::with(
            arms,
            budget,
            Resolved::Jun {
                target,
                params: JunParams {
                    arms,
                    delta0,
                    sigma0,
                    delta_conf,
                },
            },
        )
    }

    pub fn garcelon_style(arms: usize, budget: f64, target: usize, noise_sigma: f64) -> Self {
        Self::with(
            arms,
            budget,
            Resolved::Garcelon {
                target,
                noise_sigma,
            },
        )
    }

    fn with(arms: usize, budget: f64, strategy: Resolved) -> Self {
        Self {
            strategy,
            ledger: BudgetLedger::new(budget),
            shadow: ShadowState::new(arms),
        }
    }

    pub fn ledger(&self) -> &BudgetLedger {
        &self.ledger
    }

    pub fn shadow(&self) -> &ShadowState {
        &self.shadow
    }

    pub fn target(&self) -> Option<usize> {
        match self.strategy {
            Resolved::None => None,
            Resolved::Oracle { target, .. }
            | Resolved::Jun { target, .. }
            | Resolved::Garcelon { target, .. } => Some(target),
        }
    }

    /// Chooses, charges and records the corruption for this round.
    pub fn decide(&mut self, obs: &AttackObservation<'_>, stream: &mut RngStream) -> f64 {
        let desired = match self.strategy {
            Resolved::None => 0.0,
            Resolved::Oracle {
                target,
                target_mean,
                margin,
            } => oracle_desired(target, target_mean, margin, obs),
            Resolved::Jun { target, params } => jun_desired(&self.shadow, target, &params, obs),
            Resolved::Garcelon {
                target,
                noise_sigma,
            } => {
                if self.ledger.is_exhausted() {
                    0.0
                } else {
                    garcelon_desired(target, noise_sigma, obs, stream)
                }
            }
        };
        let c = self.ledger.charge(desired);
        self.shadow.record(obs.arm, obs.reward_pre + c);
        c
    }
}

/// `(target_mean - margin) - reward_pre` on non-target arms, 0 on the target.
pub fn oracle_desired(
    target: usize,
    target_mean: f64,
    margin: f64,
    obs: &AttackObservation<'_>,
) -> f64 {
    if obs.arm == target {
        0.0
    } else {
        (target_mean - margin) - obs.reward_pre
    }
}

/// The non-positive corruption that brings the pulled arm's observed mean
/// down to `min(current, mu_target - 2 beta(k_target) - delta0)`.
pub fn jun_desired(
    shadow: &ShadowState,
    target: usize,
    params: &JunParams,
    obs: &AttackObservation<'_>,
) -> f64 {
    if obs.arm == target {
        return 0.0;
    }
    let Some(target_mean) = shadow.mean(target) else {
        return 0.0;
    };
    let goal = target_mean - 2.0 * params.beta(shadow.counts[target]) - params.delta0;
    let n = shadow.counts[obs.arm] as f64 + 1.0;
    let uncorrupted_sum = shadow.sums[obs.arm] + obs.reward_pre;
    (goal * n - uncorrupted_sum).min(0.0)
}

/// `-reward_pre + eps`, `eps ~ Normal(0, noise_sigma^2)`, on non-target arms.
pub fn garcelon_desired(
    target: usize,
    noise_sigma: f64,
    obs: &AttackObservation<'_>,
    stream: &mut RngStream,
) -> f64 {
    if obs.arm == target {
        return 0.0;
    }
    let eps = noise_sigma * stream.next_gaussian();
    -obs.reward_pre + eps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{derive_stream, TAG_ATTACK};

    fn obs(arm: usize, reward_pre: f64) -> AttackObservation<'static> {
        AttackObservation {
            t: 1,
            arm,
            reward_pre,
            context: None,
        }
    }

    #[test]
    fn none_never_corrupts() {
        let mut a = Attacker::none(3);
        let mut s = derive_stream(0, 0, TAG_ATTACK);
        for arm in 0..3 {
            assert_eq!(a.decide(&obs(arm, 0.7), &mut s), 0.0);
        }
    }

    #[test]
    fn oracle_rule() {
        assert!((oracle_desired(2, 0.3, 0.1, &obs(0, 0.8)) + 0.6).abs() < 1e-15);
        assert_eq!(oracle_desired(2, 0.3, 0.1, &obs(2, 0.8)), 0.0);
        assert_eq!(oracle_desired(2, 0.3, 0.1, &obs(0, 0.3 - 0.1)), 0.0);
    }

    #[test]
    fn exhausted_budget_stops_every_strategy() {
        let mut s = derive_stream(0, 0, TAG_ATTACK);
        let mut attackers = vec![
            Attacker::oracle(2, 0.5, 1, 0.3, 0.1),
            Attacker::garcelon_style(2, 0.5, 1, 0.1),
            Attacker::jun_style(2, 0.5, 1, 0.0, 0.1, 0.05),
        ];
        for a in &mut attackers {
            a.decide(&obs(1, 0.2), &mut s);
            for _ in 0..10 {
                a.decide(&obs(0, 1.0), &mut s);
            }
            assert_eq!(a.ledger().spent(), 0.5);
            assert_eq!(a.decide(&obs(0, 1.0), &mut s), 0.0);
        }
    }

    #[test]
    fn jun_waits_for_target_observation() {
        let shadow = ShadowState::new(2);
        let p = JunParams {
            arms: 2,
            delta0: 0.0,
            sigma0: 0.1,
            delta_conf: 0.05,
        };
        assert_eq!(jun_desired(&shadow, 1, &p, &obs(0, 0.9)), 0.0);
        assert_eq!(p.beta(0), f64::INFINITY);
    }

    #[test]
    fn jun_drags_mean_to_goal() {
        let p = JunParams {
            arms: 2,
            delta0: 0.0,
            sigma0: 0.1,
            delta_conf: 0.05,
        };
        let mut shadow = ShadowState::new(2);
        for r in [0.2, 0.4, 0.3, 0.3] {
            shadow.record(1, r);
        }
        shadow.record(0, 0.8);

        // Step by step: beta(4) = sqrt(2 * 0.01 / 4 * ln(pi^2 * 2 * 16 / 0.15)).
        let log_arg = 9.869_604_401_089_358 * 2.0 * 16.0 / 0.15;
        let beta4 = (0.005 * f64::ln(log_arg)).sqrt();
        assert!((beta4 - 0.195_6).abs() < 1e-4, "{beta4}");
        let goal = 0.3 - 2.0 * beta4;
        let expected = goal * 2.0 - (0.8 + 0.8);
        let c = jun_desired(&shadow, 1, &p, &obs(0, 0.8));
        assert!((c - expected).abs() < 1e-12);
        assert!((c + 1.782_4).abs() < 1e-4, "{c}");
        // After the corruption the observed mean sits exactly on the goal.
        assert!(((0.8 + 0.8 + c) / 2.0 - goal).abs() < 1e-12);

        assert_eq!(jun_desired(&shadow, 1, &p, &obs(1, 0.8)), 0.0);
        // Already below the goal: no corruption.
        let mut low = shadow.clone();
        low.sums[0] = -5.0;
        assert_eq!(jun_desired(&low, 1, &p, &obs(0, 0.0)), 0.0);
    }

    #[test]
    fn garcelon_zeroes_and_spares_target() {
        let mut s = derive_stream(0, 0, TAG_ATTACK);
        assert!((garcelon_desired(1, 0.0, &obs(0, 0.7), &mut s) + 0.7).abs() < 1e-15);
        assert_eq!(garcelon_desired(1, 0.3, &obs(1, 0.7), &mut s), 0.0);
    }

    #[test]
    fn garcelon_post_rewards_are_centered() {
        let mut a = Attacker::garcelon_style(2, 1e9, 1, 0.1);
        let mut s = derive_stream(4, 0, TAG_ATTACK);
        let mut env = derive_stream(4, 0, crate::rng::TAG_ENV);
        let n = 10_000;
        let mut sum = 0.0;
        for t in 0..n {
            let r = 0.5 + 0.1 * env.next_gaussian();
            let c = a.decide(
                &AttackObservation {
                    t,
                    arm: 0,
                    reward_pre: r,
                    context: None,
                },
                &mut s,
            );
            sum += r + c;
        }
        assert!((sum / n as f64).abs() < 0.003);
    }

    #[test]
    fn shadow_uses_granted_corruption() {
        let mut a = Attacker::oracle(2, 0.25, 1, 0.5, 0.1);
        let mut s = derive_stream(0, 0, TAG_ATTACK);
        let c = a.decide(&obs(0, 1.0), &mut s);
        assert_eq!(c, -0.25);
        assert_eq!(a.shadow().sums[0], 0.75);
        assert_eq!(a.shadow().mean(0), Some(0.75));
    }

    #[test]
    fn target_spec_parses() {
        #[derive(Deserialize)]
        struct W {
            target: TargetSpec,
        }
        let w: W = toml::from_str("target = 3").unwrap();
        assert_eq!(w.target, TargetSpec::Index(3));
        let w: W = toml::from_str("target = \"worst\"").unwrap();
        assert_eq!(w.target, TargetSpec::Named(TargetName::Worst));
        assert!(toml::from_str::<W>("target = \"best\"").is_err());
    }
}
