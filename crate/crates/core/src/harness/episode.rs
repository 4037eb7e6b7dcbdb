//! One episode: a single agent against a single environment and attacker.

use crate::agents::linear::good_event_diagnostics;
use crate::attacks::AttackObservation;
use crate::error::{Error, Result};
use crate::rng::{derive_stream, TAG_AGENT, TAG_ATTACK, TAG_ENV};
use crate::round_log::RoundLog;

use super::config::{EnvConfig, ExperimentConfig};

/// Good-event counters for linear Thompson sampling, over rounds `2..=T`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Diagnostics {
    pub rounds_checked: usize,
    pub e_mu_violations: usize,
    pub e_theta_violations: usize,
}

impl Diagnostics {
    pub fn e_mu_held_throughout(&self) -> bool {
        self.e_mu_violations == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult {
    pub run_index: u64,
    /// Cumulative regret after each round.
    pub cum_regret: Vec<f64>,
    pub budget_spent: f64,
    /// Per-round records, empty unless requested.
    pub rounds: Vec<RoundLog>,
    pub diagnostics: Option<Diagnostics>,
}

impl EpisodeResult {
    pub fn final_regret(&self) -> f64 {
        self.cum_regret.last().copied().unwrap_or(0.0)
    }
}

/// Runs episode `run_index` of `cfg`. Per round: contexts, agent choice,
/// reward, corruption, agent update, regret.
pub fn run_episode(
    cfg: &ExperimentConfig,
    run_index: u64,
    keep_rounds: bool,
) -> Result<EpisodeResult> {
    let mut env_stream = derive_stream(cfg.master_seed, run_index, TAG_ENV);
    let mut agent_stream = derive_stream(cfg.master_seed, run_index, TAG_AGENT);
    let mut attack_stream = derive_stream(cfg.master_seed, run_index, TAG_ATTACK);
    let mut attacker = cfg.build_attacker();
    let level = cfg.attack.corruption_level;
    let horizon = cfg.horizon;

    let mut cum_regret = Vec::with_capacity(horizon);
    let mut rounds = Vec::with_capacity(if keep_rounds { horizon } else { 0 });
    let mut total = 0.0;
    let mut diagnostics = None;

    match &cfg.env {
        EnvConfig::Stochastic(env) => {
            let mut agent = cfg.agent.build_stochastic(env.arms(), horizon, level);
            for t in 1..=horizon {
                let arm = agent.select(t, &mut agent_stream);
                let reward = env.sample_reward(arm, &mut env_stream)?;
                let obs = AttackObservation {
                    t,
                    arm,
                    reward_pre: reward,
                    context: None,
                };
                let c = attacker.decide(&obs, &mut attack_stream);
                agent.update(arm, reward + c);
                let inc = env.regret_increment(arm);
                total += inc;
                cum_regret.push(total);
                if keep_rounds {
                    rounds.push(RoundLog::new(
                        t,
                        arm,
                        reward,
                        c,
                        inc,
                        attacker.ledger().spent(),
                    ));
                }
            }
        }
        EnvConfig::Linear(env) => {
            let mut agent = cfg
                .agent
                .build_linear(env.dim(), env.noise_sigma(), horizon, level);
            let mut diag = cfg.diagnostics.then(Diagnostics::default);
            for t in 1..=horizon {
                let ctx = env.generate_contexts(t, &mut env_stream);
                let arm = agent.select(&ctx, t, &mut agent_stream);
                if let Some(diag) = diag.as_mut() {
                    if let (Some(params), Some(sample)) = (agent.ts_params(), agent.last_sample()) {
                        if t >= 2 {
                            let ev = good_event_diagnostics(
                                agent.ridge(),
                                params,
                                env,
                                &ctx,
                                sample,
                                t,
                                level,
                            );
                            diag.rounds_checked += 1;
                            diag.e_mu_violations += usize::from(!ev.e_mu);
                            diag.e_theta_violations += usize::from(!ev.e_theta);
                        }
                    }
                }
                let x = ctx.get(arm);
                let reward = env.sample_reward(x, &mut env_stream);
                let obs = AttackObservation {
                    t,
                    arm,
                    reward_pre: reward,
                    context: Some(x),
                };
                let c = attacker.decide(&obs, &mut attack_stream);
                agent.update(x, reward + c).map_err(|e| Error::Numerical {
                    t,
                    reason: e.to_string(),
                })?;
                let inc = env.regret_increment(&ctx, arm);
                total += inc;
                cum_regret.push(total);
                if keep_rounds {
                    rounds.push(RoundLog::new(
                        t,
                        arm,
                        reward,
                        c,
                        inc,
                        attacker.ledger().spent(),
                    ));
                }
            }
            diagnostics = diag;
        }
    }

    Ok(EpisodeResult {
        run_index,
        cum_regret,
        budget_spent: attacker.ledger().spent(),
        rounds,
        diagnostics,
    })
}
