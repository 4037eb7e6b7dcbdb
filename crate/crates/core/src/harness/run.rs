//! Replicated runs and corruption-level sweeps.

use rayon::prelude::*;

use crate::error::Result;

use super::config::{AgentSpec, ExperimentConfig, SweepConfig};
use super::episode::{run_episode, Diagnostics, EpisodeResult};

/// Mean and population standard deviation of cumulative regret per round.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateCurve {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl AggregateCurve {
    pub fn from_curves(curves: &[&[f64]]) -> Self {
        assert!(!curves.is_empty(), "no curves to aggregate");
        let len = curves[0].len();
        let n = curves.len() as f64;
        let mut mean = vec![0.0; len];
        let mut std = vec![0.0; len];
        for t in 0..len {
            let m = curves.iter().map(|c| c[t]).sum::<f64>() / n;
            let var = curves.iter().map(|c| (c[t] - m).powi(2)).sum::<f64>() / n;
            mean[t] = m;
            std[t] = var.sqrt();
        }
        Self { mean, std }
    }

    pub fn final_mean(&self) -> f64 {
        self.mean.last().copied().unwrap_or(0.0)
    }

    pub fn final_std(&self) -> f64 {
        self.std.last().copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Replicated {
    pub agent: AgentSpec,
    pub corruption_level: f64,
    /// Sorted by run index.
    pub episodes: Vec<EpisodeResult>,
    pub aggregate: AggregateCurve,
}

impl Replicated {
    pub fn final_regrets(&self) -> Vec<f64> {
        self.episodes
            .iter()
            .map(EpisodeResult::final_regret)
            .collect()
    }

    /// Fraction of runs in which the estimation event failed at least once.
    pub fn e_mu_failure_rate(&self) -> Option<f64> {
        let diags: Vec<Diagnostics> = self.episodes.iter().filter_map(|e| e.diagnostics).collect();
        if diags.is_empty() {
            return None;
        }
        let failed = diags.iter().filter(|d| !d.e_mu_held_throughout()).count();
        Some(failed as f64 / diags.len() as f64)
    }
}

/// Runs `cfg.repetitions` independent episodes in parallel. The result does
/// not depend on the thread count.
pub fn run_replicated(cfg: &ExperimentConfig, keep_rounds: bool) -> Result<Replicated> {
    let episodes = (0..cfg.repetitions as u64)
        .into_par_iter()
        .map(|run| run_episode(cfg, run, keep_rounds))
        .collect::<Result<Vec<_>>>()?;
    let curves: Vec<&[f64]> = episodes.iter().map(|e| e.cum_regret.as_slice()).collect();
    let aggregate = AggregateCurve::from_curves(&curves);
    Ok(Replicated {
        agent: cfg.agent,
        corruption_level: cfg.attack.corruption_level,
        episodes,
        aggregate,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub agent: AgentSpec,
    pub corruption_level: f64,
    pub mean_final_regret: f64,
    pub std_final_regret: f64,
}

/// One replicated run per (agent, corruption level). Agents told the
/// corruption level see the level of their cell.
pub fn run_sweep(sweep: &SweepConfig) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for agent in &sweep.agents {
        for &level in &sweep.corruption_levels {
            let cfg = sweep.base.with_agent(*agent).with_corruption_level(level);
            let rep = run_replicated(&cfg, false)?;
            rows.push(SweepRow {
                agent: *agent,
                corruption_level: level,
                mean_final_regret: rep.aggregate.final_mean(),
                std_final_regret: rep.aggregate.final_std(),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aggregate_uses_population_std() {
        let a = [1.0, 2.0];
        let b = [3.0, 6.0];
        let agg = AggregateCurve::from_curves(&[&a, &b]);
        assert_eq!(agg.mean, vec![2.0, 4.0]);
        assert_eq!(agg.std, vec![1.0, 2.0]);
    }

    #[test]
    fn single_curve_has_zero_spread() {
        let a = [0.5, 1.5, 1.5];
        let agg = AggregateCurve::from_curves(&[&a]);
        assert_eq!(agg.mean, a.to_vec());
        assert!(agg.std.iter().all(|&s| s == 0.0));
    }
}
