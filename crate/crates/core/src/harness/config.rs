//! Experiment configuration files (TOML) and their validation.
//!
//! A file describes one experiment (setting, environment, attack, horizon,
//! replications, seed) plus the list of agents to run on it and, optionally,
//! the corruption levels of a sweep. See `configs/` for annotated examples.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::agents::linear::{
    gamma_for, CwOfulParams, LinTsAgent, LinearPolicy, OptimisticAgent, DEFAULT_DELTA,
};
use crate::agents::stochastic::{c_bar_for, StochasticPolicy, TsState, UcbState};
use crate::agents::{CorruptionKnowledge, Robustness};
use crate::attacks::{AttackStrategy, Attacker, TargetName, TargetSpec};
use crate::env::{sample_unit_sphere, ContextGen, LinearEnvSpec, RewardFamily, StochasticEnvSpec};
use crate::error::{Error, Result};
use crate::rng::{derive_stream, TAG_INSTANCE};

/// Rows above which per-round logs are skipped unless explicitly requested.
pub const AUTO_ROUND_LOG_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Setting {
    Stochastic,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContextMode {
    FixedPool,
    FreshUnitBall,
}

/// `[env]` table. Stochastic settings use `means`/`family`; linear settings
/// use the remaining fields.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvSection {
    pub means: Option<Vec<f64>>,
    pub family: Option<RewardFamily>,
    pub dim: Option<usize>,
    pub arms: Option<usize>,
    pub noise_sigma: Option<f64>,
    pub contexts: Option<ContextMode>,
    /// Explicit reward parameter; drawn uniformly on the unit sphere from the
    /// master seed when absent.
    pub mu: Option<Vec<f64>>,
    /// Explicit fixed pool; drawn uniformly on the unit sphere from the master
    /// seed when absent.
    pub pool: Option<Vec<Vec<f64>>>,
}

/// `[attack]` table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackSection {
    pub corruption_level: f64,
    #[serde(flatten)]
    pub strategy: AttackStrategy,
}

impl Default for AttackSection {
    fn default() -> Self {
        Self {
            corruption_level: 0.0,
            strategy: AttackStrategy::None,
        }
    }
}

fn default_exploration() -> f64 {
    1.0
}

fn default_delta() -> f64 {
    DEFAULT_DELTA
}

fn default_known() -> Robustness {
    Robustness::Known
}

/// One `[[agents]]` entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum AgentSpec {
    /// Gaussian-prior Thompson sampling.
    Ts,
    /// Thompson sampling with the corruption-optimistic posterior.
    RobustTs {
        #[serde(default = "default_known")]
        robustness: Robustness,
    },
    Ucb {
        #[serde(default = "default_exploration")]
        exploration: f64,
    },
    LinTs,
    RobustLinTs {
        #[serde(default = "default_known")]
        robustness: Robustness,
        #[serde(default = "default_delta")]
        delta: f64,
    },
    LinUcb {
        /// Constant radius; the OFUL schedule when absent.
        radius: Option<f64>,
        #[serde(default = "default_delta")]
        delta: f64,
    },
    CwOful {
        #[serde(default = "default_known")]
        robustness: Robustness,
        #[serde(default = "default_delta")]
        delta: f64,
    },
}

fn robustness_suffix(r: Robustness) -> String {
    match r {
        Robustness::Known => "known".into(),
        Robustness::Unknown => "unknown".into(),
        Robustness::Value(v) => format!("value_{v}"),
    }
}

impl AgentSpec {
    pub fn setting(&self) -> Setting {
        match self {
            AgentSpec::Ts | AgentSpec::RobustTs { .. } | AgentSpec::Ucb { .. } => {
                Setting::Stochastic
            }
            _ => Setting::Linear,
        }
    }

    /// Stable identifier used in file names and CSV columns.
    pub fn label(&self) -> String {
        match *self {
            AgentSpec::Ts => "ts".into(),
            AgentSpec::RobustTs { robustness } => {
                format!("robust_ts_{}", robustness_suffix(robustness))
            }
            AgentSpec::Ucb { .. } => "ucb".into(),
            AgentSpec::LinTs => "lin_ts".into(),
            AgentSpec::RobustLinTs { robustness, .. } => {
                format!("robust_lin_ts_{}", robustness_suffix(robustness))
            }
            AgentSpec::LinUcb { .. } => "lin_ucb".into(),
            AgentSpec::CwOful { robustness, .. } => {
                format!("cw_oful_{}", robustness_suffix(robustness))
            }
        }
    }

    /// Human-readable name for chart legends.
    pub fn display_name(&self) -> String {
        let suffix = |r: Robustness| match r {
            Robustness::Known => " (known C)".to_string(),
            Robustness::Unknown => " (unknown C)".to_string(),
            Robustness::Value(v) => format!(" ({v})"),
        };
        match *self {
            AgentSpec::Ts => "TS".into(),
            AgentSpec::RobustTs { robustness } => format!("Robust TS{}", suffix(robustness)),
            AgentSpec::Ucb { .. } => "UCB".into(),
            AgentSpec::LinTs => "LinTS".into(),
            AgentSpec::RobustLinTs { robustness, .. } => {
                format!("Robust LinTS{}", suffix(robustness))
            }
            AgentSpec::LinUcb { .. } => "LinUCB".into(),
            AgentSpec::CwOful { robustness, .. } => format!(
                "CW-OFUL{} [baseline, externally specified]",
                suffix(robustness)
            ),
        }
    }

    fn validate(&self, field: &str) -> Result<()> {
        let check_robustness = |r: Robustness, allow_zero: bool| -> Result<()> {
            if let Robustness::Value(v) = r {
                let ok = v.is_finite() && (v > 0.0 || (allow_zero && v == 0.0));
                if !ok {
                    return Err(Error::config(
                        format!("{field}.robustness"),
                        format!("invalid value {v}"),
                    ));
                }
            }
            Ok(())
        };
        let check_delta = |d: f64| -> Result<()> {
            if d > 0.0 && d < 1.0 {
                Ok(())
            } else {
                Err(Error::config(
                    format!("{field}.delta"),
                    "must lie in (0, 1)",
                ))
            }
        };
        match *self {
            AgentSpec::Ts | AgentSpec::LinTs => Ok(()),
            AgentSpec::RobustTs { robustness } => check_robustness(robustness, true),
            AgentSpec::Ucb { exploration } => {
                if exploration.is_finite() && exploration >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::config(
                        format!("{field}.exploration"),
                        "must be finite and nonnegative",
                    ))
                }
            }
            AgentSpec::RobustLinTs { robustness, delta }
            | AgentSpec::CwOful { robustness, delta } => {
                check_robustness(robustness, false)?;
                check_delta(delta)
            }
            AgentSpec::LinUcb { radius, delta } => {
                if let Some(r) = radius {
                    if !(r.is_finite() && r >= 0.0) {
                        return Err(Error::config(
                            format!("{field}.radius"),
                            "must be finite and nonnegative",
                        ));
                    }
                }
                check_delta(delta)
            }
        }
    }

    fn knowledge(robustness: Robustness, corruption_level: f64) -> CorruptionKnowledge {
        match robustness {
            Robustness::Unknown => CorruptionKnowledge::Unknown,
            _ => CorruptionKnowledge::Known(corruption_level),
        }
    }

    /// Builds a stochastic agent for `arms` arms.
    pub fn build_stochastic(
        &self,
        arms: usize,
        horizon: usize,
        corruption_level: f64,
    ) -> Box<dyn StochasticPolicy + Send> {
        match *self {
            AgentSpec::Ts => Box::new(TsState::vanilla(arms)),
            AgentSpec::RobustTs { robustness } => {
                let c_bar = match robustness {
                    Robustness::Value(v) => v,
                    r => c_bar_for(Self::knowledge(r, corruption_level), horizon, arms),
                };
                Box::new(TsState::new(arms, c_bar))
            }
            AgentSpec::Ucb { exploration } => Box::new(UcbState::new(arms, exploration)),
            _ => unreachable!("linear agent in stochastic setting"),
        }
    }

    /// Builds a linear agent for dimension `d` and noise scale `sigma`.
    pub fn build_linear(
        &self,
        d: usize,
        sigma: f64,
        horizon: usize,
        corruption_level: f64,
    ) -> Box<dyn LinearPolicy + Send> {
        let gamma = |r: Robustness| match r {
            Robustness::Value(v) => v,
            r => gamma_for(Self::knowledge(r, corruption_level), d, horizon),
        };
        match *self {
            AgentSpec::LinTs => Box::new(LinTsAgent::vanilla(d, sigma)),
            AgentSpec::RobustLinTs { robustness, delta } => {
                Box::new(LinTsAgent::robust(d, gamma(robustness), sigma, delta))
            }
            AgentSpec::LinUcb { radius, delta } => match radius {
                Some(r) => Box::new(OptimisticAgent::linucb_fixed(d, r)),
                None => Box::new(OptimisticAgent::linucb(d, sigma, delta)),
            },
            AgentSpec::CwOful { robustness, delta } => {
                let g = gamma(robustness);
                // The budget the weighting is tuned for: C, sqrt(T) when unknown.
                let assumed = match robustness {
                    Robustness::Unknown => (horizon as f64).sqrt(),
                    _ => corruption_level,
                };
                let corruption_term = if assumed == 0.0 { 0.0 } else { assumed * g };
                Box::new(OptimisticAgent::cwoful(
                    d,
                    g,
                    CwOfulParams {
                        sigma,
                        delta,
                        lambda: 1.0,
                        corruption_term,
                    },
                ))
            }
            _ => unreachable!("stochastic agent in linear setting"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub corruption_levels: Vec<f64>,
}

/// The on-disk document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub name: Option<String>,
    pub setting: Setting,
    pub horizon: usize,
    pub repetitions: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub diagnostics: bool,
    /// Write per-round logs; automatic (by row count) when absent.
    #[serde(default)]
    pub round_logs: Option<bool>,
    pub env: EnvSection,
    #[serde(default)]
    pub attack: AttackSection,
    pub agents: Vec<AgentSpec>,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
}

/// A materialized environment.
#[derive(Debug, Clone, PartialEq)]
pub enum EnvConfig {
    Stochastic(StochasticEnvSpec),
    Linear(LinearEnvSpec),
}

impl EnvConfig {
    pub fn arms(&self) -> usize {
        match self {
            EnvConfig::Stochastic(e) => e.arms(),
            EnvConfig::Linear(e) => e.arms(),
        }
    }
}

/// Attack with its target resolved to an arm index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttackConfig {
    pub corruption_level: f64,
    pub strategy: AttackStrategy,
    pub target: Option<usize>,
}

/// Everything needed to run one agent on one problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub env: EnvConfig,
    pub agent: AgentSpec,
    pub attack: AttackConfig,
    pub horizon: usize,
    pub repetitions: usize,
    pub master_seed: u64,
    pub diagnostics: bool,
    pub round_logs: bool,
}

impl ExperimentConfig {
    pub fn setting(&self) -> Setting {
        match self.env {
            EnvConfig::Stochastic(_) => Setting::Stochastic,
            EnvConfig::Linear(_) => Setting::Linear,
        }
    }

    /// Same experiment at another corruption level.
    pub fn with_corruption_level(&self, level: f64) -> Self {
        let mut cfg = self.clone();
        cfg.attack.corruption_level = level;
        cfg
    }

    pub fn with_agent(&self, agent: AgentSpec) -> Self {
        let mut cfg = self.clone();
        cfg.agent = agent;
        cfg
    }

    /// Builds the attacker for one episode.
    pub fn build_attacker(&self) -> Attacker {
        let arms = self.env.arms();
        let budget = self.attack.corruption_level;
        let target = self.attack.target.unwrap_or(0);
        match self.attack.strategy {
            AttackStrategy::None => Attacker::none(arms),
            AttackStrategy::Oracle { margin, .. } => {
                let target_mean = match &self.env {
                    EnvConfig::Stochastic(e) => e.means()[target],
                    EnvConfig::Linear(e) => match e.context_gen() {
                        ContextGen::FixedPool { pool } => e.expected_reward(&pool[target]),
                        ContextGen::FreshUnitBall { .. } => unreachable!("validated"),
                    },
                };
                Attacker::oracle(arms, budget, target, target_mean, margin)
            }
            AttackStrategy::JunStyle {
                delta0,
                sigma0,
                delta_conf,
                ..
            } => Attacker::jun_style(arms, budget, target, delta0, sigma0, delta_conf),
            AttackStrategy::GarcelonStyle { noise_sigma, .. } => {
                Attacker::garcelon_style(arms, budget, target, noise_sigma)
            }
        }
    }
}

/// A corruption-level sweep over several agents.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub base: ExperimentConfig,
    pub corruption_levels: Vec<f64>,
    pub agents: Vec<AgentSpec>,
}

impl ConfigFile {
    pub fn from_toml_str(text: &str, origin: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text, path)
    }

    pub fn display_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| "experiment".into())
    }

    /// One experiment per listed agent.
    pub fn experiments(&self) -> Result<Vec<ExperimentConfig>> {
        let base = self.base_experiment()?;
        Ok(self.agents.iter().map(|a| base.with_agent(*a)).collect())
    }

    pub fn sweep(&self) -> Result<SweepConfig> {
        let base = self.base_experiment()?;
        let Some(sweep) = &self.sweep else {
            return Err(Error::config("sweep", "missing [sweep] table"));
        };
        if sweep.corruption_levels.is_empty() {
            return Err(Error::config("sweep.corruption_levels", "list is empty"));
        }
        for &c in &sweep.corruption_levels {
            if !(c.is_finite() && c >= 0.0) {
                return Err(Error::config(
                    "sweep.corruption_levels",
                    format!("level {c} is not a finite nonnegative number"),
                ));
            }
        }
        Ok(SweepConfig {
            base,
            corruption_levels: sweep.corruption_levels.clone(),
            agents: self.agents.clone(),
        })
    }

    /// Validates everything and materializes the environment and attack target.
    pub fn validate(&self) -> Result<()> {
        self.base_experiment()?;
        if let Some(s) = &self.sweep {
            if s.corruption_levels.is_empty() {
                return Err(Error::config("sweep.corruption_levels", "list is empty"));
            }
            self.sweep()?;
        }
        Ok(())
    }

    fn base_experiment(&self) -> Result<ExperimentConfig> {
        if self.horizon == 0 {
            return Err(Error::config("horizon", "must be at least 1"));
        }
        if self.repetitions == 0 {
            return Err(Error::config("repetitions", "must be at least 1"));
        }
        if self.agents.is_empty() {
            return Err(Error::config("agents", "at least one agent is required"));
        }
        for (i, agent) in self.agents.iter().enumerate() {
            let field = format!("agents[{i}]");
            if agent.setting() != self.setting {
                return Err(Error::config(
                    field,
                    format!(
                        "agent `{}` does not belong to the {:?} setting",
                        agent.label(),
                        self.setting
                    ),
                ));
            }
            agent.validate(&field)?;
        }
        let env = self.materialize_env()?;
        let attack = self.resolve_attack(&env)?;
        let round_logs = self
            .round_logs
            .unwrap_or(self.horizon.saturating_mul(self.repetitions) <= AUTO_ROUND_LOG_LIMIT);
        if self.diagnostics && self.setting != Setting::Linear {
            return Err(Error::config(
                "diagnostics",
                "good-event diagnostics exist for the linear setting only",
            ));
        }
        Ok(ExperimentConfig {
            name: self.display_name(),
            env,
            agent: self.agents[0],
            attack,
            horizon: self.horizon,
            repetitions: self.repetitions,
            master_seed: self.master_seed,
            diagnostics: self.diagnostics,
            round_logs,
        })
    }

    fn materialize_env(&self) -> Result<EnvConfig> {
        let e = &self.env;
        match self.setting {
            Setting::Stochastic => {
                let unexpected = [
                    ("env.dim", e.dim.is_some()),
                    ("env.arms", e.arms.is_some()),
                    ("env.noise_sigma", e.noise_sigma.is_some()),
                    ("env.contexts", e.contexts.is_some()),
                    ("env.mu", e.mu.is_some()),
                    ("env.pool", e.pool.is_some()),
                ];
                if let Some((field, _)) = unexpected.iter().find(|(_, set)| *set) {
                    return Err(Error::config(*field, "not used by the stochastic setting"));
                }
                let means = e
                    .means
                    .clone()
                    .ok_or_else(|| Error::config("env.means", "required"))?;
                Ok(EnvConfig::Stochastic(StochasticEnvSpec::new(
                    means,
                    e.family.unwrap_or_default(),
                )?))
            }
            Setting::Linear => {
                if e.means.is_some() || e.family.is_some() {
                    return Err(Error::config("env.means", "not used by the linear setting"));
                }
                let dim = e.dim.ok_or_else(|| Error::config("env.dim", "required"))?;
                if dim == 0 {
                    return Err(Error::config("env.dim", "must be at least 1"));
                }
                let arms = e
                    .arms
                    .ok_or_else(|| Error::config("env.arms", "required"))?;
                if arms < 2 {
                    return Err(Error::config("env.arms", "need at least 2 arms"));
                }
                let sigma = e
                    .noise_sigma
                    .ok_or_else(|| Error::config("env.noise_sigma", "required"))?;
                let mode = e
                    .contexts
                    .ok_or_else(|| Error::config("env.contexts", "required"))?;
                let mut instance = derive_stream(self.master_seed, 0, TAG_INSTANCE);
                let mu = match &e.mu {
                    Some(mu) => {
                        if mu.len() != dim {
                            return Err(Error::config(
                                "env.mu",
                                format!("expected {dim} entries, got {}", mu.len()),
                            ));
                        }
                        mu.clone()
                    }
                    None => sample_unit_sphere(dim, &mut instance),
                };
                let contexts = match mode {
                    ContextMode::FreshUnitBall => {
                        if e.pool.is_some() {
                            return Err(Error::config(
                                "env.pool",
                                "only used with contexts = \"fixed_pool\"",
                            ));
                        }
                        ContextGen::FreshUnitBall { arms }
                    }
                    ContextMode::FixedPool => {
                        let pool = match &e.pool {
                            Some(p) => {
                                if p.len() != arms {
                                    return Err(Error::config(
                                        "env.pool",
                                        format!("expected {arms} contexts, got {}", p.len()),
                                    ));
                                }
                                p.clone()
                            }
                            None => (0..arms)
                                .map(|_| sample_unit_sphere(dim, &mut instance))
                                .collect(),
                        };
                        ContextGen::FixedPool { pool }
                    }
                };
                Ok(EnvConfig::Linear(LinearEnvSpec::new(mu, sigma, contexts)?))
            }
        }
    }

    fn resolve_attack(&self, env: &EnvConfig) -> Result<AttackConfig> {
        let a = &self.attack;
        if !(a.corruption_level.is_finite() && a.corruption_level >= 0.0) {
            return Err(Error::config(
                "attack.corruption_level",
                "must be finite and nonnegative",
            ));
        }
        let positive = |v: f64, field: &str| -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::config(field, "must be finite and positive"))
            }
        };
        match a.strategy {
            AttackStrategy::None => {}
            AttackStrategy::Oracle { margin, .. } => {
                positive(margin, "attack.margin")?;
                if let EnvConfig::Linear(l) = env {
                    if matches!(l.context_gen(), ContextGen::FreshUnitBall { .. }) {
                        return Err(Error::config(
                            "attack.strategy",
                            "the oracle attack needs fixed arm contexts",
                        ));
                    }
                }
            }
            AttackStrategy::JunStyle {
                delta0,
                sigma0,
                delta_conf,
                ..
            } => {
                if self.setting != Setting::Stochastic {
                    return Err(Error::config(
                        "attack.strategy",
                        "jun_style applies to the stochastic setting only",
                    ));
                }
                if !(delta0.is_finite() && delta0 >= 0.0) {
                    return Err(Error::config(
                        "attack.delta0",
                        "must be finite and nonnegative",
                    ));
                }
                positive(sigma0, "attack.sigma0")?;
                if !(delta_conf > 0.0 && delta_conf < 1.0) {
                    return Err(Error::config("attack.delta_conf", "must lie in (0, 1)"));
                }
            }
            AttackStrategy::GarcelonStyle { noise_sigma, .. } => {
                if self.setting != Setting::Linear {
                    return Err(Error::config(
                        "attack.strategy",
                        "garcelon_style applies to the linear setting only",
                    ));
                }
                if !(noise_sigma.is_finite() && noise_sigma >= 0.0) {
                    return Err(Error::config(
                        "attack.noise_sigma",
                        "must be finite and nonnegative",
                    ));
                }
            }
        }
        let target = match a.strategy.target() {
            None => None,
            Some(TargetSpec::Index(i)) => {
                if i >= env.arms() {
                    return Err(Error::config(
                        "attack.target",
                        format!("arm {i} out of range for {} arms", env.arms()),
                    ));
                }
                Some(i)
            }
            Some(TargetSpec::Named(TargetName::Worst)) => Some(match env {
                EnvConfig::Stochastic(e) => e.worst_arm(),
                EnvConfig::Linear(e) => e.worst_pool_arm().ok_or_else(|| {
                    Error::config(
                        "attack.target",
                        "\"worst\" needs fixed arm contexts; give an arm index",
                    )
                })?,
            }),
        };
        Ok(AttackConfig {
            corruption_level: a.corruption_level,
            strategy: a.strategy,
            target,
        })
    }
}
