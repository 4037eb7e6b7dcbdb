//! Experiment harness: configuration, episodes, replication, sweeps, output.

pub mod cli;
pub mod config;
pub mod episode;
pub mod output;
pub mod run;
pub mod svg;

pub use config::{AgentSpec, ConfigFile, EnvConfig, ExperimentConfig, Setting, SweepConfig};
pub use episode::{run_episode, Diagnostics, EpisodeResult};
pub use run::{run_replicated, run_sweep, AggregateCurve, Replicated, SweepRow};
