//! Command-line front end.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};

use super::config::ConfigFile;
use super::output::{read_plot_input, write_curve, write_round_log, write_sweep, PlotInput};
use super::run::{run_replicated, run_sweep, SweepRow};
use super::svg::{Chart, Series};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "ROBUST_TS_OUT";

#[derive(Debug, Parser)]
#[command(
    name = "robust-ts",
    version,
    about = "Bandit experiments under adversarial reward corruption"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every agent of a config and write regret curves.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides `master_seed`.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Final regret against corruption level, from the config's [sweep] table.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Render a curve or sweep CSV as SVG.
    Plot {
        csv: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a config without running it.
    Validate { config: PathBuf },
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code: 0 success, 1 invalid input, 2 runtime failure.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                1
            } else {
                2
            }
        }
    }
}

fn load(path: &Path, seed: Option<u64>) -> Result<ConfigFile> {
    let mut cfg = ConfigFile::load(path)?;
    if let Some(seed) = seed {
        cfg.master_seed = seed;
    }
    Ok(cfg)
}

fn out_dir(explicit: Option<PathBuf>, cfg: &ConfigFile) -> PathBuf {
    explicit
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
        .join(cfg.display_name())
}

fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::Validate { config } => {
            let cfg = load(&config, None)?;
            cfg.validate()?;
            println!(
                "{}: ok ({} agent(s), {} x {} rounds)",
                config.display(),
                cfg.agents.len(),
                cfg.repetitions,
                cfg.horizon
            );
            Ok(())
        }
        Command::Run { config, out, seed } => {
            let cfg = load(&config, seed)?;
            let experiments = cfg.experiments()?;
            let dir = out_dir(out, &cfg);
            let mut series = Vec::new();
            let mut finals = Vec::new();
            for exp in &experiments {
                let rep = run_replicated(exp, exp.round_logs)?;
                let label = exp.agent.label();
                write_curve(&dir.join(format!("{label}_curve.csv")), &rep.aggregate)?;
                if exp.round_logs {
                    for ep in &rep.episodes {
                        write_round_log(
                            &dir.join(format!("{label}_run{}_rounds.csv", ep.run_index)),
                            &ep.rounds,
                        )?;
                    }
                }
                println!(
                    "{:<40} final regret {:>12.3} ± {:.3}",
                    exp.agent.display_name(),
                    rep.aggregate.final_mean(),
                    rep.aggregate.final_std()
                );
                if let Some(rate) = rep.e_mu_failure_rate() {
                    println!(
                        "{:<40} runs with an estimation-event failure: {rate:.4}",
                        ""
                    );
                }
                finals.push(SweepRow {
                    agent: exp.agent,
                    corruption_level: exp.attack.corruption_level,
                    mean_final_regret: rep.aggregate.final_mean(),
                    std_final_regret: rep.aggregate.final_std(),
                });
                series.push(Series {
                    name: exp.agent.display_name(),
                    x: (1..=exp.horizon).map(|t| t as f64).collect(),
                    mean: rep.aggregate.mean.clone(),
                    std: Some(rep.aggregate.std.clone()),
                });
            }
            write_sweep(&dir.join("final_regret.csv"), &finals)?;
            let first = &experiments[0];
            Chart {
                title: format!(
                    "{} (attack: {}, C = {})",
                    cfg.display_name(),
                    first.attack.strategy.name(),
                    first.attack.corruption_level
                ),
                x_label: "round".into(),
                y_label: "cumulative regret".into(),
                series,
            }
            .write(&dir.join("cumulative_regret.svg"))?;
            println!("wrote {}", dir.display());
            Ok(())
        }
        Command::Sweep { config, out, seed } => {
            let cfg = load(&config, seed)?;
            let sweep = cfg.sweep()?;
            let dir = out_dir(out, &cfg);
            let rows = run_sweep(&sweep)?;
            for r in &rows {
                println!(
                    "{:<40} C = {:>8} final regret {:>12.3} ± {:.3}",
                    r.agent.display_name(),
                    r.corruption_level,
                    r.mean_final_regret,
                    r.std_final_regret
                );
            }
            write_sweep(&dir.join("sweep.csv"), &rows)?;
            sweep_chart(&cfg.display_name(), &rows_as_tuples(&rows))
                .write(&dir.join("sweep.svg"))?;
            println!("wrote {}", dir.display());
            Ok(())
        }
        Command::Plot { csv, out } => {
            let input = read_plot_input(&csv)?;
            let stem = csv
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "series".into());
            let chart = match input {
                PlotInput::Curve { t, mean, std } => {
                    if t.is_empty() {
                        return Err(Error::Parse {
                            path: csv.clone(),
                            message: "no rows".into(),
                        });
                    }
                    Chart {
                        title: stem.clone(),
                        x_label: "round".into(),
                        y_label: "cumulative regret".into(),
                        series: vec![Series {
                            name: stem.clone(),
                            x: t,
                            mean,
                            std: Some(std),
                        }],
                    }
                }
                PlotInput::Sweep(rows) => sweep_chart(&stem, &rows),
            };
            let path = out.unwrap_or_else(|| csv.with_extension("svg"));
            chart.write(&path)?;
            println!("wrote {}", path.display());
            Ok(())
        }
    }
}

fn rows_as_tuples(rows: &[SweepRow]) -> Vec<(String, f64, f64, f64)> {
    rows.iter()
        .map(|r| {
            (
                r.agent.display_name(),
                r.corruption_level,
                r.mean_final_regret,
                r.std_final_regret,
            )
        })
        .collect()
}

fn sweep_chart(title: &str, rows: &[(String, f64, f64, f64)]) -> Chart {
    let mut series: Vec<Series> = Vec::new();
    for (name, level, mean, std) in rows {
        let idx = match series.iter().position(|s| &s.name == name) {
            Some(i) => i,
            None => {
                series.push(Series {
                    name: name.clone(),
                    x: Vec::new(),
                    mean: Vec::new(),
                    std: Some(Vec::new()),
                });
                series.len() - 1
            }
        };
        let s = &mut series[idx];
        s.x.push(*level);
        s.mean.push(*mean);
        if let Some(v) = s.std.as_mut() {
            v.push(*std);
        }
    }
    Chart {
        title: title.to_string(),
        x_label: "corruption level C".into(),
        y_label: "final cumulative regret".into(),
        series,
    }
}
