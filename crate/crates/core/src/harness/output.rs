//! CSV writers and readers for run outputs.

use std::fs::File;
use std::path::Path;

use crate::error::{Error, Result};
use crate::round_log::RoundLog;

use super::run::{AggregateCurve, SweepRow};

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    csv::Writer::from_path(path).map_err(|e| csv_error(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Parse {
            path: path.to_path_buf(),
            message: format!("{other:?}"),
        },
    }
}

fn write_rows<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = writer(path)?;
    w.write_record(header).map_err(|e| csv_error(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Per-round detail of one episode.
pub fn write_round_log(path: &Path, rounds: &[RoundLog]) -> Result<()> {
    let mut cum = 0.0;
    write_rows(
        path,
        &[
            "t",
            "arm",
            "reward_pre",
            "corruption",
            "reward_post",
            "cum_regret",
            "budget_spent",
        ],
        rounds.iter().map(|r| {
            cum += r.regret_inc;
            vec![
                r.t.to_string(),
                r.arm.to_string(),
                r.reward_pre.to_string(),
                r.corruption.to_string(),
                r.reward_post.to_string(),
                cum.to_string(),
                r.budget_spent.to_string(),
            ]
        }),
    )
}

pub fn write_curve(path: &Path, curve: &AggregateCurve) -> Result<()> {
    write_rows(
        path,
        &["t", "mean_cum_regret", "std_cum_regret"],
        curve
            .mean
            .iter()
            .zip(&curve.std)
            .enumerate()
            .map(|(i, (m, s))| vec![(i + 1).to_string(), m.to_string(), s.to_string()]),
    )
}

pub fn write_sweep(path: &Path, rows: &[SweepRow]) -> Result<()> {
    write_rows(
        path,
        &[
            "agent",
            "corruption_level",
            "mean_final_regret",
            "std_final_regret",
        ],
        rows.iter().map(|r| {
            vec![
                r.agent.label(),
                r.corruption_level.to_string(),
                r.mean_final_regret.to_string(),
                r.std_final_regret.to_string(),
            ]
        }),
    )
}

/// A CSV file read back for plotting.
#[derive(Debug, Clone, PartialEq)]
pub enum PlotInput {
    /// `t, mean_cum_regret, std_cum_regret`.
    Curve {
        t: Vec<f64>,
        mean: Vec<f64>,
        std: Vec<f64>,
    },
    /// `agent, corruption_level, mean_final_regret, std_final_regret`.
    Sweep(Vec<(String, f64, f64, f64)>),
}

fn parse_f64(path: &Path, line: usize, s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::Parse {
        path: path.to_path_buf(),
        message: format!("line {line}: `{s}` is not a number"),
    })
}

pub fn read_plot_input(path: &Path) -> Result<PlotInput> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let header: Vec<String> = r
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let records: Vec<csv::StringRecord> = r
        .records()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| csv_error(path, e))?;
    let h: Vec<&str> = header.iter().map(String::as_str).collect();
    match h.as_slice() {
        ["t", "mean_cum_regret", "std_cum_regret"] => {
            let (mut t, mut mean, mut std) = (Vec::new(), Vec::new(), Vec::new());
            for (i, rec) in records.iter().enumerate() {
                t.push(parse_f64(path, i + 2, &rec[0])?);
                mean.push(parse_f64(path, i + 2, &rec[1])?);
                std.push(parse_f64(path, i + 2, &rec[2])?);
            }
            Ok(PlotInput::Curve { t, mean, std })
        }
        ["agent", "corruption_level", "mean_final_regret", "std_final_regret"] => {
            let mut rows = Vec::new();
            for (i, rec) in records.iter().enumerate() {
                rows.push((
                    rec[0].to_string(),
                    parse_f64(path, i + 2, &rec[1])?,
                    parse_f64(path, i + 2, &rec[2])?,
                    parse_f64(path, i + 2, &rec[3])?,
                ));
            }
            Ok(PlotInput::Sweep(rows))
        }
        _ => Err(Error::Parse {
            path: path.to_path_buf(),
            message: format!("unrecognized columns: {}", header.join(",")),
        }),
    }
}
