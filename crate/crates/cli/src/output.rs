//! CSV and JSON artifacts.
//!
//! Floats are written as `{:.16e}` (17 significant digits), which
//! round-trips every finite `f64` exactly.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Duration;

use serde::Serialize;
use spinjump_core::{ChannelCounts, EnsembleStats, EventMoments, TrajectoryRecord};

use crate::config::RunConfig;
use crate::error::{CliError, Result};

pub const TRAJECTORY_HEADER: [&str; 11] = [
    "trajectory_seed",
    "event_index",
    "channel",
    "theta",
    "entropy_bits",
    "overlap_psi0",
    "mean_jz_sum",
    "variance_jz_sum",
    "p_plus",
    "p_minus",
    "p_scatter",
];

pub const ENSEMBLE_HEADER: [&str; 7] = [
    "event_index",
    "mean_entropy",
    "std_entropy",
    "mean_overlap",
    "std_overlap",
    "mean_variance_jz",
    "n_trajectories",
];

pub const COMPARE_HEADER: [&str; 6] = [
    "event_index",
    "mean_entropy_ideal",
    "mean_entropy_scatter",
    "entropy_difference",
    "std_entropy_ideal",
    "std_entropy_scatter",
];

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    csv::Writer::from_path(path).map_err(|source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    })
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes the snapshot rows of every record, in order, under one header.
pub fn write_trajectory_csv<'a>(
    records: impl IntoIterator<Item = &'a TrajectoryRecord>,
    path: &Path,
) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(TRAJECTORY_HEADER).map_err(csv_err(path))?;
    for record in records {
        let seed = record.seed.to_string();
        for snap in &record.snapshots {
            let o = &snap.outcome;
            w.write_record([
                seed.clone(),
                snap.n_detected.to_string(),
                o.channel.symbol().to_string(),
                fmt_opt(o.theta),
                fmt_f64(snap.entropy_bits),
                fmt_opt(snap.overlap_psi0),
                fmt_f64(snap.mean_jz_sum),
                fmt_f64(snap.variance_jz_sum),
                fmt_f64(o.probabilities.plus),
                fmt_f64(o.probabilities.minus),
                fmt_f64(o.probabilities.scatter),
            ])
            .map_err(csv_err(path))?;
        }
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

fn overlap_moments(e: &EventMoments) -> (Option<f64>, Option<f64>) {
    if e.overlap.count == 0 {
        (None, None)
    } else {
        (Some(e.overlap.mean), Some(e.overlap.std_dev()))
    }
}

pub fn write_ensemble_csv(stats: &EnsembleStats, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(ENSEMBLE_HEADER).map_err(csv_err(path))?;
    for e in &stats.events {
        let (mean_overlap, std_overlap) = overlap_moments(e);
        w.write_record([
            e.event_index.to_string(),
            fmt_f64(e.entropy.mean),
            fmt_f64(e.entropy.std_dev()),
            fmt_opt(mean_overlap),
            fmt_opt(std_overlap),
            fmt_f64(e.variance_jz.mean),
            stats.n_trajectories.to_string(),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// One parsed line of an ensemble CSV.
#[derive(Clone, Debug, PartialEq, serde::Deserialize)]
pub struct EnsembleRow {
    pub event_index: usize,
    pub mean_entropy: f64,
    pub std_entropy: f64,
    pub mean_overlap: Option<f64>,
    pub std_overlap: Option<f64>,
    pub mean_variance_jz: f64,
    pub n_trajectories: usize,
}

pub fn read_ensemble_csv(path: &Path) -> Result<Vec<EnsembleRow>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let header = r.headers().map_err(csv_err(path))?.clone();
    if header.iter().ne(ENSEMBLE_HEADER) {
        return Err(CliError::config(
            "ensemble_csv",
            format!("{} has an unexpected header", path.display()),
        ));
    }
    r.deserialize().collect::<std::result::Result<_, _>>().map_err(csv_err(path))
}

/// Paired ideal / scattering means; rows must share event indices.
pub fn write_compare_csv(ideal: &EnsembleStats, scatter: &EnsembleStats, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(COMPARE_HEADER).map_err(csv_err(path))?;
    for (a, b) in ideal.events.iter().zip(&scatter.events) {
        debug_assert_eq!(a.event_index, b.event_index);
        w.write_record([
            a.event_index.to_string(),
            fmt_f64(a.entropy.mean),
            fmt_f64(b.entropy.mean),
            fmt_f64(a.entropy.mean - b.entropy.mean),
            fmt_f64(a.entropy.std_dev()),
            fmt_f64(b.entropy.std_dev()),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

#[derive(Debug, Serialize)]
pub struct FinalMoments {
    pub event_index: usize,
    pub mean_entropy: f64,
    pub std_entropy: f64,
    pub mean_overlap: Option<f64>,
    pub mean_variance_jz: f64,
}

#[derive(Debug, Serialize)]
pub struct Summary<'a> {
    pub command: &'a str,
    pub config: &'a RunConfig,
    pub n_trajectories: usize,
    pub seeds: Vec<u64>,
    pub channel_counts: ChannelCounts,
    pub clamp_events: u64,
    pub final_moments: Option<FinalMoments>,
    pub wall_time_seconds: f64,
}

impl<'a> Summary<'a> {
    pub fn new(
        command: &'a str,
        config: &'a RunConfig,
        stats: &EnsembleStats,
        records: &[TrajectoryRecord],
        wall_time: Duration,
    ) -> Self {
        let final_moments = stats.last().map(|e| FinalMoments {
            event_index: e.event_index,
            mean_entropy: e.entropy.mean,
            std_entropy: e.entropy.std_dev(),
            mean_overlap: overlap_moments(e).0,
            mean_variance_jz: e.variance_jz.mean,
        });
        Self {
            command,
            config,
            n_trajectories: stats.n_trajectories,
            seeds: records.iter().map(|r| r.seed).collect(),
            channel_counts: stats.counts,
            clamp_events: stats.clamp_events,
            final_moments,
            wall_time_seconds: wall_time.as_secs_f64(),
        }
    }
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| CliError::io(path, e))
}

pub fn write_summary_json(
    command: &str,
    config: &RunConfig,
    stats: &EnsembleStats,
    records: &[TrajectoryRecord],
    wall_time: Duration,
    path: &Path,
) -> Result<()> {
    write_json(&Summary::new(command, config, stats, records, wall_time), path)
}
