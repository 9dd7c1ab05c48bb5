//! Subcommand drivers. Each writes its artifacts under `config.output_dir`
//! and returns the paths it produced.

use std::path::{Path, PathBuf};
use std::time::Instant;

use spinjump_core::{run_ensemble, run_trajectory, EnsembleRun, EnsembleStats, TrajectoryConfig};

use crate::config::{protocol_name, RunConfig};
use crate::error::{CliError, Result};
use crate::output::{
    write_compare_csv, write_ensemble_csv, write_json, write_summary_json, write_trajectory_csv,
    Summary,
};

pub const TRAJECTORY_CSV: &str = "trajectory.csv";
pub const TRAJECTORIES_CSV: &str = "trajectories.csv";
pub const ENSEMBLE_CSV: &str = "ensemble.csv";
pub const COMPARE_CSV: &str = "compare.csv";
pub const SUMMARY_JSON: &str = "summary.json";

/// Files written by a subcommand plus the aggregated statistics.
#[derive(Debug)]
pub struct CommandOutput {
    pub files: Vec<PathBuf>,
    pub stats: Vec<EnsembleStats>,
}

fn prepare_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn describe(config: &RunConfig) -> String {
    format!(
        "N = {}/{}, delta_tau = {}, detuning_ratio = {}, {} protocol, {} photons",
        config.n_atoms_1,
        config.n_atoms_2,
        config.delta_tau,
        config.detuning_ratio,
        protocol_name(config.protocol),
        config.n_photons
    )
}

/// One trajectory seeded directly with `config.seed`.
pub fn run(config: &RunConfig) -> Result<CommandOutput> {
    let tc = config.trajectory_config()?;
    prepare_dir(&config.output_dir)?;
    eprintln!("run: {}, seed {}", describe(config), config.seed);
    let start = Instant::now();
    let record = run_trajectory(&tc, config.seed)?;
    let elapsed = start.elapsed();
    let stats = EnsembleStats::from_record(&record);

    let csv = config.output_dir.join(TRAJECTORY_CSV);
    let json = config.output_dir.join(SUMMARY_JSON);
    let records = [record];
    write_trajectory_csv(&records, &csv)?;
    write_summary_json("run", config, &stats, &records, elapsed, &json)?;
    eprintln!("run: done in {:.2} s", elapsed.as_secs_f64());
    Ok(CommandOutput {
        files: vec![csv, json],
        stats: vec![stats],
    })
}

fn run_batch(label: &str, config: &RunConfig, tc: &TrajectoryConfig, parallelism: usize) -> Result<(EnsembleRun, f64)> {
    eprintln!(
        "{label}: {}, {} trajectories from base seed {} on {} worker(s)",
        describe(config),
        config.trajectories,
        config.seed,
        parallelism.max(1)
    );
    let start = Instant::now();
    let run = run_ensemble(tc, config.trajectories, config.seed, parallelism)?;
    let secs = start.elapsed().as_secs_f64();
    eprintln!("{label}: done in {secs:.2} s");
    Ok((run, secs))
}

fn write_batch(command: &str, config: &RunConfig, run: &EnsembleRun, secs: f64, dir: &Path) -> Result<Vec<PathBuf>> {
    prepare_dir(dir)?;
    let ensemble = dir.join(ENSEMBLE_CSV);
    let trajectories = dir.join(TRAJECTORIES_CSV);
    let json = dir.join(SUMMARY_JSON);
    write_ensemble_csv(&run.stats, &ensemble)?;
    write_trajectory_csv(&run.records, &trajectories)?;
    write_summary_json(
        command,
        config,
        &run.stats,
        &run.records,
        std::time::Duration::from_secs_f64(secs),
        &json,
    )?;
    Ok(vec![ensemble, trajectories, json])
}

/// `config.trajectories` trajectories seeded `derive_seed(config.seed, i)`.
pub fn ensemble(config: &RunConfig, parallelism: usize) -> Result<CommandOutput> {
    let tc = config.trajectory_config()?;
    prepare_dir(&config.output_dir)?;
    let (run, secs) = run_batch("ensemble", config, &tc, parallelism)?;
    let files = write_batch("ensemble", config, &run, secs, &config.output_dir)?;
    Ok(CommandOutput {
        files,
        stats: vec![run.stats],
    })
}

/// Scattering ensemble and its ideal (`detuning_ratio = 0`) twin over the
/// same seed set, written to `ideal/` and `scatter/` plus a paired
/// `compare.csv`.
pub fn compare(config: &RunConfig, parallelism: usize) -> Result<CommandOutput> {
    if config.detuning_ratio == 0.0 {
        return Err(CliError::config(
            "detuning_ratio",
            "compare needs a finite detuning_ratio; 0 already is the ideal scheme",
        ));
    }
    let scatter_cfg = config.clone();
    let ideal_cfg = RunConfig {
        detuning_ratio: 0.0,
        ..config.clone()
    };
    let ideal_tc = ideal_cfg.trajectory_config()?;
    let scatter_tc = scatter_cfg.trajectory_config()?;
    prepare_dir(&config.output_dir)?;

    let (ideal, ideal_secs) = run_batch("compare/ideal", &ideal_cfg, &ideal_tc, parallelism)?;
    let (scatter, scatter_secs) = run_batch("compare/scatter", &scatter_cfg, &scatter_tc, parallelism)?;

    let mut files = write_batch("compare", &ideal_cfg, &ideal, ideal_secs, &config.output_dir.join("ideal"))?;
    files.extend(write_batch(
        "compare",
        &scatter_cfg,
        &scatter,
        scatter_secs,
        &config.output_dir.join("scatter"),
    )?);

    let csv = config.output_dir.join(COMPARE_CSV);
    write_compare_csv(&ideal.stats, &scatter.stats, &csv)?;
    files.push(csv);

    let json = config.output_dir.join(SUMMARY_JSON);
    let summary = serde_json::json!({
        "command": "compare",
        "config": config,
        "ideal": Summary::new(
            "compare",
            &ideal_cfg,
            &ideal.stats,
            &ideal.records,
            std::time::Duration::from_secs_f64(ideal_secs),
        ),
        "scatter": Summary::new(
            "compare",
            &scatter_cfg,
            &scatter.stats,
            &scatter.records,
            std::time::Duration::from_secs_f64(scatter_secs),
        ),
        "final_entropy_difference": match (ideal.stats.last(), scatter.stats.last()) {
            (Some(a), Some(b)) => Some(a.entropy.mean - b.entropy.mean),
            _ => None,
        },
        "wall_time_seconds": ideal_secs + scatter_secs,
    });
    write_json(&summary, &json)?;
    files.push(json);

    if let (Some(a), Some(b)) = (ideal.stats.last(), scatter.stats.last()) {
        eprintln!(
            "compare: final mean entropy {:.4} (ideal) vs {:.4} (scatter), difference {:+.4}",
            a.entropy.mean,
            b.entropy.mean,
            a.entropy.mean - b.entropy.mean
        );
    }
    Ok(CommandOutput {
        files,
        stats: vec![ideal.stats, scatter.stats],
    })
}
