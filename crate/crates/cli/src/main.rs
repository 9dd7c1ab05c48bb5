use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spinjump_cli::commands;
use spinjump_cli::selftest::selftest;
use spinjump_cli::{CliError, ConfigBuilder, Result, RunConfig};

#[derive(Parser)]
#[command(name = "spinjump", version, about = "Stochastic trajectories of two atomic ensembles entangled by photodetection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one trajectory seeded with `seed`.
    Run(RunArgs),
    /// Simulate an ensemble and write per-event moments.
    Ensemble(RunArgs),
    /// Ensembles with and without scattering over the same seeds.
    Compare(RunArgs),
    /// Check invariants against independent references.
    Selftest,
}

#[derive(Args)]
struct RunArgs {
    /// key = value configuration file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads for ensembles.
    #[arg(long, default_value_t = 1)]
    parallelism: usize,

    #[arg(long = "n_atoms")]
    n_atoms: Option<String>,
    #[arg(long = "n_atoms_1")]
    n_atoms_1: Option<String>,
    #[arg(long = "n_atoms_2")]
    n_atoms_2: Option<String>,
    #[arg(long = "delta_tau", allow_hyphen_values = true)]
    delta_tau: Option<String>,
    /// Delta / gamma; 0 disables scattering.
    #[arg(long = "detuning_ratio", allow_hyphen_values = true)]
    detuning_ratio: Option<String>,
    /// consecutive | continuous
    #[arg(long)]
    protocol: Option<String>,
    #[arg(long = "n_photons")]
    n_photons: Option<String>,
    #[arg(long = "n_before_rotation")]
    n_before_rotation: Option<String>,
    #[arg(long = "rotation_angle", allow_hyphen_values = true)]
    rotation_angle: Option<String>,
    #[arg(long)]
    trajectories: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// permissive | strict
    #[arg(long = "clamp_mode")]
    clamp_mode: Option<String>,
    #[arg(long = "snapshot_stride")]
    snapshot_stride: Option<String>,
    /// Defaults to $SPINJUMP_OUTPUT_DIR, then ./spinjump-out.
    #[arg(long = "output_dir")]
    output_dir: Option<String>,
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let mut builder = ConfigBuilder::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            builder.apply_text(&text)?;
        }
        let flags = [
            ("n_atoms", &self.n_atoms),
            ("n_atoms_1", &self.n_atoms_1),
            ("n_atoms_2", &self.n_atoms_2),
            ("delta_tau", &self.delta_tau),
            ("detuning_ratio", &self.detuning_ratio),
            ("protocol", &self.protocol),
            ("n_photons", &self.n_photons),
            ("n_before_rotation", &self.n_before_rotation),
            ("rotation_angle", &self.rotation_angle),
            ("trajectories", &self.trajectories),
            ("seed", &self.seed),
            ("clamp_mode", &self.clamp_mode),
            ("snapshot_stride", &self.snapshot_stride),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                builder.set(key, v)?;
            }
        }
        if let Some(v) = &self.output_dir {
            builder.set("output_dir", v)?;
        }
        builder.build()
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let out = match cli.command {
        Command::Run(args) => commands::run(&args.resolve()?)?,
        Command::Ensemble(args) => commands::ensemble(&args.resolve()?, args.parallelism)?,
        Command::Compare(args) => commands::compare(&args.resolve()?, args.parallelism)?,
        Command::Selftest => {
            selftest()?;
            return Ok(());
        }
    };
    for f in out.files {
        eprintln!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
