//! Run configuration: flat `key = value` files plus command-line overrides.
//!
//! ```text
//! # Consecutive Jz / Jy measurement, twenty atoms per sample
//! n_atoms = 20
//! delta_tau = 0.1
//! detuning_ratio = 150
//! protocol = consecutive
//! n_photons = 5000
//! n_before_rotation = 2500
//! trajectories = 100
//! seed = 42
//! ```
//!
//! Blank lines and `#` comments are ignored. Unknown keys and repeated keys
//! are errors.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use spinjump_core::{ClampMode, PhysicalParams, Protocol, ProtocolKind, SampleSpec, TrajectoryConfig};

use crate::error::{CliError, Result};

/// Environment variable consulted when `output_dir` is not given.
pub const OUTPUT_DIR_ENV: &str = "SPINJUMP_OUTPUT_DIR";
pub const DEFAULT_OUTPUT_DIR: &str = "spinjump-out";

pub const KEYS: &[&str] = &[
    "n_atoms",
    "n_atoms_1",
    "n_atoms_2",
    "delta_tau",
    "detuning_ratio",
    "protocol",
    "n_photons",
    "n_before_rotation",
    "rotation_angle",
    "trajectories",
    "seed",
    "clamp_mode",
    "snapshot_stride",
    "output_dir",
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub n_atoms_1: usize,
    pub n_atoms_2: usize,
    pub delta_tau: f64,
    /// `Delta / gamma`; zero means no spontaneous scattering.
    pub detuning_ratio: f64,
    pub protocol: ProtocolKind,
    pub n_photons: usize,
    pub n_before_rotation: usize,
    pub rotation_angle: f64,
    pub trajectories: usize,
    pub seed: u64,
    pub clamp_mode: ClampMode,
    pub snapshot_stride: usize,
    pub output_dir: PathBuf,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut builder = ConfigBuilder::default();
        builder.apply_text(&text)?;
        builder.build()
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut builder = ConfigBuilder::default();
        builder.apply_text(text)?;
        builder.build()
    }

    pub fn physical_params(&self) -> Result<PhysicalParams> {
        PhysicalParams::from_detuning_ratio(self.delta_tau, self.detuning_ratio)
            .map_err(|e| CliError::config("detuning_ratio", e.to_string()))
    }

    pub fn protocol(&self) -> Protocol {
        Protocol {
            kind: self.protocol,
            n_photons_total: self.n_photons,
            n_photons_before_rotation: self.n_before_rotation,
            rotation_angle: self.rotation_angle,
        }
    }

    pub fn trajectory_config(&self) -> Result<TrajectoryConfig> {
        let cfg = TrajectoryConfig {
            spec1: SampleSpec::new(self.n_atoms_1)?,
            spec2: SampleSpec::new(self.n_atoms_2)?,
            params: self.physical_params()?,
            protocol: self.protocol(),
            clamp_mode: self.clamp_mode,
            snapshot_stride: self.snapshot_stride,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Canonical `key = value` text; parsing it gives back `self`.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        line("n_atoms_1", self.n_atoms_1.to_string());
        line("n_atoms_2", self.n_atoms_2.to_string());
        line("delta_tau", self.delta_tau.to_string());
        line("detuning_ratio", self.detuning_ratio.to_string());
        line("protocol", protocol_name(self.protocol).to_string());
        line("n_photons", self.n_photons.to_string());
        line("n_before_rotation", self.n_before_rotation.to_string());
        line("rotation_angle", self.rotation_angle.to_string());
        line("trajectories", self.trajectories.to_string());
        line("seed", self.seed.to_string());
        line("clamp_mode", clamp_name(self.clamp_mode).to_string());
        line("snapshot_stride", self.snapshot_stride.to_string());
        line("output_dir", self.output_dir.display().to_string());
        out
    }
}

pub fn protocol_name(kind: ProtocolKind) -> &'static str {
    match kind {
        ProtocolKind::ConsecutiveZY => "consecutive",
        ProtocolKind::ContinuousRotation => "continuous",
    }
}

fn clamp_name(mode: ClampMode) -> &'static str {
    match mode {
        ClampMode::Strict => "strict",
        ClampMode::Permissive => "permissive",
    }
}

/// Raw key/value pairs, validated and defaulted by [`ConfigBuilder::build`].
#[derive(Clone, Debug, Default)]
pub struct ConfigBuilder {
    values: BTreeMap<&'static str, String>,
}

impl ConfigBuilder {
    /// Sets `key`, replacing an earlier value (used for flag overrides).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = canonical_key(key)?;
        self.values.insert(key, value.trim().to_string());
        Ok(())
    }

    /// Reads `key = value` lines; a key may appear only once per text.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        let mut seen = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::config(line, format!("line {} is not of the form key = value", lineno + 1))
            })?;
            let key = canonical_key(key.trim())?;
            if seen.contains(&key) {
                return Err(CliError::config(key, format!("repeated on line {}", lineno + 1)));
            }
            seen.push(key);
            self.values.insert(key, value.trim().to_string());
        }
        Ok(())
    }

    fn get<T: std::str::FromStr>(&self, key: &'static str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.values
            .get(key)
            .map(|raw| {
                raw.parse::<T>()
                    .map_err(|e| CliError::config(key, format!("cannot parse {raw:?}: {e}")))
            })
            .transpose()
    }

    pub fn build(&self) -> Result<RunConfig> {
        let both = self.get::<usize>("n_atoms")?;
        let n_atoms_1 = self.get::<usize>("n_atoms_1")?.or(both);
        let n_atoms_2 = self.get::<usize>("n_atoms_2")?.or(both);
        let (n_atoms_1, n_atoms_2) = match (n_atoms_1, n_atoms_2) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(CliError::config("n_atoms", "missing required field")),
        };
        for (key, n) in [("n_atoms_1", n_atoms_1), ("n_atoms_2", n_atoms_2)] {
            if n == 0 || n > spinjump_core::spin::MAX_ATOMS {
                return Err(CliError::config(
                    key,
                    format!("{n} is outside 1..={}", spinjump_core::spin::MAX_ATOMS),
                ));
            }
        }

        let delta_tau = self
            .get::<f64>("delta_tau")?
            .ok_or_else(|| CliError::config("delta_tau", "missing required field"))?;
        if !(delta_tau > 0.0 && delta_tau < PI) {
            return Err(CliError::config("delta_tau", format!("{delta_tau} is outside (0, pi)")));
        }

        let detuning_ratio = self.get::<f64>("detuning_ratio")?.unwrap_or(0.0);
        if detuning_ratio != 0.0 && !(detuning_ratio > 1.0 && detuning_ratio.is_finite()) {
            return Err(CliError::config(
                "detuning_ratio",
                format!("{detuning_ratio} must be 0 (no scattering) or a finite value above 1"),
            ));
        }

        let protocol = match self.values.get("protocol").map(String::as_str) {
            None | Some("consecutive") => ProtocolKind::ConsecutiveZY,
            Some("continuous") => ProtocolKind::ContinuousRotation,
            Some(other) => {
                return Err(CliError::config(
                    "protocol",
                    format!("{other:?} is not one of consecutive, continuous"),
                ))
            }
        };

        let n_photons = self.get::<usize>("n_photons")?.unwrap_or(5000);
        let n_before_rotation = self.get::<usize>("n_before_rotation")?.unwrap_or(n_photons / 2);
        if protocol == ProtocolKind::ConsecutiveZY && n_before_rotation > n_photons {
            return Err(CliError::config(
                "n_before_rotation",
                format!("{n_before_rotation} exceeds n_photons = {n_photons}"),
            ));
        }

        let default_angle = match protocol {
            ProtocolKind::ConsecutiveZY => PI / 2.0,
            ProtocolKind::ContinuousRotation => PI / 5.0,
        };
        let rotation_angle = self.get::<f64>("rotation_angle")?.unwrap_or(default_angle);
        if !rotation_angle.is_finite() {
            return Err(CliError::config("rotation_angle", "must be finite"));
        }

        let trajectories = self.get::<usize>("trajectories")?.unwrap_or(1);
        if trajectories == 0 {
            return Err(CliError::config("trajectories", "must be at least 1"));
        }
        let seed = self.get::<u64>("seed")?.unwrap_or(0);

        let clamp_mode = match self.values.get("clamp_mode").map(String::as_str) {
            None | Some("permissive") => ClampMode::Permissive,
            Some("strict") => ClampMode::Strict,
            Some(other) => {
                return Err(CliError::config(
                    "clamp_mode",
                    format!("{other:?} is not one of permissive, strict"),
                ))
            }
        };

        let snapshot_stride = self.get::<usize>("snapshot_stride")?.unwrap_or(1);
        if snapshot_stride == 0 {
            return Err(CliError::config("snapshot_stride", "must be at least 1"));
        }

        let output_dir = self
            .values
            .get("output_dir")
            .map(PathBuf::from)
            .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));

        Ok(RunConfig {
            n_atoms_1,
            n_atoms_2,
            delta_tau,
            detuning_ratio,
            protocol,
            n_photons,
            n_before_rotation,
            rotation_angle,
            trajectories,
            seed,
            clamp_mode,
            snapshot_stride,
            output_dir,
        })
    }
}

fn canonical_key(key: &str) -> Result<&'static str> {
    KEYS.iter()
        .copied()
        .find(|k| *k == key)
        .ok_or_else(|| CliError::config(key, "unknown key"))
}
