//! Single trajectories under the two measurement protocols.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::channel::{detection_step, Channel, ClampMode, ClampPolicy, PhysicalParams};
use crate::error::{Error, Result};
use crate::metrics::{entropy_of_entanglement, overlap_psi0, MetricsSnapshot};
use crate::rng::UniformStream;
use crate::spin::{binomial_initial_state, CounterRotation, JointState, SampleSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProtocolKind {
    /// Measure `Jz1 + Jz2`, rotate the samples by `+/-alpha` once, measure
    /// again (with `alpha = pi/2` the second stage measures `Jy1 - Jy2`).
    ConsecutiveZY,
    /// Rotate by `+/-alpha` before every detection but the first.
    ContinuousRotation,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Protocol {
    pub kind: ProtocolKind,
    pub n_photons_total: usize,
    /// Used by `ConsecutiveZY` only.
    pub n_photons_before_rotation: usize,
    pub rotation_angle: f64,
}

impl Protocol {
    pub fn consecutive(n_photons_total: usize, n_photons_before_rotation: usize) -> Result<Self> {
        Self {
            kind: ProtocolKind::ConsecutiveZY,
            n_photons_total,
            n_photons_before_rotation,
            rotation_angle: PI / 2.0,
        }
        .validated()
    }

    pub fn continuous(n_photons_total: usize, rotation_angle: f64) -> Result<Self> {
        Self {
            kind: ProtocolKind::ContinuousRotation,
            n_photons_total,
            n_photons_before_rotation: 0,
            rotation_angle,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        if self.kind == ProtocolKind::ConsecutiveZY
            && self.n_photons_before_rotation > self.n_photons_total
        {
            return Err(Error::InvalidInput(format!(
                "{} photons before rotation exceeds the total of {}",
                self.n_photons_before_rotation, self.n_photons_total
            )));
        }
        if !self.rotation_angle.is_finite() {
            return Err(Error::InvalidInput("rotation angle must be finite".into()));
        }
        Ok(self)
    }

    /// Whether a counter-rotation precedes detection number `event` (1-based).
    fn rotates_before(&self, event: usize) -> bool {
        match self.kind {
            ProtocolKind::ConsecutiveZY => event == self.n_photons_before_rotation + 1,
            ProtocolKind::ContinuousRotation => event > 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryConfig {
    pub spec1: SampleSpec,
    pub spec2: SampleSpec,
    pub params: PhysicalParams,
    pub protocol: Protocol,
    pub clamp_mode: ClampMode,
    /// Record metrics after every `snapshot_stride`-th detection.
    pub snapshot_stride: usize,
}

impl TrajectoryConfig {
    pub fn validate(&self) -> Result<()> {
        self.protocol.validated()?;
        if self.snapshot_stride == 0 {
            return Err(Error::InvalidInput("snapshot stride must be at least 1".into()));
        }
        Ok(())
    }

    /// Event indices at which snapshots are recorded.
    pub fn snapshot_events(&self) -> impl Iterator<Item = usize> + '_ {
        (self.snapshot_stride..=self.protocol.n_photons_total).step_by(self.snapshot_stride)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelCounts {
    pub plus: usize,
    pub minus: usize,
    pub scatter: usize,
}

impl ChannelCounts {
    pub fn record(&mut self, channel: Channel) {
        match channel {
            Channel::DPlus => self.plus += 1,
            Channel::DMinus => self.minus += 1,
            Channel::Scatter => self.scatter += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.plus + self.minus + self.scatter
    }

    pub fn add(&mut self, other: &ChannelCounts) {
        self.plus += other.plus;
        self.minus += other.minus;
        self.scatter += other.scatter;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinalDigest {
    pub norm: f64,
    pub entropy_bits: f64,
    pub overlap_psi0: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub seed: u64,
    pub snapshots: Vec<MetricsSnapshot>,
    pub counts: ChannelCounts,
    pub clamp_events: u64,
    pub final_digest: FinalDigest,
}

/// Runs one trajectory from the binomial product state.
pub fn run_trajectory(config: &TrajectoryConfig, seed: u64) -> Result<TrajectoryRecord> {
    let initial = binomial_initial_state(config.spec1, config.spec2)?;
    run_trajectory_from(config, initial, seed).map(|(record, _)| record)
}

/// Runs one trajectory from an arbitrary unit-norm state, also returning
/// the final state.
pub fn run_trajectory_from(
    config: &TrajectoryConfig,
    initial: JointState,
    seed: u64,
) -> Result<(TrajectoryRecord, JointState)> {
    config.validate()?;
    if initial.spec1() != config.spec1 || initial.spec2() != config.spec2 {
        return Err(Error::InvalidInput(
            "initial state does not match the configured sample sizes".into(),
        ));
    }
    let protocol = &config.protocol;
    let rotation = match protocol.kind {
        ProtocolKind::ConsecutiveZY if protocol.n_photons_before_rotation >= protocol.n_photons_total => None,
        _ => Some(CounterRotation::new(config.spec1, config.spec2, protocol.rotation_angle)?),
    };

    let mut rng = UniformStream::from_seed(seed);
    let mut policy = ClampPolicy::new(config.clamp_mode);
    let mut counts = ChannelCounts::default();
    let mut snapshots = Vec::with_capacity(protocol.n_photons_total / config.snapshot_stride);
    let mut state = initial;

    for event in 1..=protocol.n_photons_total {
        if protocol.rotates_before(event) {
            if let Some(rotation) = &rotation {
                state = rotation.apply(&state).map_err(|e| e.at_event(event))?;
            }
        }
        let (next, outcome) =
            detection_step(&state, &config.params, &mut policy, &mut rng).map_err(|e| e.at_event(event))?;
        state = next;
        counts.record(outcome.channel);
        if event % config.snapshot_stride == 0 {
            snapshots.push(MetricsSnapshot::capture(&state, event, outcome).map_err(|e| e.at_event(event))?);
        }
    }

    let final_digest = FinalDigest {
        norm: state.norm(),
        entropy_bits: entropy_of_entanglement(&state)?,
        overlap_psi0: if config.spec1 == config.spec2 {
            Some(overlap_psi0(&state)?)
        } else {
            None
        },
    };
    Ok((
        TrajectoryRecord {
            seed,
            snapshots,
            counts,
            clamp_events: policy.clamp_events,
            final_digest,
        },
        state,
    ))
}
