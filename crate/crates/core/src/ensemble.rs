//! Seeded ensembles of independent trajectories.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::trajectory::{run_trajectory, ChannelCounts, TrajectoryConfig, TrajectoryRecord};

/// Streaming mean and sum of squared deviations (Welford), mergeable with
/// Chan's pairwise update.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunningMoments {
    pub count: u64,
    pub mean: f64,
    m2: f64,
}

impl RunningMoments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &RunningMoments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        let (na, nb) = (self.count as f64, other.count as f64);
        self.mean += delta * nb / n;
        self.m2 += other.m2 + delta * delta * na * nb / n;
        self.count += other.count;
    }

    /// Unbiased sample variance; zero for fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }
}

/// Moments of the tracked observables at one detection index.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EventMoments {
    pub event_index: usize,
    pub entropy: RunningMoments,
    pub overlap: RunningMoments,
    pub variance_jz: RunningMoments,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub events: Vec<EventMoments>,
    pub n_trajectories: usize,
    pub counts: ChannelCounts,
    pub clamp_events: u64,
}

impl EnsembleStats {
    pub fn from_record(record: &TrajectoryRecord) -> Self {
        let mut stats = Self {
            events: record
                .snapshots
                .iter()
                .map(|s| EventMoments {
                    event_index: s.n_detected,
                    ..Default::default()
                })
                .collect(),
            n_trajectories: 0,
            counts: ChannelCounts::default(),
            clamp_events: 0,
        };
        stats.push(record).expect("a record always matches its own layout");
        stats
    }

    pub fn push(&mut self, record: &TrajectoryRecord) -> Result<()> {
        if record.snapshots.len() != self.events.len()
            || record
                .snapshots
                .iter()
                .zip(&self.events)
                .any(|(s, e)| s.n_detected != e.event_index)
        {
            return Err(Error::InvalidInput(
                "trajectory snapshots do not line up with the ensemble".into(),
            ));
        }
        for (slot, snap) in self.events.iter_mut().zip(&record.snapshots) {
            slot.entropy.push(snap.entropy_bits);
            if let Some(o) = snap.overlap_psi0 {
                slot.overlap.push(o);
            }
            slot.variance_jz.push(snap.variance_jz_sum);
        }
        self.n_trajectories += 1;
        self.counts.add(&record.counts);
        self.clamp_events += record.clamp_events;
        Ok(())
    }

    pub fn merge(&mut self, other: &EnsembleStats) -> Result<()> {
        if self.events.len() != other.events.len()
            || self.events.iter().zip(&other.events).any(|(a, b)| a.event_index != b.event_index)
        {
            return Err(Error::InvalidInput("cannot merge ensembles with different layouts".into()));
        }
        for (a, b) in self.events.iter_mut().zip(&other.events) {
            a.entropy.merge(&b.entropy);
            a.overlap.merge(&b.overlap);
            a.variance_jz.merge(&b.variance_jz);
        }
        self.n_trajectories += other.n_trajectories;
        self.counts.add(&other.counts);
        self.clamp_events += other.clamp_events;
        Ok(())
    }

    pub fn at_event(&self, event_index: usize) -> Option<&EventMoments> {
        self.events
            .binary_search_by_key(&event_index, |e| e.event_index)
            .ok()
            .map(|i| &self.events[i])
    }

    pub fn last(&self) -> Option<&EventMoments> {
        self.events.last()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleRun {
    pub stats: EnsembleStats,
    pub records: Vec<TrajectoryRecord>,
}

/// Runs `n_trajectories` trajectories on `parallelism` worker threads.
///
/// Trajectory `i` uses `derive_seed(base_seed, i)`. Records come back in
/// index order and are folded sequentially, so the statistics are
/// bit-identical for every thread count.
pub fn run_ensemble(
    config: &TrajectoryConfig,
    n_trajectories: usize,
    base_seed: u64,
    parallelism: usize,
) -> Result<EnsembleRun> {
    if n_trajectories == 0 {
        return Err(Error::InvalidInput("an ensemble needs at least one trajectory".into()));
    }
    config.validate()?;
    let run_one = |i: usize| {
        let seed = derive_seed(base_seed, i as u64);
        run_trajectory(config, seed).map_err(|e| e.in_trajectory(seed))
    };

    let records: Vec<TrajectoryRecord> = if parallelism <= 1 {
        (0..n_trajectories).map(run_one).collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(parallelism)
            .build()
            .map_err(|e| Error::InvalidInput(format!("cannot start worker pool: {e}")))?;
        pool.install(|| (0..n_trajectories).into_par_iter().map(run_one).collect::<Result<_>>())?
    };

    let mut stats = EnsembleStats::from_record(&records[0]);
    for record in &records[1..] {
        stats.push(record)?;
    }
    Ok(EnsembleRun { stats, records })
}
