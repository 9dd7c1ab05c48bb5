//! Stochastic wave-function simulation of two atomic ensembles entangled by
//! interferometric photodetection, with spontaneous scattering.
//!
//! A trajectory starts from the product of two binomial (coherent spin)
//! states and applies one detection event per probe photon: the photon is
//! found at the bright port, the dark port, or scattered, and the joint
//! Dicke-basis amplitudes are updated accordingly. Optional counter-rotations
//! of the two samples change which collective observable the detection
//! measures. Along the way the entropy of entanglement, the spread of
//! `Jz1 + Jz2` and the overlap with the maximally entangled state are
//! recorded.

pub mod channel;
pub mod ensemble;
pub mod error;
pub mod metrics;
pub mod numerics;
pub mod rng;
pub mod spin;
pub mod trajectory;

pub use channel::{
    apply_detection_minus, apply_detection_plus, apply_scatter, branch_probabilities,
    branch_unnormalized, detection_step, occupancy_factors, sample_scatter_direction,
    scatter_cos_theta, BranchOutcome, BranchProbabilities, Channel, ClampMode, ClampPolicy,
    PhysicalParams,
};
pub use ensemble::{run_ensemble, EnsembleRun, EnsembleStats, EventMoments, RunningMoments};
pub use error::{Error, Result};
pub use metrics::{
    entropy_of_entanglement, max_entropy_bits, maximally_entangled_state, overlap_psi0,
    MetricsSnapshot,
};
pub use numerics::{eig_sym_tridiag, singular_values, ComplexMatrix, SymEigen, SymTridiag};
pub use rng::{derive_seed, UniformStream};
pub use spin::{
    apply_counter_rotation, binomial_initial_state, jx_matrix, mean_and_variance_jz_sum,
    occupancy_weights, wigner_rotation, CounterRotation, JointState, OccupancyWeights, SampleSpec,
};
pub use trajectory::{
    run_trajectory, run_trajectory_from, ChannelCounts, FinalDigest, Protocol, ProtocolKind,
    TrajectoryConfig, TrajectoryRecord,
};

pub use num_complex::Complex64;
