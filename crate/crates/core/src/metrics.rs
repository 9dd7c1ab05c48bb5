//! Observables tracked along a trajectory.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::BranchOutcome;
use crate::error::{Error, Result};
use crate::numerics::{singular_values, ComplexMatrix};
use crate::spin::{mean_and_variance_jz_sum, JointState, SampleSpec};

/// Schmidt weights below this contribute nothing to the entropy.
pub const SCHMIDT_WEIGHT_FLOOR: f64 = 1e-15;

/// Entropy of entanglement in bits, from the Schmidt coefficients of the
/// amplitude grid.
pub fn entropy_of_entanglement(state: &JointState) -> Result<f64> {
    let entropy = singular_values(state.amplitudes())?
        .into_iter()
        .map(|sigma| sigma * sigma)
        .filter(|&lambda| lambda >= SCHMIDT_WEIGHT_FLOOR)
        .map(|lambda| -lambda * lambda.log2())
        .sum::<f64>();
    Ok(entropy.max(0.0))
}

/// Upper bound `log2(min(N1, N2) + 1)` on the entropy.
pub fn max_entropy_bits(state: &JointState) -> f64 {
    let d = state.spec1().basis_dim().min(state.spec2().basis_dim());
    (d as f64).log2()
}

/// `(2J + 1)^{-1/2} sum_M |M, -M>`.
pub fn maximally_entangled_state(spec1: SampleSpec, spec2: SampleSpec) -> Result<JointState> {
    if spec1 != spec2 {
        return Err(Error::InvalidInput(format!(
            "maximally entangled state needs equal samples, got {} and {} atoms",
            spec1.n_atoms(),
            spec2.n_atoms()
        )));
    }
    let n = spec1.n_atoms();
    let a = 1.0 / ((n + 1) as f64).sqrt();
    let amp = ComplexMatrix::from_fn(n + 1, n + 1, |i, j| {
        // M2 = -M1  <=>  j = N - i
        if i + j == n {
            Complex64::new(a, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    JointState::from_amplitudes(spec1, spec2, amp)
}

/// `|<Psi0|state>|^2`.
pub fn overlap_psi0(state: &JointState) -> Result<f64> {
    if state.spec1() != state.spec2() {
        return Err(Error::InvalidInput(
            "overlap with the maximally entangled state needs equal samples".into(),
        ));
    }
    let n = state.spec1().n_atoms();
    let sum: Complex64 = (0..=n).map(|i| state.amplitude(i, n - i)).sum();
    Ok(sum.norm_sqr() / (n + 1) as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsSnapshot {
    /// Photons detected so far, this one included.
    pub n_detected: usize,
    pub entropy_bits: f64,
    /// `None` when the samples differ in size.
    pub overlap_psi0: Option<f64>,
    pub mean_jz_sum: f64,
    pub variance_jz_sum: f64,
    pub outcome: BranchOutcome,
}

impl MetricsSnapshot {
    pub fn capture(state: &JointState, n_detected: usize, outcome: BranchOutcome) -> Result<Self> {
        let entropy_bits = entropy_of_entanglement(state)?;
        let overlap = if state.spec1() == state.spec2() {
            Some(overlap_psi0(state)?)
        } else {
            None
        };
        let (mean, variance) = mean_and_variance_jz_sum(state);
        debug_assert!(entropy_bits <= max_entropy_bits(state) + 1e-9);
        Ok(Self {
            n_detected,
            entropy_bits,
            overlap_psi0: overlap,
            mean_jz_sum: mean,
            variance_jz_sum: variance,
            outcome,
        })
    }
}
