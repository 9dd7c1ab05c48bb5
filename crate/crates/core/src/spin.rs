//! Two atomic samples in the product Dicke basis `|J1, M1> (x) |J2, M2>`.
//!
//! Each sample of `N` two-level atoms lives in its maximal-`J` sector,
//! `J = N / 2`. Basis index `i` maps to `M = i - J`, so `i = 0` is the state
//! with every atom in `|a>` and `i = N` has every atom in `|b>`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{eig_sym_tridiag, ComplexMatrix, SymTridiag};

/// Largest sample accepted by the binomial initial state.
pub const MAX_ATOMS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SampleSpec {
    n_atoms: usize,
}

impl SampleSpec {
    pub fn new(n_atoms: usize) -> Result<Self> {
        if n_atoms == 0 {
            return Err(Error::InvalidInput("a sample needs at least one atom".into()));
        }
        Ok(Self { n_atoms })
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    /// Total angular momentum `J = N / 2`.
    pub fn j(&self) -> f64 {
        self.n_atoms as f64 / 2.0
    }

    pub fn basis_dim(&self) -> usize {
        self.n_atoms + 1
    }

    /// `M` for basis index `i`.
    pub fn m(&self, index: usize) -> f64 {
        index as f64 - self.j()
    }
}

/// Pure joint state of two samples as a dense amplitude grid `A[i1, i2]`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointState {
    spec1: SampleSpec,
    spec2: SampleSpec,
    amp: ComplexMatrix,
}

impl JointState {
    /// Wraps an amplitude grid without normalizing it.
    pub fn from_amplitudes(spec1: SampleSpec, spec2: SampleSpec, amp: ComplexMatrix) -> Result<Self> {
        if amp.rows() != spec1.basis_dim() || amp.cols() != spec2.basis_dim() {
            return Err(Error::InvalidInput(format!(
                "amplitude grid is {}x{}, samples need {}x{}",
                amp.rows(),
                amp.cols(),
                spec1.basis_dim(),
                spec2.basis_dim()
            )));
        }
        if amp
            .as_slice()
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidInput("non-finite amplitude".into()));
        }
        Ok(Self { spec1, spec2, amp })
    }

    /// The product basis state `|M1, M2>` given by basis indices.
    pub fn basis_state(spec1: SampleSpec, spec2: SampleSpec, i1: usize, i2: usize) -> Result<Self> {
        if i1 >= spec1.basis_dim() || i2 >= spec2.basis_dim() {
            return Err(Error::InvalidInput(format!("basis index ({i1}, {i2}) out of range")));
        }
        let mut amp = ComplexMatrix::zeros(spec1.basis_dim(), spec2.basis_dim());
        amp[(i1, i2)] = Complex64::new(1.0, 0.0);
        Ok(Self { spec1, spec2, amp })
    }

    pub fn spec1(&self) -> SampleSpec {
        self.spec1
    }

    pub fn spec2(&self) -> SampleSpec {
        self.spec2
    }

    pub fn amplitudes(&self) -> &ComplexMatrix {
        &self.amp
    }

    pub fn amplitude(&self, i1: usize, i2: usize) -> Complex64 {
        self.amp[(i1, i2)]
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut ComplexMatrix {
        &mut self.amp
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp.frobenius_norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Rescales to unit norm. A zero state means a zero-probability branch
    /// was selected.
    pub fn normalize(mut self) -> Result<Self> {
        let norm = self.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::DegenerateBranch(format!(
                "cannot normalize a state of norm {norm}"
            )));
        }
        self.amp.scale(Complex64::new(1.0 / norm, 0.0));
        Ok(self)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &JointState) -> Result<Complex64> {
        self.check_same_shape(other)?;
        Ok(self
            .amp
            .as_slice()
            .iter()
            .zip(other.amp.as_slice())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<self|other>|^2`, the phase-insensitive comparison used everywhere.
    pub fn fidelity(&self, other: &JointState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    fn check_same_shape(&self, other: &JointState) -> Result<()> {
        if self.spec1 != other.spec1 || self.spec2 != other.spec2 {
            return Err(Error::InvalidInput("states belong to different sample sizes".into()));
        }
        Ok(())
    }

    /// Total `|a>` population `N1 + N2 - i1 - i2` of a basis cell.
    pub fn occupancy(&self, i1: usize, i2: usize) -> usize {
        self.max_occupancy() - i1 - i2
    }

    pub fn max_occupancy(&self) -> usize {
        self.spec1.n_atoms + self.spec2.n_atoms
    }

    /// Probability weight on each occupancy value `0..=N1+N2`.
    pub fn occupancy_distribution(&self) -> Vec<f64> {
        let mut weights = vec![0.0; self.max_occupancy() + 1];
        for i1 in 0..self.spec1.basis_dim() {
            for i2 in 0..self.spec2.basis_dim() {
                weights[self.occupancy(i1, i2)] += self.amp[(i1, i2)].norm_sqr();
            }
        }
        weights
    }
}

/// Per-cell occupancy `(N1 + N2)/2 - (M1 + M2)`, row-major like the state.
#[derive(Clone, Debug, PartialEq)]
pub struct OccupancyWeights {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
}

impl OccupancyWeights {
    pub fn get(&self, i1: usize, i2: usize) -> f64 {
        self.values[i1 * self.cols + i2]
    }
}

pub fn occupancy_weights(state: &JointState) -> OccupancyWeights {
    let (rows, cols) = (state.spec1.basis_dim(), state.spec2.basis_dim());
    let total_j = state.spec1.j() + state.spec2.j();
    let mut values = Vec::with_capacity(rows * cols);
    for i1 in 0..rows {
        for i2 in 0..cols {
            values.push(total_j - (state.spec1.m(i1) + state.spec2.m(i2)));
        }
    }
    OccupancyWeights { rows, cols, values }
}

/// `ln k!` for `k = 0..=n`, accumulated as sums of logarithms.
fn ln_factorials(n: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    table.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        table.push(acc);
    }
    table
}

/// Single-sample amplitudes `(1/2)^J sqrt((2J)! / ((J+M)! (J-M)!))`: every
/// atom in `(|a> + |b>)/sqrt 2`, the top eigenstate of `Jx`.
pub fn binomial_amplitudes(spec: SampleSpec) -> Result<Vec<f64>> {
    let n = spec.n_atoms;
    if n > MAX_ATOMS {
        return Err(Error::UnsupportedSize {
            n_atoms: n,
            limit: MAX_ATOMS,
        });
    }
    let lf = ln_factorials(n);
    let half_ln2 = 0.5 * n as f64 * std::f64::consts::LN_2;
    Ok((0..=n)
        .map(|k| (0.5 * (lf[n] - lf[k] - lf[n - k]) - half_ln2).exp())
        .collect())
}

/// Product of binomial single-sample states, the starting point of every
/// trajectory.
pub fn binomial_initial_state(spec1: SampleSpec, spec2: SampleSpec) -> Result<JointState> {
    let a1 = binomial_amplitudes(spec1)?;
    let a2 = binomial_amplitudes(spec2)?;
    let amp = ComplexMatrix::from_fn(a1.len(), a2.len(), |i, j| Complex64::new(a1[i] * a2[j], 0.0));
    JointState::from_amplitudes(spec1, spec2, amp)?.normalize()
}

/// Mean and variance of `M1 + M2` (the eigenvalue of `Jz1 + Jz2`).
pub fn mean_and_variance_jz_sum(state: &JointState) -> (f64, f64) {
    let (mut mean, mut second) = (0.0, 0.0);
    for i1 in 0..state.spec1.basis_dim() {
        let m1 = state.spec1.m(i1);
        for i2 in 0..state.spec2.basis_dim() {
            let m = m1 + state.spec2.m(i2);
            let w = state.amp[(i1, i2)].norm_sqr();
            mean += w * m;
            second += w * m * m;
        }
    }
    (mean, (second - mean * mean).max(0.0))
}

/// `Jx = (J+ + J-)/2` in the `|J, M>` basis.
pub fn jx_matrix(spec: SampleSpec) -> SymTridiag {
    let n = spec.n_atoms;
    // <M+1|J+|M>/2 = sqrt((J - M)(J + M + 1))/2 with J - M = N - i, J + M + 1 = i + 1.
    let offdiag = (0..n)
        .map(|i| (((n - i) * (i + 1)) as f64).sqrt() / 2.0)
        .collect();
    SymTridiag::new(vec![0.0; n + 1], offdiag).expect("Jx is always a valid tridiagonal matrix")
}

/// Rotation matrix `D_{M,M'}(alpha) = <J,M| exp(-i alpha Jx) |J,M'>`, built
/// from the spectral decomposition of `Jx`.
pub fn wigner_rotation(spec: SampleSpec, alpha: f64) -> Result<ComplexMatrix> {
    if !alpha.is_finite() {
        return Err(Error::InvalidInput(format!("rotation angle {alpha} is not finite")));
    }
    let eig = eig_sym_tridiag(&jx_matrix(spec))?;
    let dim = spec.basis_dim();
    let phases: Vec<Complex64> = eig
        .values
        .iter()
        .map(|&lambda| Complex64::from_polar(1.0, -alpha * lambda))
        .collect();
    Ok(ComplexMatrix::from_fn(dim, dim, |a, b| {
        (0..dim)
            .map(|k| phases[k] * (eig.component(a, k) * eig.component(b, k)))
            .sum()
    }))
}

/// Opposite rotations about x: sample 1 by `+alpha`, sample 2 by `-alpha`.
///
/// Holds both matrices so a trajectory can reuse them on every event.
#[derive(Clone, Debug)]
pub struct CounterRotation {
    alpha: f64,
    d1: ComplexMatrix,
    d2_transposed: ComplexMatrix,
}

impl CounterRotation {
    pub fn new(spec1: SampleSpec, spec2: SampleSpec, alpha: f64) -> Result<Self> {
        Ok(Self {
            alpha,
            d1: wigner_rotation(spec1, alpha)?,
            d2_transposed: wigner_rotation(spec2, -alpha)?.transpose(),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `A <- D1(alpha) A D2(-alpha)^T`.
    pub fn apply(&self, state: &JointState) -> Result<JointState> {
        if state.amp.rows() != self.d1.rows() || state.amp.cols() != self.d2_transposed.rows() {
            return Err(Error::InvalidInput("rotation built for different sample sizes".into()));
        }
        let amp = self.d1.matmul(&state.amp)?.matmul(&self.d2_transposed)?;
        Ok(JointState {
            spec1: state.spec1,
            spec2: state.spec2,
            amp,
        })
    }
}

pub fn apply_counter_rotation(state: &JointState, alpha: f64) -> Result<JointState> {
    CounterRotation::new(state.spec1, state.spec2, alpha)?.apply(state)
}
