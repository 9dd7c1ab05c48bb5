//! One photodetection event.
//!
//! A probe photon either leaves the interferometer through the bright port
//! `D+`, the dark port `D-`, or is spontaneously scattered. All three
//! branch operators are diagonal in `|M1, M2>` and depend only on the
//! occupancy `n` of the cell (number of atoms in `|a>`):
//!
//! ```text
//! D+/D-:   A <- A (1 +/- s(n) exp(-i dtau n)) / 2,   s(n) = sqrt(1 - xi_s n^2)
//! scatter: A <- A sqrt(xi_s / 2) n                   (integrated over directions)
//! ```
//!
//! with branch probabilities equal to the squared norms of the unnormalized
//! results, summing to one.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::UniformStream;
use crate::spin::JointState;

/// Cells lighter than this are ignored by the regime check.
pub const NEGLIGIBLE_WEIGHT: f64 = 1e-300;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    delta_tau: f64,
    gamma_over_delta: f64,
}

impl PhysicalParams {
    /// `delta_tau` is the phase per transmitted photon per atom in `|a>`;
    /// `gamma_over_delta` is the spontaneous emission rate over the detuning.
    pub fn new(delta_tau: f64, gamma_over_delta: f64) -> Result<Self> {
        if !(delta_tau > 0.0 && delta_tau < PI) {
            return Err(Error::InvalidInput(format!(
                "delta_tau = {delta_tau} must lie in (0, pi)"
            )));
        }
        if !(0.0..1.0).contains(&gamma_over_delta) {
            return Err(Error::InvalidInput(format!(
                "gamma/Delta = {gamma_over_delta} must lie in [0, 1)"
            )));
        }
        Ok(Self {
            delta_tau,
            gamma_over_delta,
        })
    }

    /// No spontaneous scattering.
    pub fn ideal(delta_tau: f64) -> Result<Self> {
        Self::new(delta_tau, 0.0)
    }

    /// From the detuning ratio `Delta / gamma`; zero means `gamma = 0`.
    pub fn from_detuning_ratio(delta_tau: f64, detuning_ratio: f64) -> Result<Self> {
        if detuning_ratio == 0.0 {
            return Self::ideal(delta_tau);
        }
        if !(detuning_ratio > 1.0) || !detuning_ratio.is_finite() {
            return Err(Error::InvalidInput(format!(
                "detuning ratio {detuning_ratio} must be 0 or a finite value above 1"
            )));
        }
        Self::new(delta_tau, 1.0 / detuning_ratio)
    }

    pub fn delta_tau(&self) -> f64 {
        self.delta_tau
    }

    pub fn gamma_over_delta(&self) -> f64 {
        self.gamma_over_delta
    }

    /// Per-photon scattering scale `xi_s = delta_tau * gamma / Delta`.
    pub fn xi_s(&self) -> f64 {
        self.delta_tau * self.gamma_over_delta
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Channel {
    DPlus,
    DMinus,
    Scatter,
}

impl Channel {
    pub fn symbol(self) -> char {
        match self {
            Channel::DPlus => '+',
            Channel::DMinus => '-',
            Channel::Scatter => 'S',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchProbabilities {
    pub plus: f64,
    pub minus: f64,
    pub scatter: f64,
}

impl BranchProbabilities {
    pub fn total(&self) -> f64 {
        self.plus + self.minus + self.scatter
    }

    pub fn of(&self, channel: Channel) -> f64 {
        match channel {
            Channel::DPlus => self.plus,
            Channel::DMinus => self.minus,
            Channel::Scatter => self.scatter,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchOutcome {
    pub channel: Channel,
    /// Angle from the dipole axis, set only for scattering.
    pub theta: Option<f64>,
    /// Azimuth, set only for scattering; recorded but never used.
    pub phi: Option<f64>,
    pub probabilities: BranchProbabilities,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum ClampMode {
    /// Refuse states with `xi_s n^2 > 1` on any populated cell.
    Strict,
    /// Clamp `s^2` at 0 and the scatter weight at 1, renormalize, and count.
    #[default]
    Permissive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct ClampPolicy {
    pub mode: ClampMode,
    pub clamp_events: u64,
}

impl ClampPolicy {
    pub fn new(mode: ClampMode) -> Self {
        Self {
            mode,
            clamp_events: 0,
        }
    }

    pub fn strict() -> Self {
        Self::new(ClampMode::Strict)
    }

    pub fn permissive() -> Self {
        Self::new(ClampMode::Permissive)
    }
}

/// Branch amplitude factors for one occupancy value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OccupancyFactors {
    pub plus: Complex64,
    pub minus: Complex64,
    /// Direction-integrated scattering amplitude `sqrt(min(xi_s n^2, 1) / 2)`.
    pub scatter: f64,
    /// `xi_s n^2 > 1`: the transmitted amplitude was clamped.
    pub clamped: bool,
}

pub fn occupancy_factors(params: &PhysicalParams, occupancy: usize) -> OccupancyFactors {
    let n = occupancy as f64;
    let scatter_weight = params.xi_s() * n * n;
    let clamped = scatter_weight > 1.0;
    let transmitted = (1.0 - scatter_weight).max(0.0).sqrt();
    let phase = params.delta_tau * n;
    let rotated = Complex64::new(phase.cos(), -phase.sin()) * transmitted;
    let one = Complex64::new(1.0, 0.0);
    OccupancyFactors {
        plus: (one + rotated) * 0.5,
        minus: (one - rotated) * 0.5,
        scatter: (scatter_weight.min(1.0) * 0.5).sqrt(),
        clamped,
    }
}

fn factor_table(params: &PhysicalParams, max_occupancy: usize) -> Vec<OccupancyFactors> {
    (0..=max_occupancy)
        .map(|n| occupancy_factors(params, n))
        .collect()
}

/// `P+`, `P-` and `Ps` for a unit-norm state.
///
/// In permissive mode a clamped event bumps `policy.clamp_events` and the
/// triple is divided by its sum.
pub fn branch_probabilities(
    state: &JointState,
    params: &PhysicalParams,
    policy: &mut ClampPolicy,
) -> Result<BranchProbabilities> {
    let weights = state.occupancy_distribution();
    let table = factor_table(params, state.max_occupancy());
    let mut clamped = false;
    let mut p = BranchProbabilities {
        plus: 0.0,
        minus: 0.0,
        scatter: 0.0,
    };
    for (n, (&w, f)) in weights.iter().zip(&table).enumerate() {
        if f.clamped && w > NEGLIGIBLE_WEIGHT {
            if policy.mode == ClampMode::Strict {
                return Err(Error::ParameterRegime {
                    occupancy: n,
                    value: params.xi_s() * (n * n) as f64,
                });
            }
            clamped = true;
        }
        p.plus += w * f.plus.norm_sqr();
        p.minus += w * f.minus.norm_sqr();
        p.scatter += w * f.scatter * f.scatter;
    }
    if clamped {
        policy.clamp_events += 1;
        let total = p.total();
        p.plus /= total;
        p.minus /= total;
        p.scatter /= total;
    }
    Ok(p)
}

/// Applies the branch operator without normalizing; the squared norm of the
/// result is the branch probability.
pub fn branch_unnormalized(state: &JointState, channel: Channel, params: &PhysicalParams) -> JointState {
    let table = factor_table(params, state.max_occupancy());
    let mut out = state.clone();
    let cols = state.spec2().basis_dim();
    let max_occ = state.max_occupancy();
    for (idx, a) in out.amplitudes_mut().as_mut_slice().iter_mut().enumerate() {
        let f = &table[max_occ - idx / cols - idx % cols];
        match channel {
            Channel::DPlus => *a *= f.plus,
            Channel::DMinus => *a *= f.minus,
            Channel::Scatter => *a *= f.scatter,
        }
    }
    out
}

pub fn apply_detection_plus(state: &JointState, params: &PhysicalParams) -> Result<JointState> {
    branch_unnormalized(state, Channel::DPlus, params).normalize()
}

pub fn apply_detection_minus(state: &JointState, params: &PhysicalParams) -> Result<JointState> {
    branch_unnormalized(state, Channel::DMinus, params).normalize()
}

/// Post-scattering state. The angular factor is common to every cell, so the
/// result does not depend on the sampled direction: it is `A n` normalized
/// (with the clamp cap applied in the permissive tail).
pub fn apply_scatter(state: &JointState, params: &PhysicalParams) -> Result<JointState> {
    if params.xi_s() == 0.0 {
        return Err(Error::DegenerateBranch(
            "scattering selected with xi_s = 0".into(),
        ));
    }
    branch_unnormalized(state, Channel::Scatter, params)
        .normalize()
        .map_err(|_| Error::DegenerateBranch("scattering selected on a state with no |a> population".into()))
}

/// `cos(theta)` for the dipole pattern `p(theta) = (3/4) sin^3(theta)`,
/// inverting the CDF `1/2 - (3/4) u + (1/4) u^3` in closed form.
pub fn scatter_cos_theta(r: f64) -> f64 {
    let arg = (2.0 * r - 1.0).clamp(-1.0, 1.0);
    (2.0 * (arg.acos() / 3.0 + 4.0 * PI / 3.0).cos()).clamp(-1.0, 1.0)
}

/// Draws `(theta, phi)`: `theta` from the dipole pattern, `phi` uniform.
pub fn sample_scatter_direction(rng: &mut UniformStream) -> (f64, f64) {
    let theta = scatter_cos_theta(rng.next_uniform()).acos();
    let phi = 2.0 * PI * rng.next_uniform();
    (theta, phi)
}

/// One event. Draws `r1` (scatter or not) and `r2` (`D+` or `D-`) every
/// time, then `theta` and `phi` uniforms only when scattering.
pub fn detection_step(
    state: &JointState,
    params: &PhysicalParams,
    policy: &mut ClampPolicy,
    rng: &mut UniformStream,
) -> Result<(JointState, BranchOutcome)> {
    let probabilities = branch_probabilities(state, params, policy)?;
    let r1 = rng.next_uniform();
    let r2 = rng.next_uniform();

    let (channel, theta, phi) = if probabilities.scatter > r1 {
        let (theta, phi) = sample_scatter_direction(rng);
        (Channel::Scatter, Some(theta), Some(phi))
    } else {
        let conditional_plus = probabilities.plus / (1.0 - probabilities.scatter);
        if conditional_plus > r2 {
            (Channel::DPlus, None, None)
        } else {
            (Channel::DMinus, None, None)
        }
    };

    let next = match channel {
        Channel::DPlus => apply_detection_plus(state, params)?,
        Channel::DMinus => apply_detection_minus(state, params)?,
        Channel::Scatter => apply_scatter(state, params)?,
    };
    Ok((
        next,
        BranchOutcome {
            channel,
            theta,
            phi,
            probabilities,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ComplexMatrix;
    use crate::spin::{apply_counter_rotation, binomial_initial_state, SampleSpec};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn spec(n: usize) -> SampleSpec {
        SampleSpec::new(n).unwrap()
    }

    fn paper_params() -> PhysicalParams {
        PhysicalParams::from_detuning_ratio(0.1, 150.0).unwrap()
    }

    /// Basis state with a given total occupancy on two samples of size n.
    fn eigenstate(n: usize, occupancy: usize) -> JointState {
        let i_sum = 2 * n - occupancy;
        let i1 = i_sum.min(n);
        JointState::basis_state(spec(n), spec(n), i1, i_sum - i1).unwrap()
    }

    fn psi0(n: usize) -> JointState {
        let amp = ComplexMatrix::from_fn(n + 1, n + 1, |i, j| {
            if i + j == n {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        JointState::from_amplitudes(spec(n), spec(n), amp).unwrap().normalize().unwrap()
    }

    fn random_state(seed: u64, n1: usize, n2: usize) -> JointState {
        let mut rng = UniformStream::from_seed(seed);
        let amp = ComplexMatrix::from_fn(n1 + 1, n2 + 1, |_, _| {
            Complex64::new(rng.next_uniform() - 0.5, rng.next_uniform() - 0.5)
        });
        JointState::from_amplitudes(spec(n1), spec(n2), amp).unwrap().normalize().unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(PhysicalParams::new(0.0, 0.0).is_err());
        assert!(PhysicalParams::new(-0.1, 0.0).is_err());
        assert!(PhysicalParams::new(PI, 0.0).is_err());
        assert!(PhysicalParams::new(0.1, 1.0).is_err());
        assert!(PhysicalParams::new(0.1, -0.01).is_err());
        assert!(PhysicalParams::from_detuning_ratio(0.1, 0.5).is_err());
        let p = paper_params();
        assert_abs_diff_eq!(p.xi_s(), 1.0 / 1500.0, epsilon = 1e-18);
        assert_eq!(PhysicalParams::from_detuning_ratio(0.1, 0.0).unwrap().xi_s(), 0.0);
    }

    #[test]
    fn ideal_eigenstate_probabilities() {
        let params = PhysicalParams::ideal(0.1).unwrap();
        for occ in [0usize, 1, 7, 20, 33, 40] {
            let s = eigenstate(20, occ);
            let p = branch_probabilities(&s, &params, &mut ClampPolicy::strict()).unwrap();
            // |1 +/- e^{-i phi}|^2 / 4 = (1 +/- cos phi) / 2
            let half = 0.1 * occ as f64 / 2.0;
            assert_abs_diff_eq!(p.plus, half.cos().powi(2), epsilon = 1e-15);
            assert_abs_diff_eq!(p.minus, half.sin().powi(2), epsilon = 1e-15);
            assert_eq!(p.scatter, 0.0);
        }
    }

    #[test]
    fn empty_a_population_exits_bright_port() {
        let s = eigenstate(20, 0);
        let p = branch_probabilities(&s, &paper_params(), &mut ClampPolicy::strict()).unwrap();
        assert_eq!((p.plus, p.minus, p.scatter), (1.0, 0.0, 0.0));
    }

    #[test]
    fn scatter_probability_for_occupancy_twenty() {
        let s = eigenstate(20, 20);
        let p = branch_probabilities(&s, &paper_params(), &mut ClampPolicy::strict()).unwrap();
        assert_abs_diff_eq!(p.scatter, 2.0 / 15.0, epsilon = 1e-15);

        // Oracle: integrate the direction-resolved weight (3/8pi)(1 - cos^2) xi_s n^2 / 2
        // over the sphere on a fine theta grid (midpoint rule).
        let xi = paper_params().xi_s();
        let steps = 20_000;
        let dtheta = PI / steps as f64;
        let integral: f64 = (0..steps)
            .map(|k| {
                let theta = (k as f64 + 0.5) * dtheta;
                let density = 3.0 / (8.0 * PI) * theta.sin().powi(2) * xi * 400.0 / 2.0;
                density * 2.0 * PI * theta.sin() * dtheta
            })
            .sum();
        assert_abs_diff_eq!(integral, p.scatter, epsilon = 1e-8);
    }

    #[test]
    fn strict_mode_refuses_paper_tail() {
        let s = binomial_initial_state(spec(20), spec(20)).unwrap();
        let err = branch_probabilities(&s, &paper_params(), &mut ClampPolicy::strict()).unwrap_err();
        assert!(matches!(err, Error::ParameterRegime { occupancy, .. } if occupancy >= 39));

        let mut policy = ClampPolicy::permissive();
        let p = branch_probabilities(&s, &paper_params(), &mut policy).unwrap();
        assert_eq!(policy.clamp_events, 1);
        assert_abs_diff_eq!(p.total(), 1.0, epsilon = 1e-14);
        // E[n^2] = 410 for the product binomial state.
        assert_abs_diff_eq!(p.scatter, 410.0 / 3000.0, epsilon = 1e-9);

        let mut strict = ClampPolicy::strict();
        branch_probabilities(&eigenstate(20, 30), &paper_params(), &mut strict).unwrap();
        assert_eq!(strict.clamp_events, 0);
    }

    #[test]
    fn plus_update_factors() {
        let params = PhysicalParams::ideal(0.1).unwrap();
        // Two-cell state with occupancies 3 and 11.
        let mut amp = ComplexMatrix::zeros(11, 11);
        amp[(10, 7)] = Complex64::new(0.6, 0.0);
        amp[(5, 4)] = Complex64::new(0.0, 0.8);
        let s = JointState::from_amplitudes(spec(10), spec(10), amp).unwrap();
        let raw = branch_unnormalized(&s, Channel::DPlus, &params);
        let f = |n: f64| (Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, -0.1 * n)) / 2.0;
        assert!((raw.amplitude(10, 7) - Complex64::new(0.6, 0.0) * f(3.0)).norm() < 1e-15);
        assert!((raw.amplitude(5, 4) - Complex64::new(0.0, 0.8) * f(11.0)).norm() < 1e-15);

        let post = apply_detection_plus(&s, &params).unwrap();
        let ratio = post.amplitude(5, 4) / post.amplitude(10, 7);
        let expected = (Complex64::new(0.0, 0.8) * f(11.0)) / (Complex64::new(0.6, 0.0) * f(3.0));
        assert!((ratio - expected).norm() < 1e-13);
    }

    #[test]
    fn zero_occupancy_component_is_unchanged_by_plus_and_killed_by_minus() {
        let params = paper_params();
        let s = eigenstate(4, 0);
        let plus = branch_unnormalized(&s, Channel::DPlus, &params);
        assert_eq!(plus, s);
        let minus = branch_unnormalized(&s, Channel::DMinus, &params);
        assert_eq!(minus.norm_sqr(), 0.0);
        assert!(matches!(apply_detection_minus(&s, &params), Err(Error::DegenerateBranch(_))));
        assert!(matches!(apply_scatter(&s, &params), Err(Error::DegenerateBranch(_))));
    }

    #[test]
    fn minus_update_factor_ideal() {
        let params = PhysicalParams::ideal(0.1).unwrap();
        let s = eigenstate(6, 5);
        let raw = branch_unnormalized(&s, Channel::DMinus, &params);
        let expected = (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -0.5)) / 2.0;
        let (i1, i2) = (6, 1);
        assert!((raw.amplitude(i1, i2) - expected).norm() < 1e-15);
    }

    #[test]
    fn scatter_reweights_by_occupancy() {
        let params = paper_params();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amp = ComplexMatrix::zeros(2, 2);
        // Occupancy 1 at (1, 0), occupancy 2 at (0, 0).
        amp[(1, 0)] = Complex64::new(h, 0.0);
        amp[(0, 0)] = Complex64::new(h, 0.0);
        let s = JointState::from_amplitudes(spec(1), spec(1), amp).unwrap();
        let post = apply_scatter(&s, &params).unwrap();
        assert_abs_diff_eq!(post.amplitude(1, 0).norm_sqr(), 1.0 / 5.0, epsilon = 1e-15);
        assert_abs_diff_eq!(post.amplitude(0, 0).norm_sqr(), 4.0 / 5.0, epsilon = 1e-15);

        let e = eigenstate(5, 3);
        assert_abs_diff_eq!(apply_scatter(&e, &params).unwrap().fidelity(&e).unwrap(), 1.0, epsilon = 1e-15);
        assert!(apply_scatter(&e, &PhysicalParams::ideal(0.1).unwrap()).is_err());
    }

    #[test]
    fn maximally_entangled_state_is_fixed_by_every_branch() {
        let params = paper_params();
        let s = psi0(20);
        for channel in [Channel::DPlus, Channel::DMinus, Channel::Scatter] {
            let post = branch_unnormalized(&s, channel, &params).normalize().unwrap();
            assert_abs_diff_eq!(post.fidelity(&s).unwrap(), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn ideal_limit_matches_exact_factors() {
        let params = PhysicalParams::from_detuning_ratio(0.1, 0.0).unwrap();
        for n in 0..=200 {
            let f = occupancy_factors(&params, n);
            let e = Complex64::new((0.1 * n as f64).cos(), -(0.1 * n as f64).sin());
            let one = Complex64::new(1.0, 0.0);
            assert_eq!(f.plus, (one + e) * 0.5);
            assert_eq!(f.minus, (one - e) * 0.5);
            assert_eq!(f.scatter, 0.0);
            assert!(!f.clamped);
        }
    }

    #[test]
    fn inverse_cdf_landmarks() {
        assert_abs_diff_eq!(scatter_cos_theta(0.5), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(scatter_cos_theta(0.0).acos(), 0.0, epsilon = 1e-7);
        assert_abs_diff_eq!(scatter_cos_theta(1.0).acos(), PI, epsilon = 1e-7);
    }

    #[test]
    fn inverse_cdf_against_bisection() {
        let cdf = |theta: f64| {
            let u = theta.cos();
            0.5 - 0.75 * u + 0.25 * u.powi(3)
        };
        for k in 0..=100 {
            let r = k as f64 / 100.0;
            let (mut lo, mut hi) = (0.0, PI);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if cdf(mid) < r {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let theta = scatter_cos_theta(r).acos();
            assert!((cdf(theta) - r).abs() < 1e-12, "r = {r}");
            if (0.01..=0.99).contains(&r) {
                assert_abs_diff_eq!(theta, 0.5 * (lo + hi), epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn sampled_cos_squared_mean_is_one_fifth() {
        // Quadrature oracle for E[cos^2] under (3/4) sin^3.
        let steps = 100_000;
        let d = PI / steps as f64;
        let quad: f64 = (0..steps)
            .map(|k| {
                let t = (k as f64 + 0.5) * d;
                0.75 * t.sin().powi(3) * t.cos().powi(2) * d
            })
            .sum();
        assert_abs_diff_eq!(quad, 0.2, epsilon = 1e-9);

        let mut rng = UniformStream::from_seed(17);
        let n = 1_000_000;
        let samples: Vec<f64> = (0..n)
            .map(|_| sample_scatter_direction(&mut rng).0.cos().powi(2))
            .collect();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let sigma = (var / n as f64).sqrt();
        assert!((mean - quad).abs() < 3.0 * sigma, "mean {mean}, sigma {sigma}");
    }

    #[test]
    fn all_b_always_bright() {
        let s = eigenstate(5, 0);
        let mut rng = UniformStream::from_seed(1);
        let mut policy = ClampPolicy::strict();
        for _ in 0..1000 {
            let (next, out) = detection_step(&s, &paper_params(), &mut policy, &mut rng).unwrap();
            assert_eq!(out.channel, Channel::DPlus);
            assert_eq!(next, s);
        }
    }

    #[test]
    fn ideal_never_scatters() {
        let params = PhysicalParams::ideal(0.1).unwrap();
        let s = binomial_initial_state(spec(3), spec(3)).unwrap();
        let mut rng = UniformStream::from_seed(5);
        let mut policy = ClampPolicy::strict();
        for _ in 0..1_000_000 {
            let (_, out) = detection_step(&s, &params, &mut policy, &mut rng).unwrap();
            assert_ne!(out.channel, Channel::Scatter);
        }
    }

    #[test]
    fn branch_updates_commute() {
        let params = paper_params();
        let s = random_state(3, 5, 4);
        let orders = [
            [Channel::DPlus, Channel::DMinus, Channel::Scatter],
            [Channel::Scatter, Channel::DPlus, Channel::DMinus],
            [Channel::DMinus, Channel::Scatter, Channel::DPlus],
        ];
        let results: Vec<JointState> = orders
            .iter()
            .map(|order| {
                order
                    .iter()
                    .fold(s.clone(), |acc, &c| branch_unnormalized(&acc, c, &params).normalize().unwrap())
            })
            .collect();
        for r in &results[1..] {
            assert_abs_diff_eq!(r.fidelity(&results[0]).unwrap(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn basis_states_are_fixed_points() {
        let params = paper_params();
        for occ in 1..=10 {
            let e = eigenstate(5, occ);
            for channel in [Channel::DPlus, Channel::DMinus, Channel::Scatter] {
                let post = branch_unnormalized(&e, channel, &params).normalize().unwrap();
                assert_abs_diff_eq!(post.fidelity(&e).unwrap(), 1.0, epsilon = 1e-14);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn probabilities_sum_to_one_and_match_branch_norms(
            seed in any::<u64>(),
            n1 in 1usize..20,
            n2 in 1usize..20,
            alpha in 0.0f64..3.0,
        ) {
            let params = paper_params();
            let s = apply_counter_rotation(&random_state(seed, n1, n2), alpha).unwrap();
            let mut policy = ClampPolicy::permissive();
            let p = branch_probabilities(&s, &params, &mut policy).unwrap();
            prop_assert!((p.total() - 1.0).abs() < 1e-12);
            for channel in [Channel::DPlus, Channel::DMinus, Channel::Scatter] {
                let norm2 = branch_unnormalized(&s, channel, &params).norm_sqr();
                prop_assert!((norm2 - p.of(channel)).abs() < 1e-12);
            }
        }
    }
}
