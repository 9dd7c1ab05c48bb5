//! Fast runtime checks of the simulator's invariants against independent
//! references. Runs in well under a second in release builds.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use spinjump_core::{
    apply_counter_rotation, branch_probabilities, branch_unnormalized, eig_sym_tridiag,
    entropy_of_entanglement, maximally_entangled_state, occupancy_factors, run_trajectory,
    run_trajectory_from, Channel, ClampMode, ClampPolicy, Complex64, ComplexMatrix, JointState,
    PhysicalParams, Protocol, SampleSpec, SymTridiag, TrajectoryConfig, UniformStream,
};

use crate::error::{CliError, Result};

#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, worst: f64, tol: f64) -> Check {
    Check {
        name,
        passed: worst <= tol,
        detail: format!("worst deviation {worst:.3e}, tolerance {tol:.0e}"),
    }
}

/// Random unit state with each sample holding `1..=max_atoms` atoms.
fn random_state(rng: &mut UniformStream, max_atoms: usize) -> Result<JointState> {
    let n1 = size(rng, max_atoms);
    let n2 = size(rng, max_atoms);
    let spec1 = SampleSpec::new(n1)?;
    let spec2 = SampleSpec::new(n2)?;
    let amp = ComplexMatrix::from_fn(n1 + 1, n2 + 1, |_, _| {
        Complex64::new(2.0 * rng.next_uniform() - 1.0, 2.0 * rng.next_uniform() - 1.0)
    });
    Ok(JointState::from_amplitudes(spec1, spec2, amp)?.normalize()?)
}

fn size(rng: &mut UniformStream, max: usize) -> usize {
    1 + (rng.next_uniform() * max as f64) as usize
}

fn probability_conservation(rng: &mut UniformStream) -> Result<Check> {
    let params = PhysicalParams::from_detuning_ratio(0.1, 150.0)?;
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let s = random_state(rng, 20)?;
        let mut policy = ClampPolicy::new(ClampMode::Permissive);
        let p = branch_probabilities(&s, &params, &mut policy)?;
        worst = worst.max((p.total() - 1.0).abs());
        if policy.clamp_events == 0 {
            for ch in [Channel::DPlus, Channel::DMinus, Channel::Scatter] {
                let norm = branch_unnormalized(&s, ch, &params).norm_sqr();
                worst = worst.max((norm - p.of(ch)).abs());
            }
        }
    }
    Ok(check("branch probabilities sum to one and match branch norms", worst, 1e-12))
}

fn partial_trace_entropy(state: &JointState) -> f64 {
    let a = state.amplitudes();
    let (d1, d2) = (a.rows(), a.cols());
    let rho = DMatrix::<Complex64>::from_fn(d1, d1, |i, k| {
        (0..d2).map(|j| a[(i, j)] * a[(k, j)].conj()).sum()
    });
    rho.symmetric_eigenvalues()
        .iter()
        .filter(|&&l| l > 1e-15)
        .map(|&l| -l * l.log2())
        .sum()
}

fn entropy_oracle(rng: &mut UniformStream) -> Result<Check> {
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let s = random_state(rng, 6)?;
        worst = worst.max((entropy_of_entanglement(&s)? - partial_trace_entropy(&s)).abs());
    }
    Ok(check("entropy agrees with a partial-trace eigensolver", worst, 1e-9))
}

fn maximal_entropy() -> Result<Check> {
    let spec = SampleSpec::new(20)?;
    let psi0 = maximally_entangled_state(spec, spec)?;
    let e = entropy_of_entanglement(&psi0)?;
    Ok(check("maximally entangled state carries log2(21) bits", (e - 21f64.log2()).abs(), 1e-10))
}

fn tridiagonal_oracle(rng: &mut UniformStream) -> Result<Check> {
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let n = size(rng, 30);
        let diag: Vec<f64> = (0..n).map(|_| 2.0 * rng.next_uniform() - 1.0).collect();
        let off: Vec<f64> = (1..n).map(|_| 2.0 * rng.next_uniform() - 1.0).collect();
        let m = SymTridiag::new(diag, off)?;
        let mut ours = eig_sym_tridiag(&m)?.values;
        ours.sort_by(f64::total_cmp);
        let dense = DMatrix::<f64>::from_fn(n, n, |i, j| m.get(i, j));
        let mut reference: Vec<f64> = dense.symmetric_eigenvalues().iter().copied().collect();
        reference.sort_by(f64::total_cmp);
        for (a, b) in ours.iter().zip(&reference) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(check("tridiagonal eigenvalues agree with a dense eigensolver", worst, 1e-10))
}

fn rotation_unitarity(rng: &mut UniformStream) -> Result<Check> {
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let s = random_state(rng, 25)?;
        let r = apply_counter_rotation(&s, PI * (2.0 * rng.next_uniform() - 1.0))?;
        worst = worst.max((r.norm_sqr() - 1.0).abs());
    }
    Ok(check("counter-rotations preserve the norm", worst, 1e-12))
}

fn ideal_factors() -> Result<Check> {
    let params = PhysicalParams::ideal(0.1)?;
    let mut worst = 0.0f64;
    for n in 0..=40 {
        let f = occupancy_factors(&params, n);
        let phase = Complex64::new((0.1 * n as f64).cos(), -(0.1 * n as f64).sin());
        let one = Complex64::new(1.0, 0.0);
        worst = worst
            .max((f.plus - (one + phase) * 0.5).norm())
            .max((f.minus - (one - phase) * 0.5).norm())
            .max(f.scatter);
    }
    Ok(check("without scattering the detection factors are exact", worst, 0.0))
}

fn psi0_fixed_point() -> Result<Check> {
    let spec = SampleSpec::new(10)?;
    let psi0 = maximally_entangled_state(spec, spec)?;
    let target = entropy_of_entanglement(&psi0)?;
    let mut worst = 0.0f64;
    for protocol in [Protocol::consecutive(200, 100)?, Protocol::continuous(200, PI / 5.0)?] {
        let config = TrajectoryConfig {
            spec1: spec,
            spec2: spec,
            params: PhysicalParams::from_detuning_ratio(0.1, 150.0)?,
            protocol,
            clamp_mode: ClampMode::Permissive,
            snapshot_stride: 1,
        };
        let (record, last) = run_trajectory_from(&config, psi0.clone(), 11)?;
        worst = worst.max(1.0 - last.fidelity(&psi0)?);
        for snap in &record.snapshots {
            worst = worst.max((snap.entropy_bits - target).abs());
        }
    }
    Ok(check("the maximally entangled state is a fixed point", worst, 1e-9))
}

fn determinism() -> Result<Check> {
    let spec = SampleSpec::new(6)?;
    let config = TrajectoryConfig {
        spec1: spec,
        spec2: spec,
        params: PhysicalParams::from_detuning_ratio(0.1, 150.0)?,
        protocol: Protocol::consecutive(100, 50)?,
        clamp_mode: ClampMode::Permissive,
        snapshot_stride: 1,
    };
    let a = run_trajectory(&config, 7)?;
    let b = run_trajectory(&config, 7)?;
    Ok(Check {
        name: "a seed reproduces its trajectory exactly",
        passed: a == b,
        detail: String::from(if a == b { "identical records" } else { "records differ" }),
    })
}

pub fn run_checks() -> Result<Vec<Check>> {
    let mut rng = UniformStream::from_seed(0x5e1f_7e57);
    Ok(vec![
        probability_conservation(&mut rng)?,
        entropy_oracle(&mut rng)?,
        maximal_entropy()?,
        tridiagonal_oracle(&mut rng)?,
        rotation_unitarity(&mut rng)?,
        ideal_factors()?,
        psi0_fixed_point()?,
        determinism()?,
    ])
}

/// Runs every check, reports each to stderr and fails if any did not pass.
pub fn selftest() -> Result<Vec<Check>> {
    let checks = run_checks()?;
    for c in &checks {
        eprintln!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        return Err(CliError::SelfTest(failed));
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass() {
        let checks = run_checks().unwrap();
        assert_eq!(checks.len(), 8);
        for c in checks {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
