use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::ansatz::{prepare_state, AnsatzParams};
use super::nelder_mead::{nelder_mead, OptimizerConfig};
use crate::error::{Error, Result};
use crate::model::{build_hamiltonian, ClassicalModel, FieldSpec, ModelParams};
use crate::scalar::Scalar;

/// Which starting point produced an optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartLabel {
    BChain,
    AFlop,
    FieldAligned,
    Random(usize),
    Caller(usize),
    Previous,
    /// Produced by the brute-force grid oracle.
    Grid,
}

impl fmt::Display for StartLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StartLabel::BChain => write!(f, "b-chain"),
            StartLabel::AFlop => write!(f, "a-flop"),
            StartLabel::FieldAligned => write!(f, "field-aligned"),
            StartLabel::Random(i) => write!(f, "random-{i}"),
            StartLabel::Caller(i) => write!(f, "caller-{i}"),
            StartLabel::Previous => write!(f, "previous"),
            StartLabel::Grid => write!(f, "grid"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult<T> {
    /// Canonicalized to θ ∈ [0, π], φ ∈ (−π, π].
    pub best_params: AnsatzParams<T>,
    pub best_energy: T,
    /// Evaluations summed over every start.
    pub evals_used: usize,
    pub converged: bool,
    pub start_label: StartLabel,
}

/// The three physically motivated seeds for a given field.
pub fn named_seeds<T: Scalar>(field: &FieldSpec<T>) -> Vec<(StartLabel, AnsatzParams<T>)> {
    let d = if field.magnitude > T::zero() {
        field.direction()
    } else {
        [T::zero(), T::one(), T::zero()]
    };
    vec![
        (StartLabel::BChain, AnsatzParams::b_chain()),
        (StartLabel::AFlop, AnsatzParams::a_flop()),
        (StartLabel::FieldAligned, AnsatzParams::aligned_with(d)),
    ]
}

/// `count` uniformly random angle sets from `seed`.
pub fn random_seeds<T: Scalar>(count: usize, seed: u64) -> Vec<(StartLabel, AnsatzParams<T>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let mut a = AnsatzParams::uniform(T::zero(), T::zero());
            for n in 0..a.theta.len() {
                a.theta[n] = T::lit(rng.gen_range(0.0..std::f64::consts::PI));
                a.phi[n] = T::lit(rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI));
            }
            (StartLabel::Random(i), a)
        })
        .collect()
}

/// Runs the simplex search from every start and keeps the lowest energy.
/// Ties go to the earliest start, so the result does not depend on scheduling.
pub fn minimize_from<T: Scalar>(
    params: &ModelParams<T>,
    field: &FieldSpec<T>,
    config: &OptimizerConfig<T>,
    starts: &[(StartLabel, AnsatzParams<T>)],
) -> Result<OptimizationResult<T>> {
    config.validate()?;
    if starts.is_empty() {
        return Err(Error::Usage("no starting points supplied".into()));
    }
    let model = ClassicalModel::new(params, field)?;
    let runs = starts
        .par_iter()
        .map(|(label, seed)| {
            seed.check_finite()?;
            let m = nelder_mead(|x| model.energy_flat(x), &seed.to_flat(), config)?;
            Ok((*label, m))
        })
        .collect::<Result<Vec<_>>>()?;

    let evals_used = runs.iter().map(|(_, m)| m.evals).sum();
    let converged = runs.iter().any(|(_, m)| m.converged);
    let (label, best) = runs
        .into_iter()
        .reduce(|a, b| if b.1.value < a.1.value { b } else { a })
        .expect("at least one start");

    let best_params = AnsatzParams::from_flat(&best.x)?.canonical();
    if config.verify {
        verify_against_statevector(params, field, &best_params, best.value)?;
    }
    Ok(OptimizationResult {
        best_params,
        best_energy: best.value,
        evals_used,
        converged,
        start_label: label,
    })
}

/// Checks that the statevector expectation reproduces the closed-form energy.
pub fn verify_against_statevector<T: Scalar>(
    params: &ModelParams<T>,
    field: &FieldSpec<T>,
    angles: &AnsatzParams<T>,
    energy: T,
) -> Result<()> {
    let h = build_hamiltonian(params, field)?;
    let quantum = prepare_state(angles)?.expectation(&h)?;
    let tol = T::ROUNDOFF * T::one().max(energy.abs());
    if (quantum - energy).abs() > tol {
        return Err(Error::Invariant(format!(
            "statevector energy {quantum} disagrees with closed form {energy}"
        )));
    }
    Ok(())
}

/// Global search: named seeds, `n_restarts` random seeds, then caller seeds.
pub fn optimize_ground_state<T: Scalar>(
    params: &ModelParams<T>,
    field: &FieldSpec<T>,
    config: &OptimizerConfig<T>,
    seeds: Option<&[AnsatzParams<T>]>,
) -> Result<OptimizationResult<T>> {
    let mut starts = named_seeds(field);
    starts.extend(random_seeds(config.n_restarts, config.seed));
    if let Some(extra) = seeds {
        starts.extend(
            extra
                .iter()
                .enumerate()
                .map(|(i, a)| (StartLabel::Caller(i), *a)),
        );
    }
    minimize_from(params, field, config, &starts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::classical_energy;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn zero_field_ground_state() {
        let p = ModelParams::<f64>::default();
        let cfg = OptimizerConfig {
            verify: true,
            ..Default::default()
        };
        let r = optimize_ground_state(&p, &FieldSpec::zero(), &cfg, None).unwrap();
        assert!(r.converged);
        assert!((r.best_energy + 38.30592).abs() < 1e-9, "{}", r.best_energy);
        for v in r.best_params.bloch_vectors() {
            assert!(v[1].abs() > (1e-3f64).cos(), "{v:?}");
        }
    }

    #[test]
    fn seed_dominance() {
        let p = ModelParams::<f64>::default();
        let f = FieldSpec::along_b(2.0);
        let cfg = OptimizerConfig {
            n_restarts: 3,
            seed: 11,
            ..Default::default()
        };
        let r = optimize_ground_state(&p, &f, &cfg, None).unwrap();
        let mut starts = named_seeds(&f);
        starts.extend(random_seeds(3, 11));
        for (_, s) in starts {
            assert!(r.best_energy <= classical_energy(&p, &f, &s).unwrap());
        }
    }

    #[test]
    fn saturates_at_400_tesla() {
        let p = ModelParams::<f64>::default();
        let r = optimize_ground_state(&p, &FieldSpec::along_b(400.0), &OptimizerConfig::default(), None)
            .unwrap();
        for v in r.best_params.bloch_vectors() {
            assert!((v[1] - 1.0).abs() < 1e-6, "{v:?}");
        }
    }

    #[test]
    fn free_spin_follows_field() {
        let p = ModelParams::free_spins();
        let r = optimize_ground_state(
            &p,
            &FieldSpec::in_bc(0.7, 0.4),
            &OptimizerConfig::default(),
            Some(&[AnsatzParams::uniform(FRAC_PI_2, 0.0)]),
        )
        .unwrap();
        assert!((r.best_energy + 4.0 * p.zeeman_scale() * 0.7).abs() < 1e-10);
    }

    #[test]
    fn empty_start_list_is_usage_error() {
        let r = minimize_from(
            &ModelParams::<f64>::default(),
            &FieldSpec::zero(),
            &OptimizerConfig::default(),
            &[],
        );
        assert!(matches!(r, Err(Error::Usage(_))));
    }
}
