//! Finite-shot estimation of Pauli-sum expectations.
//!
//! Every term is measured independently: a string with expectation `⟨P⟩`
//! yields `+1` with probability `(1 + ⟨P⟩)/2`, so the number of `+1`
//! outcomes over `shots` repetitions is binomial. Terms are not grouped into
//! commuting sets.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use super::pauli::WeightedPauliSum;
use super::state::StateVector;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn check_shots(shots: u64) -> Result<()> {
    if shots == 0 {
        return Err(Error::Usage("shot count must be at least 1".into()));
    }
    Ok(())
}

fn outcome_probability<T: Scalar>(expectation: T) -> f64 {
    ((1.0 + expectation.to_f64_lossy()) / 2.0).clamp(0.0, 1.0)
}

/// Sample mean of each term's `±1` outcomes, in term order (unweighted).
pub fn sample_term_means<T: Scalar>(
    state: &StateVector<T>,
    op: &WeightedPauliSum<T>,
    shots: u64,
    seed: u64,
) -> Result<Vec<T>> {
    check_shots(shots)?;
    let exact = state.term_expectations(op)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    exact
        .into_iter()
        .map(|e| {
            let p = outcome_probability(e);
            let plus = Binomial::new(shots, p)
                .map_err(|err| Error::Invariant(format!("binomial({shots}, {p}): {err}")))?
                .sample(&mut rng);
            let mean = (2.0 * plus as f64 - shots as f64) / shots as f64;
            Ok(T::lit(mean))
        })
        .collect()
}

/// Coefficient-weighted sum of per-term sample means. Deterministic for a fixed seed.
pub fn sample_expectation<T: Scalar>(
    state: &StateVector<T>,
    op: &WeightedPauliSum<T>,
    shots: u64,
    seed: u64,
) -> Result<T> {
    let means = sample_term_means(state, op, shots, seed)?;
    Ok(means
        .into_iter()
        .zip(op.terms())
        .map(|(m, (c, _))| *c * m)
        .sum())
}

/// Analytic standard deviation of [`sample_expectation`]:
/// `sqrt(Σ cⱼ² (1 − ⟨Pⱼ⟩²) / shots)`.
pub fn shot_sigma<T: Scalar>(state: &StateVector<T>, op: &WeightedPauliSum<T>, shots: u64) -> Result<T> {
    check_shots(shots)?;
    let exact = state.term_expectations(op)?;
    let var: T = exact
        .iter()
        .zip(op.terms())
        .map(|(&e, (c, _))| {
            let v = (T::one() - e * e).max(T::zero());
            *c * *c * v
        })
        .sum();
    Ok((var / T::lit(shots as f64)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::PauliString;

    fn z0() -> WeightedPauliSum<f64> {
        WeightedPauliSum::from_terms(1, vec![(1.0, "Z".parse::<PauliString>().unwrap())]).unwrap()
    }

    #[test]
    fn zero_variance_term_is_exact() {
        let s = StateVector::<f64>::new(1).unwrap();
        for shots in [1, 7, 1000] {
            assert_eq!(sample_expectation(&s, &z0(), shots, 3).unwrap(), 1.0);
        }
        assert_eq!(shot_sigma(&s, &z0(), 100).unwrap(), 0.0);
    }

    #[test]
    fn equatorial_state_within_three_sigma() {
        let mut s = StateVector::<f64>::new(1).unwrap();
        s.apply_ry(0, std::f64::consts::FRAC_PI_2).unwrap();
        let est = sample_expectation(&s, &z0(), 10_000, 42).unwrap();
        assert!(est.abs() < 0.03, "estimate {est}");
        assert!((shot_sigma(&s, &z0(), 10_000).unwrap() - 0.01).abs() < 1e-12);
    }

    #[test]
    fn deterministic_for_seed() {
        let mut s = StateVector::<f64>::new(1).unwrap();
        s.apply_ry(0, 1.0).unwrap();
        let a = sample_expectation(&s, &z0(), 500, 9).unwrap();
        let b = sample_expectation(&s, &z0(), 500, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_shots_rejected() {
        let s = StateVector::<f64>::new(1).unwrap();
        assert!(matches!(sample_expectation(&s, &z0(), 0, 1), Err(Error::Usage(_))));
    }
}
