use crate::engine::{sample_expectation, shot_sigma};
use crate::error::Result;
use crate::model::{build_labeled_hamiltonian, TermGroup};
use crate::solver::prepare_state;
use crate::{AnsatzParams, FieldSpec, ModelParams};

/// Sampled subtotal of one group of Hamiltonian terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotEstimate {
    pub exact: f64,
    pub estimate: f64,
    /// Analytic binomial standard deviation of `estimate`.
    pub sigma: f64,
}

impl ShotEstimate {
    pub fn deviation(&self) -> f64 {
        self.estimate - self.exact
    }
}

/// Exchange, anisotropy and full-Hamiltonian estimates with `shots` per term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotBreakdown {
    pub exchange: ShotEstimate,
    pub mca: ShotEstimate,
    pub total: ShotEstimate,
}

/// Samples the exchange and anisotropy terms separately (different seeds)
/// and the full Hamiltonian once more.
pub fn sample_breakdown(
    params: &ModelParams,
    field: &FieldSpec,
    angles: &AnsatzParams,
    shots: u64,
    seed: u64,
) -> Result<ShotBreakdown> {
    let h = build_labeled_hamiltonian(params, field)?;
    let state = prepare_state(angles)?;
    let group = |keep: &dyn Fn(TermGroup) -> bool, salt: u64| -> Result<ShotEstimate> {
        let op = h.select(keep);
        Ok(ShotEstimate {
            exact: state.expectation(&op)?,
            estimate: sample_expectation(&state, &op, shots, seed.wrapping_mul(3).wrapping_add(salt))?,
            sigma: shot_sigma(&state, &op, shots)?,
        })
    };
    Ok(ShotBreakdown {
        exchange: group(&|g| g.is_exchange(), 0)?,
        mca: group(&|g| g == TermGroup::Mca, 1)?,
        total: group(&|_| true, 2)?,
    })
}
