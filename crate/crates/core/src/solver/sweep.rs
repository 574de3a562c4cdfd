use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ground_state::{
    minimize_from, named_seeds, optimize_ground_state, OptimizationResult, StartLabel,
};
use super::nelder_mead::OptimizerConfig;
use crate::error::{Error, Result};
use crate::model::{FieldSpec, ModelParams};
use crate::scalar::Scalar;

/// How successive sweep points are seeded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    /// Sequential; each point starts from the previous optimum plus the named seeds.
    #[default]
    Warm,
    /// Every point gets the full multi-start search; points run in parallel.
    Cold,
}

/// Full multi-start at the first field, then previous optimum plus the named
/// seeds at every later field. Results are in input order.
pub fn warm_start_sweep<T: Scalar>(
    params: &ModelParams<T>,
    fields: &[FieldSpec<T>],
    config: &OptimizerConfig<T>,
) -> Result<Vec<OptimizationResult<T>>> {
    let (first, rest) = fields
        .split_first()
        .ok_or_else(|| Error::Usage("sweep needs at least one field".into()))?;
    let mut out = Vec::with_capacity(fields.len());
    out.push(optimize_ground_state(params, first, config, None)?);
    for field in rest {
        let prev = out.last().expect("non-empty").best_params;
        let mut starts = vec![(StartLabel::Previous, prev)];
        starts.extend(named_seeds(field));
        out.push(minimize_from(params, field, config, &starts)?);
    }
    Ok(out)
}

/// Independent full multi-start at every field.
pub fn cold_start_sweep<T: Scalar>(
    params: &ModelParams<T>,
    fields: &[FieldSpec<T>],
    config: &OptimizerConfig<T>,
) -> Result<Vec<OptimizationResult<T>>> {
    if fields.is_empty() {
        return Err(Error::Usage("sweep needs at least one field".into()));
    }
    fields
        .par_iter()
        .map(|f| optimize_ground_state(params, f, config, None))
        .collect()
}

pub fn sweep<T: Scalar>(
    params: &ModelParams<T>,
    fields: &[FieldSpec<T>],
    config: &OptimizerConfig<T>,
    mode: SweepMode,
) -> Result<Vec<OptimizationResult<T>>> {
    match mode {
        SweepMode::Warm => warm_start_sweep(params, fields, config),
        SweepMode::Cold => cold_start_sweep(params, fields, config),
    }
}
