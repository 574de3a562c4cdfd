//! Derivative-free simplex minimization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Simplex coefficients, tolerances and multi-start settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct OptimizerConfig<T> {
    pub reflection: T,
    pub expansion: T,
    pub contraction: T,
    pub shrink: T,
    /// Stop when the simplex function spread falls below this (meV)...
    pub f_tol: T,
    /// ...and every vertex lies within this distance of the best one (rad).
    pub x_tol: T,
    /// Evaluation budget per start.
    pub max_evals: usize,
    pub n_restarts: usize,
    pub seed: u64,
    /// Edge length of the initial simplex (rad).
    pub initial_step: T,
    /// Re-evaluate accepted optima through the statevector path.
    pub verify: bool,
}

impl<T: Scalar> Default for OptimizerConfig<T> {
    fn default() -> Self {
        Self {
            reflection: T::one(),
            expansion: T::lit(2.0),
            contraction: T::lit(0.5),
            shrink: T::lit(0.5),
            f_tol: T::lit(1e-12),
            x_tol: T::lit(1e-8),
            max_evals: 50_000,
            n_restarts: 8,
            seed: 0,
            initial_step: T::lit(0.2),
            verify: false,
        }
    }
}

impl<T: Scalar> OptimizerConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let pos = [
            ("optimizer.reflection", self.reflection),
            ("optimizer.expansion", self.expansion),
            ("optimizer.contraction", self.contraction),
            ("optimizer.shrink", self.shrink),
            ("optimizer.f_tol", self.f_tol),
            ("optimizer.x_tol", self.x_tol),
            ("optimizer.initial_step", self.initial_step),
        ];
        for (name, v) in pos {
            if !(v.is_finite() && v > T::zero()) {
                return Err(Error::Config(format!("{name} must be > 0, got {v}")));
            }
        }
        if self.expansion <= self.reflection {
            return Err(Error::Config(
                "optimizer.expansion must exceed optimizer.reflection".into(),
            ));
        }
        for (name, v) in [
            ("optimizer.contraction", self.contraction),
            ("optimizer.shrink", self.shrink),
        ] {
            if v >= T::one() {
                return Err(Error::Config(format!("{name} must be < 1, got {v}")));
            }
        }
        if self.max_evals == 0 {
            return Err(Error::Config("optimizer.max_evals must be >= 1".into()));
        }
        Ok(())
    }
}

/// Outcome of one simplex run.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum<T> {
    pub x: Vec<T>,
    pub value: T,
    pub evals: usize,
    pub converged: bool,
}

struct Counted<F> {
    f: F,
    evals: usize,
}

impl<F> Counted<F> {
    fn call<T: Scalar>(&mut self, x: &[T]) -> Result<T>
    where
        F: FnMut(&[T]) -> T,
    {
        self.evals += 1;
        let v = (self.f)(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite {
                value: v.to_f64_lossy(),
                point: x.iter().map(|t| t.to_f64_lossy()).collect(),
            })
        }
    }
}

/// Minimizes `objective` from `start`.
///
/// A run stops when the function spread over the simplex is below `f_tol` and
/// every vertex is within `x_tol` (max-norm) of the best vertex. A converged
/// run is then restarted from its best vertex with a fresh simplex; the search
/// ends once a restart no longer improves the value by more than `f_tol`, or
/// when `max_evals` is spent.
pub fn nelder_mead<T, F>(objective: F, start: &[T], config: &OptimizerConfig<T>) -> Result<Minimum<T>>
where
    T: Scalar,
    F: FnMut(&[T]) -> T,
{
    config.validate()?;
    if start.is_empty() {
        return Err(Error::Usage("nelder_mead needs at least one dimension".into()));
    }
    let mut f = Counted { f: objective, evals: 0 };
    let mut x = start.to_vec();
    let mut best = f.call(&x)?;
    loop {
        let (xr, fr, converged) = run_simplex(&mut f, &x, best, config)?;
        let improved = best - fr > config.f_tol;
        if fr <= best {
            x = xr;
            best = fr;
        }
        if !converged || f.evals >= config.max_evals {
            return Ok(Minimum {
                x,
                value: best,
                evals: f.evals,
                converged: false,
            });
        }
        if !improved {
            return Ok(Minimum {
                x,
                value: best,
                evals: f.evals,
                converged: true,
            });
        }
    }
}

fn run_simplex<T, F>(
    f: &mut Counted<F>,
    x0: &[T],
    f0: T,
    cfg: &OptimizerConfig<T>,
) -> Result<(Vec<T>, T, bool)>
where
    T: Scalar,
    F: FnMut(&[T]) -> T,
{
    let k = x0.len();
    let mut pts: Vec<Vec<T>> = Vec::with_capacity(k + 1);
    let mut vals: Vec<T> = Vec::with_capacity(k + 1);
    pts.push(x0.to_vec());
    vals.push(f0);
    for i in 0..k {
        let mut p = x0.to_vec();
        p[i] = p[i] + cfg.initial_step;
        vals.push(f.call(&p)?);
        pts.push(p);
    }

    let mut order: Vec<usize> = (0..=k).collect();
    let mut centroid = vec![T::zero(); k];
    let mut trial = vec![T::zero(); k];
    let mut trial2 = vec![T::zero(); k];

    loop {
        order.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).expect("finite values"));
        let b = order[0];
        let w = order[k];
        let sw = order[k - 1];

        let spread = vals[w] - vals[b];
        let xspread = pts
            .iter()
            .flat_map(|p| p.iter().zip(&pts[b]).map(|(u, v)| (*u - *v).abs()))
            .fold(T::zero(), T::max);
        if spread <= cfg.f_tol && xspread <= cfg.x_tol {
            return Ok((pts[b].clone(), vals[b], true));
        }
        if f.evals >= cfg.max_evals {
            return Ok((pts[b].clone(), vals[b], false));
        }

        centroid.iter_mut().for_each(|c| *c = T::zero());
        for &i in &order[..k] {
            for (c, v) in centroid.iter_mut().zip(&pts[i]) {
                *c = *c + *v;
            }
        }
        let kf = T::lit(k as f64);
        centroid.iter_mut().for_each(|c| *c = *c / kf);

        // reflection
        for j in 0..k {
            trial[j] = centroid[j] + cfg.reflection * (centroid[j] - pts[w][j]);
        }
        let fr = f.call(&trial)?;

        if fr < vals[b] {
            for j in 0..k {
                trial2[j] = centroid[j] + cfg.expansion * (trial[j] - centroid[j]) / cfg.reflection;
            }
            let fe = f.call(&trial2)?;
            if fe < fr {
                pts[w].copy_from_slice(&trial2);
                vals[w] = fe;
            } else {
                pts[w].copy_from_slice(&trial);
                vals[w] = fr;
            }
            continue;
        }
        if fr < vals[sw] {
            pts[w].copy_from_slice(&trial);
            vals[w] = fr;
            continue;
        }

        let accepted = if fr < vals[w] {
            // outside contraction
            for j in 0..k {
                trial2[j] = centroid[j] + cfg.contraction * (trial[j] - centroid[j]);
            }
            let fc = f.call(&trial2)?;
            if fc <= fr {
                pts[w].copy_from_slice(&trial2);
                vals[w] = fc;
                true
            } else {
                false
            }
        } else {
            // inside contraction
            for j in 0..k {
                trial2[j] = centroid[j] + cfg.contraction * (pts[w][j] - centroid[j]);
            }
            let fc = f.call(&trial2)?;
            if fc < vals[w] {
                pts[w].copy_from_slice(&trial2);
                vals[w] = fc;
                true
            } else {
                false
            }
        };
        if accepted {
            continue;
        }

        let xb = pts[b].clone();
        for &i in &order[1..] {
            for j in 0..k {
                pts[i][j] = xb[j] + cfg.shrink * (pts[i][j] - xb[j]);
            }
            vals[i] = f.call(&pts[i])?;
        }
    }
}
