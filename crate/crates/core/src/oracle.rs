//! Independent checks for the main solver: a brute-force classical grid
//! search, a dense-matrix expectation reference and the closed-form
//! saturation field. None of these go through the closed-form energy or the
//! bit-mask Pauli kernels they are meant to verify.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::engine::Pauli;
use crate::error::{Error, Result};
use crate::model::{BOHR_MAGNETON_MEV_PER_T, SITES};
use crate::solver::StartLabel;
use crate::{AnsatzParams, FieldSpec, ModelParams, OptimizationResult, StateVector, WeightedPauliSum};

/// Largest register [`dense_crosscheck`] will materialize.
pub const DENSE_MAX_QUBITS: usize = 12;

/// Coarse grid plus local refinement schedule for [`grid_minimize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Polar samples are `iπ/theta_steps` for `i = 0..=theta_steps`.
    pub theta_steps: usize,
    /// Azimuthal samples are `2πj/phi_steps` for `j < phi_steps`.
    pub phi_steps: usize,
    pub refine_iters: usize,
    pub refine_shrink: f64,
    /// Best coarse configurations given a short local search...
    pub screen: usize,
    /// ...after which this many survivors are refined to full resolution.
    pub candidates: usize,
    /// Upper bound on the number of coarse configurations visited.
    pub budget: u64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            theta_steps: 12,
            phi_steps: 12,
            refine_iters: 20,
            refine_shrink: 0.5,
            screen: 256,
            candidates: 8,
            budget: 2_000_000_000,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.theta_steps < 4 || self.phi_steps < 4 {
            return Err(Error::Config(format!(
                "grid steps must be >= 4, got {}x{}",
                self.theta_steps, self.phi_steps
            )));
        }
        if !(self.refine_shrink > 0.0 && self.refine_shrink < 1.0) {
            return Err(Error::Config(format!(
                "grid refine_shrink must lie in (0, 1), got {}",
                self.refine_shrink
            )));
        }
        if self.candidates == 0 || self.screen < self.candidates {
            return Err(Error::Config(format!(
                "grid needs 1 <= candidates <= screen, got {} and {}",
                self.candidates, self.screen
            )));
        }
        Ok(())
    }
}

/// Energy of four classical unit vectors, written out directly from the
/// coupling constants.
struct Reference {
    bond: [[f64; SITES]; SITES],
    zeeman: [f64; 3],
    mca: [f64; 3],
}

impl Reference {
    fn new(p: &ModelParams, field: &FieldSpec) -> Self {
        let s2 = p.s * p.s;
        let nn = 0.5 * p.j1 * s2;
        let nnp = 0.5 * p.j1p * s2;
        let mut bond = [[0.0; SITES]; SITES];
        for (i, j, c) in [
            (0, 1, nn),
            (2, 3, nn),
            (1, 2, nnp),
            (3, 0, nnp),
            (0, 2, p.j2 * s2),
            (1, 3, p.j2p * s2),
        ] {
            bond[i][j] = c;
            bond[j][i] = c;
        }
        let h = field.components();
        let z = p.g * BOHR_MAGNETON_MEV_PER_T * p.s;
        Self {
            bond,
            zeeman: [-z * h[0], -z * h[1], -z * h[2]],
            mca: [-p.ka, -p.kb, p.kc],
        }
    }

    fn site(&self, m: [f64; 3]) -> f64 {
        (0..3)
            .map(|k| self.zeeman[k] * m[k] + self.mca[k] * m[k] * m[k])
            .sum()
    }

    fn energy(&self, m: &[[f64; 3]; SITES]) -> f64 {
        let mut e = 0.0;
        for i in 0..SITES {
            e += self.site(m[i]);
            for j in i + 1..SITES {
                e += self.bond[i][j] * (m[i][0] * m[j][0] + m[i][1] * m[j][1] + m[i][2] * m[j][2]);
            }
        }
        e
    }

    fn energy_of_angles(&self, x: &[f64; 2 * SITES]) -> f64 {
        let mut m = [[0.0; 3]; SITES];
        for n in 0..SITES {
            let (st, ct) = x[n].sin_cos();
            let (sp, cp) = x[n + SITES].sin_cos();
            m[n] = [st * cp, st * sp, ct];
        }
        self.energy(&m)
    }
}

/// Exhaustive search over a product grid of directions followed by a
/// shrinking 3⁸ pattern search around the best coarse configurations.
/// The local search resolves angles down to the coarse spacing times
/// `refine_shrink^refine_iters`.
///
/// The ±a reflection (no field along a) and the ±c reflection (no field
/// along c) leave the energy unchanged, so site 1 is restricted to one half
/// of the sphere for each reflection that applies.
pub fn grid_minimize(
    params: &ModelParams,
    field: &FieldSpec,
    grid: &GridSpec,
) -> Result<OptimizationResult> {
    params.validate()?;
    field.validate()?;
    grid.validate()?;
    let r = Reference::new(params, field);

    let mut dirs: Vec<([f64; 2], [f64; 3])> = Vec::new();
    for i in 0..=grid.theta_steps {
        let theta = std::f64::consts::PI * i as f64 / grid.theta_steps as f64;
        let at_pole = i == 0 || i == grid.theta_steps;
        let phis = if at_pole { 1 } else { grid.phi_steps };
        for j in 0..phis {
            let phi = std::f64::consts::TAU * j as f64 / grid.phi_steps as f64;
            let (st, ct) = theta.sin_cos();
            let (sp, cp) = phi.sin_cos();
            let snap = |v: f64| if v.abs() < 1e-12 { 0.0 } else { v };
            dirs.push(([theta, phi], [snap(st * cp), snap(st * sp), snap(ct)]));
        }
    }
    let h = field.components();
    let first: Vec<usize> = (0..dirs.len())
        .filter(|&k| {
            let m = dirs[k].1;
            (h[0] != 0.0 || m[0] >= 0.0) && (h[2] != 0.0 || m[2] >= 0.0)
        })
        .collect();
    let n = dirs.len() as u64;
    let size = first.len() as u64 * n * n * n;
    if size > grid.budget {
        return Err(Error::Config(format!(
            "grid of {size} configurations exceeds budget {}",
            grid.budget
        )));
    }

    let nd = dirs.len();
    let site: Vec<f64> = dirs.iter().map(|d| r.site(d.1)).collect();
    let dot: Vec<f64> = (0..nd * nd)
        .map(|k| {
            let (u, v) = (dirs[k / nd].1, dirs[k % nd].1);
            u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
        })
        .collect();
    let t24: Vec<f64> = dot.iter().map(|d| r.bond[1][3] * d).collect();

    let mut coarse: Vec<(f64, [usize; SITES])> = first
        .par_iter()
        .flat_map_iter(|&i1| {
            let mut a2 = vec![0.0; nd];
            let mut a4 = vec![0.0; nd];
            let row1 = &dot[i1 * nd..(i1 + 1) * nd];
            let site = &site;
            let dot = &dot;
            let t24 = &t24;
            let r = &r;
            (0..nd).map(move |i3| {
                let row3 = &dot[i3 * nd..(i3 + 1) * nd];
                for k in 0..nd {
                    a2[k] = site[k] + r.bond[0][1] * row1[k] + r.bond[1][2] * row3[k];
                    a4[k] = site[k] + r.bond[0][3] * row1[k] + r.bond[2][3] * row3[k];
                }
                let mut best = (f64::INFINITY, 0, 0);
                for k2 in 0..nd {
                    let row = &t24[k2 * nd..(k2 + 1) * nd];
                    let v = a2[k2];
                    let m = row
                        .iter()
                        .zip(&a4)
                        .map(|(t, a)| t + a)
                        .fold(f64::INFINITY, f64::min);
                    if v + m < best.0 {
                        let k4 = (0..nd)
                            .min_by(|&x, &y| (row[x] + a4[x]).total_cmp(&(row[y] + a4[y])))
                            .expect("non-empty grid");
                        best = (v + m, k2, k4);
                    }
                }
                let base = site[i1] + site[i3] + r.bond[0][2] * row1[i3];
                (base + best.0, [i1, best.1, i3, best.2])
            })
        })
        .collect();
    coarse.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    coarse.truncate(grid.screen);

    // Coarse energies cannot see canting, and with anisotropy this weak every
    // rotated copy of the chain outranks the flopped state. The local search
    // therefore starts well below the grid spacing, so canting is resolved
    // before the anisotropy can drag a candidate into a neighbouring basin,
    // and a wide set is screened before the survivors are finished.
    let coarse_step = std::f64::consts::PI / grid.theta_steps as f64;
    let shrink = grid.refine_shrink;
    let final_step = coarse_step * shrink.powi(grid.refine_iters as i32);
    let start_step = coarse_step * shrink.powi((grid.refine_iters / 2) as i32);
    let screen_step = start_step * shrink.powi(2);
    let mut screened: Vec<Local> = coarse
        .par_iter()
        .map(|(_, idx)| {
            let mut x = [0.0; 2 * SITES];
            for n in 0..SITES {
                x[n] = dirs[idx[n]].0[0];
                x[n + SITES] = dirs[idx[n]].0[1];
            }
            pattern_search(&r, x, start_step, screen_step, coarse_step, shrink)
        })
        .collect();
    let screen_evals: usize = screened.iter().map(|t| t.evals).sum();
    screened.sort_by(|a, b| a.value.total_cmp(&b.value));
    screened.truncate(grid.candidates);

    let refined: Vec<Local> = screened
        .par_iter()
        .map(|l| pattern_search(&r, l.x, l.step, final_step, coarse_step, shrink))
        .collect();

    let evals = size as usize + screen_evals + refined.iter().map(|t| t.evals).sum::<usize>();
    let best = refined
        .into_iter()
        .reduce(|a, b| if b.value < a.value { b } else { a })
        .expect("at least one candidate");
    Ok(OptimizationResult {
        best_params: AnsatzParams::from_flat(&best.x)?.canonical(),
        best_energy: best.value,
        evals_used: evals,
        converged: true,
        start_label: StartLabel::Grid,
    })
}

struct Local {
    value: f64,
    x: [f64; 2 * SITES],
    step: f64,
    evals: usize,
}

/// Pattern search over the full 3⁸ stencil `x + step·{−1, 0, 1}⁸`. A step
/// that finds no better neighbour shrinks; two successful moves in a row
/// let it grow again, up to `max_step`. Stops once the step falls below
/// `stop`.
fn pattern_search(
    r: &Reference,
    mut x: [f64; 2 * SITES],
    mut step: f64,
    stop: f64,
    max_step: f64,
    shrink: f64,
) -> Local {
    const MAX_MOVES: usize = 100_000;
    let mut evals = 0;
    let mut streak = 0;
    for _ in 0..MAX_MOVES {
        if step < stop {
            break;
        }
        let (centre, fy, y) = best_neighbour(r, &x, step);
        evals += 6561;
        // improvements at the rounding level would let the search wander
        if fy < centre - 8.0 * f64::EPSILON * centre.abs().max(1.0) {
            x = y;
            streak += 1;
            if streak == 2 {
                step = (step / shrink).min(max_step);
                streak = 0;
            }
        } else {
            step *= shrink;
            streak = 0;
        }
    }
    Local {
        value: r.energy_of_angles(&x),
        x,
        step,
        evals,
    }
}

/// Energy at `x` and at its best stencil neighbour, with every per-site and
/// per-bond term tabulated for the nine (θ, φ) offsets of each site.
fn best_neighbour(r: &Reference, x: &[f64; 2 * SITES], step: f64) -> (f64, f64, [f64; 2 * SITES]) {
    let mut vec = [[[0.0; 3]; 9]; SITES];
    let mut site = [[0.0; 9]; SITES];
    for n in 0..SITES {
        for o in 0..9 {
            let t = x[n] + step * ((o / 3) as f64 - 1.0);
            let p = x[n + SITES] + step * ((o % 3) as f64 - 1.0);
            let (st, ct) = t.sin_cos();
            let (sp, cp) = p.sin_cos();
            vec[n][o] = [st * cp, st * sp, ct];
            site[n][o] = r.site(vec[n][o]);
        }
    }
    let pair = |i: usize, j: usize| {
        let mut t = [[0.0; 9]; 9];
        for (a, row) in t.iter_mut().enumerate() {
            for (b, v) in row.iter_mut().enumerate() {
                let (u, w) = (vec[i][a], vec[j][b]);
                *v = r.bond[i][j] * (u[0] * w[0] + u[1] * w[1] + u[2] * w[2]);
            }
        }
        t
    };
    let (p01, p02, p03, p12, p13, p23) = (pair(0, 1), pair(0, 2), pair(0, 3), pair(1, 2), pair(1, 3), pair(2, 3));
    let c = 4;
    let centre = site.iter().map(|s| s[c]).sum::<f64>()
        + p01[c][c] + p02[c][c] + p03[c][c] + p12[c][c] + p13[c][c] + p23[c][c];
    let mut best = (f64::INFINITY, [c; SITES]);
    for o0 in 0..9 {
        for o1 in 0..9 {
            let e01 = site[0][o0] + site[1][o1] + p01[o0][o1];
            for o2 in 0..9 {
                let e012 = e01 + site[2][o2] + p02[o0][o2] + p12[o1][o2];
                for o3 in 0..9 {
                    let e = e012 + site[3][o3] + p03[o0][o3] + p13[o1][o3] + p23[o2][o3];
                    if e < best.0 && [o0, o1, o2, o3] != [c; SITES] {
                        best = (e, [o0, o1, o2, o3]);
                    }
                }
            }
        }
    }
    let mut y = *x;
    for n in 0..SITES {
        y[n] += step * ((best.1[n] / 3) as f64 - 1.0);
        y[n + SITES] += step * ((best.1[n] % 3) as f64 - 1.0);
    }
    (centre, best.0, y)
}

fn pauli_matrix(p: Pauli) -> [[Complex64; 2]; 2] {
    let o = Complex64::new(1.0, 0.0);
    let z = Complex64::new(0.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match p {
        Pauli::I => [[o, z], [z, o]],
        Pauli::X => [[z, o], [o, z]],
        Pauli::Y => [[z, -i], [i, z]],
        Pauli::Z => [[o, z], [z, -o]],
    }
}

/// Row-major dense matrix of `op`, built from Kronecker products with qubit
/// 0 as the least significant index bit.
pub fn dense_matrix(op: &WeightedPauliSum) -> Result<Vec<Complex64>> {
    let n = op.qubits();
    if n > DENSE_MAX_QUBITS {
        return Err(Error::Config(format!(
            "dense reference limited to {DENSE_MAX_QUBITS} qubits, got {n}"
        )));
    }
    let dim = 1usize << n;
    let mut total = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (c, string) in op.iter() {
        let mut m = vec![Complex64::new(1.0, 0.0)];
        let mut d = 1;
        for &axis in string.axes() {
            let p = pauli_matrix(axis);
            let nd = 2 * d;
            let mut next = vec![Complex64::new(0.0, 0.0); nd * nd];
            for (r, s) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                if p[r][s] == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for i in 0..d {
                    for j in 0..d {
                        next[(r * d + i) * nd + s * d + j] = p[r][s] * m[i * d + j];
                    }
                }
            }
            m = next;
            d = nd;
        }
        for (t, v) in total.iter_mut().zip(&m) {
            *t += *c * v;
        }
    }
    Ok(total)
}

/// Normalized state with independent complex Gaussian amplitudes.
pub fn random_state(qubits: usize, rng: &mut ChaCha8Rng) -> Result<StateVector> {
    let dim = 1usize << qubits;
    let mut amps: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|a| *a /= norm);
    StateVector::from_amplitudes(amps)
}

/// Largest relative deviation, over `trials` random states, between the
/// engine's expectation of `op` and `⟨ψ|H|ψ⟩` with `H` built densely.
pub fn dense_crosscheck(op: &WeightedPauliSum, trials: usize, seed: u64) -> Result<f64> {
    let h = dense_matrix(op)?;
    let dim = 1usize << op.qubits();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let psi = random_state(op.qubits(), &mut rng)?;
        let a = psi.amplitudes();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..dim {
            let row = &h[i * dim..(i + 1) * dim];
            let hv: Complex64 = row.iter().zip(a).map(|(m, v)| m * v).sum();
            acc += a[i].conj() * hv;
        }
        let engine = psi.expectation(op)?;
        worst = worst.max((engine - acc.re).abs() / acc.re.abs().max(1.0));
    }
    Ok(worst)
}

/// Closed-form saturation field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturationField {
    /// Tesla; 0 when `degenerate`.
    pub field: f64,
    /// The formula gave no positive threshold.
    pub degenerate: bool,
}

/// Field at which the fully polarized state along b stops being unstable
/// against a symmetric tilt of sites 1 and 3 toward a, with sites 2 and 4
/// held along b:
///
/// `H₂ = [(J₁ + J′₁)s²/2 + 2J₂s² − 2(K_b − K_a)] / (g μ_B s)`,
///
/// which is `((J₁ + J′₁)/4 + J₂)/(2μ_B)` for `g = 2`, `s = 1/2` and no
/// anisotropy.
pub fn analytic_saturation_field(params: &ModelParams) -> Result<SaturationField> {
    params.validate()?;
    if !(params.j2 > 0.0) {
        return Err(Error::Config(format!(
            "model.j2 must be > 0 for an antiferromagnetic saturation barrier, got {}",
            params.j2
        )));
    }
    let s2 = params.s * params.s;
    let num = 0.5 * (params.j1 + params.j1p) * s2 + 2.0 * params.j2 * s2 - 2.0 * (params.kb - params.ka);
    let field = num / (params.g * BOHR_MAGNETON_MEV_PER_T * params.s);
    Ok(if field > 0.0 {
        SaturationField {
            field,
            degenerate: false,
        }
    } else {
        SaturationField {
            field: 0.0,
            degenerate: true,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::PauliString;
    use crate::model::{build_hamiltonian, classical_energy};
    use crate::solver::optimize_ground_state;
    use crate::OptimizerConfig;

    #[test]
    fn reference_energy_matches_closed_form() {
        let p = ModelParams::default();
        let f = FieldSpec::in_bc(3.0, 0.3);
        let r = Reference::new(&p, &f);
        let a = AnsatzParams {
            theta: [0.3, 1.2, 2.0, 2.9],
            phi: [0.1, -1.0, 2.5, 4.0],
        };
        let x = a.to_flat();
        let e = classical_energy(&p, &f, &a).unwrap();
        assert!((r.energy_of_angles(&x) - e).abs() < 1e-12);
    }

    #[test]
    fn zero_field_grid_minimum() {
        let r = grid_minimize(&ModelParams::default(), &FieldSpec::zero(), &GridSpec::default()).unwrap();
        assert!((r.best_energy + 38.30592).abs() < 1e-6, "{}", r.best_energy);
    }

    #[test]
    fn free_spins_align_with_field() {
        let p = ModelParams::free_spins();
        let f = FieldSpec::in_bc(2.0, 0.7);
        let r = grid_minimize(&p, &f, &GridSpec::default()).unwrap();
        let expect = -4.0 * p.g * BOHR_MAGNETON_MEV_PER_T * 2.0 * p.s;
        assert!((r.best_energy - expect).abs() < 1e-9);
    }

    #[test]
    fn branch_switches_across_flop() {
        let p = ModelParams::default();
        for (h, flopped) in [(1.22, false), (1.25, true)] {
            let r = grid_minimize(&p, &FieldSpec::along_b(h), &GridSpec::default()).unwrap();
            let m = r.best_params.bloch_vectors();
            assert_eq!(m[0][0].abs() > 0.9, flopped, "{h} T: {m:?}");
        }
    }

    #[test]
    fn agrees_with_solver() {
        let p = ModelParams::default();
        for h in [0.7, 2.0, 150.0] {
            let f = FieldSpec::along_b(h);
            let g = grid_minimize(&p, &f, &GridSpec::default()).unwrap();
            let s = optimize_ground_state(&p, &f, &OptimizerConfig::default(), None).unwrap();
            assert!((g.best_energy - s.best_energy).abs() < 1e-5, "{h}");
        }
    }

    #[test]
    fn budget_is_enforced() {
        let g = GridSpec {
            budget: 1000,
            ..Default::default()
        };
        let err = grid_minimize(&ModelParams::default(), &FieldSpec::zero(), &g).unwrap_err();
        assert!(err.to_string().contains("configurations"));
        let g = GridSpec {
            theta_steps: 3,
            ..Default::default()
        };
        assert!(grid_minimize(&ModelParams::default(), &FieldSpec::zero(), &g).is_err());
    }

    #[test]
    fn dense_single_z() {
        let op = WeightedPauliSum::from_terms(2, vec![(1.0, "ZI".parse().unwrap())]).unwrap();
        assert!(dense_crosscheck(&op, 20, 1).unwrap() <= 1e-12);
    }

    #[test]
    fn dense_identity_is_one() {
        let op = WeightedPauliSum::from_terms(3, vec![(1.0, PauliString::identity(3).unwrap())]).unwrap();
        let h = dense_matrix(&op).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..5 {
            let psi = random_state(3, &mut rng).unwrap();
            assert!((psi.expectation(&op).unwrap() - 1.0).abs() < 1e-14);
        }
        for i in 0..8 {
            assert_eq!(h[i * 8 + i], Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn dense_model_hamiltonian() {
        let h = build_hamiltonian(&ModelParams::default(), &FieldSpec::along_b(1.0)).unwrap();
        assert_eq!(h.len(), 34);
        assert!(dense_crosscheck(&h, 100, 9).unwrap() <= 1e-10);
    }

    #[test]
    fn dense_rejects_large_registers() {
        let op = WeightedPauliSum::new(13);
        assert!(matches!(dense_crosscheck(&op, 1, 0), Err(Error::Config(_))));
    }

    #[test]
    fn saturation_field_values() {
        let h = analytic_saturation_field(&ModelParams::default()).unwrap();
        assert!((h.field - 305.1).abs() < 0.05 && !h.degenerate, "{h:?}");
        let p = ModelParams {
            j1: 0.0,
            j1p: 0.0,
            ..Default::default()
        };
        assert!((analytic_saturation_field(&p).unwrap().field - 753.1).abs() < 0.1);
        let d = ModelParams::default();
        let p = ModelParams {
            j2: (d.j1 + d.j1p).abs() / 4.0,
            ..d
        };
        let h = analytic_saturation_field(&p).unwrap();
        assert_eq!(h, SaturationField { field: 0.0, degenerate: true });
    }
}
