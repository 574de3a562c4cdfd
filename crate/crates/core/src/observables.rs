//! Magnetization, torque, twin mixing and phase detection on top of solver
//! output. Everything here is double precision.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{FieldPlane, SITES};
use crate::solver::optimize_ground_state;
use crate::{FieldSpec, ModelParams, OptimizationResult, OptimizerConfig};

/// Default saturation threshold for [`classify_phase`].
pub const DEFAULT_EPS: f64 = 1e-3;

/// Moments at one field point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagnetizationRecord {
    pub field: FieldSpec,
    /// Bloch vectors in (a, b, c).
    pub per_site: [[f64; 3]; SITES],
    /// μ_B per Cu; `g·s` times the mean Bloch vector.
    pub m_avg: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorqueRecord {
    /// Radians from b toward c.
    pub alpha_h: f64,
    /// μ_B·T per Cu.
    pub tau_a: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhaseLabel {
    AfmChain,
    SpinFlop,
    HalfSaturated,
    Saturated,
    Other,
}

impl PhaseLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            PhaseLabel::AfmChain => "afm_chain",
            PhaseLabel::SpinFlop => "spin_flop",
            PhaseLabel::HalfSaturated => "half_saturated",
            PhaseLabel::Saturated => "saturated",
            PhaseLabel::Other => "other",
        }
    }
}

impl fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PhaseLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "afm_chain" => PhaseLabel::AfmChain,
            "spin_flop" => PhaseLabel::SpinFlop,
            "half_saturated" => PhaseLabel::HalfSaturated,
            "saturated" => PhaseLabel::Saturated,
            "other" => PhaseLabel::Other,
            _ => return Err(Error::Usage(format!("unknown phase label {s:?}"))),
        })
    }
}

/// Transition fields found in a field sweep.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PhaseReport {
    pub h_flop: Option<f64>,
    pub h1: Option<f64>,
    pub h2: Option<f64>,
    /// One per sweep point, consistent with the fields above.
    pub labels: Vec<PhaseLabel>,
}

fn scaled(v: [f64; 3], k: f64) -> [f64; 3] {
    [v[0] * k, v[1] * k, v[2] * k]
}

fn dot(u: [f64; 3], v: [f64; 3]) -> f64 {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

/// Builds the record from per-site Bloch vectors. When the field has no
/// a-component the ±a reflection is a symmetry; the branch with site 1 at
/// a ≥ 0 is kept so sweeps do not flicker between the two.
pub fn record_from_vectors(
    field: &FieldSpec,
    mut per_site: [[f64; 3]; SITES],
    gs: f64,
) -> MagnetizationRecord {
    if field.components()[0] == 0.0 && per_site[0][0] < 0.0 {
        for m in per_site.iter_mut() {
            m[0] = -m[0];
        }
    }
    let mut mean = [0.0; 3];
    for m in &per_site {
        for k in 0..3 {
            mean[k] += m[k];
        }
    }
    MagnetizationRecord {
        field: *field,
        per_site,
        m_avg: scaled(mean, gs / SITES as f64),
    }
}

pub fn magnetization(
    result: &OptimizationResult,
    params: &ModelParams,
    field: &FieldSpec,
) -> MagnetizationRecord {
    record_from_vectors(field, result.best_params.bloch_vectors(), params.g * params.s)
}

/// a-component of M × H for a field in the bc plane.
pub fn torque(record: &MagnetizationRecord) -> Result<TorqueRecord> {
    let alpha_h = record
        .field
        .bc_angle()
        .filter(|_| record.field.is_bc_plane())
        .ok_or_else(|| Error::Usage("torque needs a field in the bc plane".into()))?;
    let h = record.field.components();
    Ok(TorqueRecord {
        alpha_h,
        tau_a: record.m_avg[1] * h[2] - record.m_avg[2] * h[1],
    })
}

/// Lab field as seen by the minor twin: rotated by −90° about c.
pub fn minor_twin_field(field: &FieldSpec) -> FieldSpec {
    let d = field.direction();
    FieldSpec {
        magnitude: field.magnitude,
        alpha_h: 0.0,
        plane: FieldPlane::Direction([d[1], -d[0], d[2]]),
    }
}

fn rotate_back(v: [f64; 3]) -> [f64; 3] {
    [-v[1], v[0], v[2]]
}

/// Expresses a minor-twin record, computed in the rotated field, in the lab
/// frame of `lab_field`.
pub fn minor_twin_to_lab(minor: &MagnetizationRecord, lab_field: &FieldSpec) -> MagnetizationRecord {
    let mut per_site = minor.per_site;
    for m in per_site.iter_mut() {
        *m = rotate_back(*m);
    }
    MagnetizationRecord {
        field: *lab_field,
        per_site,
        m_avg: rotate_back(minor.m_avg),
    }
}

/// `fraction·majority + (1 − fraction)·minor`, site by site. Both records
/// must already be in the lab frame.
pub fn mix_records(
    majority: &MagnetizationRecord,
    minor: &MagnetizationRecord,
    fraction: f64,
) -> Result<MagnetizationRecord> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::Usage(format!(
            "twin fraction must lie in [0, 1], got {fraction}"
        )));
    }
    let mix = |a: [f64; 3], b: [f64; 3]| {
        let mut out = [0.0; 3];
        for k in 0..3 {
            out[k] = fraction * a[k] + (1.0 - fraction) * b[k];
        }
        out
    };
    let mut per_site = majority.per_site;
    for (n, m) in per_site.iter_mut().enumerate() {
        *m = mix(majority.per_site[n], minor.per_site[n]);
    }
    Ok(MagnetizationRecord {
        field: majority.field,
        per_site,
        m_avg: mix(majority.m_avg, minor.m_avg),
    })
}

/// Re-optimizes the minor twin in the rotated field and mixes it with
/// `majority` using `params.twin_fraction`.
pub fn mix_twins(
    majority: &MagnetizationRecord,
    params: &ModelParams,
    config: &OptimizerConfig,
) -> Result<MagnetizationRecord> {
    let f = params.twin_fraction;
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::Usage(format!(
            "twin fraction must lie in [0, 1], got {f}"
        )));
    }
    if f == 1.0 {
        return Ok(*majority);
    }
    let rotated = minor_twin_field(&majority.field);
    let r = optimize_ground_state(params, &rotated, config, None)?;
    let minor = magnetization(&r, params, &rotated);
    mix_records(majority, &minor_twin_to_lab(&minor, &majority.field), f)
}

/// Angle by which the moments lean toward the field, from the mean
/// projection of the Bloch vectors on the field direction (radians).
pub fn canting_angle(record: &MagnetizationRecord) -> f64 {
    let d = field_axis(&record.field);
    let mean = record.per_site.iter().map(|m| dot(*m, d)).sum::<f64>() / SITES as f64;
    mean.clamp(-1.0, 1.0).asin()
}

fn field_axis(field: &FieldSpec) -> [f64; 3] {
    if field.magnitude > 0.0 {
        field.direction()
    } else {
        [0.0, 1.0, 0.0]
    }
}

/// Labels one point. Saturation is measured along the field (along b at
/// zero field, where only full saturation is considered). Half saturation
/// needs the two remaining sites to lean toward the field, which keeps an
/// AFM chain lying along the field out of that class. Unsaturated states
/// are told apart by the dominant axis of each site's deviation from the
/// mean moment: ±a everywhere is a spin flop, ±b everywhere an AFM chain.
pub fn classify_phase(record: &MagnetizationRecord, eps: f64) -> Result<PhaseLabel> {
    if !(eps > 0.0 && eps < 0.1) {
        return Err(Error::Usage(format!("eps must lie in (0, 0.1), got {eps}")));
    }
    let d = field_axis(&record.field);
    let aligned = record
        .per_site
        .iter()
        .filter(|m| dot(**m, d) > 1.0 - eps)
        .count();
    if aligned == SITES {
        return Ok(PhaseLabel::Saturated);
    }
    let others_lean_in = record
        .per_site
        .iter()
        .all(|m| dot(*m, d) > eps);
    if aligned == 2 && others_lean_in && record.field.magnitude > 0.0 {
        return Ok(PhaseLabel::HalfSaturated);
    }

    let mut mean = [0.0; 3];
    for m in &record.per_site {
        for k in 0..3 {
            mean[k] += m[k] / SITES as f64;
        }
    }
    let mut axis = None;
    for m in &record.per_site {
        let dev = [m[0] - mean[0], m[1] - mean[1], m[2] - mean[2]];
        let k = (0..3)
            .max_by(|&i, &j| dev[i].abs().total_cmp(&dev[j].abs()))
            .expect("three axes");
        if dev[k].abs() < eps || axis.is_some_and(|a| a != k) {
            return Ok(PhaseLabel::Other);
        }
        axis = Some(k);
    }
    Ok(match axis {
        Some(0) => PhaseLabel::SpinFlop,
        Some(1) => PhaseLabel::AfmChain,
        _ => PhaseLabel::Other,
    })
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Finds the spin-flop, half-saturation and saturation fields in a sweep
/// ordered by increasing field magnitude. Zero-field points are labelled but
/// take no part in detection.
///
/// * `h_flop`: midpoint of the step where the label turns from `afm_chain`
///   to `spin_flop`. If the two labels are separated by ambiguous points,
///   the largest step in the parallel moment between them is used, provided
///   it exceeds five times the median step.
/// * `h2`: onset of full saturation. The saturation deficit of the least
///   aligned site is extrapolated linearly to zero from the two points
///   below the first `saturated` label, so the result does not depend on
///   the saturation threshold.
/// * `h1`: reported only when a `half_saturated` label occurs. It is the
///   knee of the parallel moment where half the sites lock onto the field,
///   located as the most negative second difference between the spin flop
///   and saturation, refined with a parabola.
pub fn detect_transitions(sweep: &[MagnetizationRecord]) -> Result<PhaseReport> {
    for w in sweep.windows(2) {
        if !(w[1].field.magnitude > w[0].field.magnitude) {
            return Err(Error::Usage(format!(
                "sweep must be ordered by increasing field ({} T followed by {} T)",
                w[0].field.magnitude, w[1].field.magnitude
            )));
        }
    }
    let raw = sweep
        .iter()
        .map(|r| classify_phase(r, DEFAULT_EPS))
        .collect::<Result<Vec<_>>>()?;
    let h: Vec<f64> = sweep.iter().map(|r| r.field.magnitude).collect();
    let m: Vec<f64> = sweep
        .iter()
        .map(|r| dot(r.m_avg, field_axis(&r.field)))
        .collect();
    let start = h.iter().position(|&x| x > 0.0).unwrap_or(h.len());
    let live = start..h.len();

    let first = |label: PhaseLabel| live.clone().find(|&i| raw[i] == label);

    let mut h_flop = None;
    let mut flop_idx = None;
    if let Some(sf) = first(PhaseLabel::SpinFlop) {
        if let Some(chain) = (start..sf).rev().find(|&i| raw[i] == PhaseLabel::AfmChain) {
            flop_idx = Some(sf);
            if chain + 1 == sf {
                h_flop = Some(0.5 * (h[chain] + h[sf]));
            } else {
                let steps: Vec<f64> = (start + 1..h.len()).map(|i| (m[i] - m[i - 1]).abs()).collect();
                let med = median(steps);
                let (j, jump) = (chain + 1..=sf)
                    .map(|i| (i, (m[i] - m[i - 1]).abs()))
                    .max_by(|a, b| a.1.total_cmp(&b.1))
                    .expect("non-empty interval");
                if jump > 5.0 * med {
                    h_flop = Some(0.5 * (h[j - 1] + h[j]));
                }
            }
        }
    }

    let mut h2 = None;
    let mut sat_idx = None;
    if let Some(i) = live
        .clone()
        .skip(1)
        .find(|&i| raw[i] == PhaseLabel::Saturated && raw[i - 1] != PhaseLabel::Saturated)
    {
        sat_idx = Some(i);
        let deficit = |j: usize| {
            let d = field_axis(&sweep[j].field);
            sweep[j]
                .per_site
                .iter()
                .map(|v| 1.0 - dot(*v, d))
                .fold(0.0, f64::max)
        };
        let mut est = 0.5 * (h[i - 1] + h[i]);
        if i >= start + 2 {
            let (d1, d2) = (deficit(i - 2), deficit(i - 1));
            if d1 > d2 && d2 > 0.0 {
                let x = h[i - 1] + d2 * (h[i - 1] - h[i - 2]) / (d1 - d2);
                if x.is_finite() {
                    est = x.clamp(h[i - 1], h[h.len() - 1]);
                }
            }
        }
        h2 = Some(est);
    }

    let mut h1 = None;
    if raw.contains(&PhaseLabel::HalfSaturated) {
        let lo = flop_idx.map_or(start + 1, |f| f + 1).max(start + 1);
        let hi = sat_idx.map_or(h.len().saturating_sub(1), |s| s.saturating_sub(2));
        let second = |k: usize| m[k + 1] - 2.0 * m[k] + m[k - 1];
        if let Some(k) = (lo..hi).min_by(|&a, &b| second(a).total_cmp(&second(b))) {
            let mut x = h[k];
            if k > lo && k + 1 < hi {
                let (a, b, c) = (second(k - 1), second(k), second(k + 1));
                let den = a - 2.0 * b + c;
                if den > 0.0 {
                    let off = 0.5 * (a - c) / den;
                    x += off.clamp(-0.5, 0.5) * 0.5 * (h[k + 1] - h[k - 1]);
                }
            }
            h1 = Some(x);
        }
    }

    let labels = raw
        .iter()
        .zip(&h)
        .enumerate()
        .map(|(i, (&l, &x))| {
            if i < start {
                l
            } else if h2.is_some_and(|v| x >= v) {
                PhaseLabel::Saturated
            } else if h1.is_some_and(|v| x >= v) {
                PhaseLabel::HalfSaturated
            } else if let Some(v) = h_flop {
                if x >= v {
                    PhaseLabel::SpinFlop
                } else {
                    PhaseLabel::AfmChain
                }
            } else {
                l
            }
        })
        .collect();

    Ok(PhaseReport {
        h_flop,
        h1,
        h2,
        labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::warm_start_sweep;
    use crate::AnsatzParams;

    fn record(field: FieldSpec, per_site: [[f64; 3]; SITES]) -> MagnetizationRecord {
        record_from_vectors(&field, per_site, 1.0)
    }

    #[test]
    fn all_along_b_is_one_bohr_magneton() {
        let r = record(FieldSpec::along_b(1.0), [[0.0, 1.0, 0.0]; SITES]);
        assert_eq!(r.m_avg, [0.0, 1.0, 0.0]);
        assert_eq!(classify_phase(&r, DEFAULT_EPS).unwrap(), PhaseLabel::Saturated);
    }

    #[test]
    fn chain_state_cancels() {
        let a = AnsatzParams::b_chain();
        let r = record(FieldSpec::zero(), a.bloch_vectors());
        for k in 0..3 {
            assert!(r.m_avg[k].abs() < 1e-15);
        }
        assert_eq!(classify_phase(&r, DEFAULT_EPS).unwrap(), PhaseLabel::AfmChain);
    }

    #[test]
    fn half_saturated_example() {
        let s = (1.0f64 - 0.49).sqrt();
        let r = record(
            FieldSpec::along_b(200.0),
            [[s, 0.7, 0.0], [0.0, 1.0, 0.0], [-s, 0.7, 0.0], [0.0, 1.0, 0.0]],
        );
        assert_eq!(classify_phase(&r, DEFAULT_EPS).unwrap(), PhaseLabel::HalfSaturated);
    }

    #[test]
    fn flop_and_ambiguous_labels() {
        let c = 0.1f64;
        let s = (1.0 - c * c).sqrt();
        let flop = record(
            FieldSpec::along_b(2.0),
            [[s, c, 0.0], [s, c, 0.0], [-s, c, 0.0], [-s, c, 0.0]],
        );
        assert_eq!(classify_phase(&flop, DEFAULT_EPS).unwrap(), PhaseLabel::SpinFlop);
        let mixed = record(
            FieldSpec::along_b(2.0),
            [[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [-1.0, 0.0, 0.0], [0.0, 0.0, -1.0]],
        );
        assert_eq!(classify_phase(&mixed, DEFAULT_EPS).unwrap(), PhaseLabel::Other);
        assert!(classify_phase(&flop, 0.2).is_err());
    }

    #[test]
    fn sign_canonicalized_when_field_has_no_a_component() {
        let r = record(
            FieldSpec::along_b(2.0),
            [[-1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0]],
        );
        assert_eq!(r.per_site[0][0], 1.0);
        let r = record(FieldSpec::along_a(2.0), [[-1.0, 0.0, 0.0]; SITES]);
        assert_eq!(r.per_site[0][0], -1.0);
    }

    #[test]
    fn torque_of_quoted_moments() {
        let mut r = record(FieldSpec::in_bc(1.0, 45f64.to_radians()), [[0.0; 3]; SITES]);
        r.m_avg = [0.0, 0.000831, 0.00403];
        let t = torque(&r).unwrap();
        assert!((t.tau_a + 2.262e-3).abs() < 1e-6, "{}", t.tau_a);
    }

    #[test]
    fn torque_vanishes_for_parallel_moment() {
        for alpha in [0.0, std::f64::consts::FRAC_PI_2] {
            let f = FieldSpec::in_bc(1.0, alpha);
            let d = f.direction();
            let r = record(f, [d; SITES]);
            assert_eq!(torque(&r).unwrap().tau_a, 0.0);
        }
    }

    #[test]
    fn torque_rejects_off_plane_field() {
        let r = record(FieldSpec::along_a(1.0), [[1.0, 0.0, 0.0]; SITES]);
        assert!(matches!(torque(&r), Err(Error::Usage(_))));
    }

    #[test]
    fn twin_rotation_round_trip() {
        let f = FieldSpec::along_b(1.0);
        let rf = minor_twin_field(&f);
        assert_eq!(rf.direction(), [1.0, 0.0, 0.0]);
        let minor = record(rf, [[1.0, 0.0, 0.0]; SITES]);
        let lab = minor_twin_to_lab(&minor, &f);
        assert_eq!(lab.per_site[0], [0.0, 1.0, 0.0]);
        assert_eq!(lab.m_avg, [0.0, 1.0, 0.0]);
    }

    #[test]
    fn full_majority_fraction_is_identity() {
        let p = ModelParams {
            twin_fraction: 1.0,
            ..Default::default()
        };
        let r = record(FieldSpec::along_b(0.5), AnsatzParams::b_chain().bloch_vectors());
        assert_eq!(mix_twins(&r, &p, &OptimizerConfig::default()).unwrap(), r);
    }

    #[test]
    fn minor_twin_gives_low_field_slope() {
        let p = ModelParams::default();
        let cfg = OptimizerConfig::default();
        let f = FieldSpec::along_b(0.5);
        let maj = magnetization(&optimize_ground_state(&p, &f, &cfg, None).unwrap(), &p, &f);
        assert!(maj.m_avg[1].abs() < 1e-7);
        let mixed = mix_twins(&maj, &p, &cfg).unwrap();
        assert!(mixed.m_avg[1] > 1e-4, "{:?}", mixed.m_avg);
    }

    #[test]
    fn unordered_sweep_rejected() {
        let a = record(FieldSpec::along_b(1.0), [[0.0, 1.0, 0.0]; SITES]);
        let b = record(FieldSpec::along_b(0.5), [[0.0, 1.0, 0.0]; SITES]);
        assert!(matches!(detect_transitions(&[a, b]), Err(Error::Usage(_))));
    }

    #[test]
    fn free_spins_show_no_transitions() {
        let p = ModelParams::free_spins();
        let cfg = OptimizerConfig::default();
        let fields: Vec<_> = (1..=20).map(|i| FieldSpec::along_b(0.25 * i as f64)).collect();
        let recs: Vec<_> = warm_start_sweep(&p, &fields, &cfg)
            .unwrap()
            .iter()
            .zip(&fields)
            .map(|(r, f)| magnetization(r, &p, f))
            .collect();
        let rep = detect_transitions(&recs).unwrap();
        assert_eq!((rep.h_flop, rep.h1, rep.h2), (None, None, None));
        assert!(rep.labels.iter().all(|&l| l == PhaseLabel::Saturated));
    }

    #[test]
    fn synthetic_flop_detected_at_midpoint() {
        let c = 0.2f64;
        let s = (1.0 - c * c).sqrt();
        let recs: Vec<_> = (0..10)
            .map(|i| {
                let f = FieldSpec::along_b(0.1 * i as f64);
                if i < 6 {
                    record(f, AnsatzParams::b_chain().bloch_vectors())
                } else {
                    record(f, [[s, c, 0.0], [s, c, 0.0], [-s, c, 0.0], [-s, c, 0.0]])
                }
            })
            .collect();
        let rep = detect_transitions(&recs).unwrap();
        assert!((rep.h_flop.unwrap() - 0.55).abs() < 1e-12);
        assert_eq!(rep.labels[5], PhaseLabel::AfmChain);
        assert_eq!(rep.labels[6], PhaseLabel::SpinFlop);
    }

    #[test]
    fn label_round_trip() {
        for l in [
            PhaseLabel::AfmChain,
            PhaseLabel::SpinFlop,
            PhaseLabel::HalfSaturated,
            PhaseLabel::Saturated,
            PhaseLabel::Other,
        ] {
            assert_eq!(l.as_str().parse::<PhaseLabel>().unwrap(), l);
        }
    }
}
