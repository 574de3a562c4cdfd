use std::path::PathBuf;

use serde::Serialize;

use super::config::{RunConfig, SweepKind};
use super::output::{emit_csv, fmt_g, render_svg, SweepRow};
use super::shots::sample_breakdown;
use crate::error::{Error, Result};
use crate::model::energy_breakdown;
use crate::observables::{
    classify_phase, detect_transitions, magnetization, minor_twin_field, minor_twin_to_lab,
    mix_records, torque, PhaseReport, DEFAULT_EPS,
};
use crate::oracle::analytic_saturation_field;
use crate::solver::sweep;

/// Everything a sweep produced.
#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    pub report: PhaseReport,
    pub all_converged: bool,
    pub files: Vec<PathBuf>,
}

#[derive(Serialize)]
struct PhaseFile {
    kind: SweepKind,
    points: usize,
    converged_points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    h_flop_t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    h1_t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    h2_t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    analytic_h2_t: Option<f64>,
}

/// Runs the sweep without writing anything.
pub fn compute(config: &RunConfig) -> Result<SweepOutput> {
    config.validate()?;
    let model = &config.model;
    let opt = &config.optimizer;
    let fields = config.sweep.fields();
    let mode = config.sweep.mode;

    let major = sweep(model, &fields, opt, mode)?;
    let mut records: Vec<_> = major
        .iter()
        .zip(&fields)
        .map(|(r, f)| magnetization(r, model, f))
        .collect();
    let mut converged: Vec<bool> = major.iter().map(|r| r.converged).collect();

    if config.twins && model.twin_fraction < 1.0 {
        let rotated: Vec<_> = fields.iter().map(minor_twin_field).collect();
        let minor = sweep(model, &rotated, opt, mode)?;
        for (i, r) in minor.iter().enumerate() {
            let m = minor_twin_to_lab(&magnetization(r, model, &rotated[i]), &fields[i]);
            records[i] = mix_records(&records[i], &m, model.twin_fraction)?;
            converged[i] &= r.converged;
        }
    }

    let report = if config.sweep.kind.is_angle() {
        PhaseReport {
            labels: records
                .iter()
                .map(|r| classify_phase(r, DEFAULT_EPS))
                .collect::<Result<_>>()?,
            ..Default::default()
        }
    } else {
        detect_transitions(&records)?
    };

    let mut rows = Vec::with_capacity(records.len());
    for (i, rec) in records.iter().enumerate() {
        let f = &fields[i];
        rows.push(SweepRow {
            field_t: f.magnitude,
            alpha_deg: f
                .bc_angle()
                .filter(|_| f.is_bc_plane())
                .map_or(f64::NAN, f64::to_degrees),
            m_avg: rec.m_avg,
            y: rec.per_site.map(|m| m[1]),
            energy: energy_breakdown(model, f, &major[i].best_params)?,
            tau: torque(rec).map_or(f64::NAN, |t| t.tau_a),
            phase: report.labels[i],
            converged: converged[i],
        });
    }
    Ok(SweepOutput {
        all_converged: converged.iter().all(|&c| c),
        rows,
        report,
        files: Vec::new(),
    })
}

/// Runs the sweep and writes the CSV, the phase report and, when asked for,
/// the shot table and SVG plots into `config.output_dir`.
pub fn run(config: &RunConfig) -> Result<SweepOutput> {
    let mut out = compute(config)?;
    let dir = &config.output_dir;
    std::fs::create_dir_all(dir)?;
    let stem = &config.name;

    let csv = dir.join(format!("{stem}.csv"));
    emit_csv(&out.rows, &csv)?;
    out.files.push(csv);

    let kind = config.sweep.kind;
    let along_b = matches!(kind, SweepKind::FieldB | SweepKind::HighField);
    let phases = PhaseFile {
        kind,
        points: out.rows.len(),
        converged_points: out.rows.iter().filter(|r| r.converged).count(),
        h_flop_t: out.report.h_flop,
        h1_t: out.report.h1,
        h2_t: out.report.h2,
        analytic_h2_t: if along_b && config.model.j2 > 0.0 {
            analytic_saturation_field(&config.model)?
                .field
                .into()
        } else {
            None
        },
    };
    let path = dir.join(format!("{stem}_phases.toml"));
    let text = toml::to_string(&phases).map_err(|e| Error::Invariant(e.to_string()))?;
    std::fs::write(&path, text)?;
    out.files.push(path);

    if let Some(shots) = config.shots {
        let path = dir.join(format!("{stem}_shots.csv"));
        std::fs::write(&path, shot_table(config, shots)?)?;
        out.files.push(path);
    }

    if config.emit_plots {
        let (xs, x_label): (Vec<f64>, &str) = if kind.is_angle() {
            (out.rows.iter().map(|r| r.alpha_deg).collect(), "alpha_H (deg)")
        } else {
            (out.rows.iter().map(|r| r.field_t).collect(), "H (T)")
        };
        let mut plots = vec![("energy", out.rows.iter().map(|r| r.energy.total).collect::<Vec<_>>(), "E (meV)")];
        let k = match kind {
            SweepKind::FieldA => 0,
            SweepKind::FieldC => 2,
            _ => 1,
        };
        let m_label = ["M_a (muB/Cu)", "M_b (muB/Cu)", "M_c (muB/Cu)"][k];
        plots.push(("m", out.rows.iter().map(|r| r.m_avg[k]).collect(), m_label));
        if kind.is_angle() {
            plots.push(("torque", out.rows.iter().map(|r| r.tau).collect(), "tau_a (muB T/Cu)"));
        }
        for (suffix, ys, y_label) in plots {
            let path = dir.join(format!("{stem}_{suffix}.svg"));
            std::fs::write(&path, render_svg(&xs, &ys, x_label, y_label))?;
            out.files.push(path);
        }
    }
    Ok(out)
}

fn shot_table(config: &RunConfig, shots: u64) -> Result<String> {
    let fields = config.sweep.fields();
    let gs = sweep(&config.model, &fields, &config.optimizer, config.sweep.mode)?;
    let mut s = String::from(
        "field_T,alpha_deg,e_exchange,e_exchange_est,sigma_exchange,e_mca,e_mca_est,sigma_mca,e_total,e_total_est,sigma_total\n",
    );
    for (i, (f, r)) in fields.iter().zip(&gs).enumerate() {
        let b = sample_breakdown(
            &config.model,
            f,
            &r.best_params,
            shots,
            config.optimizer.seed.wrapping_add(i as u64),
        )?;
        let alpha = f.bc_angle().filter(|_| f.is_bc_plane()).map_or(f64::NAN, f64::to_degrees);
        let cells: Vec<String> = [
            f.magnitude,
            alpha,
            b.exchange.exact,
            b.exchange.estimate,
            b.exchange.sigma,
            b.mca.exact,
            b.mca.estimate,
            b.mca.sigma,
            b.total.exact,
            b.total.estimate,
            b.total.sigma,
        ]
        .iter()
        .map(|&v| fmt_g(v))
        .collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    Ok(s)
}
