use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::observables::PhaseLabel;
use crate::EnergyBreakdown;

/// One CSV row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub field_t: f64,
    /// NaN when the field is not in the bc plane.
    pub alpha_deg: f64,
    pub m_avg: [f64; 3],
    /// b-components of the four site moments.
    pub y: [f64; 4],
    pub energy: EnergyBreakdown,
    /// NaN when the field is not in the bc plane.
    pub tau: f64,
    pub phase: PhaseLabel,
    pub converged: bool,
}

pub const CSV_HEADER: &str = "field_T,alpha_deg,m_a_muB,m_b_muB,m_c_muB,y1,y2,y3,y4,\
e_j1,e_j1p,e_j2,e_j2p,e_zeeman,e_mca,e_total,e_mca_per_site,tau_muB_T,phase,converged";

/// Shortest of fixed or exponent notation with 12 significant digits,
/// trailing zeros removed (C's `%.12g`).
pub fn fmt_g(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    const DIGITS: i32 = 12;
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..DIGITS).contains(&exp) {
        let fixed = format!("{:.*}", (DIGITS - 1 - exp).max(0) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn render_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(256 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let e = &r.energy;
        let nums = [
            r.field_t,
            r.alpha_deg,
            r.m_avg[0],
            r.m_avg[1],
            r.m_avg[2],
            r.y[0],
            r.y[1],
            r.y[2],
            r.y[3],
            e.e_j1,
            e.e_j1p,
            e.e_j2,
            e.e_j2p,
            e.e_zeeman,
            e.e_mca,
            e.total,
            e.per_site().e_mca,
            r.tau,
        ];
        for v in nums {
            out.push_str(&fmt_g(v));
            out.push(',');
        }
        let _ = writeln!(out, "{},{}", r.phase, r.converged);
    }
    out
}

/// Writes the sweep table. Refuses an empty table without touching the
/// file system.
pub fn emit_csv(rows: &[SweepRow], path: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Usage("no sweep rows to write".into()));
    }
    std::fs::write(path, render_csv(rows))?;
    Ok(())
}

/// Minimal SVG line chart of `ys` against `xs`.
pub fn render_svg(xs: &[f64], ys: &[f64], x_label: &str, y_label: &str) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const PAD: f64 = 60.0;
    let finite: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .map(|(x, y)| (*x, *y))
        .collect();
    let range = |v: &mut dyn Iterator<Item = f64>| {
        let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
        if !lo.is_finite() {
            (0.0, 1.0)
        } else if hi - lo < 1e-300 {
            (lo - 0.5, hi + 0.5)
        } else {
            (lo, hi)
        }
    };
    let (x0, x1) = range(&mut finite.iter().map(|p| p.0));
    let (y0, y1) = range(&mut finite.iter().map(|p| p.1));
    let px = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let py = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * PAD,
        H - 2.0 * PAD
    );
    let points: Vec<String> = finite
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
        .collect();
    let _ = writeln!(
        s,
        r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{}"/>"#,
        points.join(" ")
    );
    for (x, anchor, v) in [(PAD, "start", x0), (W - PAD, "end", x1)] {
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{}" text-anchor="{anchor}">{}</text>"#,
            H - PAD + 16.0,
            fmt_g(v)
        );
    }
    for (y, v) in [(H - PAD, y0), (PAD + 4.0, y1)] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{y}" text-anchor="end">{}</text>"#,
            PAD - 6.0,
            fmt_g(v)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{x_label}</text>"#,
        W / 2.0,
        H - 20.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{y_label}</text>"#,
        H / 2.0,
        H / 2.0
    );
    s.push_str("</svg>\n");
    s
}
