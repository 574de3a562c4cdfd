use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::SweepMode;
use crate::{FieldSpec, ModelParams, OptimizerConfig};

/// Shipped default configuration.
pub const DEFAULT_CONFIG: &str = include_str!("../../../../configs/default.toml");

/// `kb / |j1|` of the shipped parameter set.
pub const DEFAULT_ANISOTROPY_RATIO: f64 = 2.205e-6;

/// What the sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    FieldB,
    FieldA,
    FieldC,
    /// Fixed magnitude rotating in the bc plane; range in degrees.
    AngleBc,
    /// Same geometry as `field_b`, meant for the range up to saturation.
    HighField,
}

impl SweepKind {
    pub fn is_angle(self) -> bool {
        self == SweepKind::AngleBc
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub kind: SweepKind,
    /// Tesla for field sweeps, degrees for angle sweeps.
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    /// Field magnitude for angle sweeps (T).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_magnitude: Option<f64>,
    #[serde(default)]
    pub mode: SweepMode,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("sweep.start", self.start),
            ("sweep.stop", self.stop),
            ("sweep.step", self.step),
        ] {
            if !v.is_finite() {
                return Err(Error::Config(format!("{name} must be finite, got {v}")));
            }
        }
        if self.step <= 0.0 {
            return Err(Error::Config(format!("sweep.step must be > 0, got {}", self.step)));
        }
        if self.start > self.stop {
            return Err(Error::Config(format!(
                "sweep.start ({}) must not exceed sweep.stop ({})",
                self.start, self.stop
            )));
        }
        if self.kind.is_angle() {
            match self.fixed_magnitude {
                Some(h) if h > 0.0 && h.is_finite() => {}
                other => {
                    return Err(Error::Config(format!(
                        "sweep.fixed_magnitude must be > 0 for angle sweeps, got {other:?}"
                    )))
                }
            }
        } else if self.start < 0.0 {
            return Err(Error::Config(format!(
                "sweep.start must be >= 0 for field sweeps, got {}",
                self.start
            )));
        }
        Ok(())
    }

    /// Sweep coordinates: `start + i·step` up to `stop`, with a small
    /// allowance so a stop value on the lattice is not lost to rounding.
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start + i as f64 * self.step).collect()
    }

    pub fn field_at(&self, x: f64) -> FieldSpec {
        match self.kind {
            SweepKind::FieldB | SweepKind::HighField => FieldSpec::along_b(x),
            SweepKind::FieldA => FieldSpec::along_a(x),
            SweepKind::FieldC => FieldSpec::along_c(x),
            SweepKind::AngleBc => {
                FieldSpec::in_bc(self.fixed_magnitude.unwrap_or(0.0), x.to_radians())
            }
        }
    }

    pub fn fields(&self) -> Vec<FieldSpec> {
        self.points().into_iter().map(|x| self.field_at(x)).collect()
    }
}

/// Everything one `sweep` invocation needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Stem of the output file names.
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Mix in the minor twin domain with `model.twin_fraction`.
    #[serde(default)]
    pub twins: bool,
    /// Shots per Pauli term for the sampled-energy table; none skips it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    #[serde(default)]
    pub emit_plots: bool,
    #[serde(default)]
    pub model: ModelParams,
    pub sweep: SweepConfig,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
}

fn default_name() -> String {
    "sweep".into()
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn shipped_default() -> Self {
        Self::parse(DEFAULT_CONFIG).expect("shipped default config parses")
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(Error::Config(format!(
                "name must be a plain file stem, got {:?}",
                self.name
            )));
        }
        if self.shots == Some(0) {
            return Err(Error::Config("shots must be >= 1 when given".into()));
        }
        self.model.validate()?;
        self.sweep.validate()?;
        self.optimizer.validate()
    }

    pub fn apply_recipe(&mut self, recipe: Recipe) {
        let (name, kind, start, stop, step, fixed, twins) = match recipe {
            Recipe::Fig3 => ("fig3", SweepKind::FieldB, 0.0, 3.5, 0.01, None, true),
            Recipe::Fig4 => ("fig4", SweepKind::HighField, 0.0, 400.0, 0.5, None, false),
            Recipe::Fig5a => ("fig5a", SweepKind::AngleBc, 0.0, 360.0, 1.0, Some(1.0), false),
            Recipe::Fig5b => ("fig5b", SweepKind::AngleBc, 0.0, 360.0, 1.0, Some(1.5), false),
            Recipe::FigS4 => ("figS4", SweepKind::FieldA, 0.0, 3.5, 0.01, None, true),
        };
        self.name = name.into();
        self.twins = twins;
        self.sweep = SweepConfig {
            kind,
            start,
            stop,
            step,
            fixed_magnitude: fixed,
            mode: self.sweep.mode,
        };
    }
}

/// Built-in sweep settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Recipe {
    /// b-axis magnetization through the spin flop, twins mixed in.
    Fig3,
    /// b-axis magnetization up to full saturation.
    Fig4,
    /// Torque under bc-plane rotation at 1 T.
    Fig5a,
    /// Torque under bc-plane rotation at 1.5 T.
    Fig5b,
    /// a-axis magnetization, twins mixed in.
    FigS4,
}

impl FromStr for Recipe {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "fig3" => Recipe::Fig3,
            "fig4" => Recipe::Fig4,
            "fig5a" => Recipe::Fig5a,
            "fig5b" => Recipe::Fig5b,
            "figs4" => Recipe::FigS4,
            _ => {
                return Err(Error::Config(format!(
                    "unknown recipe {s:?} (expected fig3, fig4, fig5a, fig5b or figS4)"
                )))
            }
        })
    }
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Recipe::Fig3 => "fig3",
            Recipe::Fig4 => "fig4",
            Recipe::Fig5a => "fig5a",
            Recipe::Fig5b => "fig5b",
            Recipe::FigS4 => "figS4",
        })
    }
}

/// Refuses to start when the shipped parameters drift from the reference
/// anisotropy ratio.
pub fn check_default_ratio() -> Result<()> {
    let r = RunConfig::shipped_default().model.anisotropy_ratio();
    if (r - DEFAULT_ANISOTROPY_RATIO).abs() >= 5e-10 {
        return Err(Error::Invariant(format!(
            "default kb/|j1| = {r:.6e}, expected {DEFAULT_ANISOTROPY_RATIO:e}"
        )));
    }
    Ok(())
}
