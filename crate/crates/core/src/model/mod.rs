//! Four-site frustrated spin-1/2 cluster with ancilla-encoded anisotropy.
//!
//! Sites 1–4 sit on the system qubits 0–3 and their ancillas on qubits 4–7.
//! Pauli X, Y, Z map to the crystal axes a, b, c. Bonds (1,2) and (3,4) carry
//! `j1` (chains along b), bonds (2,3) and (4,1) carry `j1p`, and the two
//! diagonals carry `j2` (1–3) and `j2p` (2–4).

mod classical;
mod hamiltonian;

pub use classical::{
    bloch_vector, classical_energy, classical_gradient, energy_breakdown, ClassicalModel,
    EnergyBreakdown,
};
pub use hamiltonian::{build_hamiltonian, build_labeled_hamiltonian, ModelHamiltonian, TermGroup};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Bohr magneton in meV/T.
pub const BOHR_MAGNETON_MEV_PER_T: f64 = 0.057_883_818_06;

/// Number of physical spin sites.
pub const SITES: usize = 4;

/// Register size: one system qubit and one ancilla per site.
pub const REGISTER_QUBITS: usize = 2 * SITES;

/// Exchange, anisotropy and moment parameters. Energies in meV; negative
/// exchange is ferromagnetic.
/// Missing keys take their default values when deserialized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct ModelParams<T> {
    pub j1: T,
    pub j1p: T,
    pub j2: T,
    pub j2p: T,
    pub ka: T,
    pub kb: T,
    pub kc: T,
    pub g: T,
    pub s: T,
    pub twin_fraction: T,
}

impl<T: Scalar> Default for ModelParams<T> {
    /// The fitted CuSb₂O₆ parameter set.
    fn default() -> Self {
        Self {
            j1: T::lit(-104.30),
            j1p: T::lit(-103.13),
            j2: T::lit(87.18),
            j2p: T::lit(64.87),
            ka: T::lit(0.000012),
            kb: T::lit(0.00023),
            kc: T::lit(0.00010),
            g: T::lit(2.0),
            s: T::lit(0.5),
            twin_fraction: T::lit(0.8),
        }
    }
}

impl<T: Scalar> ModelParams<T> {
    /// Every coupling and anisotropy constant set to zero, leaving free spins.
    pub fn free_spins() -> Self {
        let z = T::zero();
        Self {
            j1: z,
            j1p: z,
            j2: z,
            j2p: z,
            ka: z,
            kb: z,
            kc: z,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("j1", self.j1),
            ("j1p", self.j1p),
            ("j2", self.j2),
            ("j2p", self.j2p),
            ("ka", self.ka),
            ("kb", self.kb),
            ("kc", self.kc),
            ("g", self.g),
            ("s", self.s),
            ("twin_fraction", self.twin_fraction),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::Config(format!("model.{name} must be finite, got {v}")));
            }
        }
        for (name, v) in [("ka", self.ka), ("kb", self.kb), ("kc", self.kc)] {
            if v < T::zero() {
                return Err(Error::Config(format!("model.{name} must be >= 0, got {v}")));
            }
        }
        if self.s <= T::zero() {
            return Err(Error::Config(format!("model.s must be > 0, got {}", self.s)));
        }
        if self.g <= T::zero() {
            return Err(Error::Config(format!("model.g must be > 0, got {}", self.g)));
        }
        if self.twin_fraction < T::zero() || self.twin_fraction > T::one() {
            return Err(Error::Config(format!(
                "model.twin_fraction must lie in [0, 1], got {}",
                self.twin_fraction
            )));
        }
        Ok(())
    }

    /// Ratio `kb / |j1|` of easy-axis anisotropy to the chain exchange.
    pub fn anisotropy_ratio(&self) -> T {
        self.kb / self.j1.abs()
    }

    /// Zeeman energy scale `g μ_B s` in meV/T.
    pub fn zeeman_scale(&self) -> T {
        self.g * T::lit(BOHR_MAGNETON_MEV_PER_T) * self.s
    }

    pub fn cast<U: Scalar>(&self) -> ModelParams<U> {
        let c = |v: T| U::lit(v.to_f64_lossy());
        ModelParams {
            j1: c(self.j1),
            j1p: c(self.j1p),
            j2: c(self.j2),
            j2p: c(self.j2p),
            ka: c(self.ka),
            kb: c(self.kb),
            kc: c(self.kc),
            g: c(self.g),
            s: c(self.s),
            twin_fraction: c(self.twin_fraction),
        }
    }
}

/// Orientation of the applied field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldPlane<T> {
    /// Rotating in the bc plane; `alpha_h` is measured from b toward c.
    Bc,
    FixedA,
    FixedB,
    FixedC,
    /// Arbitrary unit direction in (a, b, c) components; `alpha_h` is ignored.
    Direction([T; 3]),
}

/// Applied field: magnitude in tesla plus orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSpec<T> {
    pub magnitude: T,
    pub alpha_h: T,
    pub plane: FieldPlane<T>,
}

impl<T: Scalar> FieldSpec<T> {
    pub fn along_b(magnitude: T) -> Self {
        Self {
            magnitude,
            alpha_h: T::zero(),
            plane: FieldPlane::FixedB,
        }
    }

    pub fn along_a(magnitude: T) -> Self {
        Self {
            magnitude,
            alpha_h: T::zero(),
            plane: FieldPlane::FixedA,
        }
    }

    pub fn along_c(magnitude: T) -> Self {
        Self {
            magnitude,
            alpha_h: T::zero(),
            plane: FieldPlane::FixedC,
        }
    }

    /// Field in the bc plane at `alpha_h` radians from b.
    pub fn in_bc(magnitude: T, alpha_h: T) -> Self {
        Self {
            magnitude,
            alpha_h,
            plane: FieldPlane::Bc,
        }
    }

    pub fn zero() -> Self {
        Self::along_b(T::zero())
    }

    pub fn validate(&self) -> Result<()> {
        if !self.magnitude.is_finite() || self.magnitude < T::zero() {
            return Err(Error::Config(format!(
                "field magnitude must be finite and >= 0, got {}",
                self.magnitude
            )));
        }
        if !self.alpha_h.is_finite() {
            return Err(Error::Config("field alpha_h must be finite".into()));
        }
        if let FieldPlane::Direction(d) = self.plane {
            let n = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            if !n.is_finite() || (n - T::one()).abs() > T::lit(1e-9).max(T::ROUNDOFF) {
                return Err(Error::Config(format!(
                    "field direction must be a unit vector, |d| = {n}"
                )));
            }
        }
        Ok(())
    }

    /// Unit direction in (a, b, c). Components that vanish analytically
    /// (cos 90°, sin 0°) are returned as exact zeros.
    pub fn direction(&self) -> [T; 3] {
        let z = T::zero();
        let o = T::one();
        match self.plane {
            FieldPlane::FixedA => [o, z, z],
            FieldPlane::FixedB => [z, o, z],
            FieldPlane::FixedC => [z, z, o],
            FieldPlane::Direction(d) => d,
            FieldPlane::Bc => {
                let (s, c) = self.alpha_h.sin_cos();
                let snap = |v: T| if v.abs() < T::lit(1e-12) { z } else { v };
                [z, snap(c), snap(s)]
            }
        }
    }

    /// Field vector in tesla, (a, b, c) components.
    pub fn components(&self) -> [T; 3] {
        let d = self.direction();
        [
            d[0] * self.magnitude,
            d[1] * self.magnitude,
            d[2] * self.magnitude,
        ]
    }

    /// True when the field lies in the bc plane (including along b or c).
    pub fn is_bc_plane(&self) -> bool {
        match self.plane {
            FieldPlane::Bc | FieldPlane::FixedB | FieldPlane::FixedC => true,
            FieldPlane::FixedA => self.magnitude == T::zero(),
            FieldPlane::Direction(d) => d[0] == T::zero(),
        }
    }

    /// Rotation angle from b toward c for bc-plane fields.
    pub fn bc_angle(&self) -> Option<T> {
        match self.plane {
            FieldPlane::Bc => Some(self.alpha_h),
            FieldPlane::FixedB => Some(T::zero()),
            FieldPlane::FixedC => Some(T::FRAC_PI_2()),
            FieldPlane::FixedA => None,
            FieldPlane::Direction(d) if d[0] == T::zero() => Some(d[2].atan2(d[1])),
            FieldPlane::Direction(_) => None,
        }
    }
}
