//! Closed-form energy of the Hamiltonian on tied product states.
//!
//! For a product state every Pauli string factorizes into single-qubit Bloch
//! components, and tying each ancilla to its site turns `⟨σₙ σₙ₊₄⟩` into
//! `mₙ,σ²`. The result is an ordinary function of eight angles.

use super::hamiltonian::{bond_coefficient, mca_coefficients, zeeman_coefficients, BONDS};
use super::{FieldSpec, ModelParams, TermGroup, SITES};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::solver::AnsatzParams;

/// Bloch vector `(sinθ cosφ, sinθ sinφ, cosθ)`.
#[inline]
pub fn bloch_vector<T: Scalar>(theta: T, phi: T) -> [T; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

#[inline]
fn dot<T: Scalar>(a: &[T; 3], b: &[T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Per-group energy subtotals in meV, summed over the four sites.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyBreakdown<T> {
    pub e_j1: T,
    pub e_j1p: T,
    pub e_j2: T,
    pub e_j2p: T,
    pub e_zeeman: T,
    pub e_mca: T,
    pub total: T,
}

impl<T: Scalar> EnergyBreakdown<T> {
    pub fn exchange(&self) -> T {
        self.e_j1 + self.e_j1p + self.e_j2 + self.e_j2p
    }

    /// Same breakdown divided by the number of sites.
    pub fn per_site(&self) -> Self {
        let n = T::lit(SITES as f64);
        Self {
            e_j1: self.e_j1 / n,
            e_j1p: self.e_j1p / n,
            e_j2: self.e_j2 / n,
            e_j2p: self.e_j2p / n,
            e_zeeman: self.e_zeeman / n,
            e_mca: self.e_mca / n,
            total: self.total / n,
        }
    }
}

/// Coefficients of the closed-form energy, precomputed for repeated evaluation.
#[derive(Debug, Clone, Copy)]
pub struct ClassicalModel<T> {
    bonds: [(usize, usize, TermGroup, T); 6],
    zeeman: [T; 3],
    mca: [T; 3],
}

impl<T: Scalar> ClassicalModel<T> {
    pub fn new(params: &ModelParams<T>, field: &FieldSpec<T>) -> Result<Self> {
        params.validate()?;
        field.validate()?;
        let bonds = BONDS.map(|(i, j, g)| (i, j, g, bond_coefficient(params, g)));
        Ok(Self {
            bonds,
            zeeman: zeeman_coefficients(params, field),
            mca: mca_coefficients(params),
        })
    }

    pub fn energy_of_vectors(&self, m: &[[T; 3]; SITES]) -> T {
        let mut e = T::zero();
        for &(i, j, _, c) in &self.bonds {
            e = e + c * dot(&m[i], &m[j]);
        }
        for v in m {
            e = e + dot(&self.zeeman, v);
            e = e + self.mca[0] * v[0] * v[0] + self.mca[1] * v[1] * v[1] + self.mca[2] * v[2] * v[2];
        }
        e
    }

    /// Energy at `[θ₁..θ₄, φ₁..φ₄]` without finiteness checks (hot path).
    #[inline]
    pub fn energy_flat(&self, x: &[T]) -> T {
        let mut m = [[T::zero(); 3]; SITES];
        for (n, v) in m.iter_mut().enumerate() {
            *v = bloch_vector(x[n], x[SITES + n]);
        }
        self.energy_of_vectors(&m)
    }

    pub fn energy(&self, angles: &AnsatzParams<T>) -> Result<T> {
        angles.check_finite()?;
        Ok(self.energy_of_vectors(&angles.bloch_vectors()))
    }

    /// `[∂E/∂θ₁..∂E/∂θ₄, ∂E/∂φ₁..∂E/∂φ₄]`.
    pub fn gradient(&self, angles: &AnsatzParams<T>) -> Result<[T; 2 * SITES]> {
        angles.check_finite()?;
        let m = angles.bloch_vectors();
        let two = T::lit(2.0);
        // ∂E/∂mₙ
        let mut field = [[T::zero(); 3]; SITES];
        for &(i, j, _, c) in &self.bonds {
            for k in 0..3 {
                field[i][k] = field[i][k] + c * m[j][k];
                field[j][k] = field[j][k] + c * m[i][k];
            }
        }
        for (f, v) in field.iter_mut().zip(&m) {
            for k in 0..3 {
                f[k] = f[k] + self.zeeman[k] + two * self.mca[k] * v[k];
            }
        }
        let mut grad = [T::zero(); 2 * SITES];
        for n in 0..SITES {
            let (st, ct) = angles.theta[n].sin_cos();
            let (sp, cp) = angles.phi[n].sin_cos();
            let d_theta = [ct * cp, ct * sp, -st];
            let d_phi = [-st * sp, st * cp, T::zero()];
            grad[n] = dot(&field[n], &d_theta);
            grad[SITES + n] = dot(&field[n], &d_phi);
        }
        Ok(grad)
    }

    pub fn breakdown(&self, angles: &AnsatzParams<T>) -> Result<EnergyBreakdown<T>> {
        angles.check_finite()?;
        Ok(self.breakdown_of_vectors(&angles.bloch_vectors()))
    }

    pub fn breakdown_of_vectors(&self, m: &[[T; 3]; SITES]) -> EnergyBreakdown<T> {
        let mut b = EnergyBreakdown::default();
        for &(i, j, g, c) in &self.bonds {
            let e = c * dot(&m[i], &m[j]);
            match g {
                TermGroup::J1 => b.e_j1 = b.e_j1 + e,
                TermGroup::J1p => b.e_j1p = b.e_j1p + e,
                TermGroup::J2 => b.e_j2 = b.e_j2 + e,
                TermGroup::J2p => b.e_j2p = b.e_j2p + e,
                TermGroup::Zeeman | TermGroup::Mca => unreachable!("bonds are exchange only"),
            }
        }
        for v in m {
            b.e_zeeman = b.e_zeeman + dot(&self.zeeman, v);
            b.e_mca = b.e_mca
                + self.mca[0] * v[0] * v[0]
                + self.mca[1] * v[1] * v[1]
                + self.mca[2] * v[2] * v[2];
        }
        b.total = b.exchange() + b.e_zeeman + b.e_mca;
        b
    }
}

/// Closed-form `⟨H⟩` on the tied product state with the given angles.
pub fn classical_energy<T: Scalar>(
    params: &ModelParams<T>,
    field: &FieldSpec<T>,
    angles: &AnsatzParams<T>,
) -> Result<T> {
    ClassicalModel::new(params, field)?.energy(angles)
}

/// Analytic gradient of [`classical_energy`] in meV/rad.
pub fn classical_gradient<T: Scalar>(
    params: &ModelParams<T>,
    field: &FieldSpec<T>,
    angles: &AnsatzParams<T>,
) -> Result<[T; 2 * SITES]> {
    ClassicalModel::new(params, field)?.gradient(angles)
}

pub fn energy_breakdown<T: Scalar>(
    params: &ModelParams<T>,
    field: &FieldSpec<T>,
    angles: &AnsatzParams<T>,
) -> Result<EnergyBreakdown<T>> {
    ClassicalModel::new(params, field)?.breakdown(angles)
}

impl<T: Scalar> AnsatzParams<T> {
    pub(crate) fn check_finite(&self) -> Result<()> {
        if self.theta.iter().chain(&self.phi).all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::Usage(format!("non-finite ansatz angles {self:?}")))
        }
    }
}
