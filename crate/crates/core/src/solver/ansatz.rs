use crate::engine::StateVector;
use crate::error::{Error, Result};
use crate::model::{bloch_vector, REGISTER_QUBITS, SITES};
use crate::scalar::Scalar;

/// Polar and azimuthal angles for sites 1–4. Ancilla `n + 4` always reuses
/// the angles of site `n`, so eight numbers describe the eight-qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnsatzParams<T> {
    pub theta: [T; SITES],
    pub phi: [T; SITES],
}

impl<T: Scalar> AnsatzParams<T> {
    pub fn uniform(theta: T, phi: T) -> Self {
        Self {
            theta: [theta; SITES],
            phi: [phi; SITES],
        }
    }

    /// Ferromagnetic chains (1,2) along +b and (3,4) along −b.
    pub fn b_chain() -> Self {
        let h = T::FRAC_PI_2();
        Self {
            theta: [h; SITES],
            phi: [h, h, -h, -h],
        }
    }

    /// The chains rotated onto ±a (spin-flop seed).
    pub fn a_flop() -> Self {
        let h = T::FRAC_PI_2();
        Self {
            theta: [h; SITES],
            phi: [T::zero(), T::zero(), T::PI(), T::PI()],
        }
    }

    /// All four spins along the unit vector `d` in (a, b, c).
    pub fn aligned_with(d: [T; 3]) -> Self {
        let theta = d[2].max(-T::one()).min(T::one()).acos();
        let phi = d[1].atan2(d[0]);
        Self::uniform(theta, phi)
    }

    /// `[θ₁..θ₄, φ₁..φ₄]`.
    pub fn to_flat(&self) -> [T; 2 * SITES] {
        let mut out = [T::zero(); 2 * SITES];
        out[..SITES].copy_from_slice(&self.theta);
        out[SITES..].copy_from_slice(&self.phi);
        out
    }

    pub fn from_flat(x: &[T]) -> Result<Self> {
        if x.len() != 2 * SITES {
            return Err(Error::Usage(format!(
                "ansatz needs {} angles, got {}",
                2 * SITES,
                x.len()
            )));
        }
        let mut a = Self::uniform(T::zero(), T::zero());
        a.theta.copy_from_slice(&x[..SITES]);
        a.phi.copy_from_slice(&x[SITES..]);
        Ok(a)
    }

    pub fn bloch_vectors(&self) -> [[T; 3]; SITES] {
        let mut m = [[T::zero(); 3]; SITES];
        for (n, v) in m.iter_mut().enumerate() {
            *v = bloch_vector(self.theta[n], self.phi[n]);
        }
        m
    }

    /// Equivalent angles with θ ∈ [0, π] and φ ∈ (−π, π].
    pub fn canonical(&self) -> Self {
        let two_pi = T::PI() + T::PI();
        let wrap_phi = |mut p: T| {
            p = p - two_pi * (p / two_pi).floor();
            if p > T::PI() {
                p = p - two_pi;
            }
            p
        };
        let mut out = *self;
        for n in 0..SITES {
            let mut t = self.theta[n] - two_pi * (self.theta[n] / two_pi).floor();
            let mut p = self.phi[n];
            if t > T::PI() {
                t = two_pi - t;
                p = p + T::PI();
            }
            out.theta[n] = t;
            out.phi[n] = wrap_phi(p);
        }
        out
    }
}

/// Eight-qubit product state: `RY(θₙ)` then `RZ(φₙ)` on system qubit `n`
/// and identically on ancilla `n + 4`.
pub fn prepare_state<T: Scalar>(angles: &AnsatzParams<T>) -> Result<StateVector<T>> {
    angles.check_finite()?;
    let mut state = StateVector::new(REGISTER_QUBITS)?;
    for n in 0..SITES {
        for q in [n, n + SITES] {
            state.apply_ry(q, angles.theta[n])?;
            state.apply_rz(q, angles.phi[n])?;
        }
    }
    Ok(state)
}
