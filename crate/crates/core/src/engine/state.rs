use num_complex::Complex;

use super::pauli::{PauliString, WeightedPauliSum, MAX_QUBITS};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense amplitude vector of an `n`-qubit register (little-endian qubit order).
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    qubits: usize,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Scalar> StateVector<T> {
    /// `|0…0⟩` on `qubits` qubits.
    pub fn new(qubits: usize) -> Result<Self> {
        if qubits == 0 || qubits > MAX_QUBITS {
            return Err(Error::Config(format!(
                "qubit count {qubits} outside 1..={MAX_QUBITS}"
            )));
        }
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); 1 << qubits];
        amplitudes[0] = Complex::new(T::one(), T::zero());
        Ok(Self { qubits, amplitudes })
    }

    /// Wraps raw amplitudes. The caller is responsible for normalization.
    pub fn from_amplitudes(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Usage(format!(
                "amplitude vector length {len} is not a power of two >= 2"
            )));
        }
        let qubits = len.trailing_zeros() as usize;
        if qubits > MAX_QUBITS {
            return Err(Error::Config(format!(
                "qubit count {qubits} exceeds {MAX_QUBITS}"
            )));
        }
        Ok(Self { qubits, amplitudes })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.qubits {
            return Err(Error::Usage(format!(
                "qubit {qubit} out of range for {}-qubit register",
                self.qubits
            )));
        }
        Ok(())
    }

    fn apply_single(&mut self, qubit: usize, m: [[Complex<T>; 2]; 2]) {
        let bit = 1usize << qubit;
        for i in 0..self.amplitudes.len() {
            if i & bit == 0 {
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[i | bit];
                self.amplitudes[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amplitudes[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    /// Applies `RY(θ) = exp(−iθY/2)`.
    pub fn apply_ry(&mut self, qubit: usize, theta: T) -> Result<()> {
        self.check_qubit(qubit)?;
        if !theta.is_finite() {
            return Err(Error::Usage(format!("non-finite RY angle {theta}")));
        }
        let half = theta / T::lit(2.0);
        let (s, c) = half.sin_cos();
        let z = T::zero();
        self.apply_single(
            qubit,
            [
                [Complex::new(c, z), Complex::new(-s, z)],
                [Complex::new(s, z), Complex::new(c, z)],
            ],
        );
        Ok(())
    }

    /// Applies `RZ(φ) = exp(−iφZ/2)`.
    pub fn apply_rz(&mut self, qubit: usize, phi: T) -> Result<()> {
        self.check_qubit(qubit)?;
        if !phi.is_finite() {
            return Err(Error::Usage(format!("non-finite RZ angle {phi}")));
        }
        let half = phi / T::lit(2.0);
        let (s, c) = half.sin_cos();
        let z = Complex::new(T::zero(), T::zero());
        self.apply_single(qubit, [[Complex::new(c, -s), z], [z, Complex::new(c, s)]]);
        Ok(())
    }

    /// `⟨ψ|P|ψ⟩` for a single string, as a complex number (imaginary part is round-off).
    fn string_expectation_raw(&self, p: &PauliString) -> Complex<T> {
        let x = p.x_mask();
        let z = p.z_mask();
        let mut acc = Complex::new(T::zero(), T::zero());
        for (b, amp) in self.amplitudes.iter().enumerate() {
            let flipped = self.amplitudes[b ^ x];
            let term = flipped.conj() * amp;
            if (b & z).count_ones() % 2 == 1 {
                acc = acc - term;
            } else {
                acc = acc + term;
            }
        }
        match p.phase_power() {
            0 => acc,
            1 => Complex::new(-acc.im, acc.re),
            2 => -acc,
            _ => Complex::new(acc.im, -acc.re),
        }
    }

    fn check_normalized(&self) -> Result<()> {
        let drift = (self.norm_sqr() - T::one()).abs();
        if drift > T::NORM_DRIFT {
            return Err(Error::Invariant(format!(
                "state norm drifted by {drift} (limit {})",
                T::NORM_DRIFT
            )));
        }
        Ok(())
    }

    /// Real expectation of one Pauli string.
    pub fn pauli_expectation(&self, p: &PauliString) -> Result<T> {
        if p.len() != self.qubits {
            return Err(Error::Usage(format!(
                "string {p} has length {}, state has {} qubits",
                p.len(),
                self.qubits
            )));
        }
        self.check_normalized()?;
        self.real_part(p)
    }

    fn real_part(&self, p: &PauliString) -> Result<T> {
        let v = self.string_expectation_raw(p);
        if v.im.abs() > T::IMAG_RESIDUE {
            return Err(Error::Invariant(format!(
                "imaginary residue {} on Hermitian term {p}",
                v.im
            )));
        }
        Ok(v.re)
    }

    /// `Σⱼ cⱼ ⟨ψ|Pⱼ|ψ⟩`.
    pub fn expectation(&self, op: &WeightedPauliSum<T>) -> Result<T> {
        Ok(self.term_expectations(op)?
            .iter()
            .zip(op.terms())
            .map(|(&e, (c, _))| *c * e)
            .sum())
    }

    /// Unweighted `⟨Pⱼ⟩` for every term of `op`, in term order.
    pub fn term_expectations(&self, op: &WeightedPauliSum<T>) -> Result<Vec<T>> {
        if op.qubits() != self.qubits {
            return Err(Error::Usage(format!(
                "operator acts on {} qubits, state has {}",
                op.qubits(),
                self.qubits
            )));
        }
        self.check_normalized()?;
        op.terms().iter().map(|(_, p)| self.real_part(p)).collect()
    }
}
