use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest register the engine accepts.
pub const MAX_QUBITS: usize = 24;

/// Single-qubit Pauli label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Tensor product of single-qubit Pauli operators.
///
/// `axes[k]` acts on qubit `k`, and qubit `k` is bit `k` of a basis-state
/// index. The textual form lists qubit 0 first, so `"XIZ"` is `X₀ Z₂`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    axes: Vec<Pauli>,
    x_mask: usize,
    z_mask: usize,
    y_count: u32,
}

impl PauliString {
    pub fn new(axes: Vec<Pauli>) -> Result<Self> {
        if axes.is_empty() || axes.len() > MAX_QUBITS {
            return Err(Error::Config(format!(
                "Pauli string length {} outside 1..={MAX_QUBITS}",
                axes.len()
            )));
        }
        let mut x_mask = 0usize;
        let mut z_mask = 0usize;
        let mut y_count = 0u32;
        for (k, axis) in axes.iter().enumerate() {
            match axis {
                Pauli::I => {}
                Pauli::X => x_mask |= 1 << k,
                Pauli::Z => z_mask |= 1 << k,
                Pauli::Y => {
                    x_mask |= 1 << k;
                    z_mask |= 1 << k;
                    y_count += 1;
                }
            }
        }
        Ok(Self {
            axes,
            x_mask,
            z_mask,
            y_count,
        })
    }

    pub fn identity(qubits: usize) -> Result<Self> {
        Self::new(vec![Pauli::I; qubits])
    }

    /// String with the given `(qubit, axis)` factors and identity elsewhere.
    pub fn from_factors(qubits: usize, factors: &[(usize, Pauli)]) -> Result<Self> {
        let mut axes = vec![Pauli::I; qubits];
        for &(q, axis) in factors {
            if q >= qubits {
                return Err(Error::Usage(format!(
                    "qubit {q} out of range for {qubits}-qubit string"
                )));
            }
            axes[q] = axis;
        }
        Self::new(axes)
    }

    pub fn len(&self) -> usize {
        self.axes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axes.is_empty()
    }

    pub fn axes(&self) -> &[Pauli] {
        &self.axes
    }

    pub fn is_identity(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    /// Bits flipped by the operator.
    pub(crate) fn x_mask(&self) -> usize {
        self.x_mask
    }

    /// Bits that pick up a sign.
    pub(crate) fn z_mask(&self) -> usize {
        self.z_mask
    }

    /// Global phase `i^{n_Y}` as a power of `i` modulo 4.
    pub(crate) fn phase_power(&self) -> u32 {
        self.y_count % 4
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.axes {
            write!(f, "{}", a.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let axes = s
            .chars()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::Usage(format!("invalid Pauli label '{other}'"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(axes)
    }
}

/// Real-weighted sum of Pauli strings on a common register; Hermitian by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPauliSum<T> {
    qubits: usize,
    terms: Vec<(T, PauliString)>,
}

impl<T: Scalar> WeightedPauliSum<T> {
    pub fn new(qubits: usize) -> Self {
        Self {
            qubits,
            terms: Vec::new(),
        }
    }

    pub fn from_terms(qubits: usize, terms: Vec<(T, PauliString)>) -> Result<Self> {
        let mut sum = Self::new(qubits);
        for (c, p) in terms {
            sum.push(c, p)?;
        }
        Ok(sum)
    }

    pub fn push(&mut self, coefficient: T, string: PauliString) -> Result<()> {
        if string.len() != self.qubits {
            return Err(Error::Usage(format!(
                "term {string} has length {}, register has {} qubits",
                string.len(),
                self.qubits
            )));
        }
        if !coefficient.is_finite() {
            return Err(Error::Usage(format!(
                "non-finite coefficient on term {string}"
            )));
        }
        self.terms.push((coefficient, string));
        Ok(())
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn terms(&self) -> &[(T, PauliString)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(T, PauliString)> {
        self.terms.iter()
    }
}
