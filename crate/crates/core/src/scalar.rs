//! Scalar abstraction shared by the numeric kernels.
//!
//! The statevector engine, the closed-form lattice energy and the simplex
//! optimizer are written once over [`Scalar`] and instantiated for `f32` and
//! `f64`. Observables, the oracle and the command-line runner work in `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real floating-point type usable by the simulation kernels.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Loose agreement threshold for round-off-level identities in this precision.
    const ROUNDOFF: Self;
    /// Largest imaginary residue tolerated on a unit-weight Hermitian expectation.
    const IMAG_RESIDUE: Self;
    /// Largest squared-norm drift tolerated before an expectation is refused.
    const NORM_DRIFT: Self;

    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {
    const ROUNDOFF: Self = 1e-4;
    const IMAG_RESIDUE: Self = 1e-5;
    const NORM_DRIFT: Self = 1e-4;
}

impl Scalar for f64 {
    const ROUNDOFF: Self = 1e-10;
    const IMAG_RESIDUE: Self = 1e-12;
    const NORM_DRIFT: Self = 1e-9;
}
