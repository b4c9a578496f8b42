//! Scalar abstraction.
//!
//! All coefficient arithmetic is generic over the real float type backing
//! `Complex<T>`. Concrete aliases for `f64` live at the crate root.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Real float type underlying complex coefficients: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Convert a finite `f64` constant into this scalar type.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 constant")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `e^{i theta}` as a complex number of modulus one.
pub fn cis<T: Scalar>(theta: T) -> Complex<T> {
    Complex::from_polar(T::one(), theta)
}

/// `e^{2 pi i k / n}`, the standard primitive-root power.
pub fn root_of_unity<T: Scalar>(k: i64, n: i64) -> Complex<T> {
    let turn = T::of(k as f64 / n as f64);
    cis((T::PI() + T::PI()) * turn)
}

/// Tolerance ledger used across the crate.
///
/// `algebraic` guards exact algebraic identities (cocycle identity,
/// convolution associativity), `norm` guards operator-norm comparisons, and
/// `spectral` guards eigensolver convergence and character/restriction
/// agreement. Defaults are tuned for `f64`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances<T> {
    pub algebraic: T,
    pub norm: T,
    pub spectral: T,
}

impl<T: Scalar> Default for Tolerances<T> {
    fn default() -> Self {
        Tolerances {
            algebraic: T::of(1e-10),
            norm: T::of(1e-8),
            spectral: T::of(1e-12),
        }
    }
}

impl<T: Scalar> Tolerances<T> {
    /// Replace only the norm-level tolerance (CLI override hook).
    pub fn with_norm(mut self, norm: T) -> Self {
        self.norm = norm;
        self
    }
}
