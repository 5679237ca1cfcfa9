//! Coefficient fields shared by polynomials, matrices and the linear algebra.

use std::fmt::Debug;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;

/// Double precision complex scalar.
pub type C64 = Complex64;

/// A (possibly inexact) field of complex numbers.
///
/// Exact implementations (`GaussianRational`, `Cyclotomic`) compare
/// structurally; the floating implementation compares bit-for-bit and relies
/// on [`Field::is_negligible`] for tolerance decisions.
pub trait Field: Clone + PartialEq + Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negate(&self) -> Self;
    fn inverse(&self) -> Option<Self>;
    fn conj(&self) -> Self;
    fn from_rational(q: &BigRational) -> Self;
    fn to_c64(&self) -> C64;

    /// True for arithmetic without rounding.
    fn is_exact() -> bool;

    /// Zero test used for pivoting and deduplication. Exact fields use the
    /// structural test.
    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    /// Magnitude used only for pivot selection.
    fn magnitude(&self) -> f64 {
        self.to_c64().norm()
    }

    fn from_i64(v: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(v.into()))
    }

    fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.times(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.times(&base);
            }
        }
        acc
    }
}

/// Absolute tolerance used when a floating value stands in for an exact zero.
pub const FLOAT_ZERO_TOL: f64 = 1e-12;

impl Field for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn one() -> Self {
        C64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negate(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.inv())
        }
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn from_rational(q: &BigRational) -> Self {
        C64::new(q.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn to_c64(&self) -> C64 {
        *self
    }
    fn is_exact() -> bool {
        false
    }
    fn is_negligible(&self) -> bool {
        self.norm() <= FLOAT_ZERO_TOL
    }
}

/// Hermitian inner product `Σ z_i conj(w_i)`.
pub fn hermitian_dot(z: &[C64], w: &[C64]) -> C64 {
    z.iter().zip(w).map(|(a, b)| a * b.conj()).sum()
}

pub fn norm_sqr(z: &[C64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum()
}
