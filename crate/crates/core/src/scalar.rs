//! Complex scalars, tolerances, and Chebyshev polynomials of the second kind.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::poly::DensePoly;

pub type Complex = num_complex::Complex64;

/// Double-double real (about 32 significant digits).
pub use crate::dd::Dd;

/// Complex number with double-double parts.
pub type DdComplex = num_complex::Complex<Dd>;

/// Numerical thresholds shared across the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Equality of values that agree exactly in exact arithmetic.
    pub equality: f64,
    /// Accepted |phi| at a Riley root, and the relator residual bound.
    pub root_residual: f64,
    /// Relative coefficient trimming for dense and Laurent polynomials.
    pub degree_trim: f64,
    /// Roots closer than this are merged; roots this close to y = 2 are dropped.
    pub dedup: f64,
    /// Relative remainder accepted by exact Laurent division.
    pub division: f64,
    /// A closed-form denominator smaller than this is treated as zero.
    pub degenerate: f64,
    /// Relative discrepancy accepted by the dual-pipeline cross-check.
    pub crosscheck: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            equality: 1e-9,
            root_residual: 1e-7,
            degree_trim: 1e-12,
            dedup: 1e-7,
            division: 1e-8,
            degenerate: 1e-7,
            crosscheck: 1e-8,
        }
    }
}

pub fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

pub fn re(v: f64) -> Complex {
    Complex::new(v, 0.0)
}

pub fn is_finite(z: Complex) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// `|a - b| / max(1, |b|)`.
pub fn rel_err(a: Complex, b: Complex) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

/// Commutative ring operations needed by the Chebyshev and Riley evaluators.
pub trait Ring:
    Copy + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
}

impl<T> Ring for T where
    T: Copy + Zero + One + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Neg<Output = T>
{
}

/// A complex field at some working precision.
pub trait Scalar: Ring + Div<Output = Self> + PartialEq + fmt::Debug + Send + Sync + 'static {
    /// Relative size below which an end coefficient of a polynomial is noise.
    const TRIM: f64;

    fn from_complex(v: Complex) -> Self;
    fn to_complex(self) -> Complex;

    fn from_f64(v: f64) -> Self {
        Self::from_complex(Complex::new(v, 0.0))
    }

    /// Modulus, rounded to double.
    fn magnitude(self) -> f64 {
        self.to_complex().norm()
    }
}

impl Scalar for Complex {
    const TRIM: f64 = 1e-12;

    fn from_complex(v: Complex) -> Self {
        v
    }
    fn to_complex(self) -> Complex {
        self
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

impl Scalar for DdComplex {
    const TRIM: f64 = 1e-27;

    fn from_complex(v: Complex) -> Self {
        DdComplex::new(Dd::from(v.re), Dd::from(v.im))
    }
    fn to_complex(self) -> Complex {
        Complex::new(f64::from(self.re), f64::from(self.im))
    }
}

pub fn dd(v: Complex) -> DdComplex {
    DdComplex::from_complex(v)
}

/// Chebyshev polynomial of the second kind `S_k(v)` for any integer `k`.
///
/// `S_0 = 1`, `S_1 = v`, `S_k = v S_{k-1} - S_{k-2}`. Negative indices run the
/// recurrence backward, which gives `S_{-1} = 0`, `S_{-2} = -1` and in general
/// `S_{-k} = -S_{k-2}`.
pub fn cheb_eval<T>(k: i64, v: T) -> T
where
    T: Copy + Zero + One + Mul<Output = T> + Sub<Output = T>,
{
    cheb_pair(k, v).0
}

/// `(S_k(v), S_{k-1}(v))`.
pub fn cheb_pair<T>(k: i64, v: T) -> (T, T)
where
    T: Copy + Zero + One + Mul<Output = T> + Sub<Output = T>,
{
    // (current, previous) = (S_j, S_{j-1})
    let (mut cur, mut prev) = (T::one(), T::zero());
    if k >= 0 {
        for _ in 0..k {
            let next = v * cur - prev;
            prev = cur;
            cur = next;
        }
    } else {
        for _ in 0..(-k) {
            // S_{j-2} = v S_{j-1} - S_j
            let before = v * prev - cur;
            cur = prev;
            prev = before;
        }
    }
    (cur, prev)
}

/// Coefficient vector of `S_k` in ascending powers of `v`.
pub fn cheb_coeffs(k: i64) -> DensePoly {
    let v = DensePoly::monomial(1);
    let (mut cur, mut prev) = (DensePoly::one(), DensePoly::zero());
    if k >= 0 {
        for _ in 0..k {
            let next = &(&v * &cur) - &prev;
            prev = cur;
            cur = next;
        }
    } else {
        for _ in 0..(-k) {
            let before = &(&v * &prev) - &cur;
            cur = prev;
            prev = before;
        }
    }
    cur
}
