//! Laurent polynomials in `t` with complex coefficients, and 3x3 matrices of them.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use crate::adjoint::Mat3;
use crate::error::{Error, Result};
use crate::scalar::{Complex, Scalar};

/// `sum_i coeffs[i] t^(min_exp + i)`.
///
/// Canonical form: both end coefficients exceed the trim tolerance relative to
/// the sup-norm, or the value is the zero polynomial (empty, `min_exp = 0`).
#[derive(Clone, PartialEq)]
pub struct LaurentPoly<T: Scalar = Complex> {
    min_exp: i64,
    coeffs: Vec<T>,
}

impl<T: Scalar> LaurentPoly<T> {
    pub fn new(min_exp: i64, coeffs: Vec<T>) -> Self {
        Self::with_trim(min_exp, coeffs, T::TRIM)
    }

    pub fn with_trim(min_exp: i64, coeffs: Vec<T>, trim: f64) -> Self {
        let mut p = Self { min_exp, coeffs };
        p.canonicalize(trim);
        p
    }

    pub fn zero() -> Self {
        Self {
            min_exp: 0,
            coeffs: Vec::new(),
        }
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    pub fn constant(c: T) -> Self {
        Self::new(0, vec![c])
    }

    /// `c t^k`.
    pub fn term(c: T, k: i64) -> Self {
        Self::new(k, vec![c])
    }

    /// Product of linear factors `t - r`.
    pub fn from_roots(roots: &[T]) -> Self {
        roots
            .iter()
            .fold(Self::one(), |acc, &r| &acc * &Self::new(0, vec![-r, T::one()]))
    }

    fn canonicalize(&mut self, trim: f64) {
        let scale = self.sup_norm();
        if scale == 0.0 {
            *self = Self::zero();
            return;
        }
        if !scale.is_finite() {
            return;
        }
        let cut = trim * scale;
        while self.coeffs.last().is_some_and(|c| c.magnitude() <= cut) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.magnitude() <= cut).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.min_exp += lead as i64;
        }
    }

    pub fn min_exp(&self) -> i64 {
        self.min_exp
    }

    pub fn max_exp(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.min_exp + self.coeffs.len() as i64 - 1)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Coefficient of `t^k` (zero outside the support).
    pub fn coeff(&self, k: i64) -> T {
        usize::try_from(k - self.min_exp)
            .ok()
            .and_then(|i| self.coeffs.get(i).copied())
            .unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn sup_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.magnitude()).fold(0.0, f64::max)
    }

    pub fn leading(&self) -> Option<T> {
        self.coeffs.last().copied()
    }

    /// Multiply by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Self {
            min_exp: self.min_exp + k,
            coeffs: self.coeffs.clone(),
        }
    }

    /// Shift so the lowest exponent is 0.
    pub fn normalized(&self) -> Self {
        self.shift(-self.min_exp)
    }

    pub fn scale(&self, k: T) -> Self {
        Self::new(self.min_exp, self.coeffs.iter().map(|&c| c * k).collect())
    }

    /// Coefficients rounded to double precision.
    pub fn to_complex(&self) -> LaurentPoly {
        LaurentPoly::new(
            self.min_exp,
            self.coeffs.iter().map(|c| c.to_complex()).collect(),
        )
    }

    pub fn eval(&self, t0: T) -> Result<T> {
        if t0.magnitude() == 0.0 {
            return Err(Error::EvalAtZero);
        }
        let body = self
            .coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, &c| acc * t0 + c);
        let e = self.min_exp;
        let base = if e < 0 { T::one() / t0 } else { t0 };
        Ok((0..e.unsigned_abs()).fold(body, |acc, _| acc * base))
    }

    /// Exact division, checked against the remainder.
    pub fn div_exact(&self, den: &Self) -> Result<Self> {
        self.div_exact_tol(den, 1e-8)
    }

    /// Long division from the top degree down; the quotient is accepted when
    /// `|num - q den|_sup <= tol |num|_sup`.
    pub fn div_exact_tol(&self, den: &Self, tol: f64) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DegenerateInput(
                "division by the zero Laurent polynomial".into(),
            ));
        }
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let num_norm = self.sup_norm();
        let mut rem = self.coeffs.clone();
        let d = &den.coeffs;
        let dl = d.len();
        let lead = d[dl - 1];
        if rem.len() < dl {
            return Err(Error::InexactDivision {
                relative_remainder: 1.0,
                tolerance: tol,
            });
        }
        let qlen = rem.len() - dl + 1;
        let mut q = vec![T::zero(); qlen];
        for i in (0..qlen).rev() {
            let coef = rem[i + dl - 1] / lead;
            q[i] = coef;
            for (j, &dj) in d.iter().enumerate() {
                rem[i + j] = rem[i + j] - coef * dj;
            }
        }
        let rnorm = rem.iter().map(|c| c.magnitude()).fold(0.0, f64::max);
        let relative = rnorm / num_norm;
        if relative > tol || !relative.is_finite() {
            return Err(Error::InexactDivision {
                relative_remainder: relative,
                tolerance: tol,
            });
        }
        Ok(Self::new(self.min_exp - den.min_exp, q))
    }

    /// Coefficientwise sup-norm distance.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        (self - other).sup_norm()
    }
}

impl<T: Scalar> Add for &LaurentPoly<T> {
    type Output = LaurentPoly<T>;
    fn add(self, rhs: &LaurentPoly<T>) -> LaurentPoly<T> {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let lo = self.min_exp.min(rhs.min_exp);
        let hi = self.max_exp().unwrap().max(rhs.max_exp().unwrap());
        let coeffs = (lo..=hi).map(|k| self.coeff(k) + rhs.coeff(k)).collect();
        LaurentPoly::new(lo, coeffs)
    }
}

impl<T: Scalar> Sub for &LaurentPoly<T> {
    type Output = LaurentPoly<T>;
    fn sub(self, rhs: &LaurentPoly<T>) -> LaurentPoly<T> {
        self + &(-rhs)
    }
}

impl<T: Scalar> Neg for &LaurentPoly<T> {
    type Output = LaurentPoly<T>;
    fn neg(self) -> LaurentPoly<T> {
        LaurentPoly {
            min_exp: self.min_exp,
            coeffs: self.coeffs.iter().map(|&c| -c).collect(),
        }
    }
}

impl<T: Scalar> Mul for &LaurentPoly<T> {
    type Output = LaurentPoly<T>;
    fn mul(self, rhs: &LaurentPoly<T>) -> LaurentPoly<T> {
        if self.is_zero() || rhs.is_zero() {
            return LaurentPoly::zero();
        }
        let mut coeffs = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j] + a * b;
            }
        }
        LaurentPoly::new(self.min_exp + rhs.min_exp, coeffs)
    }
}

impl<T: Scalar> fmt::Debug for LaurentPoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            let c = c.to_complex();
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.6}{:+.6}i) t^{}", c.re, c.im, self.min_exp + i as i64)?;
        }
        Ok(())
    }
}

/// 3x3 matrix over Laurent polynomials.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat3Laurent<T: Scalar = Complex>(pub [[LaurentPoly<T>; 3]; 3]);

impl<T: Scalar> Mat3Laurent<T> {
    pub fn zero() -> Self {
        Self(std::array::from_fn(|_| {
            std::array::from_fn(|_| LaurentPoly::zero())
        }))
    }

    pub fn identity() -> Self {
        Self(std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                if i == j {
                    LaurentPoly::one()
                } else {
                    LaurentPoly::zero()
                }
            })
        }))
    }

    /// `t^k M` for a constant matrix.
    pub fn from_scalar_matrix(m: &Mat3<T>, k: i64) -> Self {
        Self(std::array::from_fn(|i| {
            std::array::from_fn(|j| LaurentPoly::term(m.0[i][j], k))
        }))
    }

    /// `self += coeff t^k M`.
    pub fn add_assign_scaled(&mut self, m: &Mat3<T>, k: i64, coeff: f64) {
        let c = T::from_f64(coeff);
        for i in 0..3 {
            for j in 0..3 {
                let term = LaurentPoly::term(m.0[i][j] * c, k);
                self.0[i][j] = &self.0[i][j] + &term;
            }
        }
    }

    pub fn det(&self) -> LaurentPoly<T> {
        let m = &self.0;
        let minor = |a: usize, b: usize, c: usize, d: usize| {
            &(&m[1][a] * &m[2][b]) - &(&m[1][c] * &m[2][d])
        };
        let t0 = &m[0][0] * &minor(1, 2, 2, 1);
        let t1 = &m[0][1] * &minor(0, 2, 2, 0);
        let t2 = &m[0][2] * &minor(0, 1, 1, 0);
        &(&t0 - &t1) + &t2
    }

    pub fn eval(&self, t0: T) -> Result<Mat3<T>> {
        let mut out = Mat3::zero();
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] = self.0[i][j].eval(t0)?;
            }
        }
        Ok(out)
    }

    pub fn to_complex(&self) -> Mat3Laurent {
        Mat3Laurent(std::array::from_fn(|i| {
            std::array::from_fn(|j| self.0[i][j].to_complex())
        }))
    }
}
