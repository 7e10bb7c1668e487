//! Dense univariate polynomials over complex scalars.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::Complex;

const TRIM: f64 = 1e-12;

/// Coefficients in ascending order: `coeffs[i]` multiplies `v^i`.
///
/// The zero polynomial is the empty vector. The leading coefficient is kept
/// above `TRIM` times the sup-norm of the coefficients.
#[derive(Clone, PartialEq)]
pub struct DensePoly {
    coeffs: Vec<Complex>,
}

impl DensePoly {
    pub fn new(coeffs: Vec<Complex>) -> Self {
        Self::with_trim(coeffs, TRIM)
    }

    pub fn with_trim(coeffs: Vec<Complex>, trim: f64) -> Self {
        let mut p = Self { coeffs };
        p.trim(trim);
        p
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Complex::new(1.0, 0.0))
    }

    pub fn constant(c: Complex) -> Self {
        Self::new(vec![c])
    }

    /// `v^k`.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![Complex::zero(); k + 1];
        coeffs[k] = Complex::new(1.0, 0.0);
        Self { coeffs }
    }

    /// `v - r`.
    pub fn linear_root(r: Complex) -> Self {
        Self::new(vec![-r, Complex::new(1.0, 0.0)])
    }

    fn trim(&mut self, trim: f64) {
        let scale = self.sup_norm();
        if scale == 0.0 || !scale.is_finite() {
            if scale == 0.0 {
                self.coeffs.clear();
            }
            return;
        }
        while let Some(last) = self.coeffs.last() {
            if last.norm() <= trim * scale {
                self.coeffs.pop();
            } else {
                break;
            }
        }
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<Complex> {
        self.coeffs.last().copied()
    }

    pub fn sup_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, v: Complex) -> Complex {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::zero(), |acc, &c| acc * v + c)
    }

    /// Value and first derivative by a single Horner pass.
    pub fn eval_with_derivative(&self, v: Complex) -> (Complex, Complex) {
        let mut p = Complex::zero();
        let mut dp = Complex::zero();
        for &c in self.coeffs.iter().rev() {
            dp = dp * v + p;
            p = p * v + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    pub fn scale(&self, k: Complex) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * k).collect())
    }

    /// `self(inner(v))` by Horner's scheme over polynomials.
    pub fn compose(&self, inner: &DensePoly) -> DensePoly {
        self.coeffs
            .iter()
            .rev()
            .fold(DensePoly::zero(), |acc, &c| &(&acc * inner) + &DensePoly::constant(c))
    }

    /// All complex roots with multiplicity, sorted by (re, im).
    pub fn roots(&self) -> Result<Vec<Complex>> {
        let degree = match self.degree() {
            None | Some(0) => {
                return Err(Error::DegenerateInput(
                    "root finding needs a polynomial of degree >= 1".into(),
                ))
            }
            Some(d) => d,
        };
        let mut roots = if degree == 1 {
            vec![-self.coeffs[0] / self.coeffs[1]]
        } else {
            aberth(self, &initial_guesses(self))
        };
        for r in roots.iter_mut() {
            *r = newton_polish(self, *r);
        }
        sort_roots(&mut roots);
        Ok(roots)
    }
}

/// Lexicographic (re, im) order.
pub fn sort_roots(roots: &mut [Complex]) {
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Starting points on a circle whose radius comes from the Newton polygon
/// bound, rotated off the real axis so that conjugate pairs separate.
fn initial_guesses(p: &DensePoly) -> Vec<Complex> {
    let n = p.degree().unwrap();
    let lead = p.coeffs[n].norm();
    let c0 = p.coeffs[0].norm();
    // geometric mean of root moduli when c0 != 0, else a Fujiwara-style bound
    let radius = if c0 > 0.0 {
        (c0 / lead).powf(1.0 / n as f64)
    } else {
        (0..n)
            .map(|k| (p.coeffs[k].norm() / lead).powf(1.0 / (n - k) as f64))
            .fold(0.0, f64::max)
            .max(1.0)
    };
    let radius = if radius.is_finite() && radius > 0.0 {
        radius
    } else {
        1.0
    };
    (0..n)
        .map(|k| {
            let theta = std::f64::consts::TAU * (k as f64) / (n as f64) + 0.4;
            Complex::from_polar(radius, theta)
        })
        .collect()
}

/// Simultaneous Aberth-Ehrlich iteration on the dense coefficients.
fn aberth(p: &DensePoly, start: &[Complex]) -> Vec<Complex> {
    aberth_with(start, 500, |z| p.eval_with_derivative(z))
}

/// Aberth-Ehrlich iteration for any function supplying `(f, f')`.
///
/// Stops once every correction is below `4 eps` relative to its root.
pub fn aberth_with<F>(start: &[Complex], max_iter: usize, f: F) -> Vec<Complex>
where
    F: Fn(Complex) -> (Complex, Complex),
{
    let mut z = start.to_vec();
    let n = z.len();
    let mut converged = vec![false; n];
    for _ in 0..max_iter {
        let mut all_done = true;
        for k in 0..n {
            if converged[k] {
                continue;
            }
            let (fk, dfk) = f(z[k]);
            if fk.is_zero() {
                converged[k] = true;
                continue;
            }
            let ratio = fk / dfk;
            let repulsion: Complex = (0..n)
                .filter(|&j| j != k)
                .map(|j| Complex::new(1.0, 0.0) / (z[k] - z[j]))
                .sum();
            let step = ratio / (Complex::new(1.0, 0.0) - ratio * repulsion);
            if !(step.re.is_finite() && step.im.is_finite()) {
                converged[k] = true;
                continue;
            }
            z[k] -= step;
            if step.norm() <= 4.0 * f64::EPSILON * z[k].norm().max(1e-300) {
                converged[k] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            break;
        }
    }
    z
}

fn newton_polish(p: &DensePoly, mut r: Complex) -> Complex {
    let mut best = (p.eval(r).norm(), r);
    for _ in 0..3 {
        let (f, df) = p.eval_with_derivative(r);
        if df.is_zero() {
            break;
        }
        r -= f / df;
        let res = p.eval(r).norm();
        if !res.is_finite() {
            break;
        }
        if res < best.0 {
            best = (res, r);
        }
    }
    best.1
}

impl Add for &DensePoly {
    type Output = DensePoly;
    fn add(self, rhs: &DensePoly) -> DensePoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len)
            .map(|i| {
                self.coeffs.get(i).copied().unwrap_or_default()
                    + rhs.coeffs.get(i).copied().unwrap_or_default()
            })
            .collect();
        DensePoly::new(coeffs)
    }
}

impl Sub for &DensePoly {
    type Output = DensePoly;
    fn sub(self, rhs: &DensePoly) -> DensePoly {
        self + &(-rhs)
    }
}

impl Neg for &DensePoly {
    type Output = DensePoly;
    fn neg(self) -> DensePoly {
        DensePoly {
            coeffs: self.coeffs.iter().map(|&c| -c).collect(),
        }
    }
}

impl Mul for &DensePoly {
    type Output = DensePoly;
    fn mul(self, rhs: &DensePoly) -> DensePoly {
        if self.is_zero() || rhs.is_zero() {
            return DensePoly::zero();
        }
        let mut coeffs = vec![Complex::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        DensePoly::new(coeffs)
    }
}

impl fmt::Debug for DensePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DensePoly{:?}", self.coeffs)
    }
}
