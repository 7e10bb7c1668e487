//! The adjoint action of SL(2, C) on sl(2, C) in the ordered basis `(E, H, F)`.

use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use num_traits::One;

use crate::scalar::{cheb_pair, dd, Complex, DdComplex, Scalar, Tolerances};
use crate::sl2::{riley_xy_generic, trace_z_generic, w_entries, KnotParams, Mat2, NonabelianRep};

pub use crate::laurent::Mat3Laurent;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3<T: Scalar = Complex>(pub [[T; 3]; 3]);

impl<T: Scalar> Mat3<T> {
    pub fn zero() -> Self {
        Self([[T::zero(); 3]; 3])
    }

    pub fn identity() -> Self {
        Self::from_fn(|i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(f: impl Fn(usize, usize) -> T) -> Self {
        Self(std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))))
    }

    pub fn scale(&self, k: T) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * k)
    }

    pub fn det(&self) -> T {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|v| v.magnitude()).fold(0.0, f64::max)
    }

    pub fn sup_distance(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    /// `|self - other|_sup / max(1, |other|_sup)`.
    pub fn rel_distance(&self, other: &Self) -> f64 {
        self.sup_distance(other) / other.max_abs().max(1.0)
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::identity(), |acc, _| acc * *self)
    }

    pub fn to_complex(&self) -> Mat3 {
        Mat3::from_fn(|i, j| self.0[i][j].to_complex())
    }
}

impl<T: Scalar> Add for Mat3<T> {
    type Output = Mat3<T>;
    fn add(self, r: Mat3<T>) -> Mat3<T> {
        Mat3::from_fn(|i, j| self.0[i][j] + r.0[i][j])
    }
}

impl<T: Scalar> Sub for Mat3<T> {
    type Output = Mat3<T>;
    fn sub(self, r: Mat3<T>) -> Mat3<T> {
        Mat3::from_fn(|i, j| self.0[i][j] - r.0[i][j])
    }
}

impl<T: Scalar> Mul for Mat3<T> {
    type Output = Mat3<T>;
    fn mul(self, r: Mat3<T>) -> Mat3<T> {
        Mat3::from_fn(|i, j| {
            self.0[i][0] * r.0[0][j] + self.0[i][1] * r.0[1][j] + self.0[i][2] * r.0[2][j]
        })
    }
}

fn check_unimodular(m: &Mat2, tol: f64) -> Result<()> {
    let d = (m.det() - 1.0).norm();
    if d > tol || d.is_nan() {
        return Err(Error::NotUnimodular(d));
    }
    Ok(())
}

/// `Ad_M` without the determinant check.
///
/// Column `j` holds the coordinates of `M X_j M^-1` for `X = (E, H, F)`,
/// `E = [[0,1],[0,0]]`, `H = [[1,0],[0,-1]]`, `F = [[0,0],[1,0]]`.
pub fn ad_unchecked<T: Scalar>(m: &Mat2<T>) -> Mat3<T> {
    let [[e, f], [g, h]] = m.0;
    let two = T::from_f64(2.0);
    Mat3([
        [e * e, -two * e * f, -f * f],
        [-e * g, e * h + f * g, f * h],
        [-g * g, two * g * h, h * h],
    ])
}

pub fn ad(m: &Mat2) -> Result<Mat3> {
    check_unimodular(m, Tolerances::default().equality)?;
    Ok(ad_unchecked(m))
}

/// `(Ad_M)^n` from Chebyshev polynomials in `mu = tr M`; any integer `n`.
pub fn ad_power_closed(m: &Mat2, n: i64) -> Result<Mat3> {
    check_unimodular(m, Tolerances::default().equality)?;
    let [[e, f], [g, h]] = m.0;
    let (sp, sq) = cheb_pair(n, m.trace());
    let u = sp - h * sq;
    let v = sp - e * sq;
    Ok(Mat3([
        [u * u, -2.0 * f * sq * u, -f * f * sq * sq],
        [-g * sq * u, u * v + f * g * sq * sq, f * sq * v],
        [-g * g * sq * sq, 2.0 * g * sq * v, v * v],
    ]))
}

/// The shared entry table of `sum_{i=0}^{n-1} (Ad_M)^i`, before dividing by `mu^2 - 4`,
/// for `M = [[e, f], [g, h]]` with trace `mu` and `(X, Y)` standing for
/// `(S_{n-1}(mu)^2, S_{n-1}(mu) S_{n-2}(mu))`.
#[allow(clippy::too_many_arguments)]
fn geom_sum_table<T: Scalar>(e: T, f: T, g: T, h: T, mu: T, n: f64, x: T, y: T) -> Mat3<T> {
    let k = T::from_f64;
    let two = k(2.0);
    let n = k(n);
    let mu2 = mu * mu - two;
    let mu3 = mu * mu * mu - k(3.0) * mu;
    let kk = two * x - mu * y;
    Mat3([
        [
            two * n * f * g + h * h * kk - two * h * (mu * x - two * y) + mu2 * x - mu * y,
            two * f * (n * (e - h) + h * kk - mu * x + two * y),
            f * f * (two * n - two * x + mu * y),
        ],
        [
            -g * (n * (h - e) - h * kk + mu * x - two * y),
            n * (e - h) * (e - h) + two * f * g * kk,
            f * (n * (e - h) + h * kk - mu * x + mu2 * y),
        ],
        [
            g * g * (two * n - two * x + mu * y),
            -two * g * (n * (h - e) - h * kk + mu * x - mu2 * y),
            two * n * f * g + h * h * kk - two * h * (mu * x - mu2 * y) + mu2 * x - mu3 * y,
        ],
    ])
}

/// `sum_{i=0}^{n-1} (Ad_M)^i`, and `-sum_{i=n}^{-1} (Ad_M)^i` for negative `n`.
pub fn ad_geom_sum_closed(m: &Mat2, n: i64) -> Result<Mat3> {
    ad_geom_sum_closed_tol(m, n, &Tolerances::default())
}

pub fn ad_geom_sum_closed_tol(m: &Mat2, n: i64, tol: &Tolerances) -> Result<Mat3> {
    check_unimodular(m, tol.equality)?;
    let mu = m.trace();
    let denom = mu * mu - 4.0;
    if denom.norm() <= tol.degenerate {
        return Err(Error::DegenerateTrace(format!("tr M = {mu} is +-2")));
    }
    let (s1, s2) = cheb_pair(n - 1, mu);
    let [[e, f], [g, h]] = m.0;
    let table = geom_sum_table(e, f, g, h, mu, n as f64, s1 * s1, s1 * s2);
    Ok(table.scale(denom.inv()))
}

/// `Phi(delta_{n-1}(w^-1))`, using the Riley-locus values of
/// `S_{n-1}(z)^2` and `S_{n-1}(z) S_{n-2}(z)`.
pub fn phi_factor_s1(params: KnotParams, rep: &NonabelianRep, tol: &Tolerances) -> Result<Mat3> {
    if rep.riley_residual > tol.root_residual {
        return Err(Error::NotOnRileyVariety(rep.riley_residual));
    }
    let z = rep.z;
    let denom = z * z - 4.0;
    if denom.norm() <= tol.degenerate {
        return Err(Error::DegenerateTrace(format!("z = {z} is +-2")));
    }
    // The table cancels heavily near the closed-form poles, so it runs in
    // double-double.
    let x2 = rep.s_dd * rep.s_dd + DdComplex::one() / (rep.s_dd * rep.s_dd) + dd(Complex::new(2.0, 0.0));
    let (x, y) = riley_xy_generic(params, rep.y_dd, x2, tol)?;
    let (w11, w12, w22) = w_entries(params.m, rep.s_dd, rep.y_dd);
    let w21 = (DdComplex::from_f64(2.0) - rep.y_dd) * w12;
    let z_dd = trace_z_generic(params.m, rep.y_dd, x2);
    // rho(w)^-1 = [[w22, -w12], [-w21, w11]]
    let table = geom_sum_table(w22, -w12, -w21, w11, z_dd, params.n as f64, x, y);
    Ok(table.scale(DdComplex::one() / (z_dd * z_dd - DdComplex::from_f64(4.0))).to_complex())
}

/// `Phi((a^-1 b)^m)`, using `tr rho(a^-1 b) = y`.
pub fn phi_factor_s2(params: KnotParams, rep: &NonabelianRep) -> Mat3 {
    let (s, y) = (rep.s, rep.y);
    let si = s.inv();
    let (sm, sm1) = cheb_pair(params.m, y);
    let p = sm - sm1;
    let r = sm - (y - 1.0) * sm1;
    let y2 = y - 2.0;
    Mat3([
        [p * p, 2.0 * si * sm1 * p, -sm1 * sm1 * si * si],
        [s * y2 * sm1 * p, p * r + y2 * sm1 * sm1, -sm1 * si * r],
        [-s * s * y2 * y2 * sm1 * sm1, -2.0 * s * y2 * sm1 * r, r * r],
    ])
}

/// `Phi(delta_{m-1}(a b^-1))`, using `tr rho(a b^-1) = y`.
pub fn phi_factor_s3(params: KnotParams, rep: &NonabelianRep, tol: &Tolerances) -> Result<Mat3> {
    let (s, y) = (rep.s, rep.y);
    let denom = y * y - 4.0;
    if denom.norm() <= tol.degenerate {
        return Err(Error::DegenerateTrace(format!("y = {y} is +-2")));
    }
    let si = s.inv();
    let m = params.m as f64;
    let (sm, sm1) = cheb_pair(params.m, y);
    let ss = sm * sm1;
    let q = sm1 * sm1;
    let y2 = y - 2.0;
    let a = m + ss - (y + 1.0) * q;
    let b = 2.0 * m - y * ss + (y * y - 2.0) * q;
    let c = m - (y + 1.0) * ss + (y * y + y - 1.0) * q;
    let table = Mat3([
        [y2 * (2.0 * m + 2.0 * ss - y * q), 2.0 * s * y2 * a, s * s * b],
        [
            y2 * y2 * si * a,
            y2 * (y2 * m + 2.0 * y * ss - (2.0 * y * y - 4.0) * q),
            s * y2 * c,
        ],
        [
            y2 * y2 * si * si * b,
            2.0 * si * y2 * y2 * c,
            y2 * (2.0 * m + (y * y - 2.0) * ss - (y * y * y - 3.0 * y) * q),
        ],
    ]);
    Ok(table.scale(denom.inv()))
}

/// `(Ad_M)^n` by repeated multiplication; negative `n` uses `Ad_{M^-1}`.
pub fn ad_power_brute<T: Scalar>(m: &Mat2<T>, n: i64) -> Mat3<T> {
    let base = if n < 0 { m.adjugate() } else { *m };
    ad_unchecked(&base).pow(n.unsigned_abs() as u32)
}

/// `sum_{i=0}^{n-1} (Ad_M)^i` by direct summation, with the negative-`n` extension.
pub fn ad_geom_sum_brute<T: Scalar>(m: &Mat2<T>, n: i64) -> Mat3<T> {
    if n >= 0 {
        let a = ad_unchecked(m);
        let mut p = Mat3::identity();
        let mut acc = Mat3::zero();
        for _ in 0..n {
            acc = acc + p;
            p = p * a;
        }
        acc
    } else {
        let ai = ad_unchecked(&m.adjugate());
        let mut p = ai;
        let mut acc = Mat3::zero();
        for _ in 0..-n {
            acc = acc + p;
            p = p * ai;
        }
        acc.scale(-T::one())
    }
}
