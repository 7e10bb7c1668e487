//! Nonabelian SL(2, C) representations of `J(2m, 2n)` in Riley normal form.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freegroup::{build_w, Gen, Word};
use crate::poly::{aberth_with, sort_roots, DensePoly};
use crate::scalar::{cheb_coeffs, cheb_pair, dd, is_finite, Complex, DdComplex, Ring, Scalar, Tolerances};

/// The knot `J(2m, 2n)`; both parameters are nonzero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct KnotParams {
    pub m: i64,
    pub n: i64,
}

impl KnotParams {
    pub fn new(m: i64, n: i64) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidParam(format!(
                "J(2m, 2n) needs m and n nonzero, got m = {m}, n = {n}"
            )));
        }
        Ok(Self { m, n })
    }

    pub fn mn(&self) -> i64 {
        self.m * self.n
    }
}

impl fmt::Display for KnotParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "J({}, {})", 2 * self.m, 2 * self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2<T: Scalar = Complex>(pub [[T; 2]; 2]);

impl<T: Scalar> Mat2<T> {
    pub fn new(e: T, f: T, g: T, h: T) -> Self {
        Self([[e, f], [g, h]])
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn det(&self) -> T {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn trace(&self) -> T {
        self.0[0][0] + self.0[1][1]
    }

    /// Adjugate, which is the inverse for determinant one.
    pub fn adjugate(&self) -> Self {
        let [[e, f], [g, h]] = self.0;
        Self::new(h, -f, -g, e)
    }

    pub fn inverse(&self) -> Result<Self> {
        let d = self.det();
        if d.magnitude() < f64::MIN_POSITIVE {
            return Err(Error::DegenerateInput("singular 2x2 matrix".into()));
        }
        let adj = self.adjugate();
        Ok(Self(adj.0.map(|row| row.map(|v| v / d))))
    }

    /// Integer power; negative exponents use the adjugate, so `self` should be unimodular.
    pub fn pow(&self, k: i64) -> Self {
        let base = if k < 0 { self.adjugate() } else { *self };
        let mut acc = Self::identity();
        let mut sq = base;
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * sq;
            }
            sq = sq * sq;
            e >>= 1;
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|v| v.magnitude()).fold(0.0, f64::max)
    }

    pub fn sup_distance(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn to_complex(&self) -> Mat2 {
        Mat2(self.0.map(|row| row.map(|v| v.to_complex())))
    }

    pub fn from_complex(m: &Mat2) -> Self {
        Self(m.0.map(|row| row.map(T::from_complex)))
    }
}

impl<T: Scalar> Mul for Mat2<T> {
    type Output = Mat2<T>;
    fn mul(self, r: Mat2<T>) -> Mat2<T> {
        let a = &self.0;
        let b = &r.0;
        Mat2(std::array::from_fn(|i| {
            std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j])
        }))
    }
}

impl<T: Scalar> Sub for Mat2<T> {
    type Output = Mat2<T>;
    fn sub(self, r: Mat2<T>) -> Mat2<T> {
        Mat2(std::array::from_fn(|i| {
            std::array::from_fn(|j| self.0[i][j] - r.0[i][j])
        }))
    }
}

pub fn rho_a<T: Scalar>(s: T) -> Mat2<T> {
    Mat2::new(s, T::one(), T::zero(), T::one() / s)
}

pub fn rho_b<T: Scalar>(s: T, y: T) -> Mat2<T> {
    Mat2::new(s, T::zero(), T::from_f64(2.0) - y, T::one() / s)
}

/// Image of a word letter by letter; inverse letters use exact adjugates.
pub fn eval_word<T: Scalar>(u: &Word, a: &Mat2<T>, b: &Mat2<T>) -> Mat2<T> {
    let (ai, bi) = (a.adjugate(), b.adjugate());
    u.letters().fold(Mat2::identity(), |acc, (g, e)| {
        acc * match (g, e > 0) {
            (Gen::A, true) => *a,
            (Gen::A, false) => ai,
            (Gen::B, true) => *b,
            (Gen::B, false) => bi,
        }
    })
}

/// The two roots of `s^2 - x s + 1`, canonical one first.
///
/// The canonical root has `|s| <= 1`; on the unit circle the one with
/// nonnegative imaginary part is taken.
pub fn s_from_x(x: Complex) -> Result<(Complex, Complex)> {
    let (s, t) = s_from_x_dd(x)?;
    Ok((s.to_complex(), t.to_complex()))
}

/// [`s_from_x`] refined to double-double precision.
pub fn s_from_x_dd(x: Complex) -> Result<(DdComplex, DdComplex)> {
    if !is_finite(x) {
        return Err(Error::InvalidParam("x must be finite".into()));
    }
    let disc = (x * x - 4.0).sqrt();
    let (r1, r2) = ((x + disc) / 2.0, (x - disc) / 2.0);
    // r1 r2 = 1; take the smaller one, the other is its reciprocal
    let small = if r1.norm() <= r2.norm() { r1 } else { r2 };
    let xd = dd(x);
    let mut s = dd(small);
    for _ in 0..3 {
        let f = s * s - xd * s + DdComplex::one();
        let df = s + s - xd;
        if f.magnitude() == 0.0 || df.magnitude() < 1e-8 {
            break;
        }
        s = s - f / df;
    }
    let big = DdComplex::one() / s;
    let (sc, bc) = (s.to_complex(), big.to_complex());
    if (sc.norm() - bc.norm()).abs() <= 1e-14 * bc.norm() && bc.im > sc.im {
        return Ok((big, s));
    }
    Ok((s, big))
}

/// Forward-mode dual number `v + d eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual<T> {
    pub v: T,
    pub d: T,
}

impl<T: Scalar> Dual<T> {
    pub fn var(v: T) -> Self {
        Self { v, d: T::one() }
    }

    pub fn constant(v: T) -> Self {
        Self { v, d: T::zero() }
    }
}

impl<T: Scalar> Add for Dual<T> {
    type Output = Self;
    fn add(self, r: Self) -> Self {
        Dual { v: self.v + r.v, d: self.d + r.d }
    }
}

impl<T: Scalar> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, r: Self) -> Self {
        Dual { v: self.v - r.v, d: self.d - r.d }
    }
}

impl<T: Scalar> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, r: Self) -> Self {
        Dual { v: self.v * r.v, d: self.d * r.v + self.v * r.d }
    }
}

impl<T: Scalar> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual { v: -self.v, d: -self.d }
    }
}

impl<T: Scalar> Zero for Dual<T> {
    fn zero() -> Self {
        Self::constant(T::zero())
    }
    fn is_zero(&self) -> bool {
        self.v.magnitude() == 0.0 && self.d.magnitude() == 0.0
    }
}

impl<T: Scalar> One for Dual<T> {
    fn one() -> Self {
        Self::constant(T::one())
    }
}

fn two<T: Ring>() -> T {
    T::one() + T::one()
}

/// `z = tr rho(w) = 2 S_m^2 - 2 y S_m S_{m-1} + ((2 - y) x^2 + y^2 - 2) S_{m-1}^2`.
pub fn trace_z_generic<T: Ring>(m: i64, y: T, x2: T) -> T {
    let (sm, sm1) = cheb_pair(m, y);
    let t = two::<T>();
    t * sm * sm - t * y * sm * sm1 + ((t - y) * x2 + y * y - t) * sm1 * sm1
}

pub fn trace_z(m: i64, y: Complex, x: Complex) -> Complex {
    trace_z_generic(m, y, x * x)
}

/// Entries `(w11, w12, w22)` of `rho(w)`; the remaining entry is `(2 - y) w12`.
pub fn w_entries<T: Scalar>(m: i64, s: T, y: T) -> (T, T, T) {
    let k = T::from_f64;
    let one = T::one();
    let two = k(2.0);
    let (sm, sm1) = cheb_pair(m, y);
    let si = one / s;
    let s2 = s * s;
    let si2 = si * si;
    let q = sm1 * sm1;
    let w11 = sm * sm + (two - two * y) * sm * sm1 + (one + two * s2 - two * y - s2 * y + y * y) * q;
    let w12 = (si - s) * sm * sm1 + (si + s - y * si) * q;
    let w22 = sm * sm - two * sm * sm1 + (one + two * si2 - y * si2) * q;
    (w11, w12, w22)
}

/// `phi = S_{n-2}(z) - [1 - (y + 2 - x^2) S_{m-1}(y) (S_{m-1}(y) - S_{m-2}(y))] S_{n-1}(z)`.
pub fn riley_phi_generic<T: Ring>(params: KnotParams, y: T, x2: T) -> T {
    let z = trace_z_generic(params.m, y, x2);
    let (sm1, sm2) = cheb_pair(params.m - 1, y);
    let (sn1, sn2) = cheb_pair(params.n - 1, z);
    let bracket = T::one() - (y + two::<T>() - x2) * sm1 * (sm1 - sm2);
    sn2 - bracket * sn1
}

pub fn riley_phi(params: KnotParams, s: Complex, y: Complex) -> Complex {
    let x = s + s.inv();
    riley_phi_generic(params, y, x * x)
}

/// `(phi, d phi / dy)` at fixed `x^2`.
pub fn riley_phi_with_derivative<T: Scalar>(params: KnotParams, x2: T, y: T) -> (T, T) {
    let r = riley_phi_generic(params, Dual::var(y), Dual::constant(x2));
    (r.v, r.d)
}

/// The z polynomial in `y` for fixed `x`.
pub fn trace_z_poly(m: i64, x: Complex) -> DensePoly {
    let x2 = DensePoly::constant(x * x);
    let yv = DensePoly::monomial(1);
    let sm = cheb_coeffs(m);
    let sm1 = cheb_coeffs(m - 1);
    let two = DensePoly::constant(Complex::new(2.0, 0.0));
    let a = &(&two * &sm) * &sm;
    let b = &(&(&two * &yv) * &sm) * &sm1;
    let coef = &(&(&(&two - &yv) * &x2) + &(&yv * &yv)) - &two;
    let c = &(&coef * &sm1) * &sm1;
    &(&a - &b) + &c
}

/// The Riley polynomial as a dense polynomial in `y`.
pub fn riley_poly(params: KnotParams, s: Complex) -> Result<DensePoly> {
    if s.is_zero() || !is_finite(s) {
        return Err(Error::InvalidParam("s must be finite and nonzero".into()));
    }
    let x = s + s.inv();
    let z = trace_z_poly(params.m, x);
    let sm1 = cheb_coeffs(params.m - 1);
    let sm2 = cheb_coeffs(params.m - 2);
    let shifted = DensePoly::new(vec![Complex::new(2.0, 0.0) - x * x, Complex::one()]);
    let bracket = &DensePoly::one() - &(&(&shifted * &sm1) * &(&sm1 - &sm2));
    let sn2 = cheb_coeffs(params.n - 2).compose(&z);
    let sn1 = cheb_coeffs(params.n - 1).compose(&z);
    Ok(&sn2 - &(&bracket * &sn1))
}

/// A solved representation in Riley normal form.
///
/// `s` and `y` are also kept in double-double precision; word images and
/// everything derived from them are evaluated at that precision, since the
/// images of long words can be large enough to swamp double rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct NonabelianRep {
    pub params: KnotParams,
    pub s: Complex,
    pub x: Complex,
    pub y: Complex,
    pub z: Complex,
    pub rho_a: Mat2,
    pub rho_b: Mat2,
    /// `|phi(s, y)|`.
    pub riley_residual: f64,
    /// `|rho(w^n a) - rho(b w^n)|_sup`.
    pub relator_residual: f64,
    /// Number of numerically coincident Riley roots merged into this one.
    pub multiplicity: usize,
    pub s_dd: DdComplex,
    pub y_dd: DdComplex,
}

impl NonabelianRep {
    /// `x^2 = s^2 + s^-2 + 2`.
    pub fn x2(&self) -> Complex {
        self.x * self.x
    }

    pub fn is_verified(&self, tol: &Tolerances) -> bool {
        self.relator_residual <= tol.root_residual && self.riley_residual <= tol.root_residual
    }

    /// The closed form has a pole at `x^2 = y + 2`.
    pub fn is_closed_form_singular(&self, tol: &Tolerances) -> bool {
        (self.y + 2.0 - self.x2()).norm() <= tol.degenerate
    }

    pub fn rho(&self, u: &Word) -> Mat2 {
        self.rho_dd(u).to_complex()
    }

    pub fn rho_a_dd(&self) -> Mat2<DdComplex> {
        rho_a(self.s_dd)
    }

    pub fn rho_b_dd(&self) -> Mat2<DdComplex> {
        rho_b(self.s_dd, self.y_dd)
    }

    pub fn rho_dd(&self, u: &Word) -> Mat2<DdComplex> {
        eval_word(u, &self.rho_a_dd(), &self.rho_b_dd())
    }
}

pub fn make_rep(params: KnotParams, s: Complex, y: Complex) -> Result<NonabelianRep> {
    make_rep_tol(params, s, y, &Tolerances::default())
}

pub fn make_rep_tol(params: KnotParams, s: Complex, y: Complex, tol: &Tolerances) -> Result<NonabelianRep> {
    make_rep_dd(params, dd(s), dd(y), tol)
}

pub fn make_rep_dd(params: KnotParams, s_dd: DdComplex, y_dd: DdComplex, tol: &Tolerances) -> Result<NonabelianRep> {
    let (s, y) = (s_dd.to_complex(), y_dd.to_complex());
    if s.is_zero() || !is_finite(s) {
        return Err(Error::InvalidParam("s must be finite and nonzero".into()));
    }
    if !is_finite(y) {
        return Err(Error::InvalidParam("y must be finite".into()));
    }
    if (y - 2.0).norm() <= tol.equality {
        return Err(Error::InvalidParam("y = 2 gives an abelian representation".into()));
    }
    let x_dd = s_dd + DdComplex::one() / s_dd;
    let x = x_dd.to_complex();
    let mut rep = NonabelianRep {
        params,
        s,
        x,
        y,
        z: trace_z_generic(params.m, y_dd, x_dd * x_dd).to_complex(),
        rho_a: rho_a(s_dd).to_complex(),
        rho_b: rho_b(s_dd, y_dd).to_complex(),
        riley_residual: riley_phi_generic(params, y_dd, x_dd * x_dd).magnitude(),
        relator_residual: 0.0,
        multiplicity: 1,
        s_dd,
        y_dd,
    };
    rep.relator_residual = verify_rep(&rep, params)?;
    Ok(rep)
}

/// `|rho(w^n a) - rho(b w^n)|_sup` by direct word evaluation.
pub fn verify_rep(rep: &NonabelianRep, params: KnotParams) -> Result<f64> {
    let wn = rep.rho_dd(&build_w(params.m)?.pow(params.n));
    let lhs = wn * rep.rho_a_dd();
    let rhs = rep.rho_b_dd() * wn;
    Ok(lhs.sup_distance(&rhs))
}

/// Outcome of a Riley root search.
#[derive(Debug, Clone, PartialEq)]
pub struct RileyRoots {
    pub poly: DensePoly,
    /// Accepted representations in `(re y, im y)` order.
    pub reps: Vec<NonabelianRep>,
    /// Roots dropped for lying on the abelian locus `y = 2`.
    pub abelian_excluded: Vec<Complex>,
}

/// Roots of the Riley polynomial, polished against the scalar evaluation.
pub fn riley_root_values(params: KnotParams, s: Complex) -> Result<(DensePoly, Vec<Complex>)> {
    let poly = riley_poly(params, s)?;
    let seeds = poly.roots()?;
    let x = s + s.inv();
    let x2 = x * x;
    let f = |y: Complex| riley_phi_with_derivative(params, x2, y);
    let polished = aberth_with(&seeds, 200, f);
    let mut roots: Vec<Complex> = seeds
        .iter()
        .zip(&polished)
        .map(|(&seed, &p)| {
            if is_finite(p) && f(p).0.norm() <= f(seed).0.norm() {
                p
            } else {
                seed
            }
        })
        .collect();
    sort_roots(&mut roots);
    Ok((poly, roots))
}

/// Newton steps on the scalar Riley function in double-double precision.
///
/// Returns `y` unchanged when the iteration does not settle near it.
pub fn refine_root_dd(params: KnotParams, x2: DdComplex, y: Complex) -> DdComplex {
    let start = dd(y);
    let mut cur = start;
    for _ in 0..8 {
        let (f, df) = riley_phi_with_derivative(params, x2, cur);
        if f.magnitude() == 0.0 || df.magnitude() == 0.0 {
            break;
        }
        let step = f / df;
        cur = cur - step;
        if step.magnitude() <= 1e-30 * cur.magnitude().max(1e-300) {
            break;
        }
    }
    let moved = (cur - start).magnitude();
    if moved.is_finite() && moved <= 1e-8 * y.norm().max(1.0) {
        cur
    } else {
        start
    }
}

/// Group roots closer than `dist`; returns `(mean, count)` per cluster.
pub fn cluster_roots(roots: &[Complex], dist: f64) -> Vec<(Complex, usize)> {
    let mut members: Vec<Vec<Complex>> = Vec::new();
    for &r in roots {
        match members
            .iter()
            .position(|ms| ms.iter().any(|&q| (q - r).norm() < dist))
        {
            Some(i) => members[i].push(r),
            None => members.push(vec![r]),
        }
    }
    let mut clusters: Vec<(Complex, usize)> = members
        .iter()
        .map(|ms| (ms.iter().sum::<Complex>() / ms.len() as f64, ms.len()))
        .collect();
    clusters.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    clusters
}

pub fn riley_roots(params: KnotParams, s: Complex, tol: &Tolerances) -> Result<RileyRoots> {
    riley_roots_dd(params, dd(s), tol)
}

pub fn riley_roots_dd(params: KnotParams, s_dd: DdComplex, tol: &Tolerances) -> Result<RileyRoots> {
    let s = s_dd.to_complex();
    let (poly, roots) = riley_root_values(params, s)?;
    let x_dd = s_dd + DdComplex::one() / s_dd;
    let mut reps = Vec::new();
    let mut abelian_excluded = Vec::new();
    for (y, mult) in cluster_roots(&roots, tol.dedup) {
        if (y - 2.0).norm() <= tol.dedup {
            abelian_excluded.push(y);
            continue;
        }
        let y_dd = if mult == 1 {
            refine_root_dd(params, x_dd * x_dd, y)
        } else {
            dd(y)
        };
        let mut rep = make_rep_dd(params, s_dd, y_dd, tol)?;
        rep.multiplicity = mult;
        reps.push(rep);
    }
    if reps.is_empty() {
        return Err(Error::NoNonabelianRoots);
    }
    Ok(RileyRoots {
        poly,
        reps,
        abelian_excluded,
    })
}

/// Residuals of the two Chebyshev identities satisfied at a Riley root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RileyIdentityCheck {
    /// `S_{n-1}(z)^2 = [(y - x^2 + 2) S_{m-1}^2 (4 - x^2 + (y - x^2 + 2)(y - 2) S_{m-1}^2)]^-1`.
    pub square_error: f64,
    /// `S_{n-1}(z) S_{n-2}(z) = (1 - (y - x^2 + 2) S_{m-1} (S_m - (y - 1) S_{m-1})) S_{n-1}(z)^2`.
    pub product_error: f64,
    pub square_ok: bool,
    pub product_ok: bool,
}

impl RileyIdentityCheck {
    pub fn passed(&self) -> bool {
        self.square_ok && self.product_ok
    }
}

/// `X = S_{n-1}(z)^2` and `Y = S_{n-1}(z) S_{n-2}(z)` as predicted on the Riley locus.
pub fn riley_xy(params: KnotParams, rep: &NonabelianRep, tol: &Tolerances) -> Result<(Complex, Complex)> {
    riley_xy_generic(params, rep.y, rep.x2(), tol)
}

pub fn riley_xy_generic<T: Scalar>(params: KnotParams, y: T, x2: T, tol: &Tolerances) -> Result<(T, T)> {
    let one = T::one();
    let two = T::from_f64(2.0);
    let shifted = y + two - x2;
    let (sm, sm1) = cheb_pair(params.m, y);
    let q = sm1 * sm1;
    let denom = shifted * q * (T::from_f64(4.0) - x2 + shifted * (y - two) * q);
    if denom.magnitude() < tol.degenerate {
        return Err(Error::DegenerateInput(
            "Riley identity denominator (y + 2 - x^2) S_{m-1}^2 (...) vanishes".into(),
        ));
    }
    let x_val = one / denom;
    let y_val = (one - shifted * sm1 * (sm - (y - one) * sm1)) * x_val;
    Ok((x_val, y_val))
}

pub fn riley_identity_check(params: KnotParams, rep: &NonabelianRep, tol: &Tolerances) -> Result<RileyIdentityCheck> {
    let (x_pred, y_pred) = riley_xy(params, rep, tol)?;
    let (sn1, sn2) = cheb_pair(params.n - 1, rep.z);
    let rel = |a: Complex, b: Complex| (a - b).norm() / b.norm().max(1.0);
    let square_error = rel(sn1 * sn1, x_pred);
    let product_error = rel(sn1 * sn2, y_pred);
    Ok(RileyIdentityCheck {
        square_error,
        product_error,
        square_ok: square_error <= tol.root_residual,
        product_ok: product_error <= tol.root_residual,
    })
}
