//! The adjoint twisted Alexander polynomial: Fox pipeline, closed form,
//! torsion, and the comparison between them.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::adjoint::{ad_unchecked, Mat3Laurent};
use crate::error::{Error, Result};
use crate::fox::fox_derivative;
use crate::freegroup::{build_relator, build_w, Gen, GroupRingElt, Word};
use crate::laurent::LaurentPoly;
use num_traits::{One, Zero};

use crate::scalar::{cheb_pair, Complex, DdComplex, Scalar, Tolerances};
use crate::sl2::{eval_word, KnotParams, Mat2, NonabelianRep};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flag {
    ClosedFormSingular,
    DegenerateTrace,
    Multiplicity,
    SignFlipped,
}

/// `Phi(sum c_u u) = sum c_u t^{e(u)} Ad(rho(u))`, with `e` the exponent sum.
pub fn phi_map(elt: &GroupRingElt, rep: &NonabelianRep) -> Mat3Laurent {
    phi_map_with(elt, &rep.rho_a_dd(), &rep.rho_b_dd()).to_complex()
}

/// [`phi_map`] for given generator images at any working precision.
pub fn phi_map_with<T: Scalar>(elt: &GroupRingElt, a: &Mat2<T>, b: &Mat2<T>) -> Mat3Laurent<T> {
    let mut out = Mat3Laurent::zero();
    for (u, c) in elt.terms() {
        let image = ad_unchecked(&eval_word(u, a, b));
        out.add_assign_scaled(&image, u.exponent_sum(), c as f64);
    }
    out
}

/// Intermediate values of the Fox pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct FoxDelta {
    /// `det Phi(dr/da)`.
    pub numerator: LaurentPoly,
    /// `det Phi(b - 1)`.
    pub denominator: LaurentPoly,
    /// The exact quotient, before normalization.
    pub quotient: LaurentPoly,
}

/// Unit eigenvectors of `m` as columns, or `None` when `m` is close to parabolic.
fn eigenbasis(m: &Mat2) -> Option<Mat2> {
    let [[p, q], [r, u]] = m.0;
    let tr = m.trace();
    let disc = (tr * tr - 4.0 * m.det()).sqrt();
    let mut cols = [[Complex::zero(); 2]; 2];
    for (k, lambda) in [(tr + disc) / 2.0, (tr - disc) / 2.0].into_iter().enumerate() {
        let v1 = [q, lambda - p];
        let v2 = [lambda - u, r];
        let norm = |v: &[Complex; 2]| (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        let v = if norm(&v1) >= norm(&v2) { v1 } else { v2 };
        let len = norm(&v);
        if !(len > 0.0) {
            return None;
        }
        cols[k] = [v[0] / len, v[1] / len];
    }
    let basis = Mat2::new(cols[0][0], cols[1][0], cols[0][1], cols[1][1]);
    let det = basis.det().norm();
    (det > 1e-12 && det.is_finite()).then_some(basis)
}

/// Generator images conjugated into a basis where they stay small.
///
/// The polynomial is unchanged by conjugating the representation, since every
/// `Phi` entry changes by the same similarity. Near the pole of the closed
/// form `rho(w)` can have entries of size `10^4` while its eigenvalues stay of
/// order one, and the determinant of `Phi(dr/da)` then cancels beyond even
/// double-double precision. In the eigenbasis of `rho(w)` the relator's
/// prefixes stay moderate. The basis is kept only when it actually shrinks
/// the images; it need not be exact, only inverted exactly.
pub fn balanced_generators(params: KnotParams, rep: &NonabelianRep) -> Result<(Mat2<DdComplex>, Mat2<DdComplex>)> {
    let (a, b) = (rep.rho_a_dd(), rep.rho_b_dd());
    let w = eval_word(&build_w(params.m)?, &a, &b);
    let size = |a: &Mat2<DdComplex>, b: &Mat2<DdComplex>, w: &Mat2<DdComplex>| a.max_abs().max(b.max_abs()).max(w.max_abs());
    let Some(basis) = eigenbasis(&w.to_complex()) else {
        return Ok((a, b));
    };
    let p = Mat2::<DdComplex>::from_complex(&basis);
    let p_inv = p.inverse()?;
    let conj = |m: &Mat2<DdComplex>| p_inv * *m * p;
    let (a2, b2, w2) = (conj(&a), conj(&b), conj(&w));
    if size(&a2, &b2, &w2) < size(&a, &b, &w) {
        Ok((a2, b2))
    } else {
        Ok((a, b))
    }
}

/// `det Phi(dr/da) / det Phi(b - 1)` with the relator differentiated letter by letter.
///
/// Runs in double-double precision on [`balanced_generators`]: the entries
/// of `Phi(dr/da)` can still exceed its determinant by many orders of
/// magnitude.
pub fn delta_fox_raw(params: KnotParams, rep: &NonabelianRep, tol: &Tolerances) -> Result<FoxDelta> {
    let (a, b) = balanced_generators(params, rep)?;
    let relator = build_relator(params)?;
    let numerator = phi_map_with(&fox_derivative(&relator, Gen::A), &a, &b).det();
    let b_minus_one = &GroupRingElt::word(Word::b()) - &GroupRingElt::one();
    let denominator = phi_map_with(&b_minus_one, &a, &b).det();
    let quotient = numerator.div_exact_tol(&denominator, tol.division)?;
    Ok(FoxDelta {
        numerator: numerator.to_complex(),
        denominator: denominator.to_complex(),
        quotient: quotient.to_complex(),
    })
}

/// Fox-pipeline polynomial shifted to minimal exponent 0.
pub fn delta_fox(params: KnotParams, rep: &NonabelianRep, tol: &Tolerances) -> Result<LaurentPoly> {
    Ok(delta_fox_raw(params, rep, tol)?.quotient.normalized())
}

/// The coefficients `(A, B, C)` of the closed form.
pub fn theorem_coeffs(params: KnotParams, rep: &NonabelianRep, tol: &Tolerances) -> Result<(Complex, Complex, Complex)> {
    let (a, b, c) = theorem_coeffs_at(params, rep.y_dd, tol)?;
    Ok((a.to_complex(), b.to_complex(), c.to_complex()))
}

/// [`theorem_coeffs`] at a given `y` and working precision.
pub fn theorem_coeffs_at<T: Scalar>(params: KnotParams, y: T, tol: &Tolerances) -> Result<(T, T, T)> {
    let k = T::from_f64;
    let (m, n) = (k(params.m as f64), k(params.n as f64));
    let (one, two) = (T::one(), k(2.0));
    let (sm, sm1) = cheb_pair(params.m, y);
    if (y + two).magnitude() <= tol.degenerate {
        return Err(Error::ClosedFormSingular("y + 2"));
    }
    if sm1.magnitude() <= tol.degenerate {
        return Err(Error::ClosedFormSingular("S_{m-1}(y)"));
    }
    let q = sm1 * sm1;
    let a = two * n * (two * m + two * sm * sm1 - y * q) / (y + two);
    let sum = sm + sm1;
    let b = -k(4.0) * sum * sum * (m * sm + (m + one) * sm1) / ((y + two) * sm1)
        + k(6.0) * m * sm * sm
        + (k(4.0) + k(4.0) * m - k(4.0) * n - two * m * y) * sm * sm1
        + (two + two * m - k(4.0) * m * n - y + two * n * y + two * m * n * y) * q;
    let lin = two * sm - y * sm1;
    let c = -(two * m * n - one) * lin * lin;
    Ok((a, b, c))
}

/// `D1 = (y + 2 - x^2)(4 - x^2 + (y - 2)(y + 2 - x^2) S_{m-1}^2)` and
/// `D2 = 4 + (y - 2)(y + 2 - x^2) S_{m-1}^2`.
pub fn denominators(params: KnotParams, rep: &NonabelianRep) -> (Complex, Complex) {
    let (d1, d2) = denominators_at(params, rep.y_dd, x_squared_dd(rep));
    (d1.to_complex(), d2.to_complex())
}

pub fn denominators_at<T: Scalar>(params: KnotParams, y: T, x2: T) -> (T, T) {
    let (two, four) = (T::from_f64(2.0), T::from_f64(4.0));
    let shifted = y + two - x2;
    let (sm1, _) = cheb_pair(params.m - 1, y);
    let core = (y - two) * shifted * sm1 * sm1;
    (shifted * (four - x2 + core), four + core)
}

fn x_squared_dd(rep: &NonabelianRep) -> DdComplex {
    let x = rep.s_dd + DdComplex::one() / rep.s_dd;
    x * x
}

/// `(A x^4 + B x^2 + C) / D2`.
pub fn quad_mid_from<T: Scalar>(a: T, b: T, c: T, x: T, d2: T) -> T {
    let x2 = x * x;
    (a * x2 * x2 + b * x2 + c) / d2
}

/// `(2 mn - quad_mid) / D1`.
pub fn torsion_from<T: Scalar>(mn: i64, quad_mid: T, d1: T) -> T {
    (T::from_f64(2.0 * mn as f64) - quad_mid) / d1
}

/// The closed form in factored and expanded shape.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaResult {
    pub prefactor_denom_d1: Complex,
    pub quad_denom_d2: Complex,
    pub coeff_a: Complex,
    pub coeff_b: Complex,
    pub coeff_c: Complex,
    pub quad_mid: Complex,
    /// `(t - 1)(mn t^2 - quad_mid t + mn) / D1`, expanded.
    pub laurent_form: LaurentPoly,
    /// `(2 mn - quad_mid) / D1`.
    pub torsion: Complex,
    pub flags: BTreeSet<Flag>,
}

/// The closed form, evaluated in double-double and rounded: near its poles
/// the numerator `A x^4 + B x^2 + C` cancels heavily.
pub fn delta_closed(params: KnotParams, rep: &NonabelianRep, tol: &Tolerances) -> Result<DeltaResult> {
    let y = rep.y_dd;
    let x = rep.s_dd + DdComplex::one() / rep.s_dd;
    let x2 = x * x;
    if (y + DdComplex::from_f64(2.0) - x2).magnitude() <= tol.degenerate {
        return Err(Error::ClosedFormSingular("y + 2 - x^2"));
    }
    let (a, b, c) = theorem_coeffs_at(params, y, tol)?;
    let (d1, d2) = denominators_at(params, y, x2);
    if d2.magnitude() <= tol.degenerate {
        return Err(Error::ClosedFormSingular("D2"));
    }
    if d1.magnitude() <= tol.degenerate {
        return Err(Error::ClosedFormSingular("D1"));
    }
    let quad_mid = quad_mid_from(a, b, c, x, d2);
    let mn = DdComplex::from_f64(params.mn() as f64);
    let one = DdComplex::one();
    let quad = LaurentPoly::new(0, vec![mn, -quad_mid, mn]);
    let t_minus_one = LaurentPoly::new(0, vec![-one, one]);
    let laurent_form = (&t_minus_one * &quad).scale(one / d1).to_complex();
    let mut flags = BTreeSet::new();
    if rep.multiplicity > 1 {
        flags.insert(Flag::Multiplicity);
    }
    Ok(DeltaResult {
        prefactor_denom_d1: d1.to_complex(),
        quad_denom_d2: d2.to_complex(),
        coeff_a: a.to_complex(),
        coeff_b: b.to_complex(),
        coeff_c: c.to_complex(),
        quad_mid: quad_mid.to_complex(),
        laurent_form,
        torsion: torsion_from(params.mn(), quad_mid, d1).to_complex(),
        flags,
    })
}

pub fn torsion_closed(params: KnotParams, rep: &NonabelianRep, tol: &Tolerances) -> Result<Complex> {
    Ok(delta_closed(params, rep, tol)?.torsion)
}

/// `-(Delta(t) / (t - 1))` at `t = 1`.
pub fn torsion_limit(delta: &LaurentPoly, tol: &Tolerances) -> Result<Complex> {
    let t_minus_one = LaurentPoly::new(0, vec![Complex::new(-1.0, 0.0), Complex::new(1.0, 0.0)]);
    let q = delta.div_exact_tol(&t_minus_one, tol.division)?;
    Ok(-q.eval(Complex::new(1.0, 0.0))?)
}

/// Comparison of the two pipelines up to a unit `+-t^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossCheck {
    pub pass: bool,
    /// Sup-norm discrepancy relative to the closed form's sup-norm.
    pub discrepancy: f64,
    /// `k` with `Delta_fox = sign t^k Delta_closed`.
    pub unit_shift: i64,
    /// `+1` or `-1`.
    pub sign: i32,
    pub fox: LaurentPoly,
    pub closed: LaurentPoly,
}

/// Compare the Fox-pipeline quotient with the expanded closed form.
pub fn compare(fox_raw: &LaurentPoly, closed: &LaurentPoly, tol: &Tolerances) -> CrossCheck {
    let fox = fox_raw.normalized();
    let closed_n = closed.normalized();
    let ratio = match (closed_n.leading(), fox.leading()) {
        (Some(c), Some(f)) => c / f,
        _ => Complex::new(1.0, 0.0),
    };
    let sign = if ratio.re < 0.0 { -1 } else { 1 };
    let aligned = fox.scale(Complex::new(sign as f64, 0.0));
    let scale = closed_n.sup_norm();
    let discrepancy = if scale > 0.0 {
        aligned.sup_distance(&closed_n) / scale
    } else {
        aligned.sup_norm()
    };
    CrossCheck {
        pass: discrepancy <= tol.crosscheck,
        discrepancy,
        unit_shift: fox_raw.min_exp() - closed.min_exp(),
        sign,
        fox,
        closed: closed_n,
    }
}

pub fn cross_check(params: KnotParams, rep: &NonabelianRep, tol: &Tolerances) -> Result<CrossCheck> {
    let fox = delta_fox_raw(params, rep, tol)?;
    let closed = delta_closed(params, rep, tol)?;
    Ok(compare(&fox.quotient, &closed.laurent_form, tol))
}
