//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! The oracles here (matrix arithmetic, adjoint action by conjugation, Fox
//! calculus, relator evaluation) are written from scratch and do not call the
//! library routines they check.

use std::collections::BTreeMap;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::panic::{self, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use knot_atap::adjoint::{ad_geom_sum_closed, ad_power_closed, phi_factor_s1, phi_factor_s2, phi_factor_s3, Mat3};
use knot_atap::atap::phi_map;
use knot_atap::fox::{fox_derivative, relator_derivative_closed};
use knot_atap::freegroup::{build_relator, Gen, GroupRingElt, Word};
use knot_atap::report::{self, CellOutcome, Meridian};
use knot_atap::scalar::{cheb_pair, DdComplex, Scalar};
use knot_atap::sl2::{riley_identity_check, riley_roots_dd, s_from_x_dd, Mat2};
use knot_atap::{Complex, Error, KnotParams, NonabelianRep, Tolerances};
use dashu_float::FBig;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const GRID: [i64; 6] = [-3, -2, -1, 1, 2, 3];
const TRACES: [(f64, f64); 4] = [(2.0, 0.0), (1.7, 0.0), (0.6, 1.1), (2.3, -0.4)];
const BIN: &str = env!("CARGO_BIN_EXE_knot-atap");

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn traces() -> Vec<Complex> {
    TRACES.iter().map(|&(r, i)| c(r, i)).collect()
}

fn params(m: i64, n: i64) -> KnotParams {
    KnotParams::new(m, n).expect("grid parameters are nonzero")
}

// ---- small dense matrices over f64 or multiprecision complex numbers ----

type Big = FBig;
type BigC = num_complex::Complex<Big>;

/// Bits carried by the multiprecision oracle.
const BIG_PRECISION: usize = 240;

trait Field:
    Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self> + Zero + One
{
    fn approx(&self) -> Complex;
    fn from_f64(v: f64) -> Self;
}

impl Field for Complex {
    fn approx(&self) -> Complex {
        *self
    }
    fn from_f64(v: f64) -> Self {
        c(v, 0.0)
    }
}

fn big(v: f64) -> Big {
    Big::try_from(v).expect("finite input").with_precision(BIG_PRECISION).value()
}

impl Field for BigC {
    fn approx(&self) -> Complex {
        c(self.re.to_f64().value(), self.im.to_f64().value())
    }
    fn from_f64(v: f64) -> Self {
        BigC::new(big(v), big(0.0))
    }
}

/// The exact value of a double-double complex number.
fn big_dd(v: DdComplex) -> BigC {
    BigC::new(big(v.re.hi()) + big(v.re.lo()), big(v.im.hi()) + big(v.im.lo()))
}

type M2<T = Complex> = [[T; 2]; 2];
type M3<T = Complex> = [[T; 3]; 3];

const Z: Complex = Complex::new(0.0, 0.0);
const ONE: Complex = Complex::new(1.0, 0.0);

fn mul2<T: Field>(p: &M2<T>, q: &M2<T>) -> M2<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| p[i][0].clone() * q[0][j].clone() + p[i][1].clone() * q[1][j].clone()))
}

fn inv2<T: Field>(p: &M2<T>) -> M2<T> {
    let d = p[0][0].clone() * p[1][1].clone() - p[0][1].clone() * p[1][0].clone();
    [
        [p[1][1].clone() / d.clone(), -p[0][1].clone() / d.clone()],
        [-p[1][0].clone() / d.clone(), p[0][0].clone() / d],
    ]
}

fn id2<T: Field>() -> M2<T> {
    [[T::one(), T::zero()], [T::zero(), T::one()]]
}

fn pow2<T: Field>(p: &M2<T>, k: i64) -> M2<T> {
    let base = if k < 0 { inv2(p) } else { p.clone() };
    let mut r = id2();
    for _ in 0..k.unsigned_abs() {
        r = mul2(&r, &base);
    }
    r
}

fn dist2<T: Field>(p: &M2<T>, q: &M2<T>) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            d = d.max((p[i][j].clone() - q[i][j].clone()).approx().norm());
        }
    }
    d
}

fn id3<T: Field>() -> M3<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { T::one() } else { T::zero() }))
}

fn mul3<T: Field>(p: &M3<T>, q: &M3<T>) -> M3<T> {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| (0..3).fold(T::zero(), |acc, k| acc + p[i][k].clone() * q[k][j].clone()))
    })
}

fn add3<T: Field>(p: &M3<T>, q: &M3<T>, negate: bool) -> M3<T> {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| if negate { p[i][j].clone() - q[i][j].clone() } else { p[i][j].clone() + q[i][j].clone() })
    })
}

fn approx3<T: Field>(m: &M3<T>) -> M3 {
    std::array::from_fn(|i| std::array::from_fn(|j| m[i][j].approx()))
}

/// `|a - b|_sup / |b|_sup`, and the plain distance when `b` vanishes.
fn rel3(a: &M3, b: &M3) -> f64 {
    let d = a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    let s = b.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
    if s == 0.0 {
        d
    } else {
        d / s
    }
}

/// Adjoint action on sl2 in the basis (E, H, F), by explicit conjugation.
fn ad<T: Field>(m: &M2<T>) -> M3<T> {
    let (o, l) = (T::zero(), T::one());
    let basis: [M2<T>; 3] = [
        [[o.clone(), l.clone()], [o.clone(), o.clone()]],
        [[l.clone(), o.clone()], [o.clone(), -l.clone()]],
        [[o.clone(), o.clone()], [l, o]],
    ];
    let mi = inv2(m);
    let cols: Vec<[T; 3]> = basis
        .iter()
        .map(|x| {
            let y = mul2(&mul2(m, x), &mi);
            [y[0][1].clone(), y[0][0].clone(), y[1][0].clone()]
        })
        .collect();
    std::array::from_fn(|i| std::array::from_fn(|j| cols[j][i].clone()))
}

fn ad_pow<T: Field>(m: &M2<T>, n: i64) -> M3<T> {
    let a = ad(&if n < 0 { inv2(m) } else { m.clone() });
    let mut r = id3();
    for _ in 0..n.unsigned_abs() {
        r = mul3(&r, &a);
    }
    r
}

/// `sum_{i=0}^{n-1} Ad^i`, and `-sum_{i=n}^{-1} Ad^i` for negative `n`.
fn ad_sum<T: Field>(m: &M2<T>, n: i64) -> M3<T> {
    let mut acc: M3<T> = std::array::from_fn(|_| std::array::from_fn(|_| T::zero()));
    if n >= 0 {
        let a = ad(m);
        let mut p = id3();
        for _ in 0..n {
            acc = add3(&acc, &p, false);
            p = mul3(&p, &a);
        }
    } else {
        let a = ad(&inv2(m));
        let mut p = a.clone();
        for _ in 0..-n {
            acc = add3(&acc, &p, true);
            p = mul3(&p, &a);
        }
    }
    acc
}

fn lib2(m: &M2) -> Mat2 {
    Mat2::new(m[0][0], m[0][1], m[1][0], m[1][1])
}

/// Generator images and `w = (b a^-1)^m (b^-1 a)^m` rebuilt from `(s, y)`.
struct Images<T> {
    a: M2<T>,
    b: M2<T>,
    w: M2<T>,
}

fn images<T: Field>(s: T, y: T, m: i64) -> Images<T> {
    let si = T::one() / s.clone();
    let a = [[s.clone(), T::one()], [T::zero(), si.clone()]];
    let b = [[s, T::zero()], [T::from_f64(2.0) - y, si]];
    let w = mul2(&pow2(&mul2(&b, &inv2(&a)), m), &pow2(&mul2(&inv2(&b), &a), m));
    Images { a, b, w }
}

fn relator_residual<T: Field>(s: T, y: T, p: KnotParams) -> f64 {
    let g = images(s, y, p.m);
    let wn = pow2(&g.w, p.n);
    dist2(&mul2(&wn, &g.a), &mul2(&g.b, &wn))
}

// ---- the shared grid ----

struct Cell {
    params: KnotParams,
    x: Complex,
    s: Complex,
    reps: Vec<NonabelianRep>,
    excluded: Vec<Complex>,
}

fn rep_cells() -> &'static Vec<Cell> {
    static CELLS: OnceLock<Vec<Cell>> = OnceLock::new();
    CELLS.get_or_init(|| {
        let tol = Tolerances::default();
        let mut out = Vec::new();
        for m in GRID {
            for n in GRID {
                for x in traces() {
                    let s = s_from_x_dd(x).expect("traces are finite").0;
                    let (reps, excluded) = match riley_roots_dd(params(m, n), s, &tol) {
                        Ok(r) => (r.reps, r.abelian_excluded),
                        Err(Error::NoNonabelianRoots) => (Vec::new(), Vec::new()),
                        Err(e) => panic!("Riley roots at ({m}, {n}) x={x}: {e}"),
                    };
                    out.push(Cell { params: params(m, n), x, s: s.to_complex(), reps, excluded });
                }
            }
        }
        out
    })
}

struct TimedGrid {
    cells: Vec<CellOutcome>,
    total: Duration,
    slowest: (Duration, String),
}

fn timed_grid() -> &'static TimedGrid {
    static GRID_RUN: OnceLock<TimedGrid> = OnceLock::new();
    GRID_RUN.get_or_init(|| {
        let tol = Tolerances::default();
        let mut cells = Vec::new();
        let mut slowest = (Duration::ZERO, String::new());
        let start = Instant::now();
        for m in GRID {
            for n in GRID {
                for x in traces() {
                    let t = Instant::now();
                    cells.extend(report::run_grid(&[m], &[n], &[x], None, &tol));
                    let el = t.elapsed();
                    if el > slowest.0 {
                        slowest = (el, format!("({m}, {n}) x={x}"));
                    }
                }
            }
        }
        TimedGrid { cells, total: start.elapsed(), slowest }
    })
}

// ---- criteria ----

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(problems: Vec<String>, detail: String) -> Outcome {
    if problems.is_empty() {
        Outcome { pass: true, detail }
    } else {
        let shown: Vec<&str> = problems.iter().take(6).map(String::as_str).collect();
        Outcome {
            pass: false,
            detail: format!("{detail}; {} problem(s): {}", problems.len(), shown.join(" | ")),
        }
    }
}

fn dual_pipeline() -> Outcome {
    let g = timed_grid();
    let mut problems = Vec::new();
    let (mut roots, mut degenerate, mut worst) = (0usize, 0usize, 0.0f64);
    for cell in &g.cells {
        if let Some(e) = &cell.error {
            problems.push(format!("({}, {}) x={:?}: {e}", cell.params.m, cell.params.n, cell.x));
        }
        for r in &cell.records {
            roots += 1;
            let singular = r.flags.iter().any(|f| f.starts_with("closed-form-singular") || f.starts_with("degenerate"));
            match r.crosscheck {
                Some(cc) => {
                    worst = worst.max(cc.discrepancy);
                    if !cc.pass || !(cc.discrepancy <= 1e-8) {
                        problems.push(format!("{} discrepancy {:e}", report::record_label(r), cc.discrepancy));
                    }
                }
                None if singular => degenerate += 1,
                None => problems.push(format!("{} not cross-checked: {:?}", report::record_label(r), r.flags)),
            }
        }
    }
    if g.total > Duration::from_secs(60) {
        problems.push(format!("total time {:?}", g.total));
    }
    if g.slowest.0 > Duration::from_secs(1) {
        problems.push(format!("cell {} took {:?}", g.slowest.1, g.slowest.0));
    }
    if roots == 0 {
        problems.push("no roots".into());
    }
    outcome(
        problems,
        format!(
            "{} cells, {roots} roots ({degenerate} degenerate), worst discrepancy {worst:.1e}, total {:.2?}, slowest cell {:.0?}",
            g.cells.len(),
            g.total,
            g.slowest.0
        ),
    )
}

fn trefoil() -> Outcome {
    let tol = Tolerances::default();
    let records = report::compute(params(1, 1), Meridian::Trace(c(2.0, 0.0)), &tol).expect("trefoil computes");
    let mut problems = Vec::new();
    if records.len() != 1 {
        problems.push(format!("{} roots", records.len()));
    }
    let r = &records[0];
    let near = |name: &str, v: Option<Complex>, want: Complex, problems: &mut Vec<String>| match v {
        Some(v) if (v - want).norm() <= 1e-9 => {}
        other => problems.push(format!("{name} = {other:?}, want {want}")),
    };
    near("y", Some(r.y.into()), c(3.0, 0.0), &mut problems);
    near("quad_mid", r.quad_mid.map(Into::into), c(-1.0, 0.0), &mut problems);
    near("D1", r.d1.map(Into::into), c(1.0, 0.0), &mut problems);
    near("D2", r.d2.map(Into::into), c(5.0, 0.0), &mut problems);
    near("torsion_closed", r.torsion_closed.map(Into::into), c(3.0, 0.0), &mut problems);
    match r.torsion_limit {
        Some(v) if (Complex::from(v).norm() - 3.0).abs() <= 1e-9 => {}
        other => problems.push(format!("torsion_limit = {other:?}")),
    }
    // (t - 1)(t^2 + t + 1) = t^3 - 1, up to a scalar.
    let d: Vec<Complex> = r.delta.iter().map(|&v| v.into()).collect();
    let want = [c(-1.0, 0.0), Z, Z, ONE];
    if d.len() != 4 {
        problems.push(format!("delta has {} coefficients", d.len()));
    } else {
        let k = d[3];
        let off = d.iter().zip(want).map(|(a, b)| (a - k * b).norm()).fold(0.0, f64::max);
        if !(off <= 1e-9 * k.norm()) || k.norm() == 0.0 {
            problems.push(format!("delta {d:?} not proportional to t^3 - 1"));
        }
    }
    if !r.verified() {
        problems.push("cross-check did not pass".into());
    }
    outcome(problems, format!("y = {}, delta = {:?}", report::fmt_complex(r.y.into()), r.delta.iter().map(|v| v.re).collect::<Vec<_>>()))
}

fn random_sl2(rng: &mut ChaCha8Rng) -> M2 {
    loop {
        let mut draw = || c(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5));
        let (e, f, g) = (draw(), draw(), draw());
        if e.norm() < 0.2 {
            continue;
        }
        let m = [[e, f], [g, (ONE + f * g) / e]];
        let tr = m[0][0] + m[1][1];
        if (tr * tr - 4.0).norm() > 1e-2 {
            return m;
        }
    }
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut problems = Vec::new();
    let (mut worst_p, mut worst_s) = (0.0f64, 0.0f64);
    for _ in 0..50 {
        let m = random_sl2(&mut rng);
        for n in -6..=8 {
            match ad_power_closed(&lib2(&m), n) {
                Ok(v) => {
                    let e = rel3(&v.0, &ad_pow(&m, n));
                    worst_p = worst_p.max(e);
                    if !(e <= 1e-8) {
                        problems.push(format!("power n={n}: {e:e}"));
                    }
                }
                Err(e) => problems.push(format!("power n={n}: {e}")),
            }
            match ad_geom_sum_closed(&lib2(&m), n) {
                Ok(v) => {
                    let e = rel3(&v.0, &ad_sum(&m, n));
                    worst_s = worst_s.max(e);
                    if !(e <= 1e-8) {
                        problems.push(format!("sum n={n}: {e:e}"));
                    }
                }
                Err(e) => problems.push(format!("sum n={n}: {e}")),
            }
        }
    }
    for p in [[[ONE, ONE], [Z, ONE]], [[-ONE, c(0.5, 2.0)], [Z, -ONE]], [[ONE, Z], [c(3.0, -1.0), ONE]]] {
        match ad_geom_sum_closed(&lib2(&p), 4) {
            Err(Error::DegenerateTrace(_)) => {}
            other => problems.push(format!("parabolic {p:?} gave {other:?}")),
        }
    }
    outcome(problems, format!("750 pairs, worst power {worst_p:.1e}, worst sum {worst_s:.1e}, parabolic rejected"))
}

fn factor_oracles() -> Outcome {
    let tol = Tolerances::default();
    let mut problems = Vec::new();
    let mut worst = [0.0f64; 3];
    let mut counts = [0usize; 3];
    for cell in rep_cells() {
        let p = cell.params;
        for rep in &cell.reps {
            // The exact double-double root: near-pole entries amplify a rounded y.
            let g = images(big_dd(rep.s_dd), big_dd(rep.y_dd), p.m);
            let label = format!("({}, {}) x={} y={:.6}", p.m, p.n, cell.x, rep.y);
            let mut check = |k: usize, got: Result<Mat3, Error>, want: M3<BigC>| match got {
                Ok(v) => {
                    let e = rel3(&v.0, &approx3(&want));
                    counts[k] += 1;
                    worst[k] = worst[k].max(e);
                    if !(e <= 1e-7) {
                        problems.push(format!("s{} at {label}: {e:e}", k + 1));
                    }
                }
                Err(Error::DegenerateTrace(_)) => {}
                Err(e) => problems.push(format!("s{} at {label}: {e}", k + 1)),
            };
            check(0, phi_factor_s1(p, rep, &tol), ad_sum(&inv2(&g.w), p.n));
            check(1, Ok(phi_factor_s2(p, rep)), ad_pow(&mul2(&inv2(&g.a), &g.b), p.m));
            check(2, phi_factor_s3(p, rep, &tol), ad_sum(&mul2(&g.a, &inv2(&g.b)), p.m));
        }
    }
    outcome(
        problems,
        format!(
            "{}/{}/{} evaluations, worst s1 {:.1e}, s2 {:.1e}, s3 {:.1e}",
            counts[0], counts[1], counts[2], worst[0], worst[1], worst[2]
        ),
    )
}

/// Letters as `+-1` for `a^{+-1}` and `+-2` for `b^{+-1}`.
type Letters = Vec<i8>;

fn reduce(w: &[i8]) -> Letters {
    let mut out: Letters = Vec::new();
    for &l in w {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

fn letters_pow(w: &[i8], k: i64) -> Letters {
    let base: Letters = if k < 0 { w.iter().rev().map(|l| -l).collect() } else { w.to_vec() };
    (0..k.unsigned_abs()).flat_map(|_| base.iter().copied()).collect()
}

fn fox_by_letters(w: &[i8], gen: i8) -> BTreeMap<Letters, i64> {
    let mut acc: BTreeMap<Letters, i64> = BTreeMap::new();
    for (i, &l) in w.iter().enumerate() {
        if l == gen {
            *acc.entry(reduce(&w[..i])).or_default() += 1;
        } else if l == -gen {
            *acc.entry(reduce(&w[..=i])).or_default() -= 1;
        }
    }
    acc.retain(|_, v| *v != 0);
    acc
}

fn from_library(e: &GroupRingElt) -> BTreeMap<Letters, i64> {
    let to_letters = |w: &Word| -> Letters {
        w.letters()
            .map(|(g, s)| match g {
                Gen::A => s as i8,
                Gen::B => 2 * s as i8,
            })
            .collect()
    };
    e.terms().filter(|(_, k)| *k != 0).map(|(w, k)| (to_letters(w), k)).collect()
}

fn expansion_equivalence() -> Outcome {
    let mut problems = Vec::new();
    let mut terms = 0;
    for m in GRID {
        for n in GRID {
            let p = params(m, n);
            let w: Letters = [letters_pow(&[2, -1], m), letters_pow(&[-2, 1], m)].concat();
            let r: Letters = [letters_pow(&w, n), vec![1], letters_pow(&w, -n), vec![-2]].concat();
            let oracle = fox_by_letters(&r, 1);
            terms += oracle.len();
            let direct = from_library(&fox_derivative(&build_relator(p).expect("relator builds"), Gen::A));
            let closed = from_library(&relator_derivative_closed(p).expect("expansion builds"));
            if direct != closed {
                problems.push(format!("({m}, {n}): Fox derivative differs from the expansion"));
            }
            if closed != oracle {
                problems.push(format!("({m}, {n}): expansion differs from letter-by-letter Fox calculus"));
            }
        }
    }
    outcome(problems, format!("36 parameter pairs, {terms} group-ring terms, exact integer match"))
}

fn structural_identities() -> Outcome {
    let tol = Tolerances::default();
    let mut problems = Vec::new();
    let (mut worst_det, mut worst_cheb, mut worst_riley) = (0.0f64, 0.0f64, 0.0f64);
    let (mut dets, mut rileys) = (0, 0);
    let b_minus_1 = &GroupRingElt::word(Word::b()) - &GroupRingElt::one();
    for cell in rep_cells() {
        for rep in &cell.reps {
            let label = format!("({}, {}) x={} y={:.6}", cell.params.m, cell.params.n, cell.x, rep.y);
            // (t - 1)(t - s^2)(t - s^-2) = t^3 - e t^2 + e t - 1 with e = 1 + s^2 + s^-2
            let s2 = rep.s * rep.s;
            let e = ONE + s2 + s2.inv();
            let want = [-ONE, e, -e, ONE];
            let det = phi_map(&b_minus_1, rep).det();
            let scale = want.iter().map(|v| v.norm()).fold(1.0, f64::max);
            let mut err = (det.min_exp().min(0)..=det.max_exp().unwrap_or(0).max(3))
                .map(|k| {
                    let w = if (0..4).contains(&k) { want[k as usize] } else { Z };
                    (det.coeff(k) - w).norm()
                })
                .fold(0.0, f64::max)
                / scale;
            if det.is_zero() {
                err = f64::INFINITY;
            }
            dets += 1;
            worst_det = worst_det.max(err);
            if !(err <= 1e-10) {
                problems.push(format!("det Phi(b - 1) at {label}: {err:e}"));
            }
            match riley_identity_check(cell.params, rep, &tol) {
                Ok(ch) => {
                    rileys += 1;
                    let e = ch.square_error.max(ch.product_error);
                    worst_riley = worst_riley.max(e);
                    if !(e <= 1e-7) {
                        problems.push(format!("Riley identities at {label}: {e:e}"));
                    }
                }
                Err(e) => problems.push(format!("Riley identities at {label}: {e}")),
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut samples: Vec<Complex> = (0..=40).map(|k| c(-2.0 + 0.1 * k as f64, 0.0)).collect();
    for _ in 0..200 {
        let theta = c(rng.random_range(0.0..std::f64::consts::PI), rng.random_range(-0.25..0.25));
        samples.push(2.0 * theta.cos());
    }
    for &y in &samples {
        for m in -12..=12 {
            let (sm, sm1) = cheb_pair(m, y);
            let e = (sm * sm - y * sm * sm1 + sm1 * sm1 - 1.0).norm();
            worst_cheb = worst_cheb.max(e);
            if !(e <= 1e-9) {
                problems.push(format!("Chebyshev identity m={m} y={y}: {e:e}"));
            }
        }
    }
    outcome(
        problems,
        format!(
            "det on {dets} reps worst {worst_det:.1e}; Chebyshev on {} samples worst {worst_cheb:.1e}; Riley identities on {rileys} roots worst {worst_riley:.1e}",
            samples.len() * 25
        ),
    )
}

fn representation_validity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut problems = Vec::new();
    let (mut reps, mut worst_root, mut smallest_off) = (0, 0.0f64, f64::INFINITY);
    for cell in rep_cells() {
        let p = cell.params;
        for rep in &cell.reps {
            reps += 1;
            let r = relator_residual(big_dd(rep.s_dd), big_dd(rep.y_dd), p);
            worst_root = worst_root.max(r);
            if !(r <= 1e-7) {
                problems.push(format!("({}, {}) x={} y={}: residual {r:e}", p.m, p.n, cell.x, rep.y));
            }
        }
        if cell.reps.is_empty() {
            continue;
        }
        let mut avoid: Vec<Complex> = cell.reps.iter().map(|r| r.y).collect();
        avoid.extend(&cell.excluded);
        avoid.push(c(2.0, 0.0));
        let mut drawn = 0;
        while drawn < 20 {
            let base = cell.reps[rng.random_range(0..cell.reps.len())].y;
            let y = base + Complex::from_polar(rng.random_range(0.02..0.2), rng.random_range(0.0..std::f64::consts::TAU));
            if avoid.iter().any(|a| (a - y).norm() < 0.01) {
                continue;
            }
            drawn += 1;
            let r = relator_residual(cell.s, y, p);
            smallest_off = smallest_off.min(r);
            if !(r > 1e-4) {
                problems.push(format!("({}, {}) x={} non-root y={y}: residual {r:e}", p.m, p.n, cell.x));
            }
        }
    }
    outcome(
        problems,
        format!("{reps} roots, worst residual {worst_root:.1e}; 20 non-roots per cell, smallest residual {smallest_off:.1e}"),
    )
}

fn torsion_consistency() -> Outcome {
    let g = timed_grid();
    let summary = report::summarize(&g.cells, &Tolerances::default());
    let mut problems = Vec::new();
    let Some(sigma) = summary.torsion_sign else {
        return outcome(vec!["no single sign fits the grid".into()], String::new());
    };
    let sign = if sigma == 1 { -1.0 } else { 1.0 };
    let (mut compared, mut worst) = (0, 0.0f64);
    for r in g.cells.iter().flat_map(|c| c.records.iter()) {
        if let (Some(l), Some(t)) = (r.torsion_limit, r.torsion_closed) {
            let (l, t): (Complex, Complex) = (l.into(), t.into());
            let e = (l - sign * t).norm() / (1.0 + t.norm());
            compared += 1;
            worst = worst.max(e);
            if !(e <= 1e-8) {
                problems.push(format!("{}: {e:e}", report::record_label(r)));
            }
        }
    }
    if compared == 0 {
        problems.push("no torsion pairs".into());
    }
    outcome(
        problems,
        format!(
            "sigma = {sigma}, torsion_limit = {}torsion_closed on {compared} roots, worst {worst:.1e}",
            if sigma == 1 { "-" } else { "+" }
        ),
    )
}

// ---- CLI contract ----

struct Run {
    code: i32,
    stdout: String,
}

fn run_cli(args: &[&str]) -> Run {
    let out = Command::new(BIN).args(args).output().expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
    }
}

fn cv(v: &Value) -> Option<Complex> {
    Some(c(v.get("re")?.as_f64()?, v.get("im")?.as_f64()?))
}

/// Recompute `quad_mid` and `torsion_closed` from the other stored fields.
fn round_trip_error(rec: &Value) -> Result<Option<f64>, String> {
    let field = |k: &str| rec.get(k).and_then(cv);
    let flags: Vec<&str> = rec["flags"].as_array().ok_or("flags missing")?.iter().filter_map(Value::as_str).collect();
    let (Some(a), Some(b), Some(cc), Some(q), Some(d1), Some(d2), Some(t)) =
        (field("A"), field("B"), field("C"), field("quad_mid"), field("D1"), field("D2"), field("torsion_closed"))
    else {
        if flags.iter().any(|f| f.starts_with("closed-form")) {
            return Ok(None);
        }
        return Err("closed-form fields absent without a flag".into());
    };
    let x = field("x").ok_or("x missing")?;
    let mn = rec["params"]["m"].as_i64().ok_or("m")? * rec["params"]["n"].as_i64().ok_or("n")?;
    let x2 = x * x;
    let quad = (a * x2 * x2 + b * x2 + cc) / d2;
    let tors = (2.0 * mn as f64 - q) / d1;
    let rel = |u: Complex, v: Complex| (u - v).norm() / v.norm().max(1.0);
    Ok(Some(rel(quad, q).max(rel(tors, t))))
}

fn all_finite(v: &Value) -> bool {
    match v {
        Value::Number(n) => n.as_f64().is_some_and(f64::is_finite),
        Value::Array(a) => a.iter().all(all_finite),
        Value::Object(o) => o.values().all(all_finite),
        _ => true,
    }
}

fn cli_contract() -> Outcome {
    let mut problems = Vec::new();
    let mut invocations = 0;
    let mut expect = |args: &[&str], code: i32, problems: &mut Vec<String>| -> Run {
        invocations += 1;
        let r = run_cli(args);
        if r.code != code {
            problems.push(format!("`{}` exited {} (want {code})", args.join(" "), r.code));
        }
        r
    };

    let mut json_runs = Vec::new();
    let trefoil = expect(&["compute", "--m", "1", "--n", "1", "--x", "2", "--format", "json"], 0, &mut problems);
    json_runs.push(("trefoil", trefoil.stdout.clone()));
    let twist = expect(&["compute", "--m", "1", "--n", "2", "--x", "2"], 0, &mut problems);
    json_runs.push(("compute (1, 2)", twist.stdout.clone()));
    let grid_args = ["crosscheck", "--random-samples", "0", "--format", "json", "--x-samples", "2;1.7;0.6,1.1;2.3,-0.4"];
    let grid = expect(&grid_args, 0, &mut problems);
    json_runs.push(("crosscheck", grid.stdout.clone()));
    if run_cli(&grid_args).stdout != grid.stdout {
        problems.push("crosscheck output differs between identical runs".into());
    }

    expect(&["compute", "--m", "2", "--n", "-3", "--s", "0.8,0.3", "--format", "csv"], 0, &mut problems);
    expect(&["compute", "--m", "-1", "--n", "2", "--parabolic", "--format", "text"], 0, &mut problems);
    expect(&["compute", "--m", "0", "--n", "1", "--x", "2"], 1, &mut problems);
    expect(&["compute", "--m", "1", "--n", "1"], 1, &mut problems);
    expect(&["compute", "--m", "1", "--n", "1", "--x", "2", "--s", "1"], 1, &mut problems);
    expect(&["compute", "--m", "1", "--n", "1", "--x", "2", "--tol", "-1"], 1, &mut problems);
    expect(&["compute", "--m", "1", "--n", "1", "--x", "abc"], 1, &mut problems);
    expect(&["compute", "--m", "1", "--n", "1", "--x", "1.7320508075688772"], 2, &mut problems);
    expect(&["compute", "--m", "1", "--n", "1", "--x", "2", "--perturb", "1e-3"], 3, &mut problems);
    let r = expect(&["riley", "--m", "1", "--n", "1", "--x", "1,1"], 0, &mut problems);
    let x = c(1.0, 1.0);
    match serde_json::from_str::<Value>(&r.stdout).ok().and_then(|v| cv(&v["roots"][0]["y"])) {
        Some(y) if (y - (x * x - 1.0)).norm() <= 1e-9 => {}
        other => problems.push(format!("riley x=1+i root {other:?}, want x^2 - 1")),
    }
    let r = expect(&["riley", "--m", "2", "--n", "1", "--x", "2"], 0, &mut problems);
    let residuals_ok = serde_json::from_str::<Value>(&r.stdout).ok().and_then(|v| {
        let roots = v["roots"].as_array()?.clone();
        Some(!roots.is_empty() && roots.iter().all(|r| r["riley_residual"].as_f64().is_some_and(|e| e <= 1e-7)))
    });
    if residuals_ok != Some(true) {
        problems.push("riley (2, 1) residuals".into());
    }
    expect(&["riley", "--m", "0", "--n", "1", "--x", "2"], 1, &mut problems);
    expect(&["crosscheck", "--m-range", "1..2", "--n-range", "-1..1", "--perturb", "1e-3"], 3, &mut problems);
    expect(&["crosscheck", "--m-range", "0..0"], 1, &mut problems);
    expect(&["crosscheck", "--n-range", "3..1"], 1, &mut problems);
    expect(&["crosscheck", "--m-range", "-1..1", "--n-range", "1..1", "--format", "csv"], 0, &mut problems);
    for seed in ["1", "2", "3", "4", "5"] {
        expect(&["selftest", "--seed", seed], 0, &mut problems);
    }
    let st = run_cli(&["selftest", "--seed", "1"]);
    if st.stdout != run_cli(&["selftest", "--seed", "1"]).stdout {
        problems.push("selftest output differs between identical runs".into());
    }
    let r = expect(&["selftest", "--tol", "1e-16"], 3, &mut problems);
    if !r.stdout.contains("FAILED") {
        problems.push("impossible tolerance did not report failures".into());
    }
    expect(&["selftest", "--suite", "nonsense"], 1, &mut problems);
    expect(&["frobnicate"], 1, &mut problems);
    expect(&["--help"], 0, &mut problems);

    let (mut records, mut worst) = (0, 0.0f64);
    for (name, text) in &json_runs {
        let v: Value = match serde_json::from_str(text) {
            Ok(v) => v,
            Err(e) => {
                problems.push(format!("{name}: output is not JSON ({e})"));
                continue;
            }
        };
        if !(v.get("version").is_some() && v.get("config").is_some()) {
            problems.push(format!("{name}: envelope lacks version or config"));
        }
        if !all_finite(&v) {
            problems.push(format!("{name}: non-finite number"));
        }
        let recs = v["records"].as_array().cloned().unwrap_or_default();
        if recs.is_empty() {
            problems.push(format!("{name}: no records"));
        }
        for rec in &recs {
            records += 1;
            match round_trip_error(rec) {
                Ok(Some(e)) => {
                    worst = worst.max(e);
                    if !(e <= 1e-12) {
                        problems.push(format!("{name}: round trip {e:e} at y={:?}", cv(&rec["y"])));
                    }
                }
                Ok(None) => {}
                Err(e) => problems.push(format!("{name}: {e}")),
            }
        }
        if *name == "trefoil" {
            let ok = recs.len() == 1
                && cv(&recs[0]["torsion_closed"]).is_some_and(|t| (t - 3.0).norm() <= 1e-9)
                && recs[0]["crosscheck"]["pass"] == Value::Bool(true);
            if !ok {
                problems.push("trefoil JSON record".into());
            }
        }
        if *name == "compute (1, 2)" {
            let total: u64 = recs
                .iter()
                .map(|r| {
                    r["flags"]
                        .as_array()
                        .and_then(|f| f.iter().filter_map(Value::as_str).find_map(|s| s.strip_prefix("multiplicity: ")))
                        .and_then(|k| k.parse().ok())
                        .unwrap_or(1)
                })
                .sum();
            if total != 3 {
                problems.push(format!("compute (1, 2) accounts for {total} roots, want 3"));
            }
        }
    }
    outcome(problems, format!("{invocations} invocations, {records} JSON records round-trip, worst {worst:.1e}"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("dual-pipeline agreement", dual_pipeline),
        ("trefoil example", trefoil),
        ("adjoint oracle equivalence", oracle_equivalence),
        ("factor oracles", factor_oracles),
        ("relator derivative expansion", expansion_equivalence),
        ("structural identities", structural_identities),
        ("representation validity", representation_validity),
        ("torsion consistency", torsion_consistency),
        ("CLI contract", cli_contract),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let result = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| Outcome {
            pass: false,
            detail: format!(
                "panicked: {}",
                e.downcast_ref::<String>().map(String::as_str).or(e.downcast_ref::<&str>().copied()).unwrap_or("?")
            ),
        });
        if !result.pass {
            failed += 1;
        }
        println!("criterion {} {name}: {} ({})", i + 1, if result.pass { "PASS" } else { "FAIL" }, result.detail);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
