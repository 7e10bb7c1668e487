//! Per-root analysis records and grid summaries, in a serializable shape.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::atap::{delta_closed, delta_fox_raw, compare, quad_mid_from, torsion_from, torsion_limit, Flag};
use crate::error::{Error, Result};
use crate::scalar::{dd, Complex, DdComplex, Tolerances};
use crate::sl2::{make_rep_dd, riley_roots_dd, s_from_x_dd, KnotParams, NonabelianRep};

pub const REGULARITY_ASSUMED: &str = "regularity-assumed";

/// A complex number as `{re, im}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JsonComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex> for JsonComplex {
    fn from(v: Complex) -> Self {
        Self { re: v.re, im: v.im }
    }
}

impl From<JsonComplex> for Complex {
    fn from(v: JsonComplex) -> Self {
        Complex::new(v.re, v.im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamsOut {
    pub m: i64,
    pub n: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossCheckOut {
    pub pass: bool,
    pub discrepancy: f64,
    pub unit_shift: i64,
    pub sign: i32,
}

/// Everything computed for one Riley root. Optional fields are absent when a
/// pipeline could not run; `flags` says why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub params: ParamsOut,
    pub s: JsonComplex,
    pub x: JsonComplex,
    pub y: JsonComplex,
    pub z: JsonComplex,
    pub riley_residual: f64,
    /// Ascending coefficients of the polynomial from minimal exponent 0.
    pub delta: Vec<JsonComplex>,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<JsonComplex>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<JsonComplex>,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    pub c: Option<JsonComplex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_mid: Option<JsonComplex>,
    #[serde(rename = "D1", default, skip_serializing_if = "Option::is_none")]
    pub d1: Option<JsonComplex>,
    #[serde(rename = "D2", default, skip_serializing_if = "Option::is_none")]
    pub d2: Option<JsonComplex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torsion_closed: Option<JsonComplex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torsion_limit: Option<JsonComplex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crosscheck: Option<CrossCheckOut>,
    pub flags: Vec<String>,
}

impl OutputRecord {
    pub fn params(&self) -> Result<KnotParams> {
        KnotParams::new(self.params.m, self.params.n)
    }

    /// Both pipelines ran and agree.
    pub fn verified(&self) -> bool {
        self.crosscheck.is_some_and(|c| c.pass)
    }

    /// Why this record counts as a verification failure, if it does.
    ///
    /// A skipped closed form alone is not a failure; the Fox pipeline is then
    /// authoritative.
    pub fn failure(&self, tol: &Tolerances) -> Option<String> {
        if !(self.riley_residual <= tol.root_residual) {
            return Some(format!("riley residual {:e}", self.riley_residual));
        }
        if self.delta.is_empty() {
            return Some(self.flags.join("; "));
        }
        match self.crosscheck {
            Some(cc) if !cc.pass => Some(format!("discrepancy {:e}", cc.discrepancy)),
            _ => None,
        }
    }

    /// Recompute `quad_mid` and `torsion_closed` from the stored fields and
    /// return the larger relative deviation, if the fields are present.
    pub fn derived_field_error(&self) -> Option<f64> {
        let x: Complex = self.x.into();
        let quad = quad_mid_from(self.a?.into(), self.b?.into(), self.c?.into(), x, self.d2?.into());
        let stored_quad: Complex = self.quad_mid?.into();
        let tors = torsion_from(self.params.m * self.params.n, stored_quad, self.d1?.into());
        let stored_tors: Complex = self.torsion_closed?.into();
        let rel = |a: Complex, b: Complex| (a - b).norm() / b.norm().max(1.0);
        Some(rel(quad, stored_quad).max(rel(tors, stored_tors)))
    }

    /// `(t - 1)(mn t^2 - quad_mid t + mn) / D1`, when the closed form exists.
    pub fn factored_form(&self) -> Option<String> {
        let q = self.quad_mid?;
        let d1 = self.d1?;
        let mn = self.params.m * self.params.n;
        Some(format!(
            "(t - 1)({mn} t^2 - ({}) t + {mn}) / ({})",
            fmt_complex(q.into()),
            fmt_complex(d1.into())
        ))
    }
}

pub fn fmt_complex(v: Complex) -> String {
    if v.im == 0.0 {
        format!("{:?}", v.re)
    } else if v.im < 0.0 {
        format!("{:?}-{:?}i", v.re, -v.im)
    } else {
        format!("{:?}+{:?}i", v.re, v.im)
    }
}

fn flag_name(f: Flag) -> &'static str {
    match f {
        Flag::ClosedFormSingular => "closed-form-singular",
        Flag::DegenerateTrace => "degenerate-trace",
        Flag::Multiplicity => "multiplicity",
        Flag::SignFlipped => "sign-flipped",
    }
}

/// Run both pipelines at one representation.
pub fn analyze(params: KnotParams, rep: &NonabelianRep, tol: &Tolerances) -> OutputRecord {
    let mut flags = Vec::new();
    if rep.multiplicity > 1 {
        flags.push(format!("{}: {}", flag_name(Flag::Multiplicity), rep.multiplicity));
    }
    let fox = delta_fox_raw(params, rep, tol);
    let closed = delta_closed(params, rep, tol);

    let mut record = OutputRecord {
        params: ParamsOut { m: params.m, n: params.n },
        s: rep.s.into(),
        x: rep.x.into(),
        y: rep.y.into(),
        z: rep.z.into(),
        riley_residual: rep.riley_residual,
        delta: Vec::new(),
        a: None,
        b: None,
        c: None,
        quad_mid: None,
        d1: None,
        d2: None,
        torsion_closed: None,
        torsion_limit: None,
        crosscheck: None,
        flags: Vec::new(),
    };

    match &closed {
        Ok(res) => {
            record.a = Some(res.coeff_a.into());
            record.b = Some(res.coeff_b.into());
            record.c = Some(res.coeff_c.into());
            record.quad_mid = Some(res.quad_mid.into());
            record.d1 = Some(res.prefactor_denom_d1.into());
            record.d2 = Some(res.quad_denom_d2.into());
            record.torsion_closed = Some(res.torsion.into());
        }
        Err(Error::ClosedFormSingular(culprit)) => {
            flags.push(format!("{}: {culprit}", flag_name(Flag::ClosedFormSingular)));
        }
        Err(e) => flags.push(format!("closed-form-failed: {e}")),
    }

    match &fox {
        Ok(fd) => {
            let mut delta = fd.quotient.normalized();
            if let Ok(res) = &closed {
                let cc = compare(&fd.quotient, &res.laurent_form, tol);
                if cc.sign < 0 {
                    flags.push(flag_name(Flag::SignFlipped).to_string());
                }
                delta = cc.fox.scale(Complex::new(cc.sign as f64, 0.0));
                record.crosscheck = Some(CrossCheckOut {
                    pass: cc.pass,
                    discrepancy: cc.discrepancy,
                    unit_shift: cc.unit_shift,
                    sign: cc.sign,
                });
            }
            match torsion_limit(&delta, tol) {
                Ok(v) => record.torsion_limit = Some(v.into()),
                Err(e) => flags.push(format!("torsion-limit-failed: {e}")),
            }
            record.delta = delta.coeffs().iter().map(|&v| v.into()).collect();
        }
        Err(e) => flags.push(format!("fox-pipeline-failed: {e}")),
    }

    if record.torsion_closed.is_some() || record.torsion_limit.is_some() {
        flags.push(REGULARITY_ASSUMED.to_string());
    }
    record.flags = flags;
    record
}

/// How the meridian eigenvalue is specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Meridian {
    /// Trace `x = s + 1/s`.
    Trace(Complex),
    Eigenvalue(Complex),
}

impl Meridian {
    pub fn eigenvalue_dd(self) -> Result<DdComplex> {
        match self {
            Meridian::Trace(x) => Ok(s_from_x_dd(x)?.0),
            Meridian::Eigenvalue(s) => {
                if s.norm() == 0.0 || !crate::scalar::is_finite(s) {
                    return Err(Error::InvalidParam("s must be finite and nonzero".into()));
                }
                Ok(dd(s))
            }
        }
    }
}

/// One record per accepted Riley root, in root order.
pub fn compute(params: KnotParams, meridian: Meridian, tol: &Tolerances) -> Result<Vec<OutputRecord>> {
    let s = meridian.eigenvalue_dd()?;
    let roots = riley_roots_dd(params, s, tol)?;
    Ok(roots.reps.iter().map(|rep| analyze(params, rep, tol)).collect())
}

/// Records at deliberately shifted `y` values, for exercising failure paths.
pub fn compute_perturbed(params: KnotParams, meridian: Meridian, shift: f64, tol: &Tolerances) -> Result<Vec<OutputRecord>> {
    let s = meridian.eigenvalue_dd()?;
    let roots = riley_roots_dd(params, s, tol)?;
    roots
        .reps
        .iter()
        .map(|rep| {
            let y = rep.y_dd + dd(Complex::new(shift, shift));
            let moved = make_rep_dd(params, s, y, tol)?;
            Ok(analyze(params, &moved, tol))
        })
        .collect()
}

/// The global sign relating the two torsion values: `1` when
/// `torsion_limit = -torsion_closed`, `0` when they are equal.
pub fn torsion_sign(limit: Complex, closed: Complex, tol: &Tolerances) -> Option<u8> {
    let scale = 1.0 + closed.norm();
    if (limit + closed).norm() <= tol.crosscheck * scale {
        Some(1)
    } else if (limit - closed).norm() <= tol.crosscheck * scale {
        Some(0)
    } else {
        None
    }
}

/// One grid cell: a parameter pair and a meridian sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellOutcome {
    pub params: ParamsOut,
    pub x: JsonComplex,
    pub records: Vec<OutputRecord>,
    /// Set when the cell produced no records.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    pub cells: usize,
    pub roots: usize,
    pub passed: usize,
    pub failed: usize,
    /// Roots where the closed form was skipped; not failures.
    pub flagged: usize,
    pub worst_discrepancy: f64,
    /// Single sign across the grid, or absent if none fits every root.
    pub torsion_sign: Option<u8>,
    pub failures: Vec<String>,
    pub flagged_cells: Vec<String>,
}

impl GridSummary {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

/// Label used in summaries.
pub fn record_label(r: &OutputRecord) -> String {
    format!(
        "(m={}, n={}) x={} y={}",
        r.params.m,
        r.params.n,
        fmt_complex(r.x.into()),
        fmt_complex(r.y.into())
    )
}

/// Summarize grid cells. A root fails if its cross-check fails, if the Fox
/// pipeline cannot run, if it is off the variety, or if its torsion values fit
/// neither sign.
pub fn summarize(cells: &[CellOutcome], tol: &Tolerances) -> GridSummary {
    let mut s = GridSummary {
        cells: cells.len(),
        roots: 0,
        passed: 0,
        failed: 0,
        flagged: 0,
        worst_discrepancy: 0.0,
        torsion_sign: None,
        failures: Vec::new(),
        flagged_cells: Vec::new(),
    };
    let mut signs = [true, true];
    let mut any_sign = false;
    for cell in cells {
        if let Some(e) = &cell.error {
            s.failed += 1;
            s.failures.push(format!("(m={}, n={}) x={}: {e}", cell.params.m, cell.params.n, fmt_complex(cell.x.into())));
        }
        for r in &cell.records {
            s.roots += 1;
            if let Some(why) = r.failure(tol) {
                s.failed += 1;
                s.failures.push(format!("{}: {why}", record_label(r)));
                continue;
            }
            if let Some(cc) = r.crosscheck {
                s.worst_discrepancy = s.worst_discrepancy.max(cc.discrepancy);
            } else {
                s.flagged += 1;
                s.flagged_cells.push(format!("{}: {}", record_label(r), r.flags.join("; ")));
            }
            if let (Some(l), Some(c)) = (r.torsion_limit, r.torsion_closed) {
                let (l, c): (Complex, Complex) = (l.into(), c.into());
                any_sign = true;
                let scale = tol.crosscheck * (1.0 + c.norm());
                signs[1] &= (l + c).norm() <= scale;
                signs[0] &= (l - c).norm() <= scale;
            }
            s.passed += 1;
        }
    }
    if any_sign {
        s.torsion_sign = if signs[1] {
            Some(1)
        } else if signs[0] {
            Some(0)
        } else {
            None
        };
        if s.torsion_sign.is_none() {
            s.failed += 1;
            s.failures.push("no single torsion sign fits every root".into());
        }
    }
    s
}

/// `count` meridian traces drawn from `seed`, away from the real segment `[-2, 2]`.
pub fn seeded_traces(seed: u64, count: usize) -> Vec<Complex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| Complex::new(rng.random_range(0.5..2.5), rng.random_range(0.3..1.2) * if rng.random_bool(0.5) { 1.0 } else { -1.0 }))
        .collect()
}

/// Run every cell of a grid in deterministic order. `perturb` shifts every
/// root off the variety first, which should make every cell fail.
pub fn run_grid(ms: &[i64], ns: &[i64], xs: &[Complex], perturb: Option<f64>, tol: &Tolerances) -> Vec<CellOutcome> {
    let mut out = Vec::new();
    for &m in ms {
        for &n in ns {
            for &x in xs {
                let params = ParamsOut { m, n };
                let result = KnotParams::new(m, n).and_then(|p| match perturb {
                    Some(d) => compute_perturbed(p, Meridian::Trace(x), d, tol),
                    None => compute(p, Meridian::Trace(x), tol),
                });
                out.push(match result {
                    Ok(records) => CellOutcome { params, x: x.into(), records, error: None },
                    Err(e) => CellOutcome { params, x: x.into(), records: Vec::new(), error: Some(e.to_string()) },
                });
            }
        }
    }
    out
}
