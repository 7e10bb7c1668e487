mod args;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use knot_atap::report::{self, JsonComplex, OutputRecord};
use knot_atap::selftest::{self, SelftestConfig};
use knot_atap::sl2::riley_roots_dd;
use knot_atap::{Complex, Error, KnotParams, Tolerances};
use serde::Serialize;

use args::{Cli, Command, Format, GridArgs, PointArgs, SelftestArgs};

const VERSION: &str = env!("CARGO_PKG_VERSION");

const EXIT_INVALID: u8 = 1;
const EXIT_NO_ROOTS: u8 = 2;
const EXIT_VERIFICATION: u8 = 3;

/// The default meridian traces of the grid check.
const DEFAULT_TRACES: [(f64, f64); 4] = [(2.0, 0.0), (1.7, 0.0), (0.6, 1.1), (2.3, -0.4)];

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Self { code: EXIT_INVALID, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParam(_) => EXIT_INVALID,
            Error::NoNonabelianRoots | Error::DegenerateInput(_) => EXIT_NO_ROOTS,
            _ => EXIT_VERIFICATION,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Self { code: EXIT_VERIFICATION, message: e.to_string() }
    }
}

#[derive(Serialize)]
struct RunConfig {
    command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    m: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    x: Option<JsonComplex>,
    #[serde(skip_serializing_if = "Option::is_none")]
    s: Option<JsonComplex>,
    tolerances: Tolerances,
    format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    version: &'static str,
    config: RunConfig,
    #[serde(flatten)]
    body: &'a T,
}

#[derive(Serialize)]
struct Records<'a> {
    records: &'a [OutputRecord],
}

/// Writes to stdout; a reader that hangs up early (`| head`) is not an error.
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|()| out.flush());
}

fn emit_json<T: Serialize>(config: RunConfig, body: &T) {
    let env = Envelope { version: VERSION, config, body };
    emit(&(serde_json::to_string_pretty(&env).expect("output serializes") + "\n"));
}

fn emit_csv(w: csv::Writer<Vec<u8>>) -> Result<(), Failure> {
    let bytes = w.into_inner().map_err(|e| Failure { code: EXIT_VERIFICATION, message: e.to_string() })?;
    emit(&String::from_utf8_lossy(&bytes));
    Ok(())
}

fn point_config(command: &'static str, a: &PointArgs, tol: Tolerances) -> RunConfig {
    RunConfig {
        command,
        m: Some(a.m),
        n: Some(a.n),
        x: a.x.or(a.parabolic.then(|| Complex::new(2.0, 0.0))).map(Into::into),
        s: a.s.map(Into::into),
        tolerances: tol,
        format: a.format,
        seed: None,
    }
}

fn cmd_compute(a: &PointArgs) -> Result<(), Failure> {
    let tol = a.tol.tolerances().map_err(Failure::invalid)?;
    let meridian = a.meridian().map_err(Failure::invalid)?;
    let params = KnotParams::new(a.m, a.n)?;
    let records = match a.perturb {
        Some(d) => report::compute_perturbed(params, meridian, d, &tol)?,
        None => report::compute(params, meridian, &tol)?,
    };
    match a.format {
        Format::Json => emit_json(point_config("compute", a, tol), &Records { records: &records }),
        Format::Csv => emit(&output::records_csv(&records)?),
        Format::Text => emit(&output::records_text(&records)),
    }
    let failures: Vec<String> = records
        .iter()
        .filter_map(|r| r.failure(&tol).map(|why| format!("{}: {why}", report::record_label(r))))
        .collect();
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure { code: EXIT_VERIFICATION, message: failures.join("\n") })
    }
}

#[derive(Serialize)]
struct RootOut {
    y: JsonComplex,
    riley_residual: f64,
    relator_residual: f64,
    multiplicity: usize,
}

#[derive(Serialize)]
struct RileyOut {
    coefficients: Vec<JsonComplex>,
    roots: Vec<RootOut>,
    abelian_excluded: Vec<JsonComplex>,
}

fn cmd_riley(a: &PointArgs) -> Result<(), Failure> {
    let tol = a.tol.tolerances().map_err(Failure::invalid)?;
    let meridian = a.meridian().map_err(Failure::invalid)?;
    let params = KnotParams::new(a.m, a.n)?;
    let roots = riley_roots_dd(params, meridian.eigenvalue_dd()?, &tol)?;
    let out = RileyOut {
        coefficients: roots.poly.coeffs().iter().map(|&v| v.into()).collect(),
        roots: roots
            .reps
            .iter()
            .map(|r| RootOut {
                y: r.y.into(),
                riley_residual: r.riley_residual,
                relator_residual: r.relator_residual,
                multiplicity: r.multiplicity,
            })
            .collect(),
        abelian_excluded: roots.abelian_excluded.iter().map(|&v| v.into()).collect(),
    };
    match a.format {
        Format::Json => emit_json(point_config("riley", a, tol), &out),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["y_re", "y_im", "riley_residual", "relator_residual", "multiplicity"])?;
            for r in &out.roots {
                w.write_record([
                    format!("{:?}", r.y.re),
                    format!("{:?}", r.y.im),
                    format!("{:?}", r.riley_residual),
                    format!("{:?}", r.relator_residual),
                    r.multiplicity.to_string(),
                ])?;
            }
            emit_csv(w)?;
        }
        Format::Text => {
            let listed: Vec<_> = roots
                .reps
                .iter()
                .map(|r| (r.y, r.riley_residual, r.relator_residual, r.multiplicity))
                .collect();
            emit(&output::riley_text(roots.poly.coeffs(), &listed, &roots.abelian_excluded));
        }
    }
    if roots.reps.iter().all(|r| r.is_verified(&tol)) {
        Ok(())
    } else {
        Err(Failure { code: EXIT_VERIFICATION, message: "a root failed verification".into() })
    }
}

#[derive(Serialize)]
struct GridOut<'a> {
    records: Vec<&'a OutputRecord>,
    summary: &'a report::GridSummary,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    cell_errors: Vec<String>,
}

fn cmd_crosscheck(a: &GridArgs) -> Result<(), Failure> {
    let tol = a.tol.tolerances().map_err(Failure::invalid)?;
    let mut xs: Vec<Complex> = match &a.x_samples {
        Some(v) => v.clone(),
        None => DEFAULT_TRACES.iter().map(|&(r, i)| Complex::new(r, i)).collect(),
    };
    xs.extend(report::seeded_traces(a.seed, a.random_samples));
    if xs.is_empty() {
        return Err(Failure::invalid("no meridian traces to sample"));
    }
    let cells = report::run_grid(&a.m_range.0, &a.n_range.0, &xs, a.perturb, &tol);
    let summary = report::summarize(&cells, &tol);
    match a.format {
        Format::Json => {
            let body = GridOut {
                records: cells.iter().flat_map(|c| c.records.iter()).collect(),
                summary: &summary,
                cell_errors: cells
                    .iter()
                    .filter_map(|c| c.error.as_ref().map(|e| format!("(m={}, n={}): {e}", c.params.m, c.params.n)))
                    .collect(),
            };
            let config = RunConfig {
                command: "crosscheck",
                m: None,
                n: None,
                x: None,
                s: None,
                tolerances: tol,
                format: a.format,
                seed: Some(a.seed),
            };
            emit_json(config, &body);
        }
        Format::Csv => emit(&output::grid_csv(&cells)?),
        Format::Text => emit(&output::grid_text(&summary)),
    }
    if summary.ok() {
        Ok(())
    } else {
        Err(Failure { code: EXIT_VERIFICATION, message: format!("{} cross-check failures", summary.failed) })
    }
}

#[derive(Serialize)]
struct SuitesOut<'a> {
    suites: &'a [selftest::SuiteReport],
}

fn cmd_selftest(a: &SelftestArgs) -> Result<(), Failure> {
    if let Some(t) = a.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Failure::invalid(format!("--tol must be positive, got {t}")));
        }
    }
    let cfg = SelftestConfig { seed: a.seed, tolerance_override: a.tol };
    let names: Vec<&str> = a.suites.iter().map(String::as_str).collect();
    let reports = selftest::run(&cfg, &names);
    match a.format {
        Format::Json => {
            let config = RunConfig {
                command: "selftest",
                m: None,
                n: None,
                x: None,
                s: None,
                tolerances: Tolerances::default(),
                format: a.format,
                seed: Some(a.seed),
            };
            emit_json(config, &SuitesOut { suites: &reports });
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["suite", "checks", "failures", "worst_ratio", "passed"])?;
            for r in &reports {
                w.write_record([
                    r.name.clone(),
                    r.checks.to_string(),
                    r.failures.to_string(),
                    format!("{:?}", r.worst_ratio),
                    r.passed().to_string(),
                ])?;
            }
            emit_csv(w)?;
        }
        Format::Text => emit(&output::selftest_text(&reports)),
    }
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed()).map(|r| r.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure { code: EXIT_VERIFICATION, message: format!("failed suites: {}", failed.join(", ")) })
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_INVALID),
            };
        }
    };
    let result = match &cli.command {
        Command::Compute(a) => cmd_compute(a),
        Command::Riley(a) => cmd_riley(a),
        Command::Crosscheck(a) => cmd_crosscheck(a),
        Command::Selftest(a) => cmd_selftest(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
