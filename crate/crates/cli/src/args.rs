use clap::{Args, Parser, Subcommand, ValueEnum};
use knot_atap::report::Meridian;
use knot_atap::{Complex, Tolerances};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "knot-atap", version, about = "Adjoint twisted Alexander polynomials and torsion of J(2m, 2n)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Both pipelines at every Riley root.
    Compute(PointArgs),
    /// The Riley polynomial in y and its roots.
    Riley(PointArgs),
    /// Cross-check the pipelines over a parameter grid.
    Crosscheck(GridArgs),
    /// Run the seeded invariant suites.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Args)]
pub struct TolArgs {
    /// Accepted Riley and relator residual.
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub equality_tol: f64,
    /// Roots closer than this are merged.
    #[arg(long, default_value_t = 1e-7)]
    pub dedup_tol: f64,
}

impl TolArgs {
    pub fn tolerances(&self) -> Result<Tolerances, String> {
        for (name, v) in [("--tol", self.tol), ("--equality-tol", self.equality_tol), ("--dedup-tol", self.dedup_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("{name} must be positive, got {v}"));
            }
        }
        Ok(Tolerances {
            root_residual: self.tol,
            equality: self.equality_tol,
            dedup: self.dedup_tol,
            ..Tolerances::default()
        })
    }
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub m: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub n: i64,
    /// Meridian trace, as RE or RE,IM.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, conflicts_with_all = ["s", "parabolic"])]
    pub x: Option<Complex>,
    /// Meridian eigenvalue, as RE or RE,IM.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, conflicts_with = "parabolic")]
    pub s: Option<Complex>,
    /// Same as --x 2.
    #[arg(long)]
    pub parabolic: bool,
    #[command(flatten)]
    pub tol: TolArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Shift every root by this amount before analysis.
    #[arg(long, hide = true)]
    pub perturb: Option<f64>,
}

impl PointArgs {
    pub fn meridian(&self) -> Result<Meridian, String> {
        match (self.x, self.s, self.parabolic) {
            (Some(x), None, false) => Ok(Meridian::Trace(x)),
            (None, Some(s), false) => Ok(Meridian::Eigenvalue(s)),
            (None, None, true) => Ok(Meridian::Trace(Complex::new(2.0, 0.0))),
            _ => Err("exactly one of --x, --s or --parabolic is required".into()),
        }
    }
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, value_parser = parse_range, default_value = "-3..3", allow_hyphen_values = true)]
    pub m_range: IntRange,
    #[arg(long, value_parser = parse_range, default_value = "-3..3", allow_hyphen_values = true)]
    pub n_range: IntRange,
    /// Meridian traces, each RE or RE,IM; separate with spaces or ';'.
    #[arg(long, value_delimiter = ';', num_args = 1.., value_parser = parse_complex, allow_hyphen_values = true)]
    pub x_samples: Option<Vec<Complex>>,
    /// Extra traces drawn from the seed.
    #[arg(long, default_value_t = 2)]
    pub random_samples: usize,
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
    #[command(flatten)]
    pub tol: TolArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long, hide = true)]
    pub perturb: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
    /// Replace every threshold with this value.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Run only these suites.
    #[arg(long = "suite", value_parser = clap::builder::PossibleValuesParser::new(knot_atap::selftest::SUITES))]
    pub suites: Vec<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

pub fn parse_complex(s: &str) -> Result<Complex, String> {
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("bad number '{t}': {e}"));
    let v = match s.split_once(',') {
        Some((re, im)) => Complex::new(parse(re)?, parse(im)?),
        None => Complex::new(parse(s)?, 0.0),
    };
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(format!("'{s}' is not finite"));
    }
    Ok(v)
}

/// Nonzero integers of an inclusive range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntRange(pub Vec<i64>);

/// `A..B`, inclusive, with 0 removed.
pub fn parse_range(s: &str) -> Result<IntRange, String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected A..B, got '{s}'"))?;
    let a: i64 = a.trim().parse().map_err(|e| format!("bad bound '{a}': {e}"))?;
    let b: i64 = b.trim().parse().map_err(|e| format!("bad bound '{b}': {e}"))?;
    let v: Vec<i64> = (a..=b).filter(|&k| k != 0).collect();
    if v.is_empty() {
        return Err(format!("range {s} has no nonzero values"));
    }
    Ok(IntRange(v))
}
