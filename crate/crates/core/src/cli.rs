//! Command-line front end: `table`, `verify`, `quadcheck`.
//!
//! Exit codes: 0 when everything passes, 1 on an identity or residual
//! failure, 2 on bad flags or parameters.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::value::RawValue;

use crate::bernoulli::{bernoulli_number, bernoulli_poly};
use crate::error::{Error, Result};
use crate::exact_arith::Rational;
use crate::identities::{check_theorem4_series, verify_sweep, Selection, SweepGrid};
use crate::poly::{dowling_poly, tanny_dowling_poly, Family, Polynomial, PolynomialRecord};
use crate::quadrature::{
    check_theorem1_numeric, check_theorem3_numeric, NumericResidual, NUMERIC_ABS_TOL_AT_ZERO, NUMERIC_MAX_N,
    NUMERIC_REL_TOL,
};
use crate::triangles::{stirling2_row, whitney2_table, WhitneyParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "tdpoly", version, about = "Exact noncentral Whitney/Dowling/Tanny-Dowling tables and identity checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit a triangle or polynomial table.
    Table(TableArgs),
    /// Run exact identity checks over a parameter grid.
    Verify(VerifyArgs),
    /// Cross-check identities by numerical quadrature.
    Quadcheck(QuadArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum TableKind {
    Stirling2,
    Whitney2,
    Dowling,
    TannyDowling,
    BernoulliNumbers,
    BernoulliPoly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyKind {
    All,
    Theorem1,
    Corollary2,
    Worpitzky,
    Theorem3,
    Reductions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QuadKind {
    Theorem1,
    Theorem3,
    Theorem4,
}

#[derive(Debug, clap::Args)]
pub struct TableArgs {
    pub kind: TableKind,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub m: i64,
    #[arg(long, default_value = "0", allow_negative_numbers = true)]
    pub a: Rational,
    #[arg(long, default_value_t = 10)]
    pub nmax: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct VerifyArgs {
    pub kind: VerifyKind,
    /// Single m; overrides --mmin/--mmax.
    #[arg(long, allow_negative_numbers = true)]
    pub m: Option<i64>,
    /// Single a; overrides --amin/--amax/--astep.
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<Rational>,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub mmin: i64,
    #[arg(long, default_value_t = 5, allow_negative_numbers = true)]
    pub mmax: i64,
    #[arg(long, default_value = "-3", allow_negative_numbers = true)]
    pub amin: Rational,
    #[arg(long, default_value = "3", allow_negative_numbers = true)]
    pub amax: Rational,
    #[arg(long, default_value = "1/2", allow_negative_numbers = true)]
    pub astep: Rational,
    #[arg(long, default_value_t = 25)]
    pub nmax: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct QuadArgs {
    pub kind: QuadKind,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub m: i64,
    #[arg(long, default_value = "0", allow_negative_numbers = true)]
    pub a: Rational,
    #[arg(long, default_value_t = 10)]
    pub nmax: usize,
    #[arg(long, default_value = "1/2", allow_negative_numbers = true)]
    pub x: Rational,
    #[arg(long, default_value = "1/10", allow_negative_numbers = true)]
    pub z: Rational,
    /// Truncation order of the EGF series.
    #[arg(long = "N", visible_alias = "terms", default_value_t = 40)]
    pub terms: usize,
    /// Simpson tolerance, relative to the integrand scale.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 64)]
    pub order: usize,
    /// Relative residual threshold (absolute 1e-10 when the target is 0;
    /// absolute for theorem4).
    #[arg(long, default_value_t = NUMERIC_REL_TOL)]
    pub threshold: f64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Table(args) => run_table(args).map(|s| (s, EXIT_OK)),
        Command::Verify(args) => run_verify(args, stderr),
        Command::Quadcheck(args) => run_quadcheck(args),
    };
    let output = match &cli.command {
        Command::Table(a) => a.output.as_ref(),
        Command::Verify(a) => a.output.as_ref(),
        Command::Quadcheck(a) => a.output.as_ref(),
    };
    match outcome {
        Ok((text, code)) => match emit(&text, output, stdout) {
            Ok(()) => code,
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                EXIT_FAILURE
            }
        },
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}\n\nRun `tdpoly --help` for usage.");
            EXIT_USAGE
        }
    }
}

fn emit(text: &str, output: Option<&PathBuf>, stdout: &mut dyn Write) -> std::io::Result<()> {
    match output {
        Some(path) => std::fs::write(path, text),
        None => stdout.write_all(text.as_bytes()),
    }
}

fn to_json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("report types serialize");
    s.push('\n');
    s
}

/// Fixed 17-significant-digit rendering of a float as a JSON number.
fn float17(v: f64) -> Box<RawValue> {
    let text = if v.is_finite() { format!("{v:.16e}") } else { "null".to_string() };
    RawValue::from_string(text).expect("formatted float is valid JSON")
}

#[derive(Serialize)]
struct TriangleJson<'a> {
    table: &'a str,
    m: u32,
    a: &'a Rational,
    nmax: usize,
    rows: Vec<Vec<Rational>>,
}

#[derive(Serialize)]
struct BernoulliJson {
    table: &'static str,
    nmax: usize,
    values: Vec<Rational>,
}

pub fn run_table(args: &TableArgs) -> Result<String> {
    let p = WhitneyParams::new(args.m, args.a.clone())?;
    let nmax = args.nmax;
    let triangle_csv = |rows: &[Vec<Rational>]| {
        let mut out = String::from("n,k,value\n");
        for (n, row) in rows.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                let _ = writeln!(out, "{n},{k},{v}");
            }
        }
        out
    };
    let polys = |family: Family, build: &dyn Fn(usize) -> Polynomial| -> Vec<PolynomialRecord> {
        (0..=nmax).map(|n| PolynomialRecord::new(family, &p, n, &build(n))).collect()
    };
    let text = match args.kind {
        TableKind::Stirling2 | TableKind::Whitney2 => {
            let (name, params, rows) = if args.kind == TableKind::Stirling2 {
                let rows = (0..=nmax)
                    .map(|n| stirling2_row(n).into_iter().map(Rational::from).collect())
                    .collect();
                ("stirling2", WhitneyParams::classical(), rows)
            } else {
                ("whitney2", p.clone(), whitney2_table(&p, nmax).rows().to_vec())
            };
            match args.format {
                Format::Csv => triangle_csv(&rows),
                Format::Json => to_json_line(&TriangleJson { table: name, m: params.m(), a: params.a(), nmax, rows }),
            }
        }
        TableKind::Dowling | TableKind::TannyDowling | TableKind::BernoulliPoly => {
            let records = match args.kind {
                TableKind::Dowling => polys(Family::Dowling, &|n| dowling_poly(&p, n)),
                TableKind::TannyDowling => polys(Family::TannyDowling, &|n| tanny_dowling_poly(&p, n)),
                _ => (0..=nmax)
                    .map(|n| PolynomialRecord::new(Family::Bernoulli, &WhitneyParams::classical(), n, &bernoulli_poly(n)))
                    .collect(),
            };
            match args.format {
                Format::Csv => triangle_csv(&records.iter().map(|r| r.coeffs.clone()).collect::<Vec<_>>()),
                Format::Json => to_json_line(&records),
            }
        }
        TableKind::BernoulliNumbers => {
            let values: Vec<Rational> = (0..=nmax).map(bernoulli_number).collect();
            match args.format {
                Format::Csv => {
                    let mut out = String::from("n,value\n");
                    for (n, v) in values.iter().enumerate() {
                        let _ = writeln!(out, "{n},{v}");
                    }
                    out
                }
                Format::Json => to_json_line(&BernoulliJson { table: "bernoulli_numbers", nmax, values }),
            }
        }
    };
    Ok(text)
}

pub fn verify_grid(args: &VerifyArgs) -> Result<SweepGrid> {
    let (mmin, mmax) = match args.m {
        Some(m) => (m, m),
        None => (args.mmin, args.mmax),
    };
    match &args.a {
        Some(a) => SweepGrid::from_ranges(mmin, mmax, a, a, &Rational::one(), args.nmax),
        None => SweepGrid::from_ranges(mmin, mmax, &args.amin, &args.amax, &args.astep, args.nmax),
    }
}

fn run_verify(args: &VerifyArgs, stderr: &mut dyn Write) -> Result<(String, i32)> {
    let grid = verify_grid(args)?;
    let selection = match args.kind {
        VerifyKind::All => Selection::All,
        VerifyKind::Theorem1 => Selection::Theorem1,
        VerifyKind::Corollary2 => Selection::Corollary2,
        VerifyKind::Worpitzky => Selection::Worpitzky,
        VerifyKind::Theorem3 => Selection::Theorem3,
        VerifyKind::Reductions => Selection::Reductions,
    };
    let report = verify_sweep(&grid, selection);
    let _ = writeln!(
        stderr,
        "{} checks, {} passed, {} failed in {:.3} s",
        report.checks.len(),
        report.pass_count,
        report.fail_count,
        report.wall_time.as_secs_f64()
    );
    let code = if report.all_pass() { EXIT_OK } else { EXIT_FAILURE };
    Ok((to_json_line(&report), code))
}

#[derive(Serialize)]
struct ResidualRow {
    n: usize,
    computed: Box<RawValue>,
    target: Box<RawValue>,
    abs: Box<RawValue>,
    rel: Box<RawValue>,
    pass: bool,
}

impl ResidualRow {
    fn new(n: usize, r: &NumericResidual, threshold: f64) -> Self {
        ResidualRow {
            n,
            computed: float17(r.computed),
            target: float17(r.target),
            abs: float17(r.abs()),
            rel: float17(r.rel()),
            pass: r.passes(threshold, NUMERIC_ABS_TOL_AT_ZERO),
        }
    }
}

#[derive(Serialize)]
struct QuadReport<R> {
    check: &'static str,
    m: u32,
    a: Rational,
    #[serde(skip_serializing_if = "Option::is_none")]
    x: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    z: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tol: Option<Box<RawValue>>,
    threshold: Box<RawValue>,
    rows: Vec<R>,
    pass: usize,
    fail: usize,
}

#[derive(Serialize)]
struct Theorem4Row {
    #[serde(rename = "N")]
    terms: usize,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    series: Option<Box<RawValue>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed_form: Option<Box<RawValue>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    integral: Option<Box<RawValue>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<Box<RawValue>>,
    pass: bool,
}

fn run_quadcheck(args: &QuadArgs) -> Result<(String, i32)> {
    let p = WhitneyParams::new(args.m, args.a.clone())?;
    if !(args.threshold > 0.0) {
        return Err(Error::InvalidParameter(format!("threshold must be positive, got {}", args.threshold)));
    }
    if !(args.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {}", args.tol)));
    }
    match args.kind {
        QuadKind::Theorem1 | QuadKind::Theorem3 => {
            if args.nmax > NUMERIC_MAX_N {
                return Err(Error::InvalidParameter(format!(
                    "numeric checks support n <= {NUMERIC_MAX_N}; larger n are exact-path only"
                )));
            }
            let mut rows = Vec::with_capacity(args.nmax + 1);
            for n in 0..=args.nmax {
                let r = if args.kind == QuadKind::Theorem1 {
                    check_theorem1_numeric(&p, n, args.tol)?
                } else {
                    check_theorem3_numeric(&p, n, args.x.to_f64(), args.order)?
                };
                rows.push(ResidualRow::new(n, &r, args.threshold));
            }
            let pass = rows.iter().filter(|r| r.pass).count();
            let fail = rows.len() - pass;
            let theorem1 = args.kind == QuadKind::Theorem1;
            let report = QuadReport {
                check: if theorem1 { "theorem1" } else { "theorem3" },
                m: p.m(),
                a: p.a().clone(),
                x: (!theorem1).then(|| args.x.clone()),
                z: None,
                order: (!theorem1).then_some(args.order),
                tol: theorem1.then(|| float17(args.tol)),
                threshold: float17(args.threshold),
                rows,
                pass,
                fail,
            };
            Ok((to_json_line(&report), if fail == 0 { EXIT_OK } else { EXIT_FAILURE }))
        }
        QuadKind::Theorem4 => {
            let row = match check_theorem4_series(&p, &args.x, &args.z, args.terms) {
                Ok(r) => Theorem4Row {
                    terms: args.terms,
                    status: "ok",
                    series: Some(float17(r.series)),
                    closed_form: Some(float17(r.closed_form)),
                    integral: Some(float17(r.integral)),
                    residual: Some(float17(r.residual)),
                    pass: r.residual < args.threshold,
                },
                Err(Error::Divergent(_)) => Theorem4Row {
                    terms: args.terms,
                    status: "divergent",
                    series: None,
                    closed_form: None,
                    integral: None,
                    residual: None,
                    pass: true,
                },
                Err(e) => return Err(e),
            };
            let breach = !row.pass;
            let report = QuadReport {
                check: "theorem4",
                m: p.m(),
                a: p.a().clone(),
                x: Some(args.x.clone()),
                z: Some(args.z.clone()),
                order: None,
                tol: None,
                threshold: float17(args.threshold),
                pass: usize::from(row.pass && row.status == "ok"),
                fail: usize::from(breach),
                rows: vec![row],
            };
            Ok((to_json_line(&report), if breach { EXIT_FAILURE } else { EXIT_OK }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("tdpoly").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn float17_format() {
        assert_eq!(float17(0.5).get(), "5.0000000000000000e-1");
        assert_eq!(float17(-11.0 / 3.0).get(), "-3.6666666666666665e0");
        assert_eq!(float17(f64::NAN).get(), "null");
    }

    #[test]
    fn bad_selector_is_usage_error() {
        let (code, out, err) = run_capture(&["table", "catalan"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(out.is_empty());
        assert!(err.contains("catalan"));
    }

    #[test]
    fn help_goes_to_stdout() {
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("quadcheck"));
    }

    #[test]
    fn bad_rational_flag() {
        let (code, _, err) = run_capture(&["verify", "all", "--a", "1/0"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(!err.is_empty());
    }

    #[test]
    fn numeric_nmax_cap() {
        let (code, _, err) = run_capture(&["quadcheck", "theorem1", "--nmax", "16"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("exact-path only"));
    }
}
