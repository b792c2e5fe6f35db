//! `tailcut` command-line front end.
//!
//! Exit codes: 0 success, 1 failed check suite or internal error,
//! 2 degenerate or invalid input, 3 oracle failure.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::combinatorics::{bernoulli_rational, binomial_coefficient, pochhammer};
use crate::error::{Error, Result};
use crate::family::{make_2f1, make_e1, make_pfq, make_zeta, FamilyName, FamilySpec};
use crate::oracle::{
    e1_reference, euler_maclaurin_zeta_tail, remainder_exact, zeta_reference, OracleConfig,
};
use crate::report::{self, approximation_row, oracle_column, ApproximationReport, RowStatus};
use crate::resum::{gamma_to_factorial, pade_from_series, remainder_power, Method};
use crate::scalar::{Kind, Scalar, DEFAULT_DIGITS, MIN_DIGITS};
use crate::solver::{residual_order_slope, solve_gamma};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_ORACLE: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "tailcut",
    version,
    about = "Asymptotic truncation errors of special-function series"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve for the expansion coefficients γ₀..γ_m.
    Coeffs(CoeffsArgs),
    /// Approximate rₙ and compare with the oracle.
    Approx(RunArgs),
    /// Sweep an n-range; rows are emitted in ascending n, then method order.
    Table(RunArgs),
    /// Run validation suites.
    Check(CheckArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct FamilyArgs {
    #[arg(long)]
    pub family: Option<FamilyName>,
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<String>,
    /// Comma-separated numerator parameters (pfq).
    #[arg(long, allow_hyphen_values = true)]
    pub alphas: Option<String>,
    /// Comma-separated denominator parameters (pfq).
    #[arg(long, allow_hyphen_values = true)]
    pub betas: Option<String>,
    /// Working precision in decimal digits for real mode.
    #[arg(long, default_value_t = DEFAULT_DIGITS)]
    pub precision: u32,
    /// Force exact rational arithmetic.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodChoice {
    Power,
    Factorial,
    Pade,
    All,
}

#[derive(Args, Debug, Clone)]
pub struct CoeffsArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long)]
    pub m: usize,
    /// Also print the factorial-series coefficients γ̃.
    #[arg(long)]
    pub factorial: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long)]
    pub m: usize,
    #[arg(long, conflicts_with = "n_range")]
    pub n: Option<u64>,
    /// Inclusive range `a..b`.
    #[arg(long = "n-range")]
    pub n_range: Option<String>,
    #[arg(long, value_enum, default_value_t = MethodChoice::All)]
    pub method: MethodChoice,
    /// Padé numerator degree (default ⌊m/2⌋).
    #[arg(long = "L")]
    pub l: Option<usize>,
    /// Padé denominator degree (default ⌊m/2⌋).
    #[arg(long = "M")]
    pub big_m: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Fill the `seconds` column; output is then no longer reproducible.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Bernoulli,
    Order,
    Pade22,
    Oracle,
    All,
}

#[derive(Args, Debug, Clone)]
pub struct CheckArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Highest order for the Bernoulli suite.
    #[arg(long, default_value_t = 20)]
    pub max: usize,
    /// Expansion order for the order suite.
    #[arg(long, default_value_t = 4)]
    pub m: usize,
}

/// Text written to stdout (or `--out`) and stderr, plus the exit code.
#[derive(Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Oracle(_) => EXIT_ORACLE,
        Error::Internal(_) => EXIT_FAILED,
        _ => EXIT_INVALID,
    }
}

fn failure(e: &Error) -> Outcome {
    Outcome {
        stdout: String::new(),
        stderr: format!("error: {e}\n"),
        code: exit_code(e),
    }
}

// Parameter parsing

#[derive(Debug, PartialEq, Eq)]
enum Literal {
    Integer,
    Fraction,
    Decimal,
}

fn classify(text: &str) -> Literal {
    if text.contains('/') {
        Literal::Fraction
    } else if text.contains(['.', 'e', 'E']) {
        Literal::Decimal
    } else {
        Literal::Integer
    }
}

/// Fractions select exact mode, decimals real mode; mixing is rejected.
fn select_kind(texts: &[&str], exact: bool, precision: u32) -> Result<Kind> {
    let fraction = texts.iter().any(|t| classify(t) == Literal::Fraction);
    let decimal = texts.iter().any(|t| classify(t) == Literal::Decimal);
    if fraction && decimal {
        return Err(Error::InvalidArgument(
            "parameters mix fractions (exact) and decimals (real); write all of them one way"
                .into(),
        ));
    }
    if decimal && exact {
        return Err(Error::InvalidArgument(
            "--exact cannot be combined with decimal parameters".into(),
        ));
    }
    if fraction || exact {
        return Ok(Kind::Exact);
    }
    if precision < MIN_DIGITS {
        return Err(Error::InvalidArgument(format!(
            "--precision must be at least {MIN_DIGITS}"
        )));
    }
    Ok(Kind::real(precision))
}

fn split_list(text: &Option<String>) -> Vec<String> {
    text.as_deref()
        .map(|t| {
            t.split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect()
        })
        .unwrap_or_default()
}

impl FamilyArgs {
    pub fn build(&self) -> Result<FamilySpec> {
        let name = self
            .family
            .ok_or_else(|| Error::InvalidArgument("--family is required".into()))?;
        let need = |flag: &str, v: &Option<String>| -> Result<String> {
            v.clone()
                .ok_or_else(|| Error::InvalidArgument(format!("{name} needs --{flag}")))
        };
        let texts: Vec<String> = match name {
            FamilyName::Zeta => vec![need("s", &self.s)?],
            FamilyName::Gauss2F1 => vec![
                need("a", &self.a)?,
                need("b", &self.b)?,
                need("c", &self.c)?,
                need("z", &self.z)?,
            ],
            FamilyName::Pfq => {
                let mut v = split_list(&self.alphas);
                v.extend(split_list(&self.betas));
                v.push(need("z", &self.z)?);
                v
            }
            FamilyName::E1 => vec![need("z", &self.z)?],
        };
        let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
        let kind = select_kind(&refs, self.exact, self.precision)?;
        let parse = |t: &str| kind.parse(t);
        match name {
            FamilyName::Zeta => make_zeta(parse(&texts[0])?),
            FamilyName::Gauss2F1 => make_2f1(
                parse(&texts[0])?,
                parse(&texts[1])?,
                parse(&texts[2])?,
                parse(&texts[3])?,
            ),
            FamilyName::Pfq => {
                let alphas = split_list(&self.alphas)
                    .iter()
                    .map(|t| parse(t))
                    .collect::<Result<Vec<_>>>()?;
                let betas = split_list(&self.betas)
                    .iter()
                    .map(|t| parse(t))
                    .collect::<Result<Vec<_>>>()?;
                make_pfq(alphas, betas, parse(&texts[texts.len() - 1])?)
            }
            FamilyName::E1 => make_e1(parse(&texts[0])?),
        }
    }
}

fn parse_range(text: &str) -> Result<(u64, u64)> {
    let (a, b) = text
        .split_once("..")
        .ok_or_else(|| Error::Parse(format!("--n-range expects a..b, got {text:?}")))?;
    let num = |t: &str| {
        t.trim()
            .parse::<u64>()
            .map_err(|e| Error::Parse(format!("{t:?}: {e}")))
    };
    let (a, b) = (num(a)?, num(b)?);
    if a > b {
        return Err(Error::InvalidArgument(format!("empty n-range {a}..{b}")));
    }
    Ok((a, b))
}

impl RunArgs {
    fn ns(&self) -> Result<Vec<u64>> {
        match (&self.n, &self.n_range) {
            (Some(n), None) => Ok(vec![*n]),
            (None, Some(r)) => {
                let (a, b) = parse_range(r)?;
                Ok((a..=b).collect())
            }
            _ => Err(Error::InvalidArgument(
                "give either --n or --n-range".into(),
            )),
        }
    }

    fn methods(&self) -> Result<Vec<Method>> {
        let (l, m) = match (self.l, self.big_m) {
            (None, None) => (self.m / 2, self.m / 2),
            (Some(l), Some(m)) => (l, m),
            _ => return Err(Error::InvalidArgument("--L and --M go together".into())),
        };
        if l + m > self.m {
            return Err(Error::InvalidArgument(format!(
                "Pade degrees need L+M <= m, got {l}+{m} > {}",
                self.m
            )));
        }
        let pade = Method::Pade { l, m };
        Ok(match self.method {
            MethodChoice::Power => vec![Method::Power],
            MethodChoice::Factorial => vec![Method::Factorial],
            MethodChoice::Pade => vec![pade],
            MethodChoice::All => vec![Method::Power, Method::Factorial, pade],
        })
    }
}

// Commands

fn render_scalar(x: &Scalar) -> String {
    x.to_string()
}

fn cmd_coeffs(args: &CoeffsArgs) -> Result<String> {
    let family = args.family.build()?;
    let g = solve_gamma(&family, args.m)?;
    let gamma: Vec<String> = g.coefficients().iter().map(render_scalar).collect();
    let tilde: Option<Vec<String>> = args.factorial.then(|| {
        gamma_to_factorial(&g)
            .coefficients()
            .iter()
            .map(render_scalar)
            .collect()
    });
    Ok(match args.format {
        Format::Text => {
            let mut out = String::new();
            for (mu, v) in gamma.iter().enumerate() {
                let _ = writeln!(out, "gamma[{mu}] = {v}");
            }
            for (mu, v) in tilde.iter().flatten().enumerate() {
                let _ = writeln!(out, "gamma_factorial[{mu}] = {v}");
            }
            out
        }
        Format::Json => {
            let mut obj = BTreeMap::new();
            obj.insert("family", serde_json::json!(family.name().as_str()));
            obj.insert("params", serde_json::json!(family.params_label()));
            obj.insert("m", serde_json::json!(args.m));
            obj.insert("gamma", serde_json::json!(gamma));
            if let Some(t) = &tilde {
                obj.insert("gamma_factorial", serde_json::json!(t));
            }
            serde_json::to_string_pretty(&obj).map_err(|e| Error::Internal(e.to_string()))? + "\n"
        }
        Format::Csv => {
            let mut out = String::from(if tilde.is_some() {
                "mu,gamma,gamma_factorial\n"
            } else {
                "mu,gamma\n"
            });
            for (mu, v) in gamma.iter().enumerate() {
                match &tilde {
                    Some(t) => writeln!(out, "{mu},{v},{}", t[mu]),
                    None => writeln!(out, "{mu},{v}"),
                }
                .expect("write to String");
            }
            out
        }
    })
}

/// Rows for every (n, method), computed in parallel and returned in order.
pub fn run_rows(args: &RunArgs) -> Result<(Vec<ApproximationReport>, i32)> {
    let family = args.family.build()?;
    let ns = args.ns()?;
    let methods = args.methods()?;
    let gamma = solve_gamma(&family, args.m)?;
    let cfg = OracleConfig::for_consumer(family.kind());
    let oracles: Vec<Result<Scalar>> = ns
        .par_iter()
        .map(|&n| oracle_column(&family, n, &cfg))
        .collect();
    let jobs: Vec<(usize, u64, Method)> = ns
        .iter()
        .enumerate()
        .flat_map(|(i, &n)| methods.iter().map(move |&m| (i, n, m)))
        .collect();
    let rows: Vec<(ApproximationReport, RowStatus)> = jobs
        .par_iter()
        .map(|&(i, n, method)| {
            approximation_row(&family, &gamma, n, method, Some(&oracles[i]), args.timing)
        })
        .collect();
    let code = rows
        .iter()
        .map(|(_, s)| match s {
            RowStatus::Ok => EXIT_OK,
            RowStatus::Invalid => EXIT_INVALID,
            RowStatus::OracleFailed => EXIT_ORACLE,
        })
        .max()
        .unwrap_or(EXIT_OK);
    Ok((rows.into_iter().map(|(r, _)| r).collect(), code))
}

fn render_rows(rows: &[ApproximationReport], format: Format) -> Result<String> {
    match format {
        Format::Text => Ok(report::to_text(rows)),
        Format::Json => report::to_json(rows),
        Format::Csv => report::to_csv(rows),
    }
}

// Check suites

struct SuiteResult {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn q(n: i64, d: i64) -> Scalar {
    Kind::Exact.ratio(n, d)
}

fn suite_bernoulli(max: usize) -> Result<SuiteResult> {
    let mut failures = Vec::new();
    for s in [q(2, 1), q(3, 1), q(11, 10), q(-7, 3), q(5, 2)] {
        let g = solve_gamma(&make_zeta(s.clone())?, max)?;
        for (mu, gm) in g.coefficients().iter().enumerate() {
            let poch = if mu == 0 {
                (&s - &q(1, 1)).recip()?
            } else {
                pochhammer(&s, mu - 1)
            };
            let fact = Kind::Exact.integer(&crate::combinatorics::factorial(mu));
            let b = Scalar::Exact(bernoulli_rational(mu));
            let expected = poch * b / fact;
            let expected = if mu % 2 == 0 { -expected } else { expected };
            if *gm != expected {
                failures.push(format!("s={s} mu={mu}"));
            }
        }
        if s.is_integer() {
            let f = make_zeta(s.clone())?;
            for n in 0..6 {
                if euler_maclaurin_zeta_tail(&s, n, max)? != remainder_power(&f, &g, n)? {
                    failures.push(format!("tail s={s} n={n}"));
                }
            }
        }
    }
    for n in 1..=max {
        let mut acc = Kind::Exact.zero();
        for nu in 0..=n {
            acc = acc
                + binomial_coefficient(&q(n as i64 + 1, 1), nu)
                    * Scalar::Exact(bernoulli_rational(nu));
        }
        if !acc.is_zero() {
            failures.push(format!("recurrence n={n}"));
        }
    }
    Ok(SuiteResult {
        name: "bernoulli",
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("exact through order {max}")
        } else {
            failures.join(", ")
        },
    })
}

fn default_order_families() -> Result<Vec<FamilySpec>> {
    Ok(vec![
        make_zeta(q(2, 1))?,
        make_2f1(q(1, 2), q(1, 3), q(5, 2), q(1, 2))?,
        make_pfq(
            vec![q(1, 2), q(2, 3), q(5, 4)],
            vec![q(3, 2), q(7, 3)],
            q(2, 5),
        )?,
        make_e1(q(5, 1))?,
    ])
}

fn suite_order(args: &CheckArgs) -> Result<SuiteResult> {
    let families = match args.family.family {
        Some(_) => vec![args.family.build()?],
        None => default_order_families()?,
    };
    let mut passed = true;
    let mut parts = Vec::new();
    for f in families {
        let f = if f.kind().is_exact() {
            f.with_kind(Kind::real(DEFAULT_DIGITS))?
        } else {
            f
        };
        // the zeta defect is proportional to B_{m+1}, which vanishes for even m >= 2
        let gains_order = f.name() == FamilyName::Zeta && bernoulli_rational(args.m + 1) == 0;
        let target = -(args.m as f64 + if gains_order { 2.0 } else { 1.0 });
        let slope = residual_order_slope(&f, args.m, 20..=60)?;
        let ok = (slope - target).abs() <= 0.3;
        passed &= ok;
        parts.push(format!(
            "{} slope {slope:.3} (target {target}){}",
            f.name(),
            if ok { "" } else { " off" }
        ));
    }
    Ok(SuiteResult {
        name: "order",
        passed,
        detail: format!("m = {}, ± 0.3: {}", args.m, parts.join("; ")),
    })
}

fn suite_pade22(args: &CheckArgs) -> Result<SuiteResult> {
    let zs = match &args.family.z {
        Some(t) => vec![Kind::Exact.parse(t)?],
        None => vec![q(1, 3), q(5, 1), q(13, 7), q(-2, 9)],
    };
    let mut failures = Vec::new();
    for z in &zs {
        let g = solve_gamma(&make_e1(z.clone())?, 4)?;
        let pade = pade_from_series(g.coefficients(), 2, 2)?;
        for n in 1..=12i64 {
            let nn = q(n, 1);
            let base = &(&nn * &nn) - &nn;
            let num = &(&base + &(z * &nn)) + z;
            let den = &(&base + &(&q(2, 1) * &(z * &nn))) + &(z * z);
            let expected = num.try_div(&den);
            let got = pade.evaluate(&q(1, n + 1));
            match (got, expected) {
                (Ok(a), Ok(b)) if a == b => {}
                (Err(_), Err(_)) => {}
                _ => failures.push(format!("z={z} n={n}")),
            }
        }
    }
    Ok(SuiteResult {
        name: "pade22",
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!(
                "(n²-n+zn+z)/(n²-n+2zn+z²) exact for {} values of z",
                zs.len()
            )
        } else {
            failures.join(", ")
        },
    })
}

fn suite_oracle() -> Result<SuiteResult> {
    let cfg = OracleConfig::default();
    let mut checked = 0;
    for z in [1, 2, 5, 10] {
        e1_reference(&q(z, 1), &cfg)?;
        checked += 1;
    }
    for s in ["1.1", "2", "4"] {
        zeta_reference(&Kind::real(DEFAULT_DIGITS).parse(s)?, &cfg)?;
        checked += 1;
    }
    let f = make_e1(q(5, 1))?;
    let real = f.with_kind(Kind::real(cfg.digits))?;
    let tol = 10f64.powi(-((cfg.digits - 10) as i32));
    let mut failures = Vec::new();
    let mut prev = remainder_exact(&f, 0, &cfg)?;
    for n in 1..=10u64 {
        let cur = remainder_exact(&f, n, &cfg)?;
        let delta = &cur - &prev;
        let term = real.term(n)?;
        if (&delta - &term).abs().to_f64() > tol * term.abs().to_f64() {
            failures.push(format!("difference equation n={n}"));
        }
        prev = cur;
    }
    Ok(SuiteResult {
        name: "oracle",
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("{checked} dual-route references, Δr = a for n ≤ 10")
        } else {
            failures.join(", ")
        },
    })
}

fn cmd_check(args: &CheckArgs) -> Outcome {
    let suites: Vec<Suite> = match args.suite {
        Suite::All => vec![Suite::Bernoulli, Suite::Order, Suite::Pade22, Suite::Oracle],
        s => vec![s],
    };
    let mut out = Outcome::default();
    for suite in suites {
        let result = match suite {
            Suite::Bernoulli => suite_bernoulli(args.max),
            Suite::Order => suite_order(args),
            Suite::Pade22 => suite_pade22(args),
            Suite::Oracle => suite_oracle(),
            Suite::All => unreachable!(),
        };
        match result {
            Ok(r) => {
                let _ = writeln!(
                    out.stdout,
                    "{} {}: {}",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.name,
                    r.detail
                );
                if !r.passed {
                    out.code = out.code.max(EXIT_FAILED);
                }
            }
            Err(e) => {
                let _ = writeln!(out.stdout, "FAIL {suite:?}: {e}");
                out.code = out.code.max(exit_code(&e));
            }
        }
    }
    out
}

/// Runs a parsed command line without touching the process streams.
pub fn execute(cli: &Cli) -> Outcome {
    let (result, out_path): (Result<(String, i32)>, Option<&PathBuf>) = match &cli.command {
        Command::Coeffs(a) => (cmd_coeffs(a).map(|s| (s, EXIT_OK)), a.out.as_ref()),
        Command::Approx(a) | Command::Table(a) => (
            run_rows(a).and_then(|(rows, code)| Ok((render_rows(&rows, a.format)?, code))),
            a.out.as_ref(),
        ),
        Command::Check(a) => return cmd_check(a),
    };
    let (text, code) = match result {
        Ok(v) => v,
        Err(e) => return failure(&e),
    };
    match out_path {
        Some(path) => match std::fs::write(path, &text) {
            Ok(()) => Outcome {
                code,
                ..Outcome::default()
            },
            Err(e) => Outcome {
                stderr: format!("error: {}: {e}\n", path.display()),
                code: EXIT_FAILED,
                ..Outcome::default()
            },
        },
        None => Outcome {
            stdout: text,
            code,
            ..Outcome::default()
        },
    }
}

/// Parses `args` (including the program name) and executes.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let text = e.render().to_string();
            if code == EXIT_OK {
                Outcome {
                    stdout: text,
                    code,
                    ..Outcome::default()
                }
            } else {
                Outcome {
                    stderr: text,
                    code,
                    ..Outcome::default()
                }
            }
        }
    }
}
