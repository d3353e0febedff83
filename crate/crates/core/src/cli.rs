//! Command-line front end.
//!
//! Exit status: 0 on success, 2 for configuration errors, 3 when the exact
//! oracle refuses an instance over budget.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::engine::ConstraintSet;
use crate::fpround::{parse_hex, to_rational, Arith, Fallback, Precision, RoundingMode, Strong};
use crate::interval::Interval;
use crate::kernels::ChainSpec;
use crate::metrics::{
    display_bound_3sig, e_abs_interval, e_rel_interval, format_t, Metric,
};
use crate::oracle::{self, Budget, OracleError};
use crate::report::{emit_csv, emit_json, emit_table, Report, ResolvedConfig, Row};
use crate::scan::{scan_probability, ScanBatch, ScanSpec};

#[derive(Debug, Parser)]
#[command(name = "rigscan", version, about = "Certified scan statistic probabilities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certified P(max window sum <= t) for each threshold.
    Scan(ScanArgs),
    /// Certified P(max window sum >= t) for each threshold.
    Tail(ScanArgs),
    /// Threshold sweep with bounds in hex, errors and approximations.
    Table(ScanArgs),
    /// Certified P(X_k in A_k for all cells).
    Rect(RectArgs),
    /// Optimal absolute and relative errors of an interval.
    Errors(ErrorsArgs),
    /// Exact rational P(max window sum <= t).
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Multinomial,
    Hypergeometric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PrecisionArg {
    Binary64,
    Binary32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Enum,
    Dp,
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long)]
    pub n: u64,
    /// Number of cells; implied by explicit parameter lists.
    #[arg(long)]
    pub d: Option<usize>,
    /// Multinomial with p = (1/d, ..., 1/d).
    #[arg(long)]
    pub uniform: bool,
    /// Multinomial cell probabilities: `1/3`, `0.25`, hex `1.8*2^-2`, bounds
    /// `a:b`, repetition `vxN`, comma-separated.
    #[arg(long)]
    pub p: Option<String>,
    /// Hypergeometric cell populations, e.g. `10x365`.
    #[arg(long)]
    pub m: Option<String>,
    /// File of parameters in the `--p`/`--m` syntax, separated by commas or
    /// whitespace; `#` starts a comment.
    #[arg(long)]
    pub params_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "binary64")]
    pub precision: PrecisionArg,
    #[arg(long, value_enum, default_value = "table")]
    pub format: FormatArg,
    /// Show hex bounds in the text table.
    #[arg(long)]
    pub hex: bool,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    #[arg(long)]
    pub ell: usize,
    /// Threshold `t` or inclusive range `a..b`.
    #[arg(long)]
    pub t: String,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct RectArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    /// One set per cell separated by `;`: `a..b` or `v|v|v`, with `xN`
    /// repetition, e.g. `0..3x365`.
    #[arg(long)]
    pub sets: String,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ErrorsArgs {
    #[arg(long)]
    pub lo: String,
    #[arg(long)]
    pub hi: String,
    #[arg(long, value_enum, default_value = "table")]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    #[arg(long)]
    pub ell: usize,
    #[arg(long)]
    pub t: u64,
    #[arg(long, value_enum, default_value = "enum")]
    pub method: MethodArg,
    /// Maximal number of compositions to enumerate.
    #[arg(long, default_value_t = oracle::DEFAULT_COMPOSITIONS)]
    pub budget: u128,
    #[arg(long, value_enum, default_value = "table")]
    pub format: FormatArg,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Budget(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Budget(_) => 3,
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

/// Parses an exact rational: `p/q`, a decimal such as `0.25` or `1e-3`, or a
/// binary64 hex float such as `1.8*2^-2`.
pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    let bad = || format!("cannot parse {s:?} as an exact number");
    if s.contains('^') {
        // Short fractions are zero-padded to the full 13 hex digits.
        let full = match s.split_once('.') {
            Some((lead, rest)) => {
                let cut = rest.find(['*', '\u{b7}']).unwrap_or(rest.len());
                format!("{lead}.{:0<13}{}", &rest[..cut], &rest[cut..])
            }
            None => s.to_string(),
        };
        let x: f64 = parse_hex(&full).map_err(|e| e.to_string())?;
        if !x.is_finite() {
            return Err(bad());
        }
        return Ok(to_rational(x));
    }
    if s.contains('/') {
        let r: BigRational = s.parse().map_err(|_| bad())?;
        return Ok(r);
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() || !(int.chars().chain(frac.chars())).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}0").parse::<BigInt>().map_err(|_| bad())? / 10;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

/// Splits `vxN` into `(v, N)`; plain `v` repeats once.
fn repetition(tok: &str) -> Result<(&str, usize), String> {
    match tok.rsplit_once('x') {
        Some((v, k)) if !v.is_empty() => {
            let k = k.parse().map_err(|_| format!("bad repetition count in {tok:?}"))?;
            Ok((v, k))
        }
        _ => Ok((tok, 1)),
    }
}

fn tokens(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.split([',', ' ', '\t']))
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(String::from)
        .collect()
}

fn expand<T>(text: &str, parse: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String>
where
    T: Clone,
{
    let mut out = Vec::new();
    for tok in tokens(text) {
        let (v, k) = repetition(&tok)?;
        let x = parse(v)?;
        out.extend(std::iter::repeat_n(x, k));
    }
    Ok(out)
}

#[derive(Clone)]
enum ProbToken {
    Point(BigRational),
    Bounds(BigRational, BigRational),
}

fn parse_prob(s: &str) -> Result<ProbToken, String> {
    match s.split_once(':') {
        Some((a, b)) => Ok(ProbToken::Bounds(parse_rational(a)?, parse_rational(b)?)),
        None => Ok(ProbToken::Point(parse_rational(s)?)),
    }
}

/// Builds the chain and a description of its parameter source.
pub fn resolve_chain(args: &ChainArgs) -> Result<(ChainSpec, String), CliError> {
    let file_text = match &args.params_file {
        Some(path) => Some(
            std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?,
        ),
        None => None,
    };
    let sources = args.uniform as u8 + args.p.is_some() as u8 + args.m.is_some() as u8 + file_text.is_some() as u8;
    if sources != 1 {
        return Err(config_err(
            "give exactly one parameter source: --uniform, --p, --m or --params-file",
        ));
    }
    let echo = if args.uniform {
        "uniform".to_string()
    } else if let Some(p) = &args.p {
        format!("p={p}")
    } else if let Some(m) = &args.m {
        format!("m={m}")
    } else {
        format!("file={}", args.params_file.as_ref().expect("checked").display())
    };
    let check_d = |len: usize| -> Result<(), CliError> {
        match args.d {
            Some(d) if d != len => Err(CliError::Config(format!(
                "--d {d} does not match {len} parameters"
            ))),
            _ => Ok(()),
        }
    };
    let chain = match args.family {
        FamilyArg::Multinomial => {
            if args.m.is_some() {
                return Err(config_err("--m applies to the hypergeometric family"));
            }
            if args.uniform {
                let d = args.d.ok_or_else(|| config_err("--uniform needs --d"))?;
                ChainSpec::multinomial_uniform(args.n, d).map_err(config_err)?
            } else {
                let text = args.p.clone().or(file_text).expect("checked");
                let toks = expand(&text, parse_prob).map_err(CliError::Config)?;
                check_d(toks.len())?;
                if toks.iter().all(|t| matches!(t, ProbToken::Point(_))) {
                    let p = toks
                        .into_iter()
                        .map(|t| match t {
                            ProbToken::Point(x) => x,
                            ProbToken::Bounds(..) => unreachable!(),
                        })
                        .collect();
                    ChainSpec::multinomial(args.n, p).map_err(config_err)?
                } else {
                    let b = toks
                        .into_iter()
                        .map(|t| match t {
                            ProbToken::Point(x) => (x.clone(), x),
                            ProbToken::Bounds(a, b) => (a, b),
                        })
                        .collect();
                    ChainSpec::multinomial_bounds(args.n, b).map_err(config_err)?
                }
            }
        }
        FamilyArg::Hypergeometric => {
            if args.uniform || args.p.is_some() {
                return Err(config_err("the hypergeometric family takes populations via --m"));
            }
            let text = args.m.clone().or(file_text).expect("checked");
            let m = expand(&text, |s| {
                s.parse::<u64>().map_err(|_| format!("bad population {s:?}"))
            })
            .map_err(CliError::Config)?;
            check_d(m.len())?;
            ChainSpec::hypergeometric(args.n, m).map_err(config_err)?
        }
    };
    Ok((chain, echo))
}

/// Parses `t` or `a..b` and checks `a <= b <= n + 1`.
pub fn parse_thresholds(s: &str, n: u64) -> Result<(u64, u64), CliError> {
    let bad = || CliError::Config(format!("bad threshold {s:?}; expected t or a..b"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        ),
        None => {
            let t = s.trim().parse().map_err(|_| bad())?;
            (t, t)
        }
    };
    if a > b {
        return Err(CliError::Config(format!("empty threshold range {s:?}")));
    }
    if b > n + 1 {
        return Err(CliError::Config(format!("threshold {b} exceeds n + 1 = {}", n + 1)));
    }
    Ok((a, b))
}

fn parse_set(s: &str) -> Result<ConstraintSet, String> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let a = a.trim().parse().map_err(|_| format!("bad set {s:?}"))?;
        let b = b.trim().parse().map_err(|_| format!("bad set {s:?}"))?;
        return Ok(ConstraintSet::range(a, b));
    }
    let v = s
        .split('|')
        .map(|x| x.trim().parse::<i64>().map_err(|_| format!("bad set {s:?}")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ConstraintSet::from_values(v))
}

fn parse_sets(s: &str) -> Result<Vec<ConstraintSet>, String> {
    let mut out = Vec::new();
    for tok in s.split(';').map(str::trim).filter(|t| !t.is_empty()) {
        let (v, k) = repetition(tok)?;
        let set = parse_set(v)?;
        out.extend(std::iter::repeat_n(set, k));
    }
    Ok(out)
}

fn rounding() -> Result<RoundingMode, CliError> {
    RoundingMode::from_env().map_err(config_err)
}

fn precision(p: PrecisionArg) -> Result<Precision, CliError> {
    match p {
        PrecisionArg::Binary64 => Ok(Precision::Binary64),
        PrecisionArg::Binary32 if cfg!(feature = "binary32") => Ok(Precision::Binary32),
        PrecisionArg::Binary32 => Err(config_err(
            "binary32 support is not compiled in (build with --features binary32)",
        )),
    }
}

fn format_name(f: FormatArg) -> &'static str {
    match f {
        FormatArg::Table => "table",
        FormatArg::Csv => "csv",
        FormatArg::Json => "json",
    }
}

#[derive(Clone, Copy)]
enum Sweep {
    Cdf,
    Tail,
}

fn sweep_rows<A: Arith>(chain: &ChainSpec, ell: usize, (a, b): (u64, u64), sweep: Sweep) -> Result<Vec<Row>, CliError> {
    let batch = ScanBatch::<A>::new(chain, ell, b.min(chain.n)).map_err(config_err)?;
    (a..=b)
        .map(|t| {
            let iv = match sweep {
                Sweep::Cdf => batch.cdf(t),
                Sweep::Tail => batch.tail(t),
            }
            .map_err(config_err)?;
            Ok(Row::new(Some(t), &iv))
        })
        .collect()
}

fn rect_row<A: Arith>(spec: &ScanSpec) -> Result<Vec<Row>, CliError> {
    let iv: Interval<A::F> = scan_probability::<A>(spec).map_err(config_err)?;
    Ok(vec![Row::new(None, &iv)])
}

/// Runs `$body` with `$A` bound to the arithmetic selected by precision and
/// rounding mode.
macro_rules! dispatch {
    ($prec:expr, $mode:expr, |$A:ident| $body:expr) => {
        match ($prec, $mode) {
            (Precision::Binary64, RoundingMode::Strong) => {
                type $A = Strong<f64>;
                $body
            }
            (Precision::Binary64, RoundingMode::Fallback) => {
                type $A = Fallback<f64>;
                $body
            }
            #[cfg(feature = "binary32")]
            (Precision::Binary32, RoundingMode::Strong) => {
                type $A = Strong<f32>;
                $body
            }
            #[cfg(feature = "binary32")]
            (Precision::Binary32, RoundingMode::Fallback) => {
                type $A = Fallback<f32>;
                $body
            }
            #[allow(unreachable_patterns)]
            _ => unreachable!("precision checked"),
        }
    };
}

fn render(report: &Report, format: FormatArg, hex: bool) -> Vec<u8> {
    match format {
        FormatArg::Json => emit_json(report),
        FormatArg::Csv => emit_csv(report),
        FormatArg::Table => emit_table(report, hex),
    }
}

fn base_config(command: &str, mode: RoundingMode, prec: Precision, format: FormatArg, hex: bool) -> ResolvedConfig {
    ResolvedConfig {
        command: command.into(),
        family: None,
        n: None,
        d: None,
        ell: None,
        thresholds: None,
        params: None,
        precision: prec.as_str().into(),
        rounding: mode.as_str().into(),
        format: format_name(format).into(),
        hex,
    }
}

fn run_sweep(name: &str, args: &ScanArgs, sweep: Sweep) -> Result<Vec<u8>, CliError> {
    let mode = rounding()?;
    let prec = precision(args.out.precision)?;
    let (chain, echo) = resolve_chain(&args.chain)?;
    if args.ell == 0 || args.ell > chain.d {
        return Err(CliError::Config(format!(
            "--ell {} must lie in 1..={}",
            args.ell, chain.d
        )));
    }
    let range = parse_thresholds(&args.t, chain.n)?;
    let rows = dispatch!(prec, mode, |A| sweep_rows::<A>(&chain, args.ell, range, sweep)?);
    let hex = args.out.hex || name == "table";
    let mut config = base_config(name, mode, prec, args.out.format, hex);
    config.family = Some(chain.family.as_str().into());
    config.n = Some(chain.n);
    config.d = Some(chain.d);
    config.ell = Some(args.ell);
    config.thresholds = Some(format!("{}..{}", range.0, range.1));
    config.params = Some(echo);
    Ok(render(&Report { config, rows }, args.out.format, hex))
}

fn run_rect(args: &RectArgs) -> Result<Vec<u8>, CliError> {
    let mode = rounding()?;
    let prec = precision(args.out.precision)?;
    let (chain, echo) = resolve_chain(&args.chain)?;
    let sets = parse_sets(&args.sets).map_err(CliError::Config)?;
    let spec = ScanSpec::new(chain.clone(), 1, sets).map_err(config_err)?;
    let rows = dispatch!(prec, mode, |A| rect_row::<A>(&spec)?);
    let mut config = base_config("rect", mode, prec, args.out.format, args.out.hex);
    config.family = Some(chain.family.as_str().into());
    config.n = Some(chain.n);
    config.d = Some(chain.d);
    config.ell = Some(1);
    config.params = Some(echo);
    Ok(render(&Report { config, rows }, args.out.format, args.out.hex))
}

#[derive(Debug, Serialize)]
struct ErrorsOutput {
    lo: String,
    hi: String,
    e_abs: String,
    e_abs_at: String,
    e_rel: String,
    e_rel_at: String,
    e_abs_display: String,
    e_rel_display: String,
    approx: String,
}

fn metric_string(m: &Metric) -> String {
    m.to_string()
}

fn decimal(r: &BigRational) -> String {
    format!("{:?}", crate::fpround::enclose_rational::<f64>(r).0)
}

fn kv_lines(pairs: &[(&str, &str)]) -> Vec<u8> {
    let w = pairs.iter().map(|p| p.0.len()).max().unwrap_or(0);
    let mut s = String::new();
    for (k, v) in pairs {
        s.push_str(&format!("{k:<w$}  {v}\n"));
    }
    s.into_bytes()
}

fn run_errors(args: &ErrorsArgs) -> Result<Vec<u8>, CliError> {
    let a = parse_rational(&args.lo).map_err(CliError::Config)?;
    let b = parse_rational(&args.hi).map_err(CliError::Config)?;
    let (ea, pa) = e_abs_interval(&a, &b).map_err(config_err)?;
    let (er, pr) = e_rel_interval(&a, &b).map_err(config_err)?;
    let out = ErrorsOutput {
        lo: a.to_string(),
        hi: b.to_string(),
        e_abs: metric_string(&ea),
        e_abs_at: pa.to_string(),
        e_rel: metric_string(&er),
        e_rel_at: pr.to_string(),
        e_abs_display: display_bound_3sig(&ea),
        e_rel_display: display_bound_3sig(&er),
        approx: format_t(&a, &b),
    };
    let approx_of = |m: &Metric| match m {
        Metric::Finite(r) => decimal(r),
        Metric::Infinite => "inf".into(),
    };
    Ok(match args.format {
        FormatArg::Json => {
            let mut v = serde_json::to_vec_pretty(&out).expect("serializable");
            v.push(b'\n');
            v
        }
        FormatArg::Csv => format!(
            "lo,hi,e_abs,e_abs_at,e_rel,e_rel_at,approx\n{},{},{},{},{},{},{}\n",
            out.lo, out.hi, out.e_abs, out.e_abs_at, out.e_rel, out.e_rel_at, out.approx
        )
        .into_bytes(),
        FormatArg::Table => kv_lines(&[
            ("interval", &format!("[{}, {}]", out.lo, out.hi)),
            ("e_abs", &format!("{} ({}) at {} ({})", out.e_abs, approx_of(&ea), out.e_abs_at, decimal(&pa))),
            ("e_rel", &format!("{} ({}) at {} ({})", out.e_rel, approx_of(&er), out.e_rel_at, decimal(&pr))),
            ("display", &format!("{} {}", out.e_abs_display, out.e_rel_display)),
            ("approx", &out.approx),
        ]),
    })
}

#[derive(Debug, Serialize)]
struct OracleOutput {
    config: ResolvedConfig,
    method: &'static str,
    value: String,
    value_dec: String,
}

fn run_oracle(args: &OracleArgs) -> Result<Vec<u8>, CliError> {
    let (chain, echo) = resolve_chain(&args.chain)?;
    let budget = Budget {
        compositions: args.budget,
        ..Budget::default()
    };
    let spec = ScanSpec::cdf(chain.clone(), args.ell, args.t.min(chain.n)).map_err(config_err)?;
    let value = match args.method {
        MethodArg::Enum => oracle::exact_scan_probability(&spec, &budget),
        MethodArg::Dp => oracle::exact_rectangle_dp(&spec, &budget),
    }
    .map_err(|e| match e {
        OracleError::CompositionBudget { .. } | OracleError::StateBudget { .. } => CliError::Budget(e.to_string()),
        other => config_err(other),
    })?;
    let mut config = base_config("oracle", RoundingMode::Strong, Precision::Binary64, args.format, false);
    config.rounding = "exact".into();
    config.precision = "rational".into();
    config.family = Some(chain.family.as_str().into());
    config.n = Some(chain.n);
    config.d = Some(chain.d);
    config.ell = Some(args.ell);
    config.thresholds = Some(format!("{}..{}", args.t, args.t));
    config.params = Some(echo);
    let out = OracleOutput {
        config,
        method: match args.method {
            MethodArg::Enum => "enum",
            MethodArg::Dp => "dp",
        },
        value: value.to_string(),
        value_dec: decimal(&value),
    };
    Ok(match args.format {
        FormatArg::Json => {
            let mut v = serde_json::to_vec_pretty(&out).expect("serializable");
            v.push(b'\n');
            v
        }
        FormatArg::Csv => format!("t,value,value_dec\n{},{},{}\n", args.t, out.value, out.value_dec).into_bytes(),
        FormatArg::Table => format!("{}\n", out.value).into_bytes(),
    })
}

/// Executes a parsed command line and returns the bytes for stdout.
pub fn run(cli: &Cli) -> Result<Vec<u8>, CliError> {
    match &cli.command {
        Command::Scan(a) => run_sweep("scan", a, Sweep::Cdf),
        Command::Tail(a) => run_sweep("tail", a, Sweep::Tail),
        Command::Table(a) => run_sweep("table", a, Sweep::Cdf),
        Command::Rect(a) => run_rect(a),
        Command::Errors(a) => run_errors(a),
        Command::Oracle(a) => run_oracle(a),
    }
}

/// Parses `args` (including the program name) and runs; returns the exit
/// status and the bytes for stdout and stderr.
pub fn main_with_args<I, T>(args: I) -> (i32, Vec<u8>, Vec<u8>)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string().into_bytes();
            return if code == 0 { (0, text, Vec::new()) } else { (2, Vec::new(), text) };
        }
    };
    match run(&cli) {
        Ok(out) => (0, out, Vec::new()),
        Err(e) => (e.exit_code(), Vec::new(), format!("rigscan: {e}\n").into_bytes()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Zero};

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("1/3").unwrap(), rat(1, 3));
        assert_eq!(parse_rational("0.025").unwrap(), rat(1, 40));
        assert_eq!(parse_rational("2.5e-2").unwrap(), rat(1, 40));
        assert_eq!(parse_rational("1").unwrap(), BigRational::one());
        assert_eq!(parse_rational("1.8*2^-2").unwrap(), rat(3, 8));
        assert_eq!(parse_rational("0").unwrap(), BigRational::zero());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn lists_and_thresholds() {
        let m = expand("10x3, 5", |s| s.parse::<u64>().map_err(|e| e.to_string())).unwrap();
        assert_eq!(m, vec![10, 10, 10, 5]);
        assert_eq!(parse_thresholds("4..32", 500).unwrap(), (4, 32));
        assert_eq!(parse_thresholds("8", 500).unwrap(), (8, 8));
        assert!(parse_thresholds("5..4", 500).is_err());
        assert!(parse_thresholds("0..502", 500).is_err());
        let sets = parse_sets("0..2x2;1|3").unwrap();
        assert_eq!(sets.len(), 3);
        assert!(sets[2].contains(3) && !sets[2].contains(2));
    }

    #[test]
    fn chain_sources() {
        let args = ChainArgs {
            family: FamilyArg::Multinomial,
            n: 5,
            d: Some(3),
            uniform: true,
            p: None,
            m: None,
            params_file: None,
        };
        assert_eq!(resolve_chain(&args).unwrap().0, ChainSpec::multinomial_uniform(5, 3).unwrap());
        let args = ChainArgs {
            uniform: false,
            p: Some("1/4x2,1/2".into()),
            ..args
        };
        assert_eq!(resolve_chain(&args).unwrap().1, "p=1/4x2,1/2");
        let args = ChainArgs { d: Some(4), ..args };
        assert!(resolve_chain(&args).is_err());
    }
}
