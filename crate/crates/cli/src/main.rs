use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use matchdyn::blocks::{locate, Location};
use matchdyn::cf::{a_of_omega, quadratic_endpoints};
use matchdyn::density::density_series;
use matchdyn::dynamics::{matching_index, signed_digit_sequence};
use matchdyn::measure::{
    birkhoff_frequency, catalog, conjecture_scan, coverage, eta, k_omega, mu_range, mu_zero, sweep_blocks,
    sweep_grid, write_catalog_csv, write_csv, SimMode, SimSpec, DECIMAL_DIGITS, DEFAULT_LATTICE_FACTOR,
};
use matchdyn::rational::{fmt_ratio, grid, int, parse_rational, to_decimal, to_f64};
use matchdyn::verify::{run_all, VerifyOptions};
use matchdyn::{Error, Execution, Rational};
use serde::Serialize;
use serde_json::json;

const EXIT_VERIFY: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_RANGE: u8 = 3;
const EXIT_OUTPUT: u8 = 4;
const EXIT_OTHER: u8 = 5;

/// Matching, invariant densities and digit-0 frequencies of the symmetric doubling maps.
#[derive(Debug, Parser, Serialize)]
#[command(name = "matchdyn", version)]
struct Cli {
    #[command(flatten)]
    opts: Options,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Debug, Args, Serialize)]
struct Options {
    /// Bits of certified precision for quadratic surd and limit enclosures.
    #[arg(long, global = true, default_value_t = 128, env = "MATCHDYN_PRECISION_BITS")]
    precision_bits: usize,
    /// Truncation depth for digit sequences and the density series.
    #[arg(long, global = true, default_value_t = 64, env = "MATCHDYN_DEPTH")]
    depth: usize,
    /// Largest block length for catalog, sweep, verify, conjecture and coverage.
    #[arg(long, global = true, env = "MATCHDYN_MAX_LEN")]
    max_len: Option<usize>,
    /// Parameter grid `lo:hi:step` with rational entries.
    #[arg(long, global = true, env = "MATCHDYN_GRID")]
    grid: Option<String>,
    #[arg(long, global = true, default_value_t = 0, env = "MATCHDYN_SEED")]
    seed: u64,
    /// Orbit arithmetic for simulations.
    #[arg(long, global = true, value_enum, default_value_t = Mode::Float, env = "MATCHDYN_MODE")]
    mode: Mode,
    /// Number of simulation steps.
    #[arg(long, global = true, default_value_t = 1_000_000, env = "MATCHDYN_ITERATIONS")]
    iterations: u64,
    #[arg(long, global = true, value_enum, env = "MATCHDYN_FORMAT")]
    format: Option<Format>,
    /// Write the artifact here instead of standard output.
    #[arg(long, global = true, env = "MATCHDYN_OUT")]
    out: Option<PathBuf>,
    /// Run on one thread.
    #[arg(long, global = true, env = "MATCHDYN_SEQUENTIAL")]
    sequential: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Mode {
    Float,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "name", rename_all = "lowercase")]
enum Command {
    /// Matching index, digit sequence and location of α.
    Match {
        #[arg(allow_hyphen_values = true)]
        alpha: String,
    },
    /// Matching interval containing α.
    Locate {
        #[arg(allow_hyphen_values = true)]
        alpha: String,
    },
    /// Exact digit-0 frequency μ_α([−½, ½]).
    Freq {
        #[arg(allow_hyphen_values = true)]
        alpha: String,
    },
    /// Matching intervals with their η and K.
    Catalog,
    /// Frequency records over a grid or over all blocks up to --max-len.
    Sweep {
        /// Attach a Birkhoff estimate to every record.
        #[arg(long)]
        simulate: bool,
    },
    /// Invariant suite; exits non-zero if any check fails.
    Verify,
    /// Birkhoff estimate of the digit-0 frequency.
    Simulate {
        #[arg(allow_hyphen_values = true)]
        alpha: String,
    },
    /// Equal-length block pairs whose μ ranges are out of lexicographic order.
    Conjecture,
    /// Exact share of (1, 3/2) covered by matching intervals.
    Coverage,
}

#[derive(Debug)]
struct CliError {
    code: u8,
    msg: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) => EXIT_PARSE,
            Error::Domain(_) => EXIT_RANGE,
            _ => EXIT_OTHER,
        };
        CliError { code, msg: e.to_string() }
    }
}

fn fail<T>(code: u8, msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError { code, msg: msg.into() })
}

type CliResult<T> = Result<T, CliError>;

fn parse_alpha(s: &str) -> CliResult<Rational> {
    let a = parse_rational(s).map_err(|e| CliError {
        code: EXIT_PARSE,
        msg: e.to_string(),
    })?;
    check_range(&a)?;
    Ok(a)
}

fn check_range(a: &Rational) -> CliResult<()> {
    if *a < int(1) || *a > int(2) {
        return fail(EXIT_RANGE, format!("alpha {} outside (1, 2] (alpha = 1 is also accepted)", fmt_ratio(a)));
    }
    Ok(())
}

fn parse_grid(s: &str) -> CliResult<Vec<Rational>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return fail(EXIT_PARSE, format!("grid must be lo:hi:step, got {s:?}"));
    }
    let vals = parts
        .iter()
        .map(|p| parse_rational(p))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError {
            code: EXIT_PARSE,
            msg: e.to_string(),
        })?;
    check_range(&vals[0])?;
    check_range(&vals[1])?;
    Ok(grid(&vals[0], &vals[1], &vals[2])?)
}

struct Ctx<'a> {
    cli: &'a Cli,
    exec: Execution,
}

impl Ctx<'_> {
    fn o(&self) -> &Options {
        &self.cli.opts
    }

    fn header(&self) -> Vec<String> {
        vec![
            format!("matchdyn {}", env!("CARGO_PKG_VERSION")),
            format!("command: {}", serde_json::to_string(self.cli).expect("serializable")),
        ]
    }

    fn sink(&self) -> CliResult<Box<dyn Write>> {
        match &self.o().out {
            Some(p) => match File::create(p) {
                Ok(f) => Ok(Box::new(BufWriter::new(f))),
                Err(e) => fail(EXIT_OUTPUT, format!("cannot write {}: {e}", p.display())),
            },
            None => Ok(Box::new(io::stdout().lock())),
        }
    }

    /// Writes a JSON artifact wrapped with the version and option echo.
    fn emit_json<T: Serialize>(&self, result: &T) -> CliResult<()> {
        let doc = json!({
            "tool": "matchdyn",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.cli,
            "result": result,
        });
        let mut out = self.sink()?;
        let text = serde_json::to_string_pretty(&doc).or_else(|e| fail(EXIT_OTHER, e.to_string()))?;
        writeln!(out, "{text}").and_then(|_| out.flush()).or_else(|e| fail(EXIT_OUTPUT, e.to_string()))
    }

    fn json_requested(&self) -> bool {
        self.o().format == Some(Format::Json) || self.o().out.is_some()
    }

    fn sim_mode(&self) -> SimMode {
        match self.o().mode {
            Mode::Float => SimMode::Float,
            Mode::Exact => SimMode::ExactLattice {
                factor: DEFAULT_LATTICE_FACTOR,
            },
        }
    }
}

fn dec(r: &Rational) -> String {
    to_decimal(r, DECIMAL_DIGITS)
}

fn cmd_match(ctx: &Ctx, s: &str) -> CliResult<u8> {
    let alpha = parse_alpha(s)?;
    let res = matching_index(&alpha)?;
    let digits = signed_digit_sequence(&int(1), &alpha, ctx.o().depth)?;
    let loc = locate(&alpha)?;
    let head = match &res {
        matchdyn::dynamics::MatchingResult::Matched { m, .. } => format!("Matched m={m}"),
        other => format!("No matching ({})", other.status()),
    };
    println!("{head}, digits {digits}, {loc}");
    let mut quad = None;
    if let Location::Interval(j) = &loc {
        if j.m >= 3 {
            let a = a_of_omega(&j.omega)?;
            let qi = quadratic_endpoints(&a, ctx.o().precision_bits)?;
            println!(
                "a(ω) = {}, I_a = ({}, {}) ≈ ({}, {})",
                fmt_ratio(&a),
                qi.lo,
                qi.hi,
                dec(&qi.lo_enc.0),
                dec(&qi.hi_enc.0)
            );
            quad = Some(json!({"a": fmt_ratio(&a), "lower": qi.lo.to_string(), "upper": qi.hi.to_string()}));
        }
    }
    if ctx.json_requested() {
        ctx.emit_json(&json!({
            "alpha": fmt_ratio(&alpha),
            "matching": res,
            "digits": digits.to_string(),
            "location": loc,
            "quadratic_interval": quad,
        }))?;
    }
    Ok(0)
}

fn cmd_locate(ctx: &Ctx, s: &str) -> CliResult<u8> {
    let alpha = parse_alpha(s)?;
    let loc = locate(&alpha)?;
    println!("{loc}");
    let mut extra = json!(null);
    if let Location::Interval(j) = &loc {
        let (lo, hi) = mu_range(j)?;
        let k = if j.m >= 3 { Some(fmt_ratio(&k_omega(&j.omega)?)) } else { None };
        println!(
            "m = {}, η = {}, K = {}, μ over J_ω in [{}, {}]",
            j.m,
            eta(&j.omega),
            k.clone().unwrap_or_else(|| "-".into()),
            fmt_ratio(&lo),
            fmt_ratio(&hi)
        );
        extra = json!({"eta": eta(&j.omega), "K": k, "mu_min": fmt_ratio(&lo), "mu_max": fmt_ratio(&hi)});
    }
    if ctx.json_requested() {
        ctx.emit_json(&json!({"alpha": fmt_ratio(&alpha), "location": loc, "block": extra}))?;
    }
    Ok(0)
}

fn cmd_freq(ctx: &Ctx, s: &str) -> CliResult<u8> {
    let alpha = parse_alpha(s)?;
    let mu = mu_zero(&alpha)?;
    println!("{} ({})", fmt_ratio(&mu.value), dec(&mu.value));
    println!("method: {}", mu.method);
    let series = density_series(&alpha, ctx.o().depth)?;
    let tail = series.tail_bound.as_ref().map(|t| format!("{:.3e}", to_f64(t)));
    if let Some(t) = &tail {
        println!("series depth {}: sup-norm tail ≤ {t}", series.depth);
    }
    if ctx.json_requested() {
        ctx.emit_json(&json!({
            "alpha": fmt_ratio(&alpha),
            "mu": fmt_ratio(&mu.value),
            "mu_decimal": dec(&mu.value),
            "method": mu.method,
            "location": mu.location,
            "series_depth": series.depth,
            "series_tail_bound": tail,
        }))?;
    }
    Ok(0)
}

fn cmd_catalog(ctx: &Ctx) -> CliResult<u8> {
    let max_len = ctx.o().max_len.unwrap_or(10);
    let recs = catalog(max_len, ctx.exec)?;
    match ctx.o().format {
        Some(Format::Csv) => {
            let out = ctx.sink()?;
            write_catalog_csv(&recs, &ctx.header(), out).map_err(output_error)?;
        }
        _ => ctx.emit_json(&recs)?,
    }
    if ctx.o().out.is_some() {
        println!("{} intervals with |ω| ≤ {max_len}", recs.len());
    }
    Ok(0)
}

fn output_error(e: Error) -> CliError {
    match e {
        Error::Io(_) | Error::Csv(_) => CliError {
            code: EXIT_OUTPUT,
            msg: e.to_string(),
        },
        e => e.into(),
    }
}

fn cmd_sweep(ctx: &Ctx, simulate: bool) -> CliResult<u8> {
    let sim = simulate.then(|| SimSpec {
        iterations: ctx.o().iterations,
        seed: ctx.o().seed,
        mode: ctx.sim_mode(),
    });
    let recs = match (&ctx.o().grid, ctx.o().max_len) {
        (Some(g), _) => sweep_grid(&parse_grid(g)?, sim, ctx.exec)?,
        (None, Some(n)) => sweep_blocks(n, sim, ctx.exec)?,
        (None, None) => return fail(EXIT_PARSE, "sweep needs --grid lo:hi:step or --max-len"),
    };
    match ctx.o().format {
        Some(Format::Json) => ctx.emit_json(&recs)?,
        _ => {
            let out = ctx.sink()?;
            write_csv(&recs, &ctx.header(), out).map_err(output_error)?;
        }
    }
    if ctx.o().out.is_some() {
        println!("{} records", recs.len());
    }
    Ok(0)
}

fn cmd_verify(ctx: &Ctx) -> CliResult<u8> {
    let opts = VerifyOptions {
        max_len: ctx.o().max_len.unwrap_or(12),
        seed: ctx.o().seed,
        exec: ctx.exec,
    };
    let checks = run_all(&opts)?;
    let width = checks.iter().map(|c| c.name.chars().count()).max().unwrap_or(0);
    for c in &checks {
        let pad = width - c.name.chars().count();
        println!("{}{}  {}  {}", c.name, " ".repeat(pad), if c.pass { "PASS" } else { "FAIL" }, c.detail);
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    println!("{} checks, {failed} failed", checks.len());
    if ctx.json_requested() {
        ctx.emit_json(&checks)?;
    }
    Ok(if failed == 0 { 0 } else { EXIT_VERIFY })
}

fn cmd_simulate(ctx: &Ctx, s: &str) -> CliResult<u8> {
    let alpha = parse_alpha(s)?;
    let est = birkhoff_frequency(&alpha, ctx.o().iterations, ctx.o().seed, ctx.sim_mode(), ctx.exec)?;
    let exact = mu_zero(&alpha)?.value;
    let diff = (est.frequency - to_f64(&exact)).abs();
    let tol = 4.0 / (est.iterations as f64).sqrt();
    println!(
        "estimate {:.6} ({} zeros in {} steps, seed {}), exact {} ({}), |diff| {:.2e}, 4/√n {:.2e}",
        est.frequency,
        est.zeros,
        est.iterations,
        est.seed,
        fmt_ratio(&exact),
        dec(&exact),
        diff,
        tol
    );
    if ctx.json_requested() {
        ctx.emit_json(&json!({
            "alpha": fmt_ratio(&alpha),
            "estimate": est,
            "exact": fmt_ratio(&exact),
            "difference": diff,
        }))?;
    }
    Ok(0)
}

fn cmd_conjecture(ctx: &Ctx) -> CliResult<u8> {
    let rep = conjecture_scan(ctx.o().max_len.unwrap_or(12), ctx.exec)?;
    println!(
        "{} blocks up to length {}, {} out-of-order pairs, max μ = {} (only on [6/5, 3/2]: {})",
        rep.blocks,
        rep.max_len,
        rep.pairs.len(),
        fmt_ratio(&rep.global_max),
        rep.max_only_on_plateau
    );
    for p in rep.pairs.iter().take(10) {
        println!("  {} ≺ {}: min {} < max {}", p.lower, p.upper, dec(&p.lower_min), dec(&p.upper_max));
    }
    if ctx.json_requested() {
        ctx.emit_json(&rep)?;
    }
    Ok(0)
}

fn cmd_coverage(ctx: &Ctx) -> CliResult<u8> {
    let rep = coverage(ctx.o().max_len.unwrap_or(14), ctx.exec)?;
    println!(
        "{} intervals with |ω| ≤ {} cover {} of (1, 3/2)",
        rep.intervals,
        rep.max_len,
        to_decimal(&rep.fraction, 40)
    );
    if ctx.json_requested() {
        ctx.emit_json(&json!({
            "max_len": rep.max_len,
            "intervals": rep.intervals,
            "fraction_decimal": to_decimal(&rep.fraction, 40),
            "total": rep.total.to_string(),
        }))?;
    }
    Ok(0)
}

fn run(cli: &Cli) -> CliResult<u8> {
    let exec = if cli.opts.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    let ctx = Ctx { cli, exec };
    match &cli.cmd {
        Command::Match { alpha } => cmd_match(&ctx, alpha),
        Command::Locate { alpha } => cmd_locate(&ctx, alpha),
        Command::Freq { alpha } => cmd_freq(&ctx, alpha),
        Command::Catalog => cmd_catalog(&ctx),
        Command::Sweep { simulate } => cmd_sweep(&ctx, *simulate),
        Command::Verify => cmd_verify(&ctx),
        Command::Simulate { alpha } => cmd_simulate(&ctx, alpha),
        Command::Conjecture => cmd_conjecture(&ctx),
        Command::Coverage => cmd_coverage(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("6/5:3/2:1/10").unwrap().len(), 4);
        assert_eq!(parse_grid("6/5:3/2").unwrap_err().code, EXIT_PARSE);
        assert_eq!(parse_grid("x:3/2:1/10").unwrap_err().code, EXIT_PARSE);
        assert_eq!(parse_grid("1/2:3/2:1/10").unwrap_err().code, EXIT_RANGE);
    }

    #[test]
    fn alpha_range() {
        assert!(parse_alpha("1").is_ok());
        assert!(parse_alpha("2").is_ok());
        assert_eq!(parse_alpha("5/2").unwrap_err().code, EXIT_RANGE);
        assert_eq!(parse_alpha("1/0").unwrap_err().code, EXIT_PARSE);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
