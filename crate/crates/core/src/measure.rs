//! The mass `μ_α([−½, ½])` of the middle branch: closed forms, exact integrals,
//! simulation, sweeps and scans.

use std::fmt;
use std::io::Write;

use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::blocks::{enumerate_primitive_with, interval_of, locate, primitive_of_length, Location, MatchingInterval};
use crate::density::{density_closed_form, density_exact, PiecewiseConstantFn};
use crate::dynamics::matching_index;
use crate::error::{domain, Error, Result};
use crate::exec::Execution;
use crate::rational::{biguint_to_int, fmt_ratio, half, int, pow2, rat, ser_ratio, sum_exact, to_decimal, to_f64, Rational};
use crate::word::Word;

/// `#{2 ≤ n ≤ m−1 : ω_n = 0} − #{2 ≤ n ≤ m−1 : ω_n = 1}`.
pub fn eta(w: &Word) -> i64 {
    let b = w.bits();
    if b.len() < 3 {
        return 0;
    }
    b[1..b.len() - 1]
        .iter()
        .map(|&x| if x == 0 { 1 } else { -1 })
        .sum()
}

/// `K_ω = x_{m−1}/2^{m−1} + Σ_{ω_n=1} x_n/2^n − Σ_{ω_n=0} x_n/2^n`, sums over `1 ≤ n ≤ m−1`.
pub fn k_omega(w: &Word) -> Result<Rational> {
    let m = w.len();
    if m < 3 {
        return domain(format!("K is defined for |ω| >= 3, got {w}"));
    }
    let frac = |n: usize| Rational::new(biguint_to_int(w.x_n(n)), pow2(n));
    let mut k = frac(m - 1);
    for n in 1..m {
        if w.bits()[n - 1] == 1 {
            k += frac(n);
        } else {
            k -= frac(n);
        }
    }
    Ok(k)
}

/// `(2^{m−1}/(2^m − 1))(η(ω)/α + K_ω)`, with the `m = 2` value `2/3`.
pub fn mu_formula(w: &Word, alpha: &Rational) -> Result<Rational> {
    let m = w.len();
    if m == 2 {
        return Ok(rat(2, 3));
    }
    let p = Rational::from_integer(pow2(m - 1));
    let c = &p / (&p * int(2) - int(1));
    Ok(c * (Rational::from_integer(eta(w).into()) / alpha + k_omega(w)?))
}

/// How a value of `μ_α([−½, ½])` was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MuMethod {
    /// `α = 1`: Lebesgue measure is invariant.
    Unit,
    /// `α ∈ (3/2, 2]`: the value `1/α`.
    HighRegion,
    /// Matching after two steps: `2/3`.
    TwoStep,
    /// Block formula with `η` and `K`.
    BlockFormula,
    /// Exact density of a non-matching rational parameter.
    MarkovDensity,
}

impl fmt::Display for MuMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MuMethod::Unit => "alpha = 1, Lebesgue measure",
            MuMethod::HighRegion => "high region, 1/alpha",
            MuMethod::TwoStep => "two-step matching, 2/3",
            MuMethod::BlockFormula => "block formula (eta, K)",
            MuMethod::MarkovDensity => "exact Markov density",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct MuZero {
    pub value: Rational,
    pub method: MuMethod,
    pub location: Option<Location>,
}

/// The exact invariant probability density for rational `α ∈ [1, 2]`.
pub fn invariant_density(alpha: &Rational) -> Result<PiecewiseConstantFn> {
    if *alpha == int(1) {
        return density_closed_form(alpha);
    }
    match matching_index(alpha)?.matched() {
        Some(_) => density_closed_form(alpha),
        None => density_exact(alpha),
    }
}

/// `∫_{−½}^{½} h_α` computed from the density itself.
pub fn mu_integral(alpha: &Rational) -> Result<Rational> {
    let h = invariant_density(alpha)?;
    Ok(h.integral_over(&-half(), &half()))
}

/// `μ_α([−½, ½])` for rational `α ∈ [1, 2]`, cross-checked against the exact integral.
pub fn mu_zero(alpha: &Rational) -> Result<MuZero> {
    if *alpha < int(1) || *alpha > int(2) {
        return domain(format!("alpha must lie in [1, 2], got {alpha}"));
    }
    let (value, method, location) = if *alpha == int(1) {
        (half(), MuMethod::Unit, None)
    } else {
        let loc = locate(alpha)?;
        let (v, how) = match &loc {
            Location::HighRegion => (alpha.recip(), MuMethod::HighRegion),
            Location::Interval(j) if j.m == 2 => (rat(2, 3), MuMethod::TwoStep),
            Location::Interval(j) => (mu_formula(&j.omega, alpha)?, MuMethod::BlockFormula),
            Location::NonMatching | Location::Boundary { .. } => {
                (mu_integral(alpha)?, MuMethod::MarkovDensity)
            }
        };
        (v, how, Some(loc))
    };
    let check = mu_integral(alpha)?;
    if check != value {
        return Err(Error::Inconsistent(format!(
            "mu for alpha = {alpha}: {method} gives {value}, density integral gives {check}"
        )));
    }
    Ok(MuZero {
        value,
        method,
        location,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SimMode {
    /// Double-precision pseudo-orbits with a tiny per-step dither.
    Float,
    /// Integer orbits on the lattice `(1/N)Z` with `N = factor · q`.
    ExactLattice { factor: u64 },
}

/// Odd lattice refinement used when none is given.
pub const DEFAULT_LATTICE_FACTOR: u64 = 1_000_000_007;

const CHUNK: u64 = 1 << 16;

#[derive(Debug, Clone, Serialize)]
pub struct BirkhoffEstimate {
    pub zeros: u64,
    pub iterations: u64,
    pub frequency: f64,
    pub seed: u64,
    pub mode: SimMode,
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

fn chunk_lengths(iterations: u64) -> Vec<(u64, u64)> {
    let n = iterations.div_ceil(CHUNK);
    (0..n)
        .map(|i| (i, CHUNK.min(iterations - i * CHUNK)))
        .collect()
}

/// Size of the per-step dither in float mode. Without it, orbits of dyadic α
/// lose one mantissa bit per step and fall onto a short cycle within ~53 steps.
const DITHER: f64 = 1.0 / (1u64 << 50) as f64;

fn float_chunk(alpha: f64, len: u64, rng: &mut ChaCha8Rng) -> u64 {
    let mut x: f64 = rng.gen_range(-1.0..1.0);
    let mut zeros = 0;
    for _ in 0..len {
        if x < -0.5 {
            x = 2.0 * x + alpha;
        } else if x <= 0.5 {
            zeros += 1;
            x *= 2.0;
        } else {
            x = 2.0 * x - alpha;
        }
        x = (x + DITHER * (rng.gen::<f64>() - 0.5)).clamp(-1.0, 1.0);
    }
    zeros
}

fn lattice_chunk(a: i128, n: i128, len: u64, rng: &mut ChaCha8Rng) -> u64 {
    let mut k: i128 = rng.gen_range(-n..=n);
    let mut zeros = 0;
    for _ in 0..len {
        let t = 2 * k;
        if t < -n {
            k = t + a;
        } else if t <= n {
            zeros += 1;
            k = t;
        } else {
            k = t - a;
        }
    }
    zeros
}

/// Digit-0 frequency along pseudo-random orbits. Chunks are seeded from
/// `(seed, chunk index)`, so the result does not depend on the thread count.
pub fn birkhoff_frequency(
    alpha: &Rational,
    iterations: u64,
    seed: u64,
    mode: SimMode,
    exec: Execution,
) -> Result<BirkhoffEstimate> {
    if *alpha < int(1) || *alpha > int(2) {
        return domain(format!("alpha must lie in [1, 2], got {alpha}"));
    }
    if iterations == 0 {
        return domain("iterations must be positive");
    }
    let chunks = chunk_lengths(iterations);
    let zeros: u64 = match mode {
        SimMode::Float => {
            let a = to_f64(alpha);
            exec.map(&chunks, |&(i, len)| float_chunk(a, len, &mut chunk_rng(seed, i)))
                .into_iter()
                .sum()
        }
        SimMode::ExactLattice { factor } => {
            let p = alpha.numer().to_i64();
            let q = alpha.denom().to_i64();
            let (Some(p), Some(q)) = (p, q) else {
                return domain("lattice mode needs alpha with 64-bit numerator and denominator");
            };
            let n = factor as i128 * q as i128;
            let a = factor as i128 * p as i128;
            if n > 1i128 << 100 {
                return domain("lattice too fine for 128-bit orbits");
            }
            exec.map(&chunks, |&(i, len)| lattice_chunk(a, n, len, &mut chunk_rng(seed, i)))
                .into_iter()
                .sum()
        }
    };
    Ok(BirkhoffEstimate {
        zeros,
        iterations,
        frequency: zeros as f64 / iterations as f64,
        seed,
        mode,
    })
}

/// Float-mode frequency for a real parameter given as `f64`.
pub fn birkhoff_frequency_f64(alpha: f64, iterations: u64, seed: u64, exec: Execution) -> Result<BirkhoffEstimate> {
    if !(1.0..=2.0).contains(&alpha) {
        return domain(format!("alpha must lie in [1, 2], got {alpha}"));
    }
    if iterations == 0 {
        return domain("iterations must be positive");
    }
    let chunks = chunk_lengths(iterations);
    let zeros: u64 = exec
        .map(&chunks, |&(i, len)| float_chunk(alpha, len, &mut chunk_rng(seed, i)))
        .into_iter()
        .sum();
    Ok(BirkhoffEstimate {
        zeros,
        iterations,
        frequency: zeros as f64 / iterations as f64,
        seed,
        mode: SimMode::Float,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Increasing,
    Decreasing,
    Constant,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Increasing => "increasing",
            Direction::Decreasing => "decreasing",
            Direction::Constant => "constant",
        })
    }
}

/// Direction predicted by the sign of `η`.
pub fn predicted_direction(eta: i64) -> Direction {
    match eta.signum() {
        -1 => Direction::Increasing,
        1 => Direction::Decreasing,
        _ => Direction::Constant,
    }
}

#[derive(Debug, Clone)]
pub struct MonotonicityReport {
    pub omega: Word,
    pub eta: i64,
    pub points: (Rational, Rational),
    pub values: (Rational, Rational),
    pub observed: Direction,
    pub predicted: Direction,
}

impl MonotonicityReport {
    pub fn pass(&self) -> bool {
        self.observed == self.predicted
    }
}

/// Evaluates `μ` at two interior rationals of `J_ω` and compares with `η`.
pub fn monotonicity_check(w: &Word) -> Result<MonotonicityReport> {
    if w.len() < 3 {
        return domain(format!("monotonicity needs |ω| >= 3, got {w}"));
    }
    let j = crate::blocks::matching_interval(w)?;
    let a = j.at(&rat(1, 3));
    let b = j.at(&rat(2, 3));
    let va = mu_zero(&a)?.value;
    let vb = mu_zero(&b)?.value;
    let observed = match va.cmp(&vb) {
        std::cmp::Ordering::Less => Direction::Increasing,
        std::cmp::Ordering::Greater => Direction::Decreasing,
        std::cmp::Ordering::Equal => Direction::Constant,
    };
    let e = eta(w);
    Ok(MonotonicityReport {
        omega: w.clone(),
        eta: e,
        points: (a, b),
        values: (va, vb),
        observed,
        predicted: predicted_direction(e),
    })
}

/// One row of a sweep.
#[derive(Debug, Clone, Serialize)]
pub struct FrequencyRecord {
    #[serde(serialize_with = "ser_ratio")]
    pub alpha: Rational,
    pub status: String,
    pub m: Option<usize>,
    pub omega: Option<Word>,
    pub eta: Option<i64>,
    #[serde(serialize_with = "ser_opt_ratio")]
    pub k: Option<Rational>,
    #[serde(serialize_with = "ser_ratio")]
    pub mu: Rational,
    pub birkhoff_estimate: Option<f64>,
    pub seed: Option<u64>,
}

fn ser_opt_ratio<S: serde::Serializer>(r: &Option<Rational>, s: S) -> core::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.collect_str(&fmt_ratio(r)),
        None => s.serialize_none(),
    }
}

/// Optional simulation attached to every sweep record.
#[derive(Debug, Clone, Copy)]
pub struct SimSpec {
    pub iterations: u64,
    pub seed: u64,
    pub mode: SimMode,
}

pub fn frequency_record(alpha: &Rational, sim: Option<SimSpec>) -> Result<FrequencyRecord> {
    let mu = mu_zero(alpha)?;
    let (status, m, omega) = if *alpha == int(1) {
        ("unit".to_string(), None, None)
    } else {
        let res = matching_index(alpha)?;
        match (&mu.location, res.matched()) {
            (Some(Location::HighRegion), _) => ("high_region".to_string(), Some(1), None),
            (_, Some((m, p))) => ("matched".to_string(), Some(m), Some(p.clone())),
            _ => (res.status().to_string(), None, None),
        }
    };
    let eta_v = omega.as_ref().map(eta);
    let k = match &omega {
        Some(w) if w.len() >= 3 => Some(k_omega(w)?),
        _ => None,
    };
    // Birkhoff runs are independent of the exact pipeline and use the serial path
    // here because sweeps already parallelise over records.
    let (est, seed) = match sim {
        Some(s) => (
            Some(birkhoff_frequency(alpha, s.iterations, s.seed, s.mode, Execution::Sequential)?.frequency),
            Some(s.seed),
        ),
        None => (None, None),
    };
    Ok(FrequencyRecord {
        alpha: alpha.clone(),
        status,
        m,
        omega,
        eta: eta_v,
        k,
        mu: mu.value,
        birkhoff_estimate: est,
        seed,
    })
}

/// One record per grid point, in input order.
pub fn sweep_grid(alphas: &[Rational], sim: Option<SimSpec>, exec: Execution) -> Result<Vec<FrequencyRecord>> {
    exec.map(alphas, |a| frequency_record(a, sim)).into_iter().collect()
}

/// One record per primitive block, evaluated at the midpoint of its interval.
pub fn sweep_blocks(max_len: usize, sim: Option<SimSpec>, exec: Execution) -> Result<Vec<FrequencyRecord>> {
    let blocks = enumerate_primitive_with(max_len, exec);
    exec.map(&blocks, |w| {
        let j = interval_of(w)?;
        frequency_record(&j.midpoint(), sim)
    })
    .into_iter()
    .collect()
}

pub const CSV_COLUMNS: [&str; 14] = [
    "alpha_num",
    "alpha_den",
    "alpha_decimal",
    "status",
    "m",
    "omega",
    "eta",
    "K_num",
    "K_den",
    "mu_num",
    "mu_den",
    "mu_decimal",
    "birkhoff_estimate",
    "seed",
];

/// Significant digits used for decimal columns.
pub const DECIMAL_DIGITS: usize = 15;

/// Writes records as CSV; `comments` become leading `# ` lines.
pub fn write_csv<W: Write>(records: &[FrequencyRecord], comments: &[String], mut out: W) -> Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in records {
        let opt = |x: Option<String>| x.unwrap_or_default();
        w.write_record([
            r.alpha.numer().to_string(),
            r.alpha.denom().to_string(),
            to_decimal(&r.alpha, DECIMAL_DIGITS),
            r.status.clone(),
            opt(r.m.map(|m| m.to_string())),
            opt(r.omega.as_ref().map(|w| w.to_string())),
            opt(r.eta.map(|e| e.to_string())),
            opt(r.k.as_ref().map(|k| k.numer().to_string())),
            opt(r.k.as_ref().map(|k| k.denom().to_string())),
            r.mu.numer().to_string(),
            r.mu.denom().to_string(),
            to_decimal(&r.mu, DECIMAL_DIGITS),
            opt(r.birkhoff_estimate.map(|b| format!("{b:.6}"))),
            opt(r.seed.map(|s| s.to_string())),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Catalog entry joining a matching interval with `η` and `K`.
#[derive(Debug, Clone, Serialize)]
pub struct CatalogRecord {
    pub omega: Word,
    pub m: usize,
    #[serde(rename = "L", serialize_with = "ser_ratio")]
    pub l: Rational,
    #[serde(rename = "R", serialize_with = "ser_ratio")]
    pub r: Rational,
    pub eta: i64,
    #[serde(rename = "K", serialize_with = "ser_opt_ratio")]
    pub k: Option<Rational>,
}

pub fn catalog(max_len: usize, exec: Execution) -> Result<Vec<CatalogRecord>> {
    let blocks = enumerate_primitive_with(max_len, exec);
    exec.map(&blocks, |w| {
        let j = interval_of(w)?;
        Ok(CatalogRecord {
            omega: w.clone(),
            m: j.m,
            l: j.l,
            r: j.r,
            eta: eta(w),
            k: if w.len() >= 3 { Some(k_omega(w)?) } else { None },
        })
    })
    .into_iter()
    .collect()
}

pub const CATALOG_COLUMNS: [&str; 10] = ["omega", "m", "L_num", "L_den", "R_num", "R_den", "eta", "K_num", "K_den", "length"];

/// Writes a catalog as CSV with leading `# ` comment lines.
pub fn write_catalog_csv<W: Write>(records: &[CatalogRecord], comments: &[String], mut out: W) -> Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CATALOG_COLUMNS)?;
    for r in records {
        w.write_record([
            r.omega.to_string(),
            r.m.to_string(),
            r.l.numer().to_string(),
            r.l.denom().to_string(),
            r.r.numer().to_string(),
            r.r.denom().to_string(),
            r.eta.to_string(),
            r.k.as_ref().map(|k| k.numer().to_string()).unwrap_or_default(),
            r.k.as_ref().map(|k| k.denom().to_string()).unwrap_or_default(),
            to_decimal(&(&r.r - &r.l), DECIMAL_DIGITS),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Closed range of `μ` over `J_ω` (the formula is monotone in `α`).
pub fn mu_range(j: &MatchingInterval) -> Result<(Rational, Rational)> {
    let a = mu_formula(&j.omega, &j.l)?;
    let b = mu_formula(&j.omega, &j.r)?;
    Ok(if a <= b { (a, b) } else { (b, a) })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjecturePair {
    /// Lexicographically smaller block.
    pub lower: Word,
    pub upper: Word,
    #[serde(serialize_with = "ser_ratio")]
    pub lower_min: Rational,
    #[serde(serialize_with = "ser_ratio")]
    pub upper_max: Rational,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjectureReport {
    pub max_len: usize,
    pub blocks: usize,
    pub pairs: Vec<ConjecturePair>,
    #[serde(serialize_with = "ser_ratio")]
    pub global_max: Rational,
    /// Blocks whose range reaches the global maximum.
    pub maximizers: Vec<Word>,
    /// Every maximizing interval lies inside `[6/5, 3/2]`.
    pub max_only_on_plateau: bool,
}

/// `1^ℓ (0^{ℓ−1} 1)^n` with `ℓ ≥ 3`, `n ≥ 2`.
pub fn is_exception_shape(w: &Word) -> bool {
    let b = w.bits();
    let l = b.iter().take_while(|&&x| x == 1).count();
    if l < 3 || l >= b.len() {
        return false;
    }
    let rest = &b[l..];
    if rest.len() % l != 0 || rest.len() / l < 2 {
        return false;
    }
    rest.chunks(l).all(|c| c[..l - 1].iter().all(|&x| x == 0) && c[l - 1] == 1)
}

/// Pairs `ω ≺ ω′` of equal length with some `α ∈ J_ω`, `α′ ∈ J_ω′` and `μ_α < μ_α′`.
pub fn conjecture_scan(max_len: usize, exec: Execution) -> Result<ConjectureReport> {
    if max_len < 2 {
        return domain("conjecture scan needs max_len >= 2");
    }
    let lens: Vec<usize> = (2..=max_len).collect();
    type Row = (Word, MatchingInterval, Rational, Rational);
    let per_len: Vec<Result<(Vec<Row>, Vec<ConjecturePair>)>> = exec.map(&lens, |&len| {
        let mut rows = Vec::new();
        for w in primitive_of_length(len) {
            let j = interval_of(&w)?;
            let (lo, hi) = mu_range(&j)?;
            rows.push((w, j, lo, hi));
        }
        let mut pairs = Vec::new();
        for (i, a) in rows.iter().enumerate() {
            for b in &rows[i + 1..] {
                if a.2 < b.3 {
                    pairs.push(ConjecturePair {
                        lower: a.0.clone(),
                        upper: b.0.clone(),
                        lower_min: a.2.clone(),
                        upper_max: b.3.clone(),
                    });
                }
            }
        }
        Ok((rows, pairs))
    });
    let mut rows = Vec::new();
    let mut pairs = Vec::new();
    for r in per_len {
        let (r, p) = r?;
        rows.extend(r);
        pairs.extend(p);
    }
    let global_max = rows
        .iter()
        .map(|r| r.3.clone())
        .max()
        .unwrap_or_else(Rational::zero);
    let maximizers: Vec<&Row> = rows.iter().filter(|r| r.3 == global_max).collect();
    let (lo, hi) = (rat(6, 5), rat(3, 2));
    let max_only_on_plateau = maximizers.iter().all(|r| r.1.l >= lo && r.1.r <= hi);
    Ok(ConjectureReport {
        max_len,
        blocks: rows.len(),
        pairs,
        global_max,
        maximizers: maximizers.into_iter().map(|r| r.0.clone()).collect(),
        max_only_on_plateau,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverageReport {
    pub max_len: usize,
    pub intervals: usize,
    /// Total length of the union of `J_ω`.
    #[serde(serialize_with = "ser_ratio")]
    pub total: Rational,
    /// `total / (1/2)`, the share of `(1, 3/2)` covered.
    #[serde(serialize_with = "ser_ratio")]
    pub fraction: Rational,
}

/// Exact share of `(1, 3/2)` covered by matching intervals with `|ω| ≤ max_len`.
pub fn coverage(max_len: usize, exec: Execution) -> Result<CoverageReport> {
    if max_len < 2 {
        return domain("coverage needs max_len >= 2");
    }
    let lens: Vec<usize> = (2..=max_len).collect();
    let parts: Vec<Result<(usize, Rational)>> = exec.map(&lens, |&len| {
        let ws = primitive_of_length(len);
        let lengths = ws
            .iter()
            .map(|w| interval_of(w).map(|j| j.length()))
            .collect::<Result<Vec<_>>>()?;
        Ok((ws.len(), sum_exact(lengths)))
    });
    let mut count = 0;
    let mut totals = Vec::new();
    for p in parts {
        let (c, t) = p?;
        count += c;
        totals.push(t);
    }
    let total = sum_exact(totals);
    let fraction = &total * int(2);
    Ok(CoverageReport {
        max_len,
        intervals: count,
        total,
        fraction,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ContinuityProbe {
    #[serde(serialize_with = "ser_ratio")]
    pub point: Rational,
    #[serde(serialize_with = "ser_ratio")]
    pub delta: Rational,
    #[serde(serialize_with = "ser_ratio")]
    pub left: Rational,
    #[serde(serialize_with = "ser_ratio")]
    pub right: Rational,
    /// `|μ(c+δ) − μ(c−δ)| / δ`.
    pub ratio: f64,
}

/// One-sided values of `μ` around the shared endpoint `L(ω) = R(ψ(ω))`.
pub fn continuity_probe(w: &Word, deltas: &[Rational]) -> Result<Vec<ContinuityProbe>> {
    let c = crate::blocks::matching_interval(w)?.l;
    deltas
        .iter()
        .map(|d| {
            if !d.is_positive() {
                return domain("probe distance must be positive");
            }
            let left = mu_zero(&(&c - d))?.value;
            let right = mu_zero(&(&c + d))?.value;
            let ratio = to_f64(&((&right - &left).abs() / d));
            Ok(ContinuityProbe {
                point: c.clone(),
                delta: d.clone(),
                left,
                right,
                ratio,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn eta_examples() {
        assert_eq!(eta(&w("11")), 0);
        assert_eq!(eta(&w("111011")), -2);
        for n in 1..4 {
            assert_eq!(eta(&w("111011").psi_pow(n).unwrap()), 0);
        }
    }

    #[test]
    fn k_examples() {
        assert_eq!(k_omega(&w("1101")).unwrap(), rat(5, 4));
        assert_eq!(k_omega(&w("111011")).unwrap(), rat(49, 16));
        assert!(k_omega(&w("11")).is_err());
    }

    #[test]
    fn mu_examples() {
        let m = mu_zero(&rat(8, 5)).unwrap();
        assert_eq!((m.value, m.method), (rat(5, 8), MuMethod::HighRegion));
        assert_eq!(mu_zero(&rat(4, 3)).unwrap().value, rat(2, 3));
        assert_eq!(mu_zero(&int(1)).unwrap().value, half());
        let m = mu_zero(&rat(1024, 945)).unwrap();
        assert_eq!((m.value, m.method), (rat(89, 144), MuMethod::BlockFormula));
        let m = mu_zero(&rat(6, 5)).unwrap();
        assert_eq!((m.value, m.method), (rat(2, 3), MuMethod::MarkovDensity));
        assert_eq!(mu_zero(&rat(3, 2)).unwrap().value, rat(2, 3));
        assert_eq!(mu_zero(&int(2)).unwrap().value, half());
    }

    #[test]
    fn birkhoff_is_thread_independent() {
        let a = rat(13, 10);
        for mode in [SimMode::Float, SimMode::ExactLattice { factor: DEFAULT_LATTICE_FACTOR }] {
            let s = birkhoff_frequency(&a, 200_000, 7, mode, Execution::Sequential).unwrap();
            let p = birkhoff_frequency(&a, 200_000, 7, mode, Execution::Parallel).unwrap();
            assert_eq!(s.zeros, p.zeros);
            assert!((s.frequency - 2.0 / 3.0).abs() < 0.01, "{mode:?} {}", s.frequency);
        }
    }

    #[test]
    fn monotonicity_examples() {
        let r = monotonicity_check(&w("111011")).unwrap();
        assert_eq!(r.observed, Direction::Increasing);
        assert!(r.pass());
        assert_eq!(monotonicity_check(&w("11010011")).unwrap().observed, Direction::Constant);
        assert_eq!(monotonicity_check(&w("1101")).unwrap().observed, Direction::Constant);
    }

    #[test]
    fn sweep_and_csv() {
        let grid = crate::rational::grid(&rat(6, 5), &rat(3, 2), &rat(1, 10)).unwrap();
        let recs = sweep_grid(&grid, None, Execution::Sequential).unwrap();
        assert_eq!(recs.len(), 4);
        assert!(recs.iter().all(|r| r.mu == rat(2, 3)));
        let mut buf = Vec::new();
        write_csv(&recs, &["test".into()], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# test\nalpha_num,alpha_den"));
        let blocks = sweep_blocks(6, None, Execution::Parallel).unwrap();
        let r = blocks.iter().find(|r| r.omega == Some(w("111011"))).unwrap();
        assert_eq!(r.eta, Some(-2));
    }

    #[test]
    fn coverage_examples() {
        assert_eq!(coverage(2, Execution::Sequential).unwrap().fraction, half());
        assert!(coverage(4, Execution::Sequential).unwrap().fraction > half());
    }

    #[test]
    fn conjecture_small() {
        let r = conjecture_scan(4, Execution::Sequential).unwrap();
        assert!(r.pairs.is_empty());
        assert_eq!(r.global_max, rat(2, 3));
        assert!(r.max_only_on_plateau);
        assert!(is_exception_shape(&w("111001001")));
        assert!(!is_exception_shape(&w("111001")));
    }
}
