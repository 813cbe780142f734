//! The invariant suite behind the `verify` command.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::blocks::{
    cascade, cascade_limit, check_boundary_sequences, enumerate_primitive_with, interval_of, is_primitive,
    pairwise_disjoint, primitivity_agreement, Method,
};
use crate::cf::{
    bridge_verify, cf_eval, cf_expand, check_functional_identities, gauss_compare, is_maximal_quotients,
    random_unit_rationals, BridgeOptions, CfWord, QuadraticSurd,
};
use crate::density::pf_apply;
use crate::dynamics::{
    lambda_membership, matching_index, matching_within, s_alpha_step, signed_digit_sequence,
    verify_orbit_identities,
};
use crate::error::Result;
use crate::exec::Execution;
use crate::measure::{eta, invariant_density, monotonicity_check, mu_range, mu_zero};
use crate::rational::{farey_points, fmt_ratio, int, inv_pow2, rat, Rational};
use crate::word::Word;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &'static str, failures: Vec<String>, total: usize) -> Check {
    let detail = if failures.is_empty() {
        format!("{total} cases")
    } else {
        let shown: Vec<_> = failures.iter().take(3).cloned().collect();
        format!("{} of {total} failed, e.g. {}", failures.len(), shown.join("; "))
    };
    Check {
        name,
        pass: failures.is_empty(),
        detail,
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    /// Largest block length used by the combinatorial checks.
    pub max_len: usize,
    pub seed: u64,
    pub exec: Execution,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            max_len: 12,
            seed: 0,
            exec: Execution::default(),
        }
    }
}

fn words_of_length(len: usize) -> impl Iterator<Item = Word> {
    (0u64..(1u64 << len)).map(move |x| {
        Word::new((0..len).rev().map(|i| ((x >> i) & 1) as u8).collect()).expect("nonempty")
    })
}

/// Rationals in `(lo, hi)` with denominator `≤ max_den`, endpoints excluded.
fn open_grid(lo: &Rational, hi: &Rational, max_den: u64) -> Vec<Rational> {
    farey_points(lo, hi, max_den)
        .into_iter()
        .filter(|x| x > lo && x < hi)
        .collect()
}

fn random_rational(rng: &mut ChaCha8Rng, lo: i64, hi: i64, max_den: i64) -> Rational {
    let q = rng.gen_range(1..=max_den);
    let p = rng.gen_range(lo * q..=hi * q);
    rat(p, q)
}

/// Largest `ℓ1` and `ℓ_{2j}` bound: every 0-run before position `m` is at most the leading 1-run.
pub fn zero_runs_bounded(prefix: &Word) -> bool {
    let b = prefix.bits();
    let l1 = b.iter().take_while(|&&x| x == 1).count();
    let mut run = 0;
    for &x in b {
        if x == 0 {
            run += 1;
            if run > l1 {
                return false;
            }
        } else {
            run = 0;
        }
    }
    true
}

/// Pattern `11(01)*(00(10)*11(01)*)*`.
pub fn has_plateau_structure(w: &Word) -> bool {
    let b = w.bits();
    if b.len() % 2 == 1 || b.len() < 2 || b[..2] != [1, 1] {
        return false;
    }
    let mut in_ones = true;
    for c in b[2..].chunks(2) {
        match (in_ones, c) {
            (true, [0, 1]) | (false, [1, 0]) => {}
            (true, [0, 0]) => in_ones = false,
            (false, [1, 1]) => in_ones = true,
            _ => return false,
        }
    }
    in_ones
}

pub fn run_all(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let exec = opts.exec;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = Vec::new();
    let blocks = enumerate_primitive_with(opts.max_len, exec);
    let three_half = rat(3, 2);

    // orbit reconstruction S^n x = 2^n x − Σ d_k 2^{n−k} α
    let mut fails = Vec::new();
    let cases = 40;
    for _ in 0..cases {
        let a = random_rational(&mut rng, 1, 2, 97);
        let x = random_rational(&mut rng, -1, 1, 89);
        let mut y = x.clone();
        let mut acc = Rational::zero();
        let mut p = int(1);
        for _ in 0..60 {
            let (ny, d) = s_alpha_step(&y, &a)?;
            acc = acc * int(2) + int(d as i64);
            p *= int(2);
            y = ny;
            if y != &p * &x - &acc * &a || y.abs() > int(1) {
                fails.push(format!("x={}, α={}", fmt_ratio(&x), fmt_ratio(&a)));
                break;
            }
        }
    }
    out.push(check("orbit reconstruction from digits", fails, cases));

    // two orbits differ by α until they coincide
    let grid = open_grid(&int(1), &three_half, 60);
    let res: Vec<Option<String>> = exec.map(&grid, |a| {
        let mut u = int(1);
        let mut v = int(1) - a;
        for _ in 0..60 {
            let d = &u - &v;
            if !(d.is_zero() || d == *a) {
                return Some(fmt_ratio(a));
            }
            u = s_alpha_step(&u, a).ok()?.0;
            v = s_alpha_step(&v, a).ok()?.0;
        }
        None
    });
    out.push(check("orbit difference lies in {0, α}", res.into_iter().flatten().collect(), grid.len()));

    // matching index agrees with the orbit identities and the doubling conjugacy
    let res: Vec<Option<String>> = exec.map(&grid, |a| match verify_orbit_identities(a, 64) {
        Ok(r) if r.pass() => None,
        Ok(r) => Some(format!("{} at n={:?}", fmt_ratio(a), r.first_failure)),
        Err(e) => Some(e.to_string()),
    });
    out.push(check("orbit identities and doubling conjugacy", res.into_iter().flatten().collect(), grid.len()));

    // order reversal of digit sequences
    let mut fails = Vec::new();
    let cases = 200;
    for _ in 0..cases {
        let a1 = random_rational(&mut rng, 1, 2, 500);
        let a2 = random_rational(&mut rng, 1, 2, 500);
        if a1 == a2 {
            continue;
        }
        let (lo, hi) = if a1 < a2 { (a1, a2) } else { (a2, a1) };
        let d1 = signed_digit_sequence(&int(1), &lo, 64)?.prefix(64);
        let d2 = signed_digit_sequence(&int(1), &hi, 64)?.prefix(64);
        if d2.cmp(&d1) == Ordering::Greater {
            fails.push(format!("{} < {}", fmt_ratio(&lo), fmt_ratio(&hi)));
        }
    }
    out.push(check("larger α gives a smaller digit sequence", fails, cases));

    // symmetry d(−x) = −d(x) and the shift condition σ^n d ⪯ d
    let mut fails = Vec::new();
    for _ in 0..cases {
        let a = random_rational(&mut rng, 1, 2, 300);
        let x = random_rational(&mut rng, -1, 1, 300);
        let d = signed_digit_sequence(&x, &a, 64)?.prefix(64);
        let e = signed_digit_sequence(&-x.clone(), &a, 64)?.prefix(64);
        if d.iter().zip(&e).any(|(p, q)| *p != -*q) {
            fails.push(format!("symmetry at x={}, α={}", fmt_ratio(&x), fmt_ratio(&a)));
        }
        if !signed_digit_sequence(&int(1), &a, 256)?.satisfies_shift_condition(64) {
            fails.push(format!("shift condition at α={}", fmt_ratio(&a)));
        }
    }
    out.push(check("digit symmetry and shift condition", fails, cases));

    // Λ membership of 1/α iff no matching
    let grid200 = open_grid(&int(1), &three_half, 200);
    let res: Vec<Option<String>> = exec.map(&grid200, |a| {
        let lam = lambda_membership(&a.recip()).ok()?;
        let nm = matching_index(a).ok()?.matched().is_none();
        (lam != nm).then(|| fmt_ratio(a))
    });
    out.push(check("1/α in Λ iff α does not match", res.into_iter().flatten().collect(), grid200.len()));

    // three primitivity tests agree
    let words: Vec<Word> = (2..=opts.max_len).flat_map(words_of_length).collect();
    let res: Vec<Option<String>> = exec.map(&words, |w| primitivity_agreement(w).err().map(|e| e.to_string()));
    out.push(check("definition, cf and dynamic primitivity agree", res.into_iter().flatten().collect(), words.len()));

    let intervals = blocks.iter().map(interval_of).collect::<Result<Vec<_>>>()?;
    out.push(check(
        "matching intervals are pairwise disjoint",
        if pairwise_disjoint(&intervals) { vec![] } else { vec!["overlap".into()] },
        intervals.len(),
    ));

    // every sampled α of J_ω matches at |ω| with prefix ω
    let res: Vec<Option<String>> = exec.map(&intervals, |j| {
        let ts = [rat(1, 1000), rat(1, 4), rat(1, 2), rat(3, 4), rat(999, 1000)];
        for t in ts {
            let a = j.at(&t);
            match matching_index(&a).ok()?.matched() {
                Some((m, p)) if m == j.m && *p == j.omega => {}
                _ => return Some(format!("{} at {}", j.omega, fmt_ratio(&a))),
            }
        }
        None
    });
    out.push(check("sampled α in J_ω match at |ω| with prefix ω", res.into_iter().flatten().collect(), intervals.len()));

    // converse on a grid: early matching implies membership in a listed interval
    let lo = int(1) + inv_pow2(opts.max_len);
    let grid150 = open_grid(&lo, &three_half, 150);
    let res: Vec<Option<String>> = exec.map(&grid150, |a| {
        let (m, _) = matching_within(a, opts.max_len)?;
        (!intervals.iter().any(|j| j.m == m && j.contains(a))).then(|| fmt_ratio(a))
    });
    out.push(check("early matching only inside listed intervals", res.into_iter().flatten().collect(), grid150.len()));

    // ψ: b ≺ ψ(b), preserves primitivity, preserves order
    let short: Vec<&Word> = blocks.iter().filter(|w| w.len() <= 10).collect();
    let mut fails = Vec::new();
    for w in &short {
        let p = w.psi()?;
        if w.lex_cmp(&p) != Ordering::Less {
            fails.push(format!("{w} ⊀ ψ"));
        }
        if !is_primitive(&p, Method::Definition) {
            fails.push(format!("ψ({w}) not primitive"));
        }
    }
    for pair in short.windows(2) {
        if pair[0].len() == pair[1].len() && pair[0].psi()?.lex_cmp(&pair[1].psi()?) != Ordering::Less {
            fails.push(format!("ψ order at {} {}", pair[0], pair[1]));
        }
    }
    out.push(check("ψ is increasing, primitive-preserving and monotone", fails, short.len()));

    let mut fails = Vec::new();
    for w in short.iter().filter(|w| w.len() <= 6) {
        if let Err(e) = cascade(w, 3) {
            fails.push(e.to_string());
        }
        if !check_boundary_sequences(w)? {
            fails.push(format!("boundary sequences of {w}"));
        }
    }
    out.push(check("cascade endpoints and boundary digit sequences", fails, short.len()));

    // zero runs before matching are bounded by the leading run
    let mut fails = Vec::new();
    for j in &intervals {
        let a = j.midpoint();
        if let Some((_, p)) = matching_index(&a)?.matched() {
            if !zero_runs_bounded(p) {
                fails.push(fmt_ratio(&a));
            }
        }
    }
    out.push(check("zero runs bounded by the first run", fails, intervals.len()));

    // continued fractions
    let xs = random_unit_rationals(300, 10_000, opts.seed ^ 0x5eed);
    let mut fails = Vec::new();
    for x in xs.iter().filter(|x| x.is_positive()) {
        if cf_eval(&cf_expand(x)?.preperiod) != *x {
            fails.push(fmt_ratio(x));
        }
    }
    out.push(check("continued fraction round trip", fails, xs.len()));

    let mut fails = Vec::new();
    let cases = 1000;
    for _ in 0..cases {
        let gen = |rng: &mut ChaCha8Rng| {
            let k = rng.gen_range(1..=4);
            let pre: Vec<u64> = (0..rng.gen_range(0..=2)).map(|_| rng.gen_range(1..=4)).collect();
            let per: Vec<u64> = (0..k).map(|_| rng.gen_range(1..=4)).collect();
            CfWord::periodic(pre, per)
        };
        let s = gen(&mut rng);
        let t = gen(&mut rng);
        let g = gauss_compare(&s, &t)?;
        let num = periodic_value(&s, 200).cmp(&periodic_value(&t, 200));
        if g != num {
            fails.push(format!("{s} vs {t}"));
        }
    }
    out.push(check("Gauss order matches numeric order", fails, cases));

    let mut fails = Vec::new();
    for w in &blocks {
        let q = crate::cf::a_quotients(w)?;
        if !is_maximal_quotients(&q) {
            fails.push(w.to_string());
        }
    }
    // every maximal word with Σ a_i ≤ 12 comes from a block
    let mut maximal = 0;
    for q in compositions(opts.max_len.min(12)) {
        if is_maximal_quotients(&q) {
            maximal += 1;
            if !blocks.iter().any(|w| crate::cf::a_quotients(w).ok().as_deref() == Some(&q[..])) {
                fails.push(format!("maximal {q:?} has no block"));
            }
        }
    }
    out.push(check("a(ω) maximal, and maximal words come from blocks", fails, blocks.len() + maximal));

    let mut fails = Vec::new();
    for p in xs.windows(2) {
        let (x, y) = (&p[0], &p[1]);
        if x == y {
            continue;
        }
        let (lo, hi) = if x < y { (x, y) } else { (y, x) };
        let fl = crate::cf::phi(lo)?;
        let fh = crate::cf::phi(hi)?;
        if fl <= fh {
            fails.push(format!("{} {}", fmt_ratio(lo), fmt_ratio(hi)));
        }
    }
    out.push(check("φ reverses order", fails, xs.len() - 1));

    for c in check_functional_identities(&xs)? {
        out.push(Check {
            name: match c.name.as_str() {
                "?∘F = T∘?" => "? ∘ F = T ∘ ?",
                "T∘D = T∘T" => "T ∘ D = T ∘ T",
                _ => "φ + ½? = 1",
            },
            pass: c.pass,
            detail: c.detail,
        });
    }

    let bridge_blocks: Vec<&Word> = blocks.iter().filter(|w| w.len() <= 10).collect();
    let opts_b = BridgeOptions {
        samples: 0,
        ..Default::default()
    };
    let res: Vec<Option<String>> = exec.map(&bridge_blocks, |w| match bridge_verify(w, &opts_b) {
        Ok(r) if r.pass() => None,
        Ok(r) => Some(format!(
            "{w}: {}",
            r.clauses.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect::<Vec<_>>().join(", ")
        )),
        Err(e) => Some(e.to_string()),
    });
    out.push(check("binary and continued-fraction endpoints correspond", res.into_iter().flatten().collect(), bridge_blocks.len()));

    // densities
    let dens_blocks: Vec<&crate::blocks::MatchingInterval> = intervals.iter().filter(|j| j.m <= 8).collect();
    let res: Vec<Option<String>> = exec.map(&dens_blocks, |j| {
        let a = j.midpoint();
        let h = invariant_density(&a).ok()?;
        let ok = h.integral() == int(1) && h.is_nonnegative() && pf_apply(&h, &a).ok()? == h;
        (!ok).then(|| j.omega.to_string())
    });
    out.push(check("densities are fixed probability densities", res.into_iter().flatten().collect(), dens_blocks.len()));

    let res: Vec<Option<String>> = exec.map(&dens_blocks, |j| {
        for t in [rat(1, 4), rat(1, 2), rat(3, 4)] {
            if mu_zero(&j.at(&t)).is_err() {
                return Some(j.omega.to_string());
            }
        }
        None
    });
    out.push(check("block formula equals the density integral", res.into_iter().flatten().collect(), dens_blocks.len()));

    let plateau = farey_points(&rat(6, 5), &three_half, 100);
    let res: Vec<Option<String>> = exec.map(&plateau, |a| match mu_zero(a) {
        Ok(m) if m.value == rat(2, 3) => None,
        _ => Some(fmt_ratio(a)),
    });
    out.push(check("μ = 2/3 on [6/5, 3/2]", res.into_iter().flatten().collect(), plateau.len()));

    let c = cascade_limit(&"11".parse()?, 64)?;
    let mut fails = Vec::new();
    for j in &intervals {
        if j.l < c.hi && j.r > rat(6, 5) && (!has_plateau_structure(&j.omega) || eta(&j.omega) != 0) {
            fails.push(j.omega.to_string());
        }
    }
    out.push(check("blocks between 6/5 and the cascade limit have plateau structure", fails, intervals.len()));

    let mut fails = Vec::new();
    let mut n_cases = 0;
    for n in 1..=(opts.max_len.saturating_sub(2)) / 2 {
        n_cases += 1;
        let mut even = vec![1u8];
        even.extend([1, 0].repeat(n));
        even.push(1);
        let even = Word::new(even)?;
        let j = interval_of(&even)?;
        if mu_range(&j)? != (rat(2, 3), rat(2, 3)) {
            fails.push(even.to_string());
        }
        let mut odd = vec![1u8];
        odd.extend([1, 0].repeat(n));
        odd.extend([1, 1]);
        let odd = Word::new(odd)?;
        if odd.len() < 5 {
            continue;
        }
        let m = odd.len();
        let j = interval_of(&odd)?;
        let (_, hi) = mu_range(&j)?;
        let p = crate::rational::pow2(m);
        let bound = rat(2, 3)
            * Rational::new(&p * &p - &p * 2 - (&p >> 3) + 1, (&p - 1) * (&p - 1));
        if hi >= rat(2, 3) || hi > bound {
            fails.push(odd.to_string());
        }
    }
    out.push(check("lexicographically smallest blocks", fails, n_cases));

    let mono: Vec<&Word> = blocks.iter().filter(|w| w.len() >= 3 && w.len() <= 10).collect();
    let res: Vec<Option<String>> = exec.map(&mono, |w| match monotonicity_check(w) {
        Ok(r) if r.pass() => None,
        Ok(r) => Some(format!("{w}: {} vs {}", r.observed, r.predicted)),
        Err(e) => Some(e.to_string()),
    });
    out.push(check("direction of μ on J_ω follows −η", res.into_iter().flatten().collect(), mono.len()));

    let probes: Vec<Word> = ["11", "1101", "111", "111011"].iter().map(|s| s.parse()).collect::<Result<_>>()?;
    let mut fails = Vec::new();
    for w in &probes {
        for p in crate::measure::continuity_probe(w, &[rat(1, 1000), rat(1, 10000)])? {
            if p.ratio > 10.0 {
                fails.push(format!("{w} δ={} ratio {:.3}", fmt_ratio(&p.delta), p.ratio));
            }
        }
    }
    out.push(check("μ varies by O(δ) across cascade endpoints", fails, probes.len() * 2));

    Ok(out)
}

/// Value of an eventually periodic word truncated to `n` quotients; only used for ordering.
fn periodic_value(w: &CfWord, n: usize) -> Rational {
    let q: Vec<u64> = (1..=n).map_while(|i| w.quotient(i)).collect();
    cf_eval(&q)
}

/// Quotient words with entries `≥ 1`, last entry `≥ 2` and sum `≤ total`.
fn compositions(total: usize) -> Vec<Vec<u64>> {
    fn go(rem: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if let Some(&l) = cur.last() {
            if l >= 2 {
                out.push(cur.clone());
            }
        }
        for a in 1..=rem {
            cur.push(a);
            go(rem - a, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(total as u64, &mut Vec::new(), &mut out);
    out
}

/// Strict quadratic root check for the worked example: `(√37 − 5)/4` solves the
/// fixed-point equation of `(3 1 2)^∞`.
pub fn worked_example_surd() -> Result<bool> {
    let s = QuadraticSurd::new(vec![3, 1, 2])?;
    Ok(s.satisfies_radical(&(-5).into(), &37.into(), &4.into()))
}
