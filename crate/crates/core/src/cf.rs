//! Continued fractions, the Gauss order, quadratic intervals, `φ` and Minkowski's `?`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dynamics::{aux_map_step, AuxMap};
use crate::error::{domain, Error, Result};
use crate::rational::{binary_value, fmt_ratio, half, int, inv_pow2, pow2, rat, Rational};
use crate::word::Word;

/// Shortest period, then shortest preperiod.
pub(crate) fn canonical_periodic<T: Eq + Clone>(pre: &mut Vec<T>, per: &mut Vec<T>) {
    if per.is_empty() {
        return;
    }
    let p = per.len();
    for d in 1..=p {
        if p % d == 0 && (0..p).all(|i| per[i] == per[i % d]) {
            per.truncate(d);
            break;
        }
    }
    while let Some(last) = pre.last() {
        if last != per.last().unwrap() {
            break;
        }
        pre.pop();
        per.rotate_right(1);
    }
}

/// `[0; a_1 a_2 …]` with an optional repeating tail. An empty word stands for 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CfWord {
    pub preperiod: Vec<u64>,
    pub period: Vec<u64>,
}

impl CfWord {
    pub fn finite(q: Vec<u64>) -> Self {
        CfWord {
            preperiod: q,
            period: Vec::new(),
        }
    }

    pub fn periodic(pre: Vec<u64>, per: Vec<u64>) -> Self {
        let (mut pre, mut per) = (pre, per);
        canonical_periodic(&mut pre, &mut per);
        CfWord {
            preperiod: pre,
            period: per,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.period.is_empty()
    }

    /// Quotient `a_i` (1-based); `None` means `∞`, the tail of a finite word.
    pub fn quotient(&self, i: usize) -> Option<u64> {
        let k = i - 1;
        if k < self.preperiod.len() {
            Some(self.preperiod[k])
        } else if self.period.is_empty() {
            None
        } else {
            Some(self.period[(k - self.preperiod.len()) % self.period.len()])
        }
    }

    /// Exact value of a finite word.
    pub fn value(&self) -> Result<Rational> {
        if !self.is_finite() {
            return domain("exact value requested for a periodic continued fraction");
        }
        Ok(cf_eval(&self.preperiod))
    }

    /// Merges a trailing quotient 1 into its predecessor, keeping `[1]` itself.
    fn canonical_finite(mut self) -> Self {
        if self.is_finite() && self.preperiod.len() > 1 && *self.preperiod.last().unwrap() == 1 {
            self.preperiod.pop();
            *self.preperiod.last_mut().unwrap() += 1;
        }
        self
    }
}

impl fmt::Display for CfWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        write!(f, "[0;{}", join(&self.preperiod))?;
        if !self.period.is_empty() {
            if !self.preperiod.is_empty() {
                write!(f, ",")?;
            }
            write!(f, "({})^∞", join(&self.period))?;
        }
        write!(f, "]")
    }
}

/// Euclidean expansion of `x ∈ (0, 1]`, last quotient `≥ 2` (except `1 = [0;1]`).
pub fn cf_expand(x: &Rational) -> Result<CfWord> {
    if !x.is_positive() || *x > int(1) {
        return domain(format!("cf_expand needs x in (0, 1], got {x}"));
    }
    let mut q = Vec::new();
    let (mut n, mut d) = (x.numer().clone(), x.denom().clone());
    while !n.is_zero() {
        let (a, r) = d.div_rem(&n);
        q.push(a.to_u64().ok_or(Error::QuotientOverflow)?);
        d = n;
        n = r;
    }
    Ok(CfWord::finite(q))
}

/// `[0; a_1 … a_n]`.
pub fn cf_eval(q: &[u64]) -> Rational {
    let mut x = Rational::zero();
    for &a in q.iter().rev() {
        x = (Rational::from_integer(BigInt::from(a)) + x).recip();
    }
    x
}

/// Convergent numerators and denominators `(P_k, Q_k)` for `k = 1..=n`.
fn convergents(q: &[u64]) -> Vec<(BigInt, BigInt)> {
    let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
    let (mut p1, mut q1) = (BigInt::zero(), BigInt::one());
    let mut out = Vec::with_capacity(q.len());
    for &a in q {
        let a = BigInt::from(a);
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        out.push((p1.clone(), q1.clone()));
    }
    out
}

/// Quotients of `a(ω)` built from the run lengths of `ω`.
pub fn a_quotients(w: &Word) -> Result<Vec<u64>> {
    let l = w.ell_decomposition()?.runs;
    let n = l.len();
    let mut q = l.clone();
    if l[n - 1] == 0 {
        q.truncate(n - 1);
        *q.last_mut().unwrap() += 1;
    } else {
        q[n - 1] += 1;
    }
    if q.contains(&0) {
        return domain(format!("word {w} has no continued fraction form"));
    }
    Ok(q)
}

/// `a(ω)` for a primitive block.
pub fn a_of_omega(w: &Word) -> Result<Rational> {
    if !crate::blocks::is_primitive(w, crate::blocks::Method::Definition) {
        return Err(Error::NotPrimitive(w.to_string()));
    }
    Ok(cf_eval(&a_quotients(w)?))
}

/// The purely periodic surd `[0; (c_1 … c_k)^∞]`, root of `A x² + B x − C`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuadraticSurd {
    pub period: Vec<u64>,
    #[serde(serialize_with = "ser_display")]
    pub a: BigInt,
    #[serde(serialize_with = "ser_display")]
    pub b: BigInt,
    #[serde(serialize_with = "ser_display")]
    pub c: BigInt,
}

fn ser_display<S: serde::Serializer, T: fmt::Display>(v: &T, s: S) -> core::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl QuadraticSurd {
    pub fn new(period: Vec<u64>) -> Result<Self> {
        if period.is_empty() || period.contains(&0) {
            return domain("surd period must be a nonempty list of positive quotients");
        }
        let conv = convergents(&period);
        let k = conv.len();
        let (pk, qk) = conv[k - 1].clone();
        let (pk1, qk1) = if k >= 2 {
            conv[k - 2].clone()
        } else {
            (BigInt::zero(), BigInt::one())
        };
        // x = (P_k + x P_{k-1}) / (Q_k + x Q_{k-1})
        Ok(QuadraticSurd {
            period,
            a: qk1,
            b: qk - pk1,
            c: pk,
        })
    }

    pub fn word(&self) -> CfWord {
        CfWord::periodic(Vec::new(), self.period.clone())
    }

    /// `A r² + B r − C`.
    pub fn poly_at(&self, r: &Rational) -> Rational {
        let a = Rational::from_integer(self.a.clone());
        let b = Rational::from_integer(self.b.clone());
        let c = Rational::from_integer(self.c.clone());
        a * r * r + b * r - c
    }

    /// Exact comparison of the surd with a rational.
    pub fn cmp_rational(&self, r: &Rational) -> Ordering {
        if !r.is_positive() {
            return Ordering::Greater;
        }
        // the polynomial is negative at 0 and has one positive root
        match self.poly_at(r).cmp(&Rational::zero()) {
            Ordering::Greater => Ordering::Less,
            Ordering::Less => Ordering::Greater,
            Ordering::Equal => Ordering::Equal,
        }
    }

    /// Rational enclosure `[lo, hi]` of width below `2^{-bits}` from consecutive convergents.
    pub fn enclosure(&self, bits: usize) -> (Rational, Rational) {
        let eps = inv_pow2(bits);
        let mut q: Vec<u64> = self.period.clone();
        loop {
            let conv = convergents(&q);
            let n = conv.len();
            if n >= 2 {
                let (p1, q1) = &conv[n - 2];
                let (p2, q2) = &conv[n - 1];
                let width = Rational::new(BigInt::one(), q1 * q2);
                if width < eps {
                    let x = Rational::new(p1.clone(), q1.clone());
                    let y = Rational::new(p2.clone(), q2.clone());
                    return if x < y { (x, y) } else { (y, x) };
                }
            }
            q.extend_from_slice(&self.period);
        }
    }

    pub fn to_f64(&self) -> f64 {
        let (lo, hi) = self.enclosure(60);
        crate::rational::to_f64(&((lo + hi) * half()))
    }

    /// `(p + √d) / r` with `d` square-free where practical.
    pub fn radical_form(&self) -> (BigInt, BigInt, BigInt) {
        let disc = &self.b * &self.b + BigInt::from(4) * &self.a * &self.c;
        let mut d = disc;
        let mut s = BigInt::one();
        let mut k = BigInt::from(2);
        let limit = BigInt::from(1_000_000u32);
        while &k * &k <= d && k < limit {
            let kk = &k * &k;
            while (&d % &kk).is_zero() {
                d /= &kk;
                s *= &k;
            }
            k += 1;
        }
        let mut p = -self.b.clone();
        let mut r = BigInt::from(2) * &self.a;
        let g = p.gcd(&s).gcd(&r);
        if !g.is_zero() && !g.is_one() {
            p /= &g;
            s /= &g;
            r /= &g;
        }
        // keep s under the radical
        (p, d * &s * &s, r)
    }

    /// Exact test that `(p + √d)/r` is a root of the defining quadratic.
    pub fn satisfies_radical(&self, p: &BigInt, d: &BigInt, r: &BigInt) -> bool {
        if r.is_zero() || d.is_negative() {
            return false;
        }
        // A(p² + d + 2p√d)/r² + B(p + √d)/r − C = 0
        let rational_part = &self.a * (p * p + d) + &self.b * p * r - &self.c * r * r;
        let surd_part = BigInt::from(2) * &self.a * p + &self.b * r;
        if !rational_part.is_zero() {
            return false;
        }
        // a perfect-square d would make √d rational and fold into the other part
        surd_part.is_zero() || d.is_zero()
    }
}

impl fmt::Display for QuadraticSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (p, d, r) = self.radical_form();
        let (mut d2, mut s) = (d.clone(), BigInt::one());
        let mut k = BigInt::from(2);
        while &k * &k <= d2 && k < BigInt::from(1_000_000u32) {
            let kk = &k * &k;
            while (&d2 % &kk).is_zero() {
                d2 /= &kk;
                s *= &k;
            }
            k += 1;
        }
        let rad = if s.is_one() {
            format!("√{d2}")
        } else {
            format!("{s}√{d2}")
        };
        let num = if p.is_zero() {
            rad
        } else if p.is_negative() {
            format!("{rad}−{}", -p)
        } else {
            format!("{rad}+{p}")
        };
        if r.is_one() {
            write!(f, "{num}")
        } else {
            write!(f, "({num})/{r}")
        }
    }
}

/// The quadratic interval `(a^−, a^+)` attached to a rational `a`.
#[derive(Debug, Clone, Serialize)]
pub struct QuadraticInterval {
    #[serde(serialize_with = "ser_display")]
    pub a: Rational,
    pub quotients: Vec<u64>,
    pub lo: QuadraticSurd,
    pub hi: QuadraticSurd,
    #[serde(skip)]
    pub lo_enc: (Rational, Rational),
    #[serde(skip)]
    pub hi_enc: (Rational, Rational),
}

impl QuadraticInterval {
    pub fn contains_rational(&self, x: &Rational) -> bool {
        self.lo.cmp_rational(x) == Ordering::Less && self.hi.cmp_rational(x) == Ordering::Greater
    }
}

pub const DEFAULT_PRECISION_BITS: usize = 128;

/// Endpoints `[0;(a_1…a_n)^∞]` and `[0;(a_1…a_{n−1}(a_n−1)1)^∞]` ordered by the parity of `n`.
pub fn quadratic_endpoints(a: &Rational, bits: usize) -> Result<QuadraticInterval> {
    let q = cf_expand(a)?.preperiod;
    let n = q.len();
    if q[n - 1] < 2 {
        return domain("a = 1 has no quadratic interval");
    }
    let w1 = q.clone();
    let mut w2 = q[..n - 1].to_vec();
    w2.push(q[n - 1] - 1);
    w2.push(1);
    let (lo, hi) = if n % 2 == 1 { (w1, w2) } else { (w2, w1) };
    let lo = QuadraticSurd::new(lo)?;
    let hi = QuadraticSurd::new(hi)?;
    let mut bits = bits.max(8);
    loop {
        let lo_enc = lo.enclosure(bits);
        let hi_enc = hi.enclosure(bits);
        if lo_enc.1 < hi_enc.0 {
            for s in [&lo, &hi] {
                let (p, d, r) = s.radical_form();
                if !s.satisfies_radical(&p, &d, &r) {
                    return Err(Error::Inconsistent(format!("endpoint {s} fails its quadratic")));
                }
            }
            return Ok(QuadraticInterval {
                a: a.clone(),
                quotients: q,
                lo,
                hi,
                lo_enc,
                hi_enc,
            });
        }
        if bits > 1 << 16 {
            return Err(Error::Inconsistent(format!("endpoints of I_{a} do not separate")));
        }
        bits *= 2;
    }
}

/// The alternating order `<_g` on quotient sequences; a finite word continues with `∞`.
pub fn gauss_compare(s: &CfWord, t: &CfWord) -> Result<Ordering> {
    for w in [s, t] {
        if w.is_finite() && w.preperiod.len() > 1 && *w.preperiod.last().unwrap() == 1 {
            return Err(Error::Domain(format!(
                "finite word {w} is not canonical; its value has two expansions"
            )));
        }
    }
    let horizon = |w: &CfWord| -> usize {
        if w.is_finite() {
            w.preperiod.len() + 1
        } else {
            w.preperiod.len()
        }
    };
    let lcm = match (s.period.len(), t.period.len()) {
        (0, 0) => 1,
        (0, p) | (p, 0) => p,
        (p, r) => p.lcm(&r),
    };
    let n = horizon(s).max(horizon(t)) + lcm;
    for i in 1..=n {
        let (x, y) = (s.quotient(i), t.quotient(i));
        if x == y {
            if x.is_none() {
                return Ok(Ordering::Equal);
            }
            continue;
        }
        // None is ∞ and beats every finite quotient
        let s_bigger = match (x, y) {
            (None, _) => true,
            (_, None) => false,
            (Some(x), Some(y)) => x > y,
        };
        let s_smaller = if i % 2 == 1 { s_bigger } else { !s_bigger };
        return Ok(if s_smaller { Ordering::Less } else { Ordering::Greater });
    }
    Ok(Ordering::Equal)
}

fn strictly_minimal(q: &[u64]) -> bool {
    let base = CfWord {
        preperiod: Vec::new(),
        period: q.to_vec(),
    };
    (1..q.len()).all(|i| {
        let mut rot = q.to_vec();
        rot.rotate_left(i);
        let shifted = CfWord {
            preperiod: Vec::new(),
            period: rot,
        };
        matches!(gauss_compare(&base, &shifted), Ok(Ordering::Less))
    })
}

/// Maximality test on a canonical quotient word.
pub fn is_maximal_quotients(q: &[u64]) -> bool {
    let n = q.len();
    if n == 0 || q[n - 1] < 2 {
        return false;
    }
    if strictly_minimal(q) {
        return true;
    }
    n % 2 == 0 && (n / 2) % 2 == 1 && q[..n / 2] == q[n / 2..] && strictly_minimal(&q[..n / 2])
}

/// Whether `I_a` is a maximal quadratic interval.
pub fn is_maximal_quadratic(a: &Rational) -> Result<bool> {
    Ok(is_maximal_quotients(&cf_expand(a)?.preperiod))
}

/// Eventually periodic binary expansion `.b_1 b_2 …`; the period is never empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct BinaryWord {
    pub preperiod: Vec<u8>,
    pub period: Vec<u8>,
}

impl BinaryWord {
    pub fn new(pre: Vec<u8>, per: Vec<u8>) -> Self {
        assert!(!per.is_empty(), "binary word needs a period");
        let (mut pre, mut per) = (pre, per);
        canonical_periodic(&mut pre, &mut per);
        BinaryWord {
            preperiod: pre,
            period: per,
        }
    }

    pub fn value(&self) -> Rational {
        let k = self.period.len();
        let per = binary_value(&self.period) * Rational::from_integer(pow2(k))
            / Rational::from_integer(pow2(k) - 1);
        (binary_value(&self.preperiod) * Rational::from_integer(pow2(self.preperiod.len())) + per)
            * inv_pow2(self.preperiod.len())
    }

    pub fn bit(&self, n: usize) -> u8 {
        let i = n - 1;
        if i < self.preperiod.len() {
            self.preperiod[i]
        } else {
            self.period[(i - self.preperiod.len()) % self.period.len()]
        }
    }

    pub fn prefix(&self, n: usize) -> Vec<u8> {
        (1..=n).map(|i| self.bit(i)).collect()
    }

    /// Standard expansion of `x ∈ [0, 1]`: dyadics end in `0^∞`, and `1 = .1^∞`.
    pub fn from_rational(x: &Rational) -> Result<Self> {
        if x.is_negative() || *x > int(1) {
            return domain(format!("binary expansion needs x in [0, 1], got {x}"));
        }
        if x.is_one() {
            return Ok(BinaryWord::new(Vec::new(), vec![1]));
        }
        let mut seen = std::collections::HashMap::new();
        let mut bits = Vec::new();
        let mut y = x.clone();
        loop {
            if let Some(&start) = seen.get(&y) {
                let per = bits.split_off(start);
                return Ok(BinaryWord::new(bits, per));
            }
            seen.insert(y.clone(), bits.len());
            bits.push(if y >= half() { 1 } else { 0 });
            y = aux_map_step(AuxMap::Doubling, &y)?;
        }
    }
}

impl fmt::Display for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, ".")?;
        for b in &self.preperiod {
            write!(f, "{b}")?;
        }
        write!(f, "(")?;
        for b in &self.period {
            write!(f, "{b}")?;
        }
        write!(f, ")^∞")
    }
}

fn runs_to_bits(runs: &[u64], first: u8, out: &mut Vec<u8>) {
    for (i, &r) in runs.iter().enumerate() {
        let s = if i % 2 == 0 { first } else { 1 - first };
        out.extend(std::iter::repeat_n(s, r as usize));
    }
}

/// `φ([0; a_1 a_2 …]) = .1^{a_1} 0^{a_2} 1^{a_3} …`.
pub fn phi_exact(x: &CfWord) -> BinaryWord {
    let mut pre = Vec::new();
    runs_to_bits(&x.preperiod, 1, &mut pre);
    let next = if x.preperiod.len() % 2 == 0 { 1 } else { 0 };
    if x.is_finite() {
        return BinaryWord::new(pre, vec![next]);
    }
    let mut per = Vec::new();
    runs_to_bits(&x.period, next, &mut per);
    if x.period.len() % 2 == 1 {
        runs_to_bits(&x.period, 1 - next, &mut per);
    }
    BinaryWord::new(pre, per)
}

/// First `n_bits` digits of `φ(x)`.
pub fn phi_map(x: &CfWord, n_bits: usize) -> Vec<u8> {
    phi_exact(x).prefix(n_bits)
}

fn cf_of_unit(x: &Rational) -> Result<CfWord> {
    if x.is_zero() {
        Ok(CfWord::finite(Vec::new()))
    } else {
        cf_expand(x)
    }
}

/// `φ(x)` for rational `x ∈ [0, 1]`.
pub fn phi(x: &Rational) -> Result<Rational> {
    Ok(phi_exact(&cf_of_unit(x)?).value())
}

/// `?([0; a_1 a_2 …]) = .0^{a_1 − 1} 1^{a_2} 0^{a_3} …`.
pub fn minkowski_word(x: &CfWord) -> Result<BinaryWord> {
    if !x.is_finite() {
        return domain("minkowski_word is implemented for finite continued fractions");
    }
    let q = &x.preperiod;
    if q.is_empty() {
        return Ok(BinaryWord::new(Vec::new(), vec![0]));
    }
    let mut runs = q.clone();
    runs[0] -= 1;
    let mut pre = Vec::new();
    runs_to_bits(&runs, 0, &mut pre);
    let next = if q.len() % 2 == 1 { 1 } else { 0 };
    Ok(BinaryWord::new(pre, vec![next]))
}

/// Minkowski's question mark function on rationals; the value is dyadic.
pub fn minkowski_q(x: &Rational) -> Result<Rational> {
    Ok(minkowski_word(&cf_of_unit(x)?)?.value())
}

/// `φ^{-1}` on a dyadic `y ∈ [1/2, 1]`, as a canonical finite continued fraction.
pub fn phi_inverse_dyadic(y: &Rational) -> Result<CfWord> {
    if *y < half() || *y > int(1) {
        return domain(format!("phi inverse needs y in [1/2, 1], got {y}"));
    }
    if y.is_one() {
        return Ok(CfWord::finite(Vec::new()));
    }
    let b = BinaryWord::from_rational(y)?;
    if b.period != [0] {
        return domain(format!("{y} is not dyadic"));
    }
    let bits = &b.preperiod;
    let mut runs: Vec<u64> = Vec::new();
    let mut i = 0;
    while i < bits.len() {
        let s = bits[i];
        let start = i;
        while i < bits.len() && bits[i] == s {
            i += 1;
        }
        runs.push((i - start) as u64);
    }
    Ok(CfWord::finite(runs).canonical_finite())
}

/// Farey map acting on quotient words.
pub fn farey_cf(x: &CfWord) -> CfWord {
    let (mut pre, per) = (x.preperiod.clone(), x.period.clone());
    if pre.is_empty() {
        if per.is_empty() {
            return x.clone();
        }
        pre = per.clone();
    }
    if pre[0] > 1 {
        pre[0] -= 1;
    } else {
        pre.remove(0);
    }
    if per.is_empty() {
        CfWord::finite(pre).canonical_finite()
    } else {
        CfWord::periodic(pre, per)
    }
}

/// `r^−(ω) = .(ω_1 … ω_{m−1} 0)^∞`.
pub fn r_minus(w: &Word) -> BinaryWord {
    let mut per = w.bits().to_vec();
    *per.last_mut().unwrap() = 0;
    BinaryWord::new(Vec::new(), per)
}

/// `r^+(ω) = .(ω · complement(ω))^∞`.
pub fn r_plus(w: &Word) -> BinaryWord {
    BinaryWord::new(Vec::new(), w.concat(&w.complement()).bits().to_vec())
}

#[derive(Debug, Clone, Serialize)]
pub struct Clause {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Clause {
    fn new(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        Clause {
            name: name.to_string(),
            pass,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BridgeReport {
    pub omega: Word,
    /// Test parameter used for the Farey and doubling clauses, if any.
    pub alpha: Option<String>,
    pub clauses: Vec<Clause>,
}

impl BridgeReport {
    pub fn pass(&self) -> bool {
        self.clauses.iter().all(|c| c.pass)
    }
}

#[derive(Debug, Clone)]
pub struct BridgeOptions {
    pub alpha: Option<Rational>,
    pub samples: usize,
    pub max_den: u64,
    pub seed: u64,
    pub precision_bits: usize,
}

impl Default for BridgeOptions {
    fn default() -> Self {
        BridgeOptions {
            alpha: None,
            samples: 100,
            max_den: 10_000,
            seed: 0,
            precision_bits: DEFAULT_PRECISION_BITS,
        }
    }
}

/// Smallest-exponent dyadic `k/2^j ∈ (lo, hi)` with `j ≤ max_bits`.
pub fn smallest_dyadic_between(lo: &Rational, hi: &Rational, max_bits: usize) -> Option<Rational> {
    (0..=max_bits).find_map(|j| {
        let scale = Rational::from_integer(pow2(j));
        let k = (lo * &scale).floor() + int(1);
        let y = k / scale;
        (y < *hi).then_some(y)
    })
}

/// Random rationals `p/q ∈ [0, 1]` with `q ≤ max_den`.
pub fn random_unit_rationals(n: usize, max_den: u64, seed: u64) -> Vec<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let q = rng.gen_range(1..=max_den as i64);
            let p = rng.gen_range(0..=q);
            rat(p, q)
        })
        .collect()
}

/// `? ∘ F = T ∘ ?`, `T ∘ D = T ∘ T` and `φ + ½? = 1` at each sample point.
pub fn check_functional_identities(xs: &[Rational]) -> Result<Vec<Clause>> {
    let mut bad_qf = Vec::new();
    let mut bad_td = Vec::new();
    let mut bad_phi = Vec::new();
    for x in xs {
        let q = minkowski_q(x)?;
        let lhs = minkowski_q(&aux_map_step(AuxMap::Farey, x)?)?;
        if lhs != aux_map_step(AuxMap::Tent, &q)? {
            bad_qf.push(fmt_ratio(x));
        }
        if !x.is_one() {
            let td = aux_map_step(AuxMap::Tent, &aux_map_step(AuxMap::Doubling, x)?)?;
            let tt = aux_map_step(AuxMap::Tent, &aux_map_step(AuxMap::Tent, x)?)?;
            if td != tt {
                bad_td.push(fmt_ratio(x));
            }
        }
        if phi(x)? + q * half() != int(1) {
            bad_phi.push(fmt_ratio(x));
        }
    }
    let mk = |name: &str, bad: Vec<String>| {
        let detail = if bad.is_empty() {
            format!("{} points", xs.len())
        } else {
            format!("fails at {}", bad.join(", "))
        };
        Clause::new(name, bad.is_empty(), detail)
    };
    Ok(vec![
        mk("?∘F = T∘?", bad_qf),
        mk("T∘D = T∘T", bad_td),
        mk("φ + ½? = 1", bad_phi),
    ])
}

/// Checks the continued-fraction side of a primitive block against its binary side.
pub fn bridge_verify(w: &Word, opts: &BridgeOptions) -> Result<BridgeReport> {
    if !crate::blocks::is_primitive(w, crate::blocks::Method::Definition) {
        return Err(Error::NotPrimitive(w.to_string()));
    }
    let m = w.len();
    let mut clauses = Vec::new();
    let a = a_of_omega(w)?;
    let qi = quadratic_endpoints(&a, opts.precision_bits)?;
    let (rm, rp) = (r_minus(w), r_plus(w));

    let phi_lo = phi_exact(&qi.lo.word());
    let phi_hi = phi_exact(&qi.hi.word());
    clauses.push(Clause::new("φ(a^−) = r^+", phi_lo == rp, format!("{phi_lo} vs {rp}")));
    clauses.push(Clause::new("φ(a^+) = r^−", phi_hi == rm, format!("{phi_hi} vs {rm}")));

    let j = crate::blocks::interval_of(w)?;
    let inv_l = j.l.recip();
    let inv_r = j.r.recip();
    clauses.push(Clause::new(
        "1/L = r^+",
        inv_l == rp.value(),
        format!("1/L = {}", fmt_ratio(&inv_l)),
    ));
    clauses.push(Clause::new(
        "1/R = r^−",
        inv_r == rm.value(),
        format!("1/R = {}", fmt_ratio(&inv_r)),
    ));

    let alpha = match &opts.alpha {
        Some(a) => Some(a.clone()),
        None => smallest_dyadic_between(&rm.value(), &rp.value(), 40).map(|y| y.recip()),
    };
    if let Some(alpha) = &alpha {
        let y = alpha.recip();
        let inside = *alpha > j.l && *alpha < j.r;
        clauses.push(Clause::new("α ∈ J_ω", inside, fmt_ratio(alpha)));
        match phi_inverse_dyadic(&y) {
            Ok(at) if inside => {
                let at_val = at.value()?;
                clauses.push(Clause::new(
                    "ã ∈ I_a",
                    qi.contains_rational(&at_val),
                    format!("ã = {at}"),
                ));
                let mut f = at.clone();
                for _ in 0..m {
                    f = farey_cf(&f);
                }
                let fv = f.value()?;
                clauses.push(Clause::new(
                    "F^m(ã) ∈ [0, ã)",
                    !fv.is_negative() && fv < at_val,
                    format!("F^{m}(ã) = {f} = {}", fmt_ratio(&fv)),
                ));
            }
            Ok(_) => {}
            Err(e) => clauses.push(Clause::new("ã = φ^{-1}(1/α)", false, e.to_string())),
        }
        if inside {
            let mut d = y.clone();
            for _ in 0..m - 1 {
                d = aux_map_step(AuxMap::Doubling, &d)?;
            }
            let lo = (alpha * int(2)).recip();
            let hi = int(1) - &lo;
            clauses.push(Clause::new(
                "D^{m−1}(1/α) ∈ (1/(2α), 1 − 1/(2α))",
                d > lo && d < hi,
                format!("D^{}(1/α) = {}", m - 1, fmt_ratio(&d)),
            ));
        }
    }

    if opts.samples > 0 {
        let xs = random_unit_rationals(opts.samples, opts.max_den, opts.seed);
        clauses.extend(check_functional_identities(&xs)?);
    }

    Ok(BridgeReport {
        omega: w.clone(),
        alpha: alpha.as_ref().map(fmt_ratio),
        clauses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn expand_examples() {
        assert_eq!(cf_expand(&rat(3, 11)).unwrap().preperiod, vec![3, 1, 2]);
        assert_eq!(cf_expand(&rat(1, 2)).unwrap().preperiod, vec![2]);
        assert_eq!(cf_expand(&rat(2, 5)).unwrap().preperiod, vec![2, 2]);
        assert_eq!(cf_expand(&int(1)).unwrap().preperiod, vec![1]);
        assert!(cf_expand(&int(0)).is_err());
        assert_eq!(cf_eval(&[3, 1, 2]), rat(3, 11));
    }

    #[test]
    fn a_of_omega_examples() {
        assert_eq!(a_of_omega(&w("111011")).unwrap(), rat(3, 11));
        assert_eq!(a_of_omega(&w("11")).unwrap(), rat(1, 2));
        assert_eq!(a_of_omega(&w("1101")).unwrap(), rat(2, 5));
        assert!(a_of_omega(&w("110011")).is_err());
    }

    #[test]
    fn surd_polynomials() {
        let s = QuadraticSurd::new(vec![3, 1, 2]).unwrap();
        assert_eq!((s.a.clone(), s.b.clone(), s.c.clone()), (4.into(), 10.into(), 3.into()));
        assert!(s.satisfies_radical(&BigInt::from(-5), &BigInt::from(37), &BigInt::from(4)));
        assert!(!s.satisfies_radical(&BigInt::from(-5), &BigInt::from(37), &BigInt::from(3)));
        assert_eq!(s.to_string(), "(√37−5)/4");
        let t = QuadraticSurd::new(vec![3, 1, 1, 1]).unwrap();
        assert!(t.satisfies_radical(&BigInt::from(-9), &BigInt::from(165), &BigInt::from(14)));
        assert_eq!(QuadraticSurd::new(vec![2]).unwrap().to_string(), "√2−1");
        assert_eq!(QuadraticSurd::new(vec![1, 1]).unwrap().to_string(), "(√5−1)/2");
    }

    #[test]
    fn quadratic_endpoint_examples() {
        let qi = quadratic_endpoints(&rat(3, 11), 128).unwrap();
        assert_eq!(qi.lo.period, vec![3, 1, 2]);
        assert_eq!(qi.hi.period, vec![3, 1, 1, 1]);
        let x = ((37f64).sqrt() - 5.0) / 4.0;
        assert!((qi.lo.to_f64() - x).abs() < 1e-12);
        assert!(qi.lo_enc.1.clone() - qi.lo_enc.0.clone() < inv_pow2(128));
        let qi = quadratic_endpoints(&rat(1, 2), 64).unwrap();
        assert_eq!((qi.lo.period.clone(), qi.hi.period.clone()), (vec![2], vec![1, 1]));
        let qi = quadratic_endpoints(&rat(2, 5), 64).unwrap();
        assert_eq!((qi.lo.period.clone(), qi.hi.period.clone()), (vec![2, 1, 1], vec![2, 2]));
        assert!(qi.contains_rational(&rat(2, 5)));
    }

    #[test]
    fn gauss_examples() {
        let p = |v: Vec<u64>| CfWord::periodic(vec![], v);
        assert_eq!(gauss_compare(&p(vec![2, 1]), &p(vec![1, 2])).unwrap(), Ordering::Less);
        assert_eq!(gauss_compare(&p(vec![3, 1, 2]), &p(vec![3, 1, 1, 1])).unwrap(), Ordering::Less);
        assert_eq!(gauss_compare(&p(vec![3, 1, 2]), &p(vec![3, 1, 2])).unwrap(), Ordering::Equal);
        let f = CfWord::finite;
        assert_eq!(gauss_compare(&f(vec![2]), &f(vec![2, 5])).unwrap(), Ordering::Greater);
        assert!(gauss_compare(&f(vec![2, 1]), &f(vec![3])).is_err());
    }

    #[test]
    fn maximality_examples() {
        assert!(is_maximal_quadratic(&rat(3, 11)).unwrap());
        assert!(!is_maximal_quadratic(&rat(2, 3)).unwrap());
        assert!(is_maximal_quadratic(&rat(1, 3)).unwrap());
        assert!(!is_maximal_quadratic(&int(1)).unwrap());
    }

    #[test]
    fn phi_and_question_mark() {
        assert_eq!(phi(&rat(1, 2)).unwrap(), rat(3, 4));
        assert_eq!(phi(&int(0)).unwrap(), int(1));
        assert_eq!(minkowski_q(&rat(1, 2)).unwrap(), rat(1, 2));
        assert_eq!(minkowski_q(&rat(1, 3)).unwrap(), rat(1, 4));
        assert_eq!(minkowski_q(&rat(2, 5)).unwrap(), rat(3, 8));
        assert_eq!(minkowski_q(&int(1)).unwrap(), int(1));
        assert_eq!(minkowski_q(&int(0)).unwrap(), int(0));
        let lo = QuadraticSurd::new(vec![3, 1, 2]).unwrap();
        assert_eq!(phi_exact(&lo.word()), r_plus(&w("111011")));
        assert_eq!(r_plus(&w("111011")).value(), rat(12, 13));
        assert_eq!(r_minus(&w("111011")).value(), rat(58, 63));
        assert_eq!(phi_map(&lo.word(), 12), w("111011000100").bits());
    }

    #[test]
    fn inverse_phi_and_farey() {
        let at = phi_inverse_dyadic(&rat(945, 1024)).unwrap();
        assert_eq!(at.preperiod, vec![3, 1, 2, 4]);
        assert_eq!(at.value().unwrap(), rat(13, 48));
        let mut f = at.clone();
        for _ in 0..6 {
            f = farey_cf(&f);
        }
        assert_eq!(f.preperiod, vec![4]);
        // symbolic and numeric Farey agree
        let x = rat(13, 48);
        assert_eq!(farey_cf(&at).value().unwrap(), aux_map_step(AuxMap::Farey, &x).unwrap());
        assert_eq!(farey_cf(&CfWord::finite(vec![1])).preperiod, Vec::<u64>::new());
        let p = farey_cf(&CfWord::periodic(vec![], vec![1, 2]));
        assert_eq!((p.preperiod, p.period), (vec![], vec![2, 1]));
    }

    #[test]
    fn binary_words() {
        let b = BinaryWord::from_rational(&rat(4, 5)).unwrap();
        assert_eq!(b.to_string(), ".(1100)^∞");
        assert_eq!(b.value(), rat(4, 5));
        assert_eq!(BinaryWord::from_rational(&rat(3, 4)).unwrap().to_string(), ".11(0)^∞");
    }

    #[test]
    fn bridge_on_worked_example() {
        let opts = BridgeOptions {
            alpha: Some(rat(1024, 945)),
            samples: 20,
            ..Default::default()
        };
        let r = bridge_verify(&w("111011"), &opts).unwrap();
        assert!(r.pass(), "{r:#?}");
        let r = bridge_verify(&w("111011"), &BridgeOptions::default()).unwrap();
        assert_eq!(r.alpha.as_deref(), Some("64/59"));
        assert!(r.pass(), "{r:#?}");
        let r = bridge_verify(&w("11"), &BridgeOptions::default()).unwrap();
        assert!(r.pass(), "{r:#?}");
    }
}
