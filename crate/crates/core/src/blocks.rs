//! Primitive blocks, their matching intervals and the ψ-cascades.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::cf::{a_quotients, is_maximal_quotients};
use crate::dynamics::{matching_index, matching_within, signed_digit_sequence, SignedDigitSeq};
use crate::error::{domain, Error, Result};
use crate::exec::Execution;
use crate::rational::{biguint_to_int, half, int, inv_pow2, pow2, ser_ratio, Rational};
use crate::word::Word;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Conditions (i)–(iii) checked on the word itself.
    Definition,
    /// Maximality of the quadratic interval of `a(ω)`.
    Cf,
    /// Exact orbit of the interval midpoint.
    Dynamic,
}

/// `ω_n … ω_m ⪯ ω_1 … ω_{m−n+1}` for every `n`.
pub fn satisfies_shift_condition(b: &[u8]) -> bool {
    let m = b.len();
    (1..m).all(|n| b[n..] <= b[..m - n])
}

fn primitive_by_definition(w: &Word) -> bool {
    let b = w.bits();
    let m = b.len();
    if m < 2 || b[0] != 1 || b[1] != 1 || b[m - 1] != 1 {
        return false;
    }
    if !satisfies_shift_condition(b) {
        return false;
    }
    let runs = match w.ell_decomposition() {
        Ok(l) => l.runs,
        Err(_) => return false,
    };
    // odd truncations 1^{ℓ1} 0^{ℓ2} … 1^{ℓ_{2j−1}}
    let mut end = 0usize;
    for j in 0..runs.len() / 2 {
        end += runs[2 * j] as usize;
        let cut = end;
        end += runs[2 * j + 1] as usize;
        if cut < 2 || cut >= m {
            continue;
        }
        let prefix = w.prefix(cut);
        let psi = prefix.psi().expect("length >= 2");
        if prefix.bits() < b && b < psi.bits() {
            return false;
        }
    }
    true
}

fn primitive_by_cf(w: &Word) -> bool {
    let b = w.bits();
    if b.len() < 2 || b[0] != 1 || b[b.len() - 1] != 1 {
        return false;
    }
    match a_quotients(w) {
        Ok(q) => is_maximal_quotients(&q),
        Err(_) => false,
    }
}

fn primitive_by_dynamics(w: &Word) -> bool {
    let Ok(j) = interval_of(w) else {
        return false;
    };
    if j.l >= j.r {
        return false;
    }
    let mid = (&j.l + &j.r) * half();
    if mid <= int(1) || mid > int(2) {
        return false;
    }
    match matching_within(&mid, w.len()) {
        Some((m, digits)) => {
            m == w.len() && digits.iter().zip(w.bits()).all(|(&d, &b)| d == b as i8)
        }
        None => false,
    }
}

pub fn is_primitive(w: &Word, method: Method) -> bool {
    match method {
        Method::Definition => primitive_by_definition(w),
        Method::Cf => primitive_by_cf(w),
        Method::Dynamic => primitive_by_dynamics(w),
    }
}

/// Runs all three tests and fails loudly if they disagree.
pub fn primitivity_agreement(w: &Word) -> Result<bool> {
    let d = primitive_by_definition(w);
    let c = primitive_by_cf(w);
    let y = primitive_by_dynamics(w);
    if d == c && c == y {
        Ok(d)
    } else {
        Err(Error::Inconsistent(format!(
            "primitivity of {w}: definition={d}, cf={c}, dynamic={y}"
        )))
    }
}

fn dfs(prefix: &mut Vec<u8>, len: usize, out: &mut Vec<Word>) {
    if !satisfies_shift_condition(prefix) {
        return;
    }
    if prefix.len() == len {
        let w = Word::new(prefix.clone()).expect("nonempty");
        if primitive_by_definition(&w) {
            out.push(w);
        }
        return;
    }
    for b in [0u8, 1] {
        prefix.push(b);
        dfs(prefix, len, out);
        prefix.pop();
    }
}

/// Primitive blocks of exactly length `len`, in lexicographic order.
pub fn primitive_of_length(len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    if len >= 2 {
        dfs(&mut vec![1, 1], len, &mut out);
    }
    out
}

/// Every primitive block of length `≤ max_len`, ordered by length then lexicographically.
pub fn enumerate_primitive(max_len: usize) -> Vec<Word> {
    enumerate_primitive_with(max_len, Execution::default())
}

pub fn enumerate_primitive_with(max_len: usize, exec: Execution) -> Vec<Word> {
    let lens: Vec<usize> = (2..=max_len.max(1)).collect();
    exec.map(&lens, |&l| primitive_of_length(l)).into_iter().flatten().collect()
}

/// `J_ω` with exact endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatchingInterval {
    pub omega: Word,
    pub m: usize,
    #[serde(rename = "L", serialize_with = "ser_ratio")]
    pub l: Rational,
    #[serde(rename = "R", serialize_with = "ser_ratio")]
    pub r: Rational,
    #[serde(serialize_with = "ser_big")]
    pub x_m: BigInt,
}

fn ser_big<S: serde::Serializer>(v: &BigInt, s: S) -> core::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl MatchingInterval {
    pub fn contains(&self, alpha: &Rational) -> bool {
        *alpha > self.l && *alpha < self.r
    }

    pub fn length(&self) -> Rational {
        &self.r - &self.l
    }

    pub fn midpoint(&self) -> Rational {
        (&self.l + &self.r) * half()
    }

    /// The point `L + t (R − L)`.
    pub fn at(&self, t: &Rational) -> Rational {
        &self.l + (&self.r - &self.l) * t
    }
}

impl fmt::Display for MatchingInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use crate::rational::fmt_ratio;
        write!(f, "{} = ({}, {})", self.omega, fmt_ratio(&self.l), fmt_ratio(&self.r))
    }
}

/// Endpoint formulas without a primitivity check.
pub fn interval_of(w: &Word) -> Result<MatchingInterval> {
    let m = w.len();
    let x = biguint_to_int(w.x_m());
    if x <= BigInt::one() {
        return domain(format!("x_m of {w} must exceed 1"));
    }
    let p = pow2(m);
    Ok(MatchingInterval {
        omega: w.clone(),
        m,
        l: Rational::new(&p + 1, &x + 1),
        r: Rational::new(&p - 1, &x - 1),
        x_m: x,
    })
}

pub fn matching_interval(w: &Word) -> Result<MatchingInterval> {
    if !is_primitive(w, Method::Definition) {
        return Err(Error::NotPrimitive(w.to_string()));
    }
    interval_of(w)
}

/// Digit sequences of 1 at `L(ω)` and `R(ω)`, built from the word.
pub fn boundary_sequences(w: &Word) -> Result<(SignedDigitSeq, SignedDigitSeq)> {
    if !is_primitive(w, Method::Definition) {
        return Err(Error::NotPrimitive(w.to_string()));
    }
    let at_l: Vec<i8> = w
        .concat(&w.complement())
        .bits()
        .iter()
        .map(|&b| b as i8)
        .collect();
    let mut at_r: Vec<i8> = w.bits().iter().map(|&b| b as i8).collect();
    *at_r.last_mut().unwrap() = 0;
    Ok((
        SignedDigitSeq::periodic(Vec::new(), at_l),
        SignedDigitSeq::periodic(Vec::new(), at_r),
    ))
}

/// Compares `boundary_sequences` against exact iteration at both endpoints.
pub fn check_boundary_sequences(w: &Word) -> Result<bool> {
    let (sl, sr) = boundary_sequences(w)?;
    let j = interval_of(w)?;
    let cap = 8 * w.len() + 64;
    let one = int(1);
    let el = signed_digit_sequence(&one, &j.l, cap)?;
    let er = signed_digit_sequence(&one, &j.r, cap)?;
    Ok(el == sl && er == sr)
}

/// Intervals of `ω, ψ(ω), …, ψ^depth(ω)`, checking `L(ψ^k ω) = R(ψ^{k+1} ω)`.
pub fn cascade(w: &Word, depth: usize) -> Result<Vec<MatchingInterval>> {
    let mut out = vec![matching_interval(w)?];
    let mut cur = w.clone();
    for _ in 0..depth {
        cur = cur.psi()?;
        let next = interval_of(&cur)?;
        let prev = out.last().unwrap();
        if prev.l != next.r {
            return Err(Error::Inconsistent(format!(
                "cascade endpoints differ: L({}) = {} but R({}) = {}",
                prev.omega, prev.l, next.omega, next.r
            )));
        }
        out.push(next);
    }
    Ok(out)
}

/// First `n` symbols of `lim ψ^k(ω)`.
pub fn limit_word_prefix(w: &Word, n: usize) -> Result<Vec<u8>> {
    if w.len() < 2 {
        return domain("limit word needs |ω| >= 2");
    }
    let mut cur = w.clone();
    while cur.len() < n {
        cur = cur.psi()?;
    }
    Ok(cur.bits()[..n].to_vec())
}

/// Certified enclosure of a real constant together with a dyadic approximation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: Rational,
    pub hi: Rational,
    /// Multiple of `2^{-bits}` within `2^{-bits}` of the true value.
    pub approx: Rational,
    pub bits: usize,
}

impl Enclosure {
    pub fn contains(&self, x: &Rational) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    fn from_bounds(lo: Rational, hi: Rational, bits: usize) -> Self {
        let scale = Rational::from_integer(pow2(bits));
        let mid = (&lo + &hi) * half();
        let approx = (mid * &scale + half()).floor() / scale;
        Enclosure { lo, hi, approx, bits }
    }
}

/// `p_ω = Σ ω̄_n 2^{-n}`, the value of the limit word.
pub fn p_omega(w: &Word, bits: usize) -> Result<Enclosure> {
    if !is_primitive(w, Method::Definition) {
        return Err(Error::NotPrimitive(w.to_string()));
    }
    let n = bits + 3;
    let lo = crate::rational::binary_value(&limit_word_prefix(w, n)?);
    let hi = &lo + inv_pow2(n);
    Ok(Enclosure::from_bounds(lo, hi, bits))
}

/// `1/p_ω`, the common limit of the cascade endpoints.
pub fn cascade_limit(w: &Word, bits: usize) -> Result<Enclosure> {
    let p = p_omega(w, bits)?;
    // p ≥ 1/2, so the reciprocal enclosure is at most 4 times wider
    Ok(Enclosure::from_bounds(p.hi.recip(), p.lo.recip(), bits))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Location {
    Interval(MatchingInterval),
    /// `α ∈ (3/2, 2]`, matching after one step.
    HighRegion,
    NonMatching,
    Boundary { omega: Word, side: Side },
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Interval(j) => write!(f, "interval {j}"),
            Location::HighRegion => write!(f, "high region (3/2, 2], m = 1"),
            Location::NonMatching => write!(f, "non-matching"),
            Location::Boundary { omega, side } => {
                let s = match side {
                    Side::Left => "left",
                    Side::Right => "right",
                };
                write!(f, "{s} endpoint of J_{omega}")
            }
        }
    }
}

/// Classifies `α ∈ (1, 2]` by its matching interval.
pub fn locate(alpha: &Rational) -> Result<Location> {
    let res = matching_index(alpha)?;
    if let Some((m, prefix)) = res.matched() {
        if m == 1 {
            return Ok(Location::HighRegion);
        }
        let j = interval_of(prefix)?;
        if !j.contains(alpha) {
            return Err(Error::Inconsistent(format!(
                "alpha = {alpha} matches with prefix {prefix} but lies outside J"
            )));
        }
        return Ok(Location::Interval(j));
    }
    let h = half();
    let upper = alpha - &h;
    let (pre, per) = match res {
        crate::dynamics::MatchingResult::MarkovNoMatch {
            preperiod, period, ..
        } => (preperiod, period),
        crate::dynamics::MatchingResult::CycleNoMatch { preperiod, period } => (preperiod, period),
        _ => unreachable!(),
    };
    let mut y = int(1);
    let mut digits: Vec<u8> = Vec::new();
    for _ in 0..pre + per {
        if (y == h || y == upper) && !digits.is_empty() {
            let mut bits = digits.clone();
            bits.push(1);
            let cand = Word::new(bits)?;
            if is_primitive(&cand, Method::Definition) {
                let j = interval_of(&cand)?;
                if j.r == *alpha {
                    let half_len = cand.len() / 2;
                    if cand.len() % 2 == 0 && half_len >= 2 {
                        let base = cand.prefix(half_len);
                        if is_primitive(&base, Method::Definition) && base.psi()? == cand {
                            return Ok(Location::Boundary {
                                omega: base,
                                side: Side::Left,
                            });
                        }
                    }
                    return Ok(Location::Boundary {
                        omega: cand,
                        side: Side::Right,
                    });
                }
                if j.l == *alpha {
                    return Ok(Location::Boundary {
                        omega: cand,
                        side: Side::Left,
                    });
                }
            }
        }
        let (next, d) = crate::dynamics::s_alpha_step(&y, alpha)?;
        if d < 0 {
            break;
        }
        digits.push(d as u8);
        y = next;
    }
    Ok(Location::NonMatching)
}

/// Whether the intervals are pairwise disjoint.
pub fn pairwise_disjoint(intervals: &[MatchingInterval]) -> bool {
    let mut v: Vec<&MatchingInterval> = intervals.iter().collect();
    v.sort_by(|a, b| a.l.cmp(&b.l));
    v.windows(2).all(|p| p[0].r <= p[1].l)
}

/// Exact total length of the disjoint union of `J_ω`, `|ω| ≤ max_len`.
pub fn total_length(intervals: &[MatchingInterval]) -> Rational {
    intervals
        .iter()
        .fold(Rational::zero(), |acc, j| acc + j.length())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn primitive_examples() {
        for m in [Method::Definition, Method::Cf, Method::Dynamic] {
            assert!(is_primitive(&w("11"), m));
            assert!(is_primitive(&w("111011"), m));
            assert!(!is_primitive(&w("1110"), m));
            assert!(!is_primitive(&w("110011"), m), "{m:?}");
        }
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_primitive(2), vec![w("11")]);
        let four = enumerate_primitive(4);
        for s in ["11", "111", "1101", "1111"] {
            assert!(four.contains(&w(s)), "{s}");
        }
        assert!(!four.contains(&w("1011")));
        assert!(enumerate_primitive(6).contains(&w("111011")));
        let seq = enumerate_primitive_with(10, Execution::Sequential);
        assert_eq!(seq, enumerate_primitive_with(10, Execution::Parallel));
        assert!(seq.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn interval_examples() {
        let j = matching_interval(&w("11")).unwrap();
        assert_eq!((j.l.clone(), j.r.clone()), (rat(5, 4), rat(3, 2)));
        let j = matching_interval(&w("1101")).unwrap();
        assert_eq!((j.l.clone(), j.r.clone()), (rat(17, 14), rat(5, 4)));
        let j = matching_interval(&w("111011")).unwrap();
        assert_eq!((j.l.clone(), j.r.clone()), (rat(13, 12), rat(63, 58)));
        assert!(matches!(matching_interval(&w("1011")), Err(Error::NotPrimitive(_))));
    }

    #[test]
    fn boundary_examples() {
        let (l, r) = boundary_sequences(&w("11")).unwrap();
        assert_eq!(l.period, vec![1, 1, 0, 0]);
        assert_eq!(r.period, vec![1, 0]);
        for s in ["11", "1101", "111011"] {
            assert!(check_boundary_sequences(&w(s)).unwrap(), "{s}");
        }
        let (l, r) = boundary_sequences(&w("111011")).unwrap();
        assert_eq!(l.to_string(), "(111011000100)^∞");
        assert_eq!(r.to_string(), "(111010)^∞");
    }

    #[test]
    fn cascade_examples() {
        let c = cascade(&w("11"), 1).unwrap();
        assert_eq!(c[0].l, rat(5, 4));
        assert_eq!(c[1].r, rat(5, 4));
        let c = cascade(&w("11"), 2).unwrap();
        assert_eq!(c[2].r, rat(17, 14));
        let c = cascade(&w("111011"), 1).unwrap();
        assert_eq!(c[1].r, rat(13, 12));
    }

    #[test]
    fn limit_of_eleven() {
        // Thue–Morse oracle: t_n = popcount(n − 1) mod 2, shifted by one place
        let p_star: f64 = (1..60u32).map(|n| ((n - 1).count_ones() % 2) as f64 / 2f64.powi(n as i32)).sum();
        assert!((p_star - 0.412454).abs() < 5e-7);
        let e = cascade_limit(&w("11"), 40).unwrap();
        assert!(e.width() < inv_pow2(40));
        let v = crate::rational::to_f64(&e.approx);
        assert!((v - 1.0 / (2.0 * p_star)).abs() < 1e-11, "{v}");
        let deeper = cascade_limit(&w("1101"), 40).unwrap();
        assert_eq!(deeper.approx, e.approx);
        let p = p_omega(&w("11"), 40).unwrap();
        assert!((crate::rational::to_f64(&p.approx) - 2.0 * p_star).abs() < 1e-11);
    }

    #[test]
    fn locate_examples() {
        match locate(&rat(4, 3)).unwrap() {
            Location::Interval(j) => assert_eq!(j.omega, w("11")),
            other => panic!("{other:?}"),
        }
        match locate(&rat(1024, 945)).unwrap() {
            Location::Interval(j) => assert_eq!(j.omega, w("111011")),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            locate(&rat(3, 2)).unwrap(),
            Location::Boundary {
                omega: w("11"),
                side: Side::Right
            }
        );
        assert_eq!(
            locate(&rat(5, 4)).unwrap(),
            Location::Boundary {
                omega: w("11"),
                side: Side::Left
            }
        );
        assert_eq!(locate(&rat(7, 4)).unwrap(), Location::HighRegion);
        assert_eq!(locate(&rat(6, 5)).unwrap(), Location::NonMatching);
    }
}
