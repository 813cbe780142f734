//! Exact iteration of `S_α(x) = 2x − dα` and the auxiliary interval maps.

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::rational::{half, int, Rational};
use crate::word::Word;

fn check_alpha(alpha: &Rational) -> Result<()> {
    if *alpha < int(1) || *alpha > int(2) {
        return domain(format!("alpha must lie in [1, 2], got {alpha}"));
    }
    Ok(())
}

/// Branch digit: 0 on the closed middle interval `[−1/2, 1/2]`.
pub fn digit(x: &Rational) -> i8 {
    let h = half();
    if *x < -h.clone() {
        -1
    } else if *x <= h {
        0
    } else {
        1
    }
}

fn step_unchecked(x: &Rational, alpha: &Rational) -> (Rational, i8) {
    let d = digit(x);
    let y = match d {
        -1 => x * int(2) + alpha,
        0 => x * int(2),
        _ => x * int(2) - alpha,
    };
    (y, d)
}

/// One step of `S_α`, returning the image and its digit.
pub fn s_alpha_step(x: &Rational, alpha: &Rational) -> Result<(Rational, i8)> {
    check_alpha(alpha)?;
    if x.abs() > int(1) {
        return domain(format!("x must lie in [-1, 1], got {x}"));
    }
    Ok(step_unchecked(x, alpha))
}

/// `S_α^n(x)` without domain checks; callers have already validated.
pub(crate) fn iterate(x: &Rational, alpha: &Rational, n: usize) -> Rational {
    let mut y = x.clone();
    for _ in 0..n {
        y = step_unchecked(&y, alpha).0;
    }
    y
}

/// The orbit `x, S x, …, S^{n} x` (n + 1 points).
pub fn orbit(x: &Rational, alpha: &Rational, n: usize) -> Result<Vec<Rational>> {
    s_alpha_step(x, alpha)?;
    let mut out = Vec::with_capacity(n + 1);
    let mut y = x.clone();
    out.push(y.clone());
    for _ in 0..n {
        y = step_unchecked(&y, alpha).0;
        out.push(y.clone());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuxMap {
    /// `x ↦ 2x mod 1` on `[0, 1)`.
    Doubling,
    /// `x ↦ 2x` on `[0, 1/2]`, `2 − 2x` on `(1/2, 1]`.
    Tent,
    /// `x ↦ x/(1−x)` on `[0, 1/2]`, `(1−x)/x` on `(1/2, 1]`.
    Farey,
    /// `x ↦ 1/x mod 1`, with `0 ↦ 0`.
    Gauss,
}

pub fn aux_map_step(kind: AuxMap, x: &Rational) -> Result<Rational> {
    if x.is_negative() || *x > int(1) {
        return domain(format!("x must lie in [0, 1], got {x}"));
    }
    let h = half();
    Ok(match kind {
        AuxMap::Doubling => {
            if x.is_one() {
                return domain("doubling map is defined on [0, 1)");
            }
            let y = x * int(2);
            if y >= int(1) {
                y - int(1)
            } else {
                y
            }
        }
        AuxMap::Tent => {
            if *x <= h {
                x * int(2)
            } else {
                int(2) - x * int(2)
            }
        }
        AuxMap::Farey => {
            if *x <= h {
                x / (int(1) - x)
            } else {
                (int(1) - x) / x
            }
        }
        AuxMap::Gauss => {
            if x.is_zero() {
                Rational::zero()
            } else {
                x.recip().fract()
            }
        }
    })
}

/// Eventually periodic sequence over {−1, 0, 1}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignedDigitSeq {
    pub preperiod: Vec<i8>,
    /// Empty iff `truncated`.
    pub period: Vec<i8>,
    pub truncated: bool,
}

impl SignedDigitSeq {
    pub fn periodic(preperiod: Vec<i8>, period: Vec<i8>) -> Self {
        SignedDigitSeq {
            preperiod,
            period,
            truncated: false,
        }
        .canonical()
    }

    /// Digit `n` (1-based), or `None` past a truncated prefix.
    pub fn digit(&self, n: usize) -> Option<i8> {
        let i = n.checked_sub(1)?;
        if i < self.preperiod.len() {
            return Some(self.preperiod[i]);
        }
        if self.period.is_empty() {
            return None;
        }
        Some(self.period[(i - self.preperiod.len()) % self.period.len()])
    }

    /// First `n` digits, shorter if the sequence is a truncated prefix.
    pub fn prefix(&self, n: usize) -> Vec<i8> {
        (1..=n).map_while(|k| self.digit(k)).collect()
    }

    /// Shortest period, then shortest preperiod.
    pub fn canonical(mut self) -> Self {
        if self.period.is_empty() {
            return self;
        }
        let p = self.period.len();
        for d in 1..=p {
            if p % d == 0 && (0..p).all(|i| self.period[i] == self.period[i % d]) {
                self.period.truncate(d);
                break;
            }
        }
        while let Some(&last) = self.preperiod.last() {
            if last != *self.period.last().unwrap() {
                break;
            }
            self.preperiod.pop();
            self.period.rotate_right(1);
        }
        self
    }

    /// `σ^n(d) ⪯ d` for every shift, checked on the first `len` digits.
    pub fn satisfies_shift_condition(&self, len: usize) -> bool {
        let p = self.prefix(len);
        (1..p.len()).all(|n| p[n..] <= p[..p.len() - n])
    }
}

fn fmt_digits(f: &mut fmt::Formatter<'_>, ds: &[i8]) -> fmt::Result {
    for &d in ds {
        match d {
            -1 => write!(f, "\u{0305}1")?,
            d => write!(f, "{d}")?,
        }
    }
    Ok(())
}

impl fmt::Display for SignedDigitSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_digits(f, &self.preperiod)?;
        if self.truncated {
            write!(f, "…")
        } else {
            write!(f, "(")?;
            fmt_digits(f, &self.period)?;
            write!(f, ")^∞")
        }
    }
}

/// Digit sequence `d_α(x)` with exact cycle detection.
pub fn signed_digit_sequence(x: &Rational, alpha: &Rational, max_steps: usize) -> Result<SignedDigitSeq> {
    s_alpha_step(x, alpha)?;
    let mut seen: HashMap<Rational, usize> = HashMap::new();
    let mut digits = Vec::new();
    let mut y = x.clone();
    for n in 0..max_steps {
        if let Some(&start) = seen.get(&y) {
            let period = digits.split_off(start);
            return Ok(SignedDigitSeq::periodic(digits, period));
        }
        seen.insert(y.clone(), n);
        let (next, d) = step_unchecked(&y, alpha);
        digits.push(d);
        y = next;
    }
    if let Some(&start) = seen.get(&y) {
        let period = digits.split_off(start);
        return Ok(SignedDigitSeq::periodic(digits, period));
    }
    Ok(SignedDigitSeq {
        preperiod: digits,
        period: Vec::new(),
        truncated: true,
    })
}

/// Outcome of following the orbit of 1 for rational α.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum MatchingResult {
    /// First matching at step `m`; `prefix` holds the digits `d_1 … d_m`.
    Matched { m: usize, prefix: Word },
    /// The critical orbit lands on a branch boundary, giving a Markov partition.
    MarkovNoMatch {
        preperiod: usize,
        period: usize,
        hit_half: bool,
    },
    /// The orbit of 1 cycles without entering the hole.
    CycleNoMatch { preperiod: usize, period: usize },
}

impl MatchingResult {
    pub fn matched(&self) -> Option<(usize, &Word)> {
        match self {
            MatchingResult::Matched { m, prefix } => Some((*m, prefix)),
            _ => None,
        }
    }

    pub fn status(&self) -> &'static str {
        match self {
            MatchingResult::Matched { .. } => "matched",
            MatchingResult::MarkovNoMatch { .. } => "markov_no_match",
            MatchingResult::CycleNoMatch { .. } => "cycle_no_match",
        }
    }
}

/// Exact matching index for rational `α ∈ (1, 2]`.
pub fn matching_index(alpha: &Rational) -> Result<MatchingResult> {
    if *alpha <= int(1) || *alpha > int(2) {
        return domain(format!("matching_index needs alpha in (1, 2], got {alpha}"));
    }
    let h = half();
    let upper = alpha - &h;
    // lattice (1/q)Z ∩ [−1, 1] has 2q + 1 points
    let cap = alpha
        .denom()
        .to_usize()
        .map_or(usize::MAX, |q| q.saturating_mul(4).saturating_add(4));
    let mut seen: HashMap<Rational, usize> = HashMap::new();
    let mut digits: Vec<i8> = Vec::new();
    let mut y = int(1);
    let mut boundary = false;
    for n in 0..cap {
        if let Some(&start) = seen.get(&y) {
            let (preperiod, period) = (start, n - start);
            return Ok(if boundary {
                MatchingResult::MarkovNoMatch {
                    preperiod,
                    period,
                    hit_half: true,
                }
            } else {
                MatchingResult::CycleNoMatch { preperiod, period }
            });
        }
        if !boundary && y > h && y < upper {
            let mut bits = Vec::with_capacity(digits.len() + 1);
            for &d in digits.iter().chain(std::iter::once(&1)) {
                if d < 0 {
                    return Err(Error::Inconsistent(format!(
                        "negative digit before matching for alpha = {alpha}"
                    )));
                }
                bits.push(d as u8);
            }
            return Ok(MatchingResult::Matched {
                m: n + 1,
                prefix: Word::new(bits)?,
            });
        }
        // S^n(1) = 1/2, or S^n(1) = α − 1/2 which puts S^n(1 − α) at −1/2
        if y == h || y == upper {
            boundary = true;
        }
        seen.insert(y.clone(), n);
        let (next, d) = step_unchecked(&y, alpha);
        digits.push(d);
        y = next;
    }
    Err(Error::Inconsistent(format!(
        "orbit of 1 did not close within {cap} steps for alpha = {alpha}"
    )))
}

/// Follows the orbit of 1 for at most `max_steps` points and returns `(m, d_1 … d_m)`
/// if it enters the open hole `(1/2, α − 1/2)`. A boundary hit ends the search.
pub fn matching_within(alpha: &Rational, max_steps: usize) -> Option<(usize, Vec<i8>)> {
    let h = half();
    let upper = alpha - &h;
    let mut y = int(1);
    let mut digits = Vec::new();
    for n in 0..max_steps {
        if y > h && y < upper {
            digits.push(1);
            return Some((n + 1, digits));
        }
        if y == h || y == upper {
            return None;
        }
        let (next, d) = step_unchecked(&y, alpha);
        digits.push(d);
        y = next;
    }
    None
}

/// Result of checking the two-orbit and doubling-map identities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitReport {
    pub checked_up_to: usize,
    pub matched_at: Option<usize>,
    /// First index where an identity failed.
    pub first_failure: Option<usize>,
}

impl OrbitReport {
    pub fn pass(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Checks `S^n(1) − S^n(1−α) ∈ {α, 0}` (α before matching, 0 at matching),
/// `S^n(1) = α D^n(1/α)` before matching, and that the digits of `1` agree
/// with the binary digits of `1/α`.
pub fn verify_orbit_identities(alpha: &Rational, n_max: usize) -> Result<OrbitReport> {
    if *alpha <= int(1) || *alpha >= Rational::new(3.into(), 2.into()) {
        return domain(format!("orbit identities are checked for alpha in (1, 3/2), got {alpha}"));
    }
    let m = matching_index(alpha)?.matched().map(|(m, _)| m);
    let last = m.map_or(n_max, |m| m.min(n_max));
    let mut a = int(1);
    let mut b = int(1) - alpha;
    let mut dbl = alpha.recip();
    let mut first_failure = None;
    for n in 0..=last {
        let diff = &a - &b;
        let expected = if Some(n) == m { Rational::zero() } else { alpha.clone() };
        let mut ok = diff == expected;
        if m.is_none_or(|m| n < m) {
            ok &= a == alpha * &dbl;
        }
        let (na, d) = step_unchecked(&a, alpha);
        if m.is_none_or(|m| n + 1 < m) && n < last {
            // d_{n+1}(1) against b_{n+1}(1/α)
            let bit = if dbl >= half() { 1 } else { 0 };
            ok &= d == bit;
        }
        if !ok {
            first_failure = Some(n);
            break;
        }
        a = na;
        b = step_unchecked(&b, alpha).0;
        dbl = aux_map_step(AuxMap::Doubling, &dbl)?;
    }
    Ok(OrbitReport {
        checked_up_to: last,
        matched_at: m,
        first_failure,
    })
}

/// `T^k(x) ≤ x` for every `k ≥ 1`, decided on the eventually periodic tent orbit.
pub fn lambda_membership(x: &Rational) -> Result<bool> {
    if x.is_negative() || *x > int(1) {
        return domain(format!("x must lie in [0, 1], got {x}"));
    }
    let mut seen = std::collections::HashSet::new();
    let mut y = aux_map_step(AuxMap::Tent, x)?;
    while seen.insert(y.clone()) {
        if y > *x {
            return Ok(false);
        }
        y = aux_map_step(AuxMap::Tent, &y)?;
    }
    Ok(true)
}

/// Membership of a rational parameter in the non-matching set.
pub fn is_non_matching(alpha: &Rational) -> Result<bool> {
    Ok(matching_index(alpha)?.matched().is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn step_examples() {
        assert_eq!(s_alpha_step(&int(1), &rat(3, 2)).unwrap(), (rat(1, 2), 1));
        assert_eq!(s_alpha_step(&rat(-1, 5), &rat(6, 5)).unwrap(), (rat(-2, 5), 0));
        assert_eq!(s_alpha_step(&rat(2, 3), &rat(4, 3)).unwrap(), (int(0), 1));
        assert_eq!(s_alpha_step(&rat(1, 2), &rat(4, 3)).unwrap().1, 0);
        assert_eq!(s_alpha_step(&rat(-1, 2), &rat(4, 3)).unwrap().1, 0);
        assert!(s_alpha_step(&rat(3, 2), &rat(4, 3)).is_err());
        assert!(s_alpha_step(&int(0), &rat(5, 2)).is_err());
    }

    #[test]
    fn aux_examples() {
        assert_eq!(aux_map_step(AuxMap::Tent, &rat(2, 3)).unwrap(), rat(2, 3));
        assert_eq!(aux_map_step(AuxMap::Farey, &rat(2, 3)).unwrap(), rat(1, 2));
        assert_eq!(aux_map_step(AuxMap::Doubling, &rat(945, 1024)).unwrap(), rat(433, 512));
        assert_eq!(aux_map_step(AuxMap::Gauss, &rat(3, 11)).unwrap(), rat(2, 3));
        assert!(aux_map_step(AuxMap::Doubling, &int(1)).is_err());
    }

    #[test]
    fn digit_sequence_examples() {
        let d = signed_digit_sequence(&int(1), &rat(6, 5), 100).unwrap();
        assert_eq!((d.preperiod.clone(), d.period.clone()), (vec![1], vec![1, 0]));
        let d = signed_digit_sequence(&int(1), &rat(1024, 945), 100).unwrap();
        assert_eq!(d.preperiod, vec![1, 1, 1, 0, 1, 1, 0, 0, 0, 1]);
        assert_eq!(d.period, vec![0]);
        assert_eq!(d.to_string(), "1110110001(0)^∞");
        let d = signed_digit_sequence(&int(1), &rat(3, 2), 100).unwrap();
        assert_eq!(d.period, vec![1, 0]);
        let d = signed_digit_sequence(&int(1), &rat(1024, 945), 3).unwrap();
        assert!(d.truncated);
        assert_eq!(d.prefix(10), vec![1, 1, 1]);
    }

    #[test]
    fn matching_examples() {
        assert_eq!(matching_index(&rat(7, 4)).unwrap().matched().unwrap().0, 1);
        let r = matching_index(&rat(1024, 945)).unwrap();
        let (m, p) = r.matched().unwrap();
        assert_eq!((m, p.to_string().as_str()), (6, "111011"));
        assert!(matches!(
            matching_index(&rat(6, 5)).unwrap(),
            MatchingResult::CycleNoMatch { .. }
        ));
        assert!(matches!(
            matching_index(&rat(3, 2)).unwrap(),
            MatchingResult::MarkovNoMatch { hit_half: true, .. }
        ));
        assert_eq!(matching_index(&int(2)).unwrap().matched().unwrap().0, 1);
        assert_eq!(matching_index(&rat(4, 3)).unwrap().matched().unwrap().0, 2);
        assert!(matching_index(&int(1)).is_err());
    }

    #[test]
    fn orbit_identity_examples() {
        for a in [rat(4, 3), rat(1024, 945)] {
            assert!(verify_orbit_identities(&a, 10).unwrap().pass(), "{a}");
        }
        let r = verify_orbit_identities(&rat(6, 5), 50).unwrap();
        assert!(r.pass());
        assert_eq!(r.matched_at, None);
        assert_eq!(r.checked_up_to, 50);
    }

    #[test]
    fn lambda_examples() {
        assert!(lambda_membership(&rat(4, 5)).unwrap());
        assert!(lambda_membership(&rat(2, 3)).unwrap());
        assert!(!lambda_membership(&rat(3, 5)).unwrap());
    }

    #[test]
    fn canonical_sequences() {
        let s = SignedDigitSeq::periodic(vec![1, 0, 1, 0], vec![1, 0, 1, 0]);
        assert_eq!((s.preperiod, s.period), (vec![], vec![1, 0]));
    }
}
