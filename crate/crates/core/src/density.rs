//! Piecewise-constant densities on `[−1, 1]` and the transfer operator of `S_α`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{Signed, Zero};

use crate::dynamics::{iterate, matching_index, s_alpha_step};
use crate::error::{domain, Error, Result};
use crate::rational::{fmt_ratio, half, int, inv_pow2, pow2, Rational};

/// Step function on `[−1, 1]`: `values[i]` holds on `[breakpoints[i], breakpoints[i+1])`.
/// Adjacent cells always carry different values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseConstantFn {
    breakpoints: Vec<Rational>,
    values: Vec<Rational>,
}

/// One weighted indicator `w · 1_[lo, hi)`.
pub type Indicator = (Rational, Rational, Rational);

impl PiecewiseConstantFn {
    pub fn new(breakpoints: Vec<Rational>, values: Vec<Rational>) -> Result<Self> {
        if breakpoints.len() != values.len() + 1 || values.is_empty() {
            return domain("need one more breakpoint than values");
        }
        if breakpoints[0] != int(-1) || *breakpoints.last().unwrap() != int(1) {
            return domain("breakpoints must span [-1, 1]");
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return domain("breakpoints must be strictly increasing");
        }
        Ok(PiecewiseConstantFn { breakpoints, values }.merged())
    }

    pub fn constant(c: Rational) -> Self {
        PiecewiseConstantFn {
            breakpoints: vec![int(-1), int(1)],
            values: vec![c],
        }
    }

    /// Sum of weighted indicators, clipped to `[−1, 1]`; reversed intervals are empty.
    pub fn from_indicators(terms: &[Indicator]) -> Self {
        let (lo_all, hi_all) = (int(-1), int(1));
        let clip = |x: &Rational| x.clone().max(lo_all.clone()).min(hi_all.clone());
        let mut delta: BTreeMap<Rational, Rational> = BTreeMap::new();
        delta.insert(lo_all.clone(), Rational::zero());
        delta.insert(hi_all.clone(), Rational::zero());
        for (w, lo, hi) in terms {
            let (lo, hi) = (clip(lo), clip(hi));
            if lo >= hi || w.is_zero() {
                continue;
            }
            *delta.entry(lo).or_insert_with(Rational::zero) += w;
            *delta.entry(hi).or_insert_with(Rational::zero) -= w;
        }
        let mut breakpoints = Vec::with_capacity(delta.len());
        let mut values = Vec::with_capacity(delta.len());
        let mut acc = Rational::zero();
        for (x, d) in delta {
            if !breakpoints.is_empty() {
                values.push(acc.clone());
            }
            acc += d;
            breakpoints.push(x);
        }
        PiecewiseConstantFn { breakpoints, values }.merged()
    }

    fn merged(self) -> Self {
        let mut bps = vec![self.breakpoints[0].clone()];
        let mut vals: Vec<Rational> = Vec::new();
        for (i, v) in self.values.into_iter().enumerate() {
            if vals.last() == Some(&v) {
                *bps.last_mut().unwrap() = self.breakpoints[i + 1].clone();
            } else {
                vals.push(v);
                bps.push(self.breakpoints[i + 1].clone());
            }
        }
        PiecewiseConstantFn {
            breakpoints: bps,
            values: vals,
        }
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn cells(&self) -> impl Iterator<Item = (&Rational, &Rational, &Rational)> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| (&self.breakpoints[i], &self.breakpoints[i + 1], v))
    }

    /// Value at `x`, right-continuous, with the last cell closed at 1.
    pub fn eval(&self, x: &Rational) -> Rational {
        let i = match self.breakpoints.binary_search(x) {
            Ok(i) => i.min(self.values.len() - 1),
            Err(i) => i.saturating_sub(1).min(self.values.len() - 1),
        };
        self.values[i].clone()
    }

    pub fn integral(&self) -> Rational {
        self.cells()
            .fold(Rational::zero(), |acc, (a, b, v)| acc + (b - a) * v)
    }

    pub fn integral_over(&self, lo: &Rational, hi: &Rational) -> Rational {
        self.cells().fold(Rational::zero(), |acc, (a, b, v)| {
            let a = a.max(lo);
            let b = b.min(hi);
            if b > a {
                acc + (b - a) * v
            } else {
                acc
            }
        })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        PiecewiseConstantFn {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
        .merged()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|v| !v.is_negative())
    }

    pub fn sup_norm(&self) -> Rational {
        self.values
            .iter()
            .map(|v| v.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

impl fmt::Display for PiecewiseConstantFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (a, b, v)) in self.cells().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[{}, {}): {}", fmt_ratio(a), fmt_ratio(b), fmt_ratio(v))?;
        }
        Ok(())
    }
}

/// Transfer operator `(𝓛f)(x) = ½(f(x/2) + 1_{(α−2,α−1)}(x) f((x−α)/2) + 1_{(1−α,2−α)}(x) f((x+α)/2))`.
pub fn pf_apply(f: &PiecewiseConstantFn, alpha: &Rational) -> Result<PiecewiseConstantFn> {
    if *alpha < int(1) || *alpha > int(2) {
        return domain(format!("alpha must lie in [1, 2], got {alpha}"));
    }
    let (lo, hi) = (int(-1), int(1));
    let two = int(2);
    let mut pts: Vec<Rational> = vec![lo.clone(), hi.clone()];
    for b in f.breakpoints() {
        let d = b * &two;
        pts.push(&d + alpha);
        pts.push(&d - alpha);
        pts.push(d);
    }
    pts.push(alpha - &two);
    pts.push(alpha - int(1));
    pts.push(int(1) - alpha);
    pts.push(&two - alpha);
    pts.retain(|x| *x >= lo && *x <= hi);
    pts.sort();
    pts.dedup();
    let (left_lo, left_hi) = (alpha - &two, alpha - int(1));
    let (right_lo, right_hi) = (int(1) - alpha, &two - alpha);
    let h = half();
    let values = pts
        .windows(2)
        .map(|w| {
            let x = (&w[0] + &w[1]) * &h;
            let mut s = f.eval(&(&x * &h));
            if x > left_lo && x < left_hi {
                s += f.eval(&((&x - alpha) * &h));
            }
            if x > right_lo && x < right_hi {
                s += f.eval(&((&x + alpha) * &h));
            }
            s * &h
        })
        .collect();
    PiecewiseConstantFn::new(pts, values)
}

/// `1/C = (1/(2α)) · 2^m/(2^m − 1)`.
pub fn normalizer(alpha: &Rational, m: usize) -> Rational {
    let p = Rational::from_integer(pow2(m));
    (alpha * int(2)).recip() * &p / (&p - int(1))
}

/// Finite density formula valid once the critical orbits have matched at step `m`.
pub fn density_closed_form(alpha: &Rational) -> Result<PiecewiseConstantFn> {
    if *alpha == int(1) {
        return Ok(PiecewiseConstantFn::constant(half()));
    }
    let m = match matching_index(alpha)?.matched() {
        Some((m, _)) => m,
        None => return Err(Error::NotMatching(fmt_ratio(alpha))),
    };
    let c = normalizer(alpha, m);
    let mut u = int(1);
    let mut v = int(1) - alpha;
    let mut terms = Vec::with_capacity(2 * m);
    for n in 0..m {
        let w = &c * inv_pow2(n + 1);
        terms.push((w.clone(), v.clone(), u.clone()));
        terms.push((w, -u.clone(), -v.clone()));
        u = s_alpha_step(&u, alpha)?.0;
        v = s_alpha_step(&v, alpha)?.0;
    }
    let h = PiecewiseConstantFn::from_indicators(&terms);
    if h.integral() != int(1) {
        return Err(Error::Inconsistent(format!(
            "closed-form density for alpha = {alpha} integrates to {}",
            h.integral()
        )));
    }
    Ok(h)
}

fn series_terms(u: &Rational, v: &Rational, w: &Rational, out: &mut Vec<Indicator>) {
    let m1 = int(-1);
    // 1[−1, S^n(α−1)) − 1[−1, S^n(−1)) + 1[−1, S^n 1) − 1[−1, S^n(1−α))
    out.push((w.clone(), m1.clone(), -v.clone()));
    out.push((-w.clone(), m1.clone(), -u.clone()));
    out.push((w.clone(), m1.clone(), u.clone()));
    out.push((-w.clone(), m1, v.clone()));
}

/// Partial sum of the density series, normalised by its own integral.
#[derive(Debug, Clone)]
pub struct SeriesDensity {
    pub density: PiecewiseConstantFn,
    pub depth: usize,
    /// Certified sup-norm distance to the exact density, when the partial
    /// integral is large enough to bound it.
    pub tail_bound: Option<Rational>,
}

pub fn density_series(alpha: &Rational, depth: usize) -> Result<SeriesDensity> {
    if *alpha < int(1) || *alpha > int(2) {
        return domain(format!("alpha must lie in [1, 2], got {alpha}"));
    }
    if depth == 0 {
        return domain("series depth must be positive");
    }
    let mut u = int(1);
    let mut v = int(1) - alpha;
    let mut terms = Vec::with_capacity(4 * depth);
    for n in 0..depth {
        series_terms(&u, &v, &inv_pow2(n + 1), &mut terms);
        u = s_alpha_step(&u, alpha)?.0;
        v = s_alpha_step(&v, alpha)?.0;
    }
    let f = PiecewiseConstantFn::from_indicators(&terms);
    let z = f.integral();
    if !z.is_positive() {
        return Err(Error::Inconsistent(format!("partial series for {alpha} has no mass")));
    }
    // each omitted term is bounded by 2^{-n}, so the tail is below e = 2^{1-N}
    // in sup norm and 2e in L1; Z moves by at most 2e
    let e = inv_pow2(depth) * int(2);
    let z_lo = &z - &e * int(2);
    let tail_bound = z_lo.is_positive().then(|| {
        let b = f.sup_norm();
        &e / &z_lo + b * &e * int(2) / (&z * &z_lo)
    });
    Ok(SeriesDensity {
        density: f.scale(&z.recip()),
        depth,
        tail_bound,
    })
}

/// Exact invariant density for rational `α ∈ [1, 2]` by summing the series over
/// the eventually periodic pair orbit `(S^n 1, S^n(1−α))`.
pub fn density_exact(alpha: &Rational) -> Result<PiecewiseConstantFn> {
    if *alpha < int(1) || *alpha > int(2) {
        return domain(format!("alpha must lie in [1, 2], got {alpha}"));
    }
    let mut seen: HashMap<(Rational, Rational), usize> = HashMap::new();
    let mut pts: Vec<(Rational, Rational)> = Vec::new();
    let mut state = (int(1), int(1) - alpha);
    while !seen.contains_key(&state) {
        seen.insert(state.clone(), pts.len());
        pts.push(state.clone());
        state = (iterate(&state.0, alpha, 1), iterate(&state.1, alpha, 1));
    }
    let pre = seen[&state];
    let per = pts.len() - pre;
    let boost = (int(1) - inv_pow2(per)).recip();
    let mut terms = Vec::with_capacity(4 * pts.len());
    for (n, (u, v)) in pts.iter().enumerate() {
        let mut w = inv_pow2(n + 1);
        if n >= pre {
            w *= &boost;
        }
        series_terms(u, v, &w, &mut terms);
    }
    let f = PiecewiseConstantFn::from_indicators(&terms);
    let z = f.integral();
    if !z.is_positive() {
        return Err(Error::Inconsistent(format!("density series for {alpha} has no mass")));
    }
    Ok(f.scale(&z.recip()))
}
