//! Exact rational helpers on top of `num_rational::BigRational`.

use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// `p/q` as an exact rational. Panics if `q == 0`.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn half() -> Rational {
    rat(1, 2)
}

/// `2^k` as a big integer.
pub fn pow2(k: usize) -> BigInt {
    BigInt::one() << k
}

/// `2^{-k}` as a rational.
pub fn inv_pow2(k: usize) -> Rational {
    Rational::new(BigInt::one(), pow2(k))
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"1.25"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        if fp.is_empty() || !fp.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = ip.starts_with('-');
        let digits = format!("{}{}", ip.trim_start_matches(['-', '+']), fp);
        let mut n = BigInt::from_str(&digits).map_err(|_| bad())?;
        if neg {
            n = -n;
        }
        let d = num_traits::pow(BigInt::from(10), fp.len());
        return Ok(Rational::new(n, d));
    }
    BigInt::from_str(s).map(Rational::from_integer).map_err(|_| bad())
}

/// Formats as `"p/q"` (or `"p"` for integers).
pub fn fmt_ratio(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) fn ser_ratio<S: serde::Serializer>(r: &Rational, s: S) -> core::result::Result<S::Ok, S::Error> {
    s.collect_str(&fmt_ratio(r))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Rescale huge numerator/denominator pairs before converting.
        let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000) as usize;
        let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Decimal rendering with `sig` significant digits, rounded half away from zero.
pub fn to_decimal(r: &Rational, sig: usize) -> String {
    let sig = sig.max(1);
    if r.is_zero() {
        return "0".to_string();
    }
    let neg = r.is_negative();
    let a = r.abs();
    // exponent e with 10^e <= a < 10^{e+1}
    let mut e = (a.numer().bits() as i64 - a.denom().bits() as i64) * 3 / 10;
    let ten = Rational::from_integer(BigInt::from(10));
    let pow10 = |k: i64| -> Rational {
        if k >= 0 {
            num_traits::pow(ten.clone(), k as usize)
        } else {
            num_traits::pow(ten.clone(), (-k) as usize).recip()
        }
    };
    while pow10(e) > a {
        e -= 1;
    }
    while pow10(e + 1) <= a {
        e += 1;
    }
    let scale = sig as i64 - 1 - e;
    let scaled = &a * pow10(scale);
    let (q, rem) = scaled.numer().div_rem(scaled.denom());
    let mut digits = q;
    if rem * BigInt::from(2) >= *scaled.denom() {
        digits += 1;
    }
    let mut ds = digits.to_string();
    let mut scale = scale;
    if ds.len() > sig {
        // rounding carried into a new leading digit
        ds.pop();
        scale -= 1;
    }
    let mut out = if scale <= 0 {
        let zeros = "0".repeat((-scale) as usize);
        format!("{ds}{zeros}")
    } else if (scale as usize) >= ds.len() {
        let zeros = "0".repeat(scale as usize - ds.len());
        format!("0.{zeros}{ds}")
    } else {
        let split = ds.len() - scale as usize;
        format!("{}.{}", &ds[..split], &ds[split..])
    };
    if out.contains('.') {
        while out.ends_with('0') {
            out.pop();
        }
        if out.ends_with('.') {
            out.pop();
        }
    }
    if neg {
        out.insert(0, '-');
    }
    out
}

/// Value of the binary word `b_1 … b_k` read as `.b_1…b_k`.
pub fn binary_value(bits: &[u8]) -> Rational {
    Rational::new(BigInt::from(binary_integer(bits)), pow2(bits.len()))
}

/// `b_1 2^{k-1} + … + b_k`.
pub fn binary_integer(bits: &[u8]) -> BigUint {
    let mut x = BigUint::zero();
    for &b in bits {
        x <<= 1usize;
        if b == 1 {
            x += 1u32;
        }
    }
    x
}

pub(crate) fn biguint_to_int(x: BigUint) -> BigInt {
    BigInt::from_biguint(Sign::Plus, x)
}

/// Exact sum using a balanced tree of unreduced fractions and one final reduction.
pub fn sum_exact(terms: Vec<Rational>) -> Rational {
    let mut level: Vec<(BigInt, BigInt)> = terms
        .into_iter()
        .map(|r| {
            let (n, d) = r.into_raw();
            (n, d)
        })
        .collect();
    if level.is_empty() {
        return Rational::zero();
    }
    while level.len() > 1 {
        level = level
            .chunks(2)
            .map(|c| match c {
                [(a, b), (x, y)] => (a * y + x * b, b * y),
                [one] => one.clone(),
                _ => unreachable!(),
            })
            .collect();
    }
    let (n, d) = level.pop().unwrap();
    Rational::new(n, d)
}

/// Rationals `lo, lo+step, …, ≤ hi`.
pub fn grid(lo: &Rational, hi: &Rational, step: &Rational) -> Result<Vec<Rational>> {
    if !step.is_positive() {
        return Err(Error::Parse("grid step must be positive".into()));
    }
    if hi < lo {
        return Err(Error::Parse("grid upper bound below lower bound".into()));
    }
    let count = ((hi - lo) / step).floor().to_integer();
    let count = count
        .to_usize()
        .filter(|&c| c < 10_000_000)
        .ok_or_else(|| Error::Parse("grid too large".into()))?;
    Ok((0..=count)
        .map(|k| lo + step * Rational::from_integer(BigInt::from(k)))
        .collect())
}

/// All reduced `p/q` in the closed interval `[lo, hi]` with `q <= max_den`, sorted.
pub fn farey_points(lo: &Rational, hi: &Rational, max_den: u64) -> Vec<Rational> {
    let mut out = Vec::new();
    for q in 1..=max_den {
        let qb = BigInt::from(q);
        let pmin = (lo * Rational::from_integer(qb.clone())).ceil().to_integer();
        let pmax = (hi * Rational::from_integer(qb.clone())).floor().to_integer();
        let mut p = pmin;
        while p <= pmax {
            if p.gcd(&qb).is_one() {
                out.push(Rational::new(p.clone(), qb.clone()));
            }
            p += 1;
        }
    }
    out.sort();
    out
}
