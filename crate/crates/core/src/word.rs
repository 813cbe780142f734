//! Finite binary blocks.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::binary_integer;

/// A nonempty finite word over {0, 1}.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::Domain("empty word".into()));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Domain("word symbols must be 0 or 1".into()));
        }
        Ok(Word(bits))
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `ω_1 2^{m-1} + … + ω_m`.
    pub fn x_m(&self) -> BigUint {
        binary_integer(&self.0)
    }

    /// `x_n` for the prefix of length `n`.
    pub fn x_n(&self, n: usize) -> BigUint {
        binary_integer(&self.0[..n])
    }

    pub fn complement(&self) -> Word {
        Word(self.0.iter().map(|b| 1 - b).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n].to_vec())
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    /// `ω · (1−ω_1)…(1−ω_{m−1}) · 1`.
    pub fn psi(&self) -> Result<Word> {
        let m = self.len();
        if m < 2 {
            return Err(Error::Domain(format!("psi needs length >= 2, got {self}")));
        }
        let mut v = Vec::with_capacity(2 * m);
        v.extend_from_slice(&self.0);
        v.extend(self.0[..m - 1].iter().map(|b| 1 - b));
        v.push(1);
        Ok(Word(v))
    }

    /// `ψ^n(ω)`.
    pub fn psi_pow(&self, n: usize) -> Result<Word> {
        let mut w = self.clone();
        for _ in 0..n {
            w = w.psi()?;
        }
        Ok(w)
    }

    /// Run-length decomposition `1^{ℓ1} 0^{ℓ2} … 0^{ℓ_{2n}} 1`.
    pub fn ell_decomposition(&self) -> Result<EllDecomposition> {
        let b = &self.0;
        if b[0] != 1 || b[b.len() - 1] != 1 {
            return Err(Error::Domain(format!(
                "ell decomposition needs a word starting and ending in 1, got {self}"
            )));
        }
        let body = &b[..b.len() - 1];
        let mut runs: Vec<u64> = Vec::new();
        let mut i = 0;
        while i < body.len() {
            let s = body[i];
            let start = i;
            while i < body.len() && body[i] == s {
                i += 1;
            }
            runs.push((i - start) as u64);
        }
        if runs.len() % 2 == 1 || runs.is_empty() {
            runs.push(0);
        }
        if runs.len() == 1 {
            runs.insert(0, 0);
        }
        Ok(EllDecomposition { runs })
    }

    /// Lexicographic order in which a proper prefix precedes its extensions.
    pub fn lex_cmp(&self, other: &Word) -> Ordering {
        lex_cmp(&self.0, &other.0)
    }
}

/// Lexicographic comparison of finite words; a proper prefix is smaller.
pub fn lex_cmp(a: &[u8], b: &[u8]) -> Ordering {
    a.cmp(b)
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl FromStr for Word {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Parse(format!("not a binary word: {s:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Word::new(bits).map_err(|_| Error::Parse(format!("not a binary word: {s:?}")))
    }
}

impl TryFrom<String> for Word {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Word> for String {
    fn from(w: Word) -> String {
        w.to_string()
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by length first, then lexicographically. This is the catalog order.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

/// Run lengths `ℓ1, …, ℓ_{2n}`; the last entry may be 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EllDecomposition {
    pub runs: Vec<u64>,
}

impl EllDecomposition {
    pub fn reconstruct(&self) -> Word {
        let mut v = Vec::new();
        for (i, &r) in self.runs.iter().enumerate() {
            let s = if i % 2 == 0 { 1 } else { 0 };
            v.extend(std::iter::repeat_n(s, r as usize));
        }
        v.push(1);
        Word(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn psi_examples() {
        assert_eq!(w("11").psi().unwrap(), w("1101"));
        assert_eq!(w("1101").psi().unwrap(), w("11010011"));
        assert_eq!(w("111011").psi().unwrap(), w("111011000101"));
        assert!(w("1").psi().is_err());
    }

    #[test]
    fn ell_examples() {
        assert_eq!(w("111011").ell_decomposition().unwrap().runs, vec![3, 1, 1, 0]);
        assert_eq!(w("11").ell_decomposition().unwrap().runs, vec![1, 0]);
        assert_eq!(w("1101").ell_decomposition().unwrap().runs, vec![2, 1]);
        assert!(w("1110").ell_decomposition().is_err());
    }

    #[test]
    fn x_m_is_binary_value() {
        assert_eq!(w("111011").x_m(), BigUint::from(59u32));
        assert_eq!(w("111011").x_n(5), BigUint::from(29u32));
    }

    #[test]
    fn prefix_is_smaller() {
        assert_eq!(lex_cmp(&[1, 1], &[1, 1, 0]), Ordering::Less);
        assert_eq!(lex_cmp(&[1, 1, 0], &[1, 0, 1, 1]), Ordering::Greater);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("12".parse::<Word>().is_err());
        assert!("".parse::<Word>().is_err());
    }
}
