//! Ordinals below ω^ω in Cantor normal form.
//!
//! Text syntax uses `w` for ω: `0`, `5`, `w`, `w^2*3+w+5`. Sums are
//! normalized with ordinal addition, so `3+w` reads as `w`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// One `ω^exponent · coefficient` summand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CnfTerm {
    pub exponent: u32,
    pub coefficient: u64,
}

/// An ordinal `ω^e1·c1 + … + ω^ek·ck` with `e1 > … > ek` and every `ci ≥ 1`.
/// The empty term list is zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct OrdinalCnf {
    terms: Vec<CnfTerm>,
}

impl OrdinalCnf {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn finite(n: u64) -> Self {
        Self::from_terms([(0, n)])
    }

    pub fn omega() -> Self {
        Self::from_terms([(1, 1)])
    }

    /// Builds the ordinal sum of the given `(exponent, coefficient)` terms in
    /// order, so out-of-order input is absorbed the way ordinal addition does.
    pub fn from_terms<I: IntoIterator<Item = (u32, u64)>>(terms: I) -> Self {
        terms
            .into_iter()
            .fold(Self::zero(), |acc, (e, c)| acc.add_term(e, c))
    }

    pub fn terms(&self) -> &[CnfTerm] {
        &self.terms
    }

    /// `(exponent, coefficient)` pairs, highest exponent first.
    pub fn term_pairs(&self) -> Vec<(u32, u64)> {
        self.terms.iter().map(|t| (t.exponent, t.coefficient)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_limit(&self) -> bool {
        self.terms.last().is_some_and(|t| t.exponent > 0)
    }

    pub fn is_successor(&self) -> bool {
        self.terms.last().is_some_and(|t| t.exponent == 0)
    }

    pub fn as_finite(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [t] if t.exponent == 0 => Some(t.coefficient),
            _ => None,
        }
    }

    /// The `β` with `β + 1 = self`, if `self` is a successor.
    pub fn predecessor(&self) -> Option<Self> {
        if !self.is_successor() {
            return None;
        }
        let mut terms = self.terms.clone();
        let last = terms.last_mut().unwrap();
        last.coefficient -= 1;
        if last.coefficient == 0 {
            terms.pop();
        }
        Some(Self { terms })
    }

    pub fn leading_exponent(&self) -> Option<u32> {
        self.terms.first().map(|t| t.exponent)
    }

    /// `self + ω^exponent·coefficient`.
    pub fn add_term(mut self, exponent: u32, coefficient: u64) -> Self {
        if coefficient == 0 {
            return self;
        }
        while self.terms.last().is_some_and(|t| t.exponent < exponent) {
            self.terms.pop();
        }
        match self.terms.last_mut() {
            Some(t) if t.exponent == exponent => t.coefficient += coefficient,
            _ => self.terms.push(CnfTerm {
                exponent,
                coefficient,
            }),
        }
        self
    }

    /// Ordinal sum `self + other`.
    pub fn add(&self, other: &Self) -> Self {
        other
            .terms
            .iter()
            .fold(self.clone(), |acc, t| acc.add_term(t.exponent, t.coefficient))
    }

    /// `self · ω`: the leading term `ω^e` becomes `ω^(e+1)` and everything
    /// below it is absorbed. `0 · ω = 0`.
    pub fn times_omega(&self) -> Self {
        match self.leading_exponent() {
            None => Self::zero(),
            Some(e) => Self::from_terms([(e + 1, 1)]),
        }
    }

    /// Size measure used to enumerate ordinals: `Σ cᵢ·(eᵢ+1)`. Only finitely
    /// many ordinals share a weight once exponents are bounded.
    pub fn weight(&self) -> u64 {
        self.terms
            .iter()
            .map(|t| t.coefficient * (u64::from(t.exponent) + 1))
            .sum()
    }

    /// All ordinals of the given weight whose exponents are at most
    /// `max_exponent`, ascending.
    pub fn with_weight(weight: u64, max_exponent: u32) -> Vec<Self> {
        fn go(
            remaining: u64,
            max_exp: Option<u32>,
            prefix: &mut Vec<CnfTerm>,
            out: &mut Vec<OrdinalCnf>,
        ) {
            if remaining == 0 {
                out.push(OrdinalCnf {
                    terms: prefix.clone(),
                });
                return;
            }
            let Some(max_exp) = max_exp else { return };
            for e in (0..=max_exp).rev() {
                let unit = u64::from(e) + 1;
                for c in 1..=remaining / unit {
                    prefix.push(CnfTerm {
                        exponent: e,
                        coefficient: c,
                    });
                    go(remaining - c * unit, e.checked_sub(1), prefix, out);
                    prefix.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(weight, Some(max_exponent), &mut Vec::new(), &mut out);
        out.sort();
        out
    }

    /// Position of `beta` in the canonical enumeration of ordinals below
    /// `self`: ordered by weight, then by size. For `ω` this is the identity
    /// on naturals.
    pub fn index_below(&self, beta: &Self) -> Option<u64> {
        if beta >= self {
            return None;
        }
        let max_exp = self.leading_exponent().unwrap_or(0);
        let mut index = 0u64;
        for w in 0..beta.weight() {
            index += Self::with_weight(w, max_exp)
                .iter()
                .filter(|b| *b < self)
                .count() as u64;
        }
        let bucket = Self::with_weight(beta.weight(), max_exp);
        let pos = bucket
            .iter()
            .filter(|b| *b < self)
            .position(|b| b == beta)
            .expect("beta lies in its own weight bucket");
        Some(index + pos as u64)
    }

    /// The `index`-th ordinal below `self` in the enumeration of
    /// [`index_below`](Self::index_below).
    pub fn nth_below(&self, index: u64) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if let Some(n) = self.as_finite() {
            return (index < n).then(|| Self::finite(index));
        }
        let max_exp = self.leading_exponent().unwrap_or(0);
        let mut remaining = index;
        for w in 0.. {
            let bucket: Vec<_> = Self::with_weight(w, max_exp)
                .into_iter()
                .filter(|b| b < self)
                .collect();
            if remaining < bucket.len() as u64 {
                return Some(bucket[remaining as usize].clone());
            }
            remaining -= bucket.len() as u64;
        }
        unreachable!()
    }
}

impl Ord for OrdinalCnf {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            let ord = a
                .exponent
                .cmp(&b.exponent)
                .then(a.coefficient.cmp(&b.coefficient));
            if ord != Ordering::Equal {
                return ord;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for OrdinalCnf {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for OrdinalCnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            match (t.exponent, t.coefficient) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => f.write_str("w")?,
                (1, c) => write!(f, "w*{c}")?,
                (e, 1) => write!(f, "w^{e}")?,
                (e, c) => write!(f, "w^{e}*{c}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for OrdinalCnf {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self, Error> {
        let fail = |reason: &str| Error::Ordinal {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(fail("empty expression"));
        }
        let natural = |s: &str, what: &str| -> Result<u64, Error> {
            if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
                return Err(fail(&format!("expected a natural number for {what}")));
            }
            s.parse::<u64>()
                .map_err(|_| fail(&format!("{what} out of range")))
        };
        let mut acc = Self::zero();
        for summand in compact.split('+') {
            let (base, coeff) = match summand.split_once('*') {
                Some((b, c)) => (b, natural(c, "coefficient")?),
                None => (summand, 1),
            };
            let (exponent, coeff) = if let Some(rest) = base.strip_prefix('w') {
                let e = match rest.strip_prefix('^') {
                    Some(e) if e.starts_with('w') => {
                        return Err(fail("ordinals at or above w^w are not supported"))
                    }
                    Some(e) => natural(e, "exponent")?,
                    None if rest.is_empty() => 1,
                    None => return Err(fail(&format!("unexpected `{rest}`"))),
                };
                let e = u32::try_from(e).map_err(|_| fail("exponent out of range"))?;
                (e, coeff)
            } else {
                let k = natural(base, "term")?;
                (0, k.checked_mul(coeff).ok_or_else(|| fail("overflow"))?)
            };
            acc = acc.add_term(exponent, coeff);
        }
        Ok(acc)
    }
}

impl Serialize for OrdinalCnf {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for OrdinalCnf {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
