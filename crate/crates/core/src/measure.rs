//! Finite unions of subintervals of `[0, 1]` as a computable model of the
//! measure algebra of the unit interval, with the metric `lambda(A xor B)`,
//! the majority mixer, the parity co-mixer and the quotient identifying a
//! set with its complement.
//!
//! Endpoints are never computed, only compared, so every boolean operation
//! is exact. Open and closed endpoints are not distinguished.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ternary::group_comixer_1d;

/// A canonical finite union of intervals in `[0, 1]`: sorted, pairwise
/// separated by gaps of positive length, every interval of positive length.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
}

impl Eq for IntervalSet {}

impl Hash for IntervalSet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        for (lo, hi) in &self.intervals {
            lo.to_bits().hash(state);
            hi.to_bits().hash(state);
        }
    }
}

impl IntervalSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn full() -> Self {
        Self { intervals: vec![(0.0, 1.0)] }
    }

    /// Sorts and merges `raw`, dropping intervals of length zero.
    pub fn canonicalize(raw: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut items = Vec::new();
        for (lo, hi) in raw {
            if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
                return Err(Error::IntervalOutOfRange { lo, hi });
            }
            if lo < hi {
                // normalizes -0.0
                items.push((lo + 0.0, hi + 0.0));
            }
        }
        items.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
        let mut intervals: Vec<(f64, f64)> = Vec::with_capacity(items.len());
        for (lo, hi) in items {
            match intervals.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => intervals.push((lo, hi)),
            }
        }
        Ok(Self { intervals })
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Lebesgue measure.
    pub fn measure(&self) -> f64 {
        self.intervals.iter().fold(0.0, |acc, (lo, hi)| acc + (hi - lo))
    }

    pub fn complement(&self) -> Self {
        combine(&[self], |m| !m[0])
    }

    pub fn union(&self, other: &Self) -> Self {
        combine(&[self, other], |m| m[0] || m[1])
    }

    pub fn intersection(&self, other: &Self) -> Self {
        combine(&[self, other], |m| m[0] && m[1])
    }

    pub fn difference(&self, other: &Self) -> Self {
        combine(&[self, other], |m| m[0] && !m[1])
    }

    pub fn sym_diff(&self, other: &Self) -> Self {
        combine(&[self, other], |m| m[0] != m[1])
    }

    /// Lexicographic comparison of the interval lists; a proper prefix sorts first.
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        self.intervals
            .iter()
            .zip(&other.intervals)
            .map(|(x, y)| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)))
            .find(|o| o.is_ne())
            .unwrap_or_else(|| self.intervals.len().cmp(&other.intervals.len()))
    }
}

/// Sweeps the elementary cells cut out by all endpoints of `sets` (plus 0
/// and 1) and keeps the cells whose membership vector satisfies `keep`.
fn combine(sets: &[&IntervalSet], keep: impl Fn(&[bool]) -> bool) -> IntervalSet {
    let mut cuts: Vec<f64> = vec![0.0, 1.0];
    for s in sets {
        for &(lo, hi) in &s.intervals {
            cuts.push(lo);
            cuts.push(hi);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut cursor = vec![0usize; sets.len()];
    let mut member = vec![false; sets.len()];
    let mut out: Vec<(f64, f64)> = Vec::new();
    for w in cuts.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        for (k, s) in sets.iter().enumerate() {
            let iv = &s.intervals;
            while cursor[k] < iv.len() && iv[cursor[k]].1 <= x0 {
                cursor[k] += 1;
            }
            member[k] = cursor[k] < iv.len() && iv[cursor[k]].0 <= x0;
        }
        if keep(&member) {
            match out.last_mut() {
                Some(last) if last.1 == x0 => last.1 = x1,
                _ => out.push((x0, x1)),
            }
        }
    }
    IntervalSet { intervals: out }
}

impl TryFrom<Vec<(f64, f64)>> for IntervalSet {
    type Error = Error;

    fn try_from(raw: Vec<(f64, f64)>) -> Result<Self> {
        IntervalSet::canonicalize(raw)
    }
}

impl From<IntervalSet> for Vec<(f64, f64)> {
    fn from(s: IntervalSet) -> Self {
        s.intervals
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return f.write_str("empty");
        }
        for (i, (lo, hi)) in self.intervals.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{lo}-{hi}")?;
        }
        Ok(())
    }
}

/// Parses `"0.0-0.25,0.75-1.0"`; the empty set is spelled `"empty"`.
impl FromStr for IntervalSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "empty" {
            return Ok(Self::empty());
        }
        let parse = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("invalid endpoint {t:?} in {s:?}")))
        };
        let raw = s
            .split(',')
            .map(|item| {
                // the separating '-' is the first one not part of an exponent
                let bytes = item.as_bytes();
                let split = (1..bytes.len())
                    .find(|&i| bytes[i] == b'-' && !matches!(bytes[i - 1], b'e' | b'E'))
                    .ok_or_else(|| Error::Parse(format!("expected lo-hi, got {item:?}")))?;
                Ok((parse(&item[..split])?, parse(&item[split + 1..])?))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::canonicalize(raw)
    }
}

/// `lambda(A xor B)`.
pub fn rho(a: &IntervalSet, b: &IntervalSet) -> f64 {
    a.sym_diff(b).measure()
}

/// Majority set `(A & B) | (A & C) | (B & C)`.
pub fn set_mixer(a: &IntervalSet, b: &IntervalSet, c: &IntervalSet) -> IntervalSet {
    combine(&[a, b, c], |m| (m[0] as u8 + m[1] as u8 + m[2] as u8) >= 2)
}

/// Parity set `A xor B xor C`.
pub fn set_comixer(a: &IntervalSet, b: &IntervalSet, c: &IntervalSet) -> IntervalSet {
    combine(&[a, b, c], |m| m[0] ^ m[1] ^ m[2])
}

/// The class `{A, A^c}` of the quotient by complementation, stored through a
/// canonical representative: the member of smaller measure, with ties
/// broken by [`IntervalSet::lex_cmp`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuotientClass {
    rep: IntervalSet,
}

impl QuotientClass {
    pub fn rep(&self) -> &IntervalSet {
        &self.rep
    }
}

impl fmt::Display for QuotientClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.rep)
    }
}

pub fn quotient_class(a: &IntervalSet) -> QuotientClass {
    let c = a.complement();
    // Comparing the two computed measures (rather than one against 1/2)
    // makes the choice identical for A and A^c even under rounding.
    let (ma, mc) = (a.measure(), c.measure());
    let rep = match ma.total_cmp(&mc).then_with(|| a.lex_cmp(&c)) {
        Ordering::Greater => c,
        _ => a.clone(),
    };
    QuotientClass { rep }
}

/// `min(lambda(A xor B), lambda(A xor B^c))`.
pub fn quotient_dist(x: &QuotientClass, y: &QuotientClass) -> f64 {
    let direct = rho(&x.rep, &y.rep);
    // A xor B^c is the complement of A xor B
    let flipped = x.rep.sym_diff(&y.rep).complement().measure();
    direct.min(flipped)
}

/// `[A xor B xor C]`; flipping any representative complements the parity
/// set and so does not change the class.
pub fn quotient_comixer(x: &QuotientClass, y: &QuotientClass, z: &QuotientClass) -> QuotientClass {
    quotient_class(&set_comixer(&x.rep, &y.rep, &z.rep))
}

/// The geodesic `t -> [0, t]` from the empty set to the full interval.
pub fn geodesic_point(t: f64) -> Result<IntervalSet> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::OutOfRange { name: "t", value: t });
    }
    IntervalSet::canonicalize([(0.0, t)])
}

/// Both sides of `lambda([0,a] xor [0,b] xor [0,c]) = a + b + c - 2 med(a, b, c)`.
pub fn intertwine_check(a: f64, b: f64, c: f64) -> Result<(f64, f64)> {
    let lhs = set_comixer(&geodesic_point(a)?, &geodesic_point(b)?, &geodesic_point(c)?).measure();
    Ok((lhs, group_comixer_1d(a, b, c)))
}
