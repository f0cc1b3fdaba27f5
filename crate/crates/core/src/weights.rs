//! Weighted (linear threshold) pseudo-closure models.

use std::fmt;
use std::str::FromStr;

use crate::dnf::{simplify_dnf, Clause, Dnf};
use crate::error::{Error, Result};
use crate::family::{PredicateMask, MAX_NEIGHBORHOODS};

/// Default largest `k` accepted by [`weights_to_dnf`].
pub const DEFAULT_ENUMERATION_CAP: usize = 20;

/// Threshold `w0` and per-neighborhood weights `w1..wk`.
///
/// Construction enforces the isotony constraints: `w0 > 0`, every
/// `wi >= 0` and `sum(wi) >= w0`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    threshold: f64,
    weights: Vec<f64>,
}

impl WeightVector {
    pub fn new(threshold: f64, weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidModel("weight vector needs at least one neighborhood weight".into()));
        }
        if weights.len() > MAX_NEIGHBORHOODS {
            return Err(Error::Size {
                what: "weight count",
                actual: weights.len(),
                limit: MAX_NEIGHBORHOODS,
            });
        }
        if !threshold.is_finite() || threshold <= 0.0 {
            return Err(Error::InvalidModel(format!("threshold w0 = {threshold} must be > 0")));
        }
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidModel(format!("weight w{} = {w} must be >= 0", i + 1)));
        }
        let total: f64 = weights.iter().sum();
        if total < threshold {
            return Err(Error::InvalidModel(format!(
                "weights sum to {total}, below threshold w0 = {threshold}"
            )));
        }
        Ok(WeightVector { threshold, weights })
    }

    /// Parses `(w0, w1, ..., wk)` as a slice.
    pub fn from_slice(values: &[f64]) -> Result<Self> {
        match values.split_first() {
            Some((&w0, rest)) => Self::new(w0, rest.to_vec()),
            None => Err(Error::InvalidModel("empty weight vector".into())),
        }
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn k(&self) -> usize {
        self.weights.len()
    }

    /// Threshold test `sum_{i satisfied} wi >= w0`.
    #[inline]
    pub fn holds(&self, satisfied: PredicateMask) -> bool {
        let mut sum = 0.0;
        for (i, w) in self.weights.iter().enumerate() {
            if satisfied >> i & 1 == 1 {
                sum += w;
            }
        }
        sum >= self.threshold
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.threshold)?;
        for w in &self.weights {
            write!(f, " {w}")?;
        }
        Ok(())
    }
}

impl FromStr for WeightVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut values = Vec::new();
        let mut col = 1;
        for tok in s.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| Error::parse(1, col, format!("bad weight `{tok}`")))?;
            values.push(v);
            col += tok.len() + 1;
        }
        Self::from_slice(&values)
    }
}

/// Converts a weight vector into the equivalent positive DNF by emitting
/// one clause per predicate subset whose weights reach the threshold.
///
/// Refuses vectors with more than `cap` weights since the enumeration is
/// exponential in `k`.
pub fn weights_to_dnf(w: &WeightVector, cap: usize) -> Result<Dnf> {
    let k = w.k();
    if k > cap {
        return Err(Error::Size {
            what: "neighborhood count for weight enumeration",
            actual: k,
            limit: cap,
        });
    }
    let mut clauses = Vec::new();
    for mask in 1u64..(1u64 << k) {
        if w.holds(mask) {
            clauses.push(Clause::from_mask(mask)?);
        }
    }
    Ok(simplify_dnf(&clauses))
}
