//! Universes and neighborhood families, plus the neighborhood file format.
//!
//! The file format is line oriented:
//!
//! ```text
//! k n
//! V<i> <x>: <y1> <y2> ...
//! ```
//!
//! A line `V2 3: 0 5` states that elements 0 and 5 belong to `V_2(3)`.
//! Pairs `(i, x)` without a line default to `V_i(x) = {x}`. Every stored
//! neighborhood contains its own center.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::set::ElementSet;

/// Largest number of neighborhoods a family may carry (predicates are
/// packed into a 64-bit mask).
pub const MAX_NEIGHBORHOODS: usize = 64;

/// A finite, indexed set of elements with display labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Universe {
    labels: Vec<String>,
}

impl Universe {
    /// Universe of `n` elements labelled by their index.
    pub fn indexed(n: usize) -> Result<Self> {
        Self::labelled((0..n).map(|i| i.to_string()).collect())
    }

    pub fn labelled(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidArgument("universe must be non-empty".into()));
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::InvalidArgument(format!("duplicate element label {l:?}")));
            }
        }
        Ok(Universe { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// Bit mask of satisfied predicates: bit `i - 1` is set when `q_i` holds.
pub type PredicateMask = u64;

/// `k` neighborhood functions `V_1..V_k` over one universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborhoodFamily {
    universe: Universe,
    // neighborhoods[i][x]: sorted members of V_{i+1}(x), always including x.
    neighborhoods: Vec<Vec<Vec<u32>>>,
    // dependents[y]: elements x != y whose some neighborhood contains y.
    dependents: Vec<Vec<u32>>,
}

impl NeighborhoodFamily {
    /// Builds a family from explicit neighborhood lists indexed `[i][x]`
    /// (0-based `i`). Reflexive members are added where missing.
    pub fn new(universe: Universe, lists: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        let n = universe.len();
        let k = lists.len();
        if k == 0 {
            return Err(Error::InvalidArgument("a family needs at least one neighborhood".into()));
        }
        if k > MAX_NEIGHBORHOODS {
            return Err(Error::Size {
                what: "neighborhood count",
                actual: k,
                limit: MAX_NEIGHBORHOODS,
            });
        }
        let mut neighborhoods = Vec::with_capacity(k);
        for (i, per_x) in lists.into_iter().enumerate() {
            if per_x.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "neighborhood V{} has {} entries, universe has {n}",
                    i + 1,
                    per_x.len()
                )));
            }
            let mut rows = Vec::with_capacity(n);
            for (x, members) in per_x.into_iter().enumerate() {
                let mut row: Vec<u32> = Vec::with_capacity(members.len() + 1);
                row.push(x as u32);
                for y in members {
                    if y >= n {
                        return Err(Error::InvalidArgument(format!(
                            "element {y} in V{}({x}) outside universe of size {n}",
                            i + 1
                        )));
                    }
                    row.push(y as u32);
                }
                row.sort_unstable();
                row.dedup();
                rows.push(row);
            }
            neighborhoods.push(rows);
        }
        let mut dependents = vec![Vec::new(); n];
        for rows in &neighborhoods {
            for (x, row) in rows.iter().enumerate() {
                for &y in row {
                    if y as usize != x {
                        dependents[y as usize].push(x as u32);
                    }
                }
            }
        }
        for d in &mut dependents {
            d.sort_unstable();
            d.dedup();
        }
        Ok(NeighborhoodFamily {
            universe,
            neighborhoods,
            dependents,
        })
    }

    /// Family where every neighborhood is reduced to its center.
    pub fn identity(universe: Universe, k: usize) -> Result<Self> {
        let n = universe.len();
        Self::new(universe, vec![vec![Vec::new(); n]; k])
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    /// Number of elements.
    pub fn len(&self) -> usize {
        self.universe.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of neighborhoods `k`.
    pub fn k(&self) -> usize {
        self.neighborhoods.len()
    }

    /// `V_i(x)` with a 1-based predicate index.
    pub fn neighborhood(&self, i: usize, x: usize) -> Result<ElementSet> {
        self.check_predicate(i)?;
        self.check_element(x)?;
        Ok(ElementSet::from_members(
            self.len(),
            self.neighborhoods[i - 1][x].iter().map(|&y| y as usize),
        ))
    }

    pub(crate) fn members(&self, i0: usize, x: usize) -> &[u32] {
        &self.neighborhoods[i0][x]
    }

    /// Elements whose neighborhoods mention `y` (excluding `y` itself).
    pub(crate) fn dependents(&self, y: usize) -> &[u32] {
        &self.dependents[y]
    }

    /// Mask of the predicates `q_i(A, x)` that hold, i.e. `V_i(x) ∩ A ≠ ∅`.
    #[inline]
    pub fn satisfied(&self, set: &ElementSet, x: usize) -> PredicateMask {
        let mut mask = 0;
        for (i, rows) in self.neighborhoods.iter().enumerate() {
            if rows[x].iter().any(|&y| set.contains(y as usize)) {
                mask |= 1 << i;
            }
        }
        mask
    }

    pub(crate) fn check_predicate(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.k() {
            return Err(Error::InvalidArgument(format!(
                "predicate index q{i} outside 1..={}",
                self.k()
            )));
        }
        Ok(())
    }

    pub(crate) fn check_element(&self, x: usize) -> Result<()> {
        if x >= self.len() {
            return Err(Error::InvalidArgument(format!(
                "element {x} outside universe of size {}",
                self.len()
            )));
        }
        Ok(())
    }

    /// Parses the neighborhood file format described in the module docs.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, strip_comment(l)))
            .filter(|(_, l)| !l.trim().is_empty());
        let (hline, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, 1, "missing `k n` header"))?;
        let mut parts = header.split_whitespace();
        let k = parse_usize(parts.next(), hline, "k")?;
        let n = parse_usize(parts.next(), hline, "n")?;
        if parts.next().is_some() {
            return Err(Error::parse(hline, 1, "header must be `k n`"));
        }
        if n == 0 {
            return Err(Error::parse(hline, 1, "universe size must be positive"));
        }
        let mut lists = vec![vec![Vec::new(); n]; k];
        for (lineno, line) in lines {
            let (head, tail) = line
                .split_once(':')
                .ok_or_else(|| Error::parse(lineno, 1, "expected `V<i> <x>: ...`"))?;
            let mut head_parts = head.split_whitespace();
            let v = head_parts
                .next()
                .ok_or_else(|| Error::parse(lineno, 1, "missing neighborhood tag"))?;
            let i = v
                .strip_prefix('V')
                .or_else(|| v.strip_prefix('v'))
                .and_then(|s| s.parse::<usize>().ok())
                .ok_or_else(|| Error::parse(lineno, 1, format!("bad neighborhood tag {v:?}")))?;
            if i == 0 || i > k {
                return Err(Error::parse(lineno, 1, format!("neighborhood V{i} outside 1..={k}")));
            }
            let x = parse_usize(head_parts.next(), lineno, "element")?;
            if x >= n {
                return Err(Error::parse(lineno, 1, format!("element {x} outside universe of size {n}")));
            }
            if head_parts.next().is_some() {
                return Err(Error::parse(lineno, 1, "expected `V<i> <x>:`"));
            }
            let col = head.len() + 2;
            for tok in tail.split_whitespace() {
                let y: usize = tok
                    .parse()
                    .map_err(|_| Error::parse(lineno, col, format!("bad element {tok:?}")))?;
                if y >= n {
                    return Err(Error::parse(lineno, col, format!("element {y} outside universe of size {n}")));
                }
                lists[i - 1][x].push(y);
            }
        }
        if k == 0 {
            return Err(Error::parse(hline, 1, "k must be positive"));
        }
        Self::new(Universe::indexed(n)?, lists)
    }

    /// Serializes in the neighborhood file format, omitting reflexive-only
    /// neighborhoods.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.k(), self.len());
        for (i, rows) in self.neighborhoods.iter().enumerate() {
            for (x, row) in rows.iter().enumerate() {
                if row.len() == 1 {
                    continue;
                }
                let _ = write!(out, "V{} {}:", i + 1, x);
                for y in row {
                    let _ = write!(out, " {y}");
                }
                out.push('\n');
            }
        }
        out
    }
}

pub(crate) fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(p) => &line[..p],
        None => line,
    }
}

fn parse_usize(tok: Option<&str>, line: usize, what: &str) -> Result<usize> {
    let tok = tok.ok_or_else(|| Error::parse(line, 1, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| Error::parse(line, 1, format!("bad {what} {tok:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn universe_rejects_duplicates_and_empty() {
        assert!(Universe::labelled(vec!["a".into(), "a".into()]).is_err());
        assert!(Universe::labelled(vec![]).is_err());
        let u = Universe::labelled(vec!["a".into(), "b".into()]).unwrap();
        assert_eq!(u.index_of("b"), Some(1));
    }

    #[test]
    fn parse_defaults_to_reflexive() {
        let fam = NeighborhoodFamily::parse("2 3\nV1 0: 1\n# comment\nV2 2: 0 1\n").unwrap();
        assert_eq!(fam.k(), 2);
        assert_eq!(fam.neighborhood(1, 0).unwrap(), ElementSet::from_members(3, [0, 1]));
        assert_eq!(fam.neighborhood(1, 1).unwrap(), ElementSet::singleton(3, 1));
        assert_eq!(fam.neighborhood(2, 2).unwrap(), ElementSet::from_members(3, [0, 1, 2]));
        let again = NeighborhoodFamily::parse(&fam.to_text()).unwrap();
        assert_eq!(again, fam);
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = NeighborhoodFamily::parse("2 3\nV3 0: 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = NeighborhoodFamily::parse("2 3\nV1 0: 7\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(NeighborhoodFamily::parse("").is_err());
    }

    #[test]
    fn neighborhood_index_checks() {
        let fam = NeighborhoodFamily::identity(Universe::indexed(2).unwrap(), 1).unwrap();
        assert!(fam.neighborhood(0, 0).is_err());
        assert!(fam.neighborhood(2, 0).is_err());
        assert!(fam.neighborhood(1, 2).is_err());
    }
}
