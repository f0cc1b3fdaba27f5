//! Structurings: maps from elements to their elementary closures.
//!
//! A structuring may be partial (defined on a sample of the universe), in
//! which case every measure sums over the defined elements only.
//!
//! File format, one line per defined element: `<x>: <y1> <y2> ...`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::family::strip_comment;
use crate::set::ElementSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structuring {
    universe: usize,
    closures: Vec<Option<ElementSet>>,
}

impl Structuring {
    /// Total structuring from one closure per element, in index order.
    pub fn full(closures: Vec<ElementSet>) -> Result<Self> {
        let n = closures.len();
        Self::from_entries(n, closures.into_iter().enumerate())
    }

    /// Partial structuring over `universe` elements.
    pub fn from_entries<I>(universe: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, ElementSet)>,
    {
        if universe == 0 {
            return Err(Error::InvalidArgument("structuring over an empty universe".into()));
        }
        let mut closures = vec![None; universe];
        for (x, set) in entries {
            if x >= universe {
                return Err(Error::InvalidArgument(format!(
                    "element {x} outside universe of size {universe}"
                )));
            }
            if set.universe() != universe {
                return Err(Error::InvalidArgument(format!(
                    "closure of {x} built over a universe of size {}, expected {universe}",
                    set.universe()
                )));
            }
            if !set.contains(x) {
                return Err(Error::InvalidArgument(format!("closure of {x} does not contain {x}")));
            }
            if closures[x].is_some() {
                return Err(Error::InvalidArgument(format!("closure of {x} given twice")));
            }
            closures[x] = Some(set);
        }
        Ok(Structuring { universe, closures })
    }

    /// `x ↦ {x}` for every element.
    pub fn identity(universe: usize) -> Self {
        Structuring {
            universe,
            closures: (0..universe).map(|x| Some(ElementSet::singleton(universe, x))).collect(),
        }
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn get(&self, x: usize) -> Option<&ElementSet> {
        self.closures.get(x).and_then(|c| c.as_ref())
    }

    /// Elements with a defined closure, in increasing order.
    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        self.closures
            .iter()
            .enumerate()
            .filter_map(|(x, c)| c.as_ref().map(|_| x))
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, &ElementSet)> + '_ {
        self.closures
            .iter()
            .enumerate()
            .filter_map(|(x, c)| c.as_ref().map(|c| (x, c)))
    }

    pub fn domain_len(&self) -> usize {
        self.closures.iter().filter(|c| c.is_some()).count()
    }

    pub fn is_full(&self) -> bool {
        self.closures.iter().all(|c| c.is_some())
    }

    pub fn same_domain(&self, other: &Structuring) -> bool {
        self.universe == other.universe
            && self
                .closures
                .iter()
                .zip(&other.closures)
                .all(|(a, b)| a.is_some() == b.is_some())
    }

    /// Parses the structuring file format for a universe of `universe` elements.
    pub fn parse(text: &str, universe: usize) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = strip_comment(raw);
            if line.trim().is_empty() {
                continue;
            }
            let (head, tail) = line
                .split_once(':')
                .ok_or_else(|| Error::parse(lineno, 1, "expected `<x>: <y1> <y2> ...`"))?;
            let x: usize = head
                .trim()
                .parse()
                .map_err(|_| Error::parse(lineno, 1, format!("bad element {:?}", head.trim())))?;
            if x >= universe {
                return Err(Error::InvalidArgument(format!(
                    "line {lineno}: element {x} outside universe of size {universe}"
                )));
            }
            let mut set = ElementSet::singleton(universe, x);
            for tok in tail.split_whitespace() {
                let y: usize = tok
                    .parse()
                    .map_err(|_| Error::parse(lineno, head.len() + 2, format!("bad element {tok:?}")))?;
                if y >= universe {
                    return Err(Error::InvalidArgument(format!(
                        "line {lineno}: element {y} outside universe of size {universe}"
                    )));
                }
                set.insert(y);
            }
            entries.push((x, set));
        }
        Self::from_entries(universe, entries)
    }

    /// Serializes in the structuring file format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (x, set) in self.entries() {
            let _ = write!(out, "{x}:");
            for y in set.iter() {
                let _ = write!(out, " {y}");
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_reflexive_closure() {
        let bad = Structuring::full(vec![ElementSet::singleton(2, 1), ElementSet::singleton(2, 1)]);
        assert!(bad.is_err());
    }

    #[test]
    fn partial_roundtrip() {
        let s = Structuring::parse("2: 2 0\n0: 0\n", 4).unwrap();
        assert_eq!(s.domain().collect::<Vec<_>>(), vec![0, 2]);
        assert!(!s.is_full());
        assert_eq!(s.get(2).unwrap(), &ElementSet::from_members(4, [0, 2]));
        assert_eq!(Structuring::parse(&s.to_text(), 4).unwrap(), s);
    }

    #[test]
    fn out_of_range_element_is_an_error() {
        assert!(matches!(
            Structuring::parse("0: 99\n", 4),
            Err(Error::InvalidArgument(_))
        ));
        assert!(Structuring::parse("0: 1\n0: 2\n", 4).is_err());
    }
}
