//! Fixed-width element sets over a dense universe `0..n`.

use std::fmt;

use fixedbitset::FixedBitSet;

/// A subset of a finite universe, stored as a fixed-width bitset.
///
/// Two sets are only comparable when they were built for the same universe
/// size; the binary operations below panic on a width mismatch.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementSet {
    bits: FixedBitSet,
}

impl ElementSet {
    pub fn empty(universe: usize) -> Self {
        ElementSet {
            bits: FixedBitSet::with_capacity(universe),
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(universe);
        bits.insert_range(..);
        ElementSet { bits }
    }

    pub fn singleton(universe: usize, x: usize) -> Self {
        let mut s = Self::empty(universe);
        s.insert(x);
        s
    }

    /// Builds a set from member indices. Panics if an index is out of range.
    pub fn from_members<I: IntoIterator<Item = usize>>(universe: usize, members: I) -> Self {
        let mut s = Self::empty(universe);
        for x in members {
            s.insert(x);
        }
        s
    }

    /// Size of the universe this set lives in.
    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    #[inline]
    pub fn contains(&self, x: usize) -> bool {
        self.bits.contains(x)
    }

    /// Inserts `x`, returning `true` if it was not already present.
    #[inline]
    pub fn insert(&mut self, x: usize) -> bool {
        assert!(x < self.bits.len(), "element {x} outside universe of size {}", self.bits.len());
        !self.bits.put(x)
    }

    pub fn remove(&mut self, x: usize) {
        self.bits.set(x, false);
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.check_width(other);
        self.bits.is_subset(&other.bits)
    }

    pub fn is_disjoint(&self, other: &ElementSet) -> bool {
        self.check_width(other);
        self.bits.is_disjoint(&other.bits)
    }

    pub fn union_with(&mut self, other: &ElementSet) {
        self.check_width(other);
        self.bits.union_with(&other.bits);
    }

    pub fn intersect_with(&mut self, other: &ElementSet) {
        self.check_width(other);
        self.bits.intersect_with(&other.bits);
    }

    pub fn difference_with(&mut self, other: &ElementSet) {
        self.check_width(other);
        self.bits.difference_with(&other.bits);
    }

    pub fn union(&self, other: &ElementSet) -> ElementSet {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn intersection(&self, other: &ElementSet) -> ElementSet {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    pub fn difference(&self, other: &ElementSet) -> ElementSet {
        let mut s = self.clone();
        s.difference_with(other);
        s
    }

    pub fn intersection_len(&self, other: &ElementSet) -> usize {
        self.check_width(other);
        self.bits.intersection_count(&other.bits)
    }

    pub fn difference_len(&self, other: &ElementSet) -> usize {
        self.check_width(other);
        self.bits.difference_count(&other.bits)
    }

    /// Complement with respect to the universe.
    pub fn complement(&self) -> ElementSet {
        let mut bits = self.bits.clone();
        bits.toggle_range(..);
        ElementSet { bits }
    }

    fn check_width(&self, other: &ElementSet) {
        assert_eq!(
            self.bits.len(),
            other.bits.len(),
            "element sets from different universes"
        );
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Renders as `{0,3,7}`.
impl fmt::Display for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}
