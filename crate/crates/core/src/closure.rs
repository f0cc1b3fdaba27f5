//! Pseudo-closure operators and their closures.
//!
//! A model decides, from the set of predicates `q_i(A, x)` satisfied by a
//! pair `(A, x)`, whether `x` joins `A` in one propagation step. The
//! pseudo-closure is always `A ∪ {x | model(A, x)}`, so growth holds even
//! for families given without reflexive members.

use std::fmt;
use std::str::FromStr;

use crate::dnf::Dnf;
use crate::error::{Error, Result};
use crate::family::{NeighborhoodFamily, PredicateMask};
use crate::set::ElementSet;
use crate::structuring::Structuring;
use crate::weights::WeightVector;

/// Decision rule of a pseudo-closure operator over predicate masks.
pub trait Propagation {
    fn fires(&self, satisfied: PredicateMask) -> bool;

    /// Checks that the rule only refers to predicates of `family`.
    fn check(&self, family: &NeighborhoodFamily) -> Result<()>;
}

impl Propagation for Dnf {
    #[inline]
    fn fires(&self, satisfied: PredicateMask) -> bool {
        self.holds(satisfied)
    }

    fn check(&self, family: &NeighborhoodFamily) -> Result<()> {
        let max = self.max_predicate();
        if max > family.k() {
            return Err(Error::InvalidArgument(format!(
                "DNF uses q{max} but the family has {} neighborhoods",
                family.k()
            )));
        }
        Ok(())
    }
}

impl Propagation for WeightVector {
    #[inline]
    fn fires(&self, satisfied: PredicateMask) -> bool {
        self.holds(satisfied)
    }

    fn check(&self, family: &NeighborhoodFamily) -> Result<()> {
        if self.k() != family.k() {
            return Err(Error::InvalidModel(format!(
                "weight vector has {} weights but the family has {} neighborhoods",
                self.k(),
                family.k()
            )));
        }
        Ok(())
    }
}

/// Either representation of a learned pseudo-closure.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Dnf(Dnf),
    Weights(WeightVector),
}

impl Propagation for Model {
    #[inline]
    fn fires(&self, satisfied: PredicateMask) -> bool {
        match self {
            Model::Dnf(d) => d.holds(satisfied),
            Model::Weights(w) => w.holds(satisfied),
        }
    }

    fn check(&self, family: &NeighborhoodFamily) -> Result<()> {
        match self {
            Model::Dnf(d) => d.check(family),
            Model::Weights(w) => w.check(family),
        }
    }
}

impl From<Dnf> for Model {
    fn from(d: Dnf) -> Self {
        Model::Dnf(d)
    }
}

impl From<WeightVector> for Model {
    fn from(w: WeightVector) -> Self {
        Model::Weights(w)
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::Dnf(d) => d.fmt(f),
            Model::Weights(w) => w.fmt(f),
        }
    }
}

/// Parses a DNF, or a weight vector when the text starts with a number.
impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim_start();
        if t.starts_with(|c: char| c.is_ascii_digit() || c == '.' || c == '-' || c == '+') {
            t.parse().map(Model::Weights)
        } else {
            t.parse().map(Model::Dnf)
        }
    }
}

/// `q_i(A, x)`: does `V_i(x)` meet `A`? `i` is 1-based.
pub fn predicate_eval(family: &NeighborhoodFamily, i: usize, set: &ElementSet, x: usize) -> Result<bool> {
    family.check_predicate(i)?;
    family.check_element(x)?;
    check_set(family, set)?;
    Ok(family
        .members(i - 1, x)
        .iter()
        .any(|&y| set.contains(y as usize)))
}

/// One application of the pseudo-closure `a(A) = A ∪ {x | model(A, x)}`.
pub fn pseudo_closure<M: Propagation + ?Sized>(
    family: &NeighborhoodFamily,
    model: &M,
    set: &ElementSet,
) -> Result<ElementSet> {
    model.check(family)?;
    check_set(family, set)?;
    Ok(step(family, model, set))
}

pub fn pseudo_closure_dnf(family: &NeighborhoodFamily, dnf: &Dnf, set: &ElementSet) -> Result<ElementSet> {
    pseudo_closure(family, dnf, set)
}

pub fn pseudo_closure_weighted(
    family: &NeighborhoodFamily,
    weights: &WeightVector,
    set: &ElementSet,
) -> Result<ElementSet> {
    pseudo_closure(family, weights, set)
}

fn step<M: Propagation + ?Sized>(family: &NeighborhoodFamily, model: &M, set: &ElementSet) -> ElementSet {
    let mut out = set.clone();
    for x in 0..family.len() {
        if !set.contains(x) && model.fires(family.satisfied(set, x)) {
            out.insert(x);
        }
    }
    out
}

/// Closure `F(A)`: the least fixpoint of the pseudo-closure above `A`.
///
/// Computed by propagating from newly added elements to the elements whose
/// neighborhoods mention them, which reaches the same fixpoint as repeated
/// application since the operator is isotone.
pub fn closure<M: Propagation + ?Sized>(family: &NeighborhoodFamily, model: &M, set: &ElementSet) -> Result<ElementSet> {
    model.check(family)?;
    check_set(family, set)?;
    Ok(closure_unchecked(family, model, set.clone()))
}

pub(crate) fn closure_unchecked<M: Propagation + ?Sized>(
    family: &NeighborhoodFamily,
    model: &M,
    mut set: ElementSet,
) -> ElementSet {
    let mut queue: Vec<usize> = set.iter().collect();
    while let Some(y) = queue.pop() {
        for &x in family.dependents(y) {
            let x = x as usize;
            if !set.contains(x) && model.fires(family.satisfied(&set, x)) {
                set.insert(x);
                queue.push(x);
            }
        }
    }
    set
}

/// Closure by literal iteration `a, a∘a, ...` until `a^k(A) = a^{k+1}(A)`.
///
/// Returns the closure and the number of applications of `a` performed
/// (the last one confirms the fixpoint).
pub fn closure_iterated<M: Propagation + ?Sized>(
    family: &NeighborhoodFamily,
    model: &M,
    set: &ElementSet,
) -> Result<(ElementSet, usize)> {
    model.check(family)?;
    check_set(family, set)?;
    let mut current = set.clone();
    let mut applications = 0;
    loop {
        let next = step(family, model, &current);
        applications += 1;
        if next == current {
            return Ok((current, applications));
        }
        current = next;
    }
}

/// The structuring `x ↦ F({x})` over the whole universe.
pub fn elementary_closures<M: Propagation + ?Sized>(family: &NeighborhoodFamily, model: &M) -> Result<Structuring> {
    model.check(family)?;
    let n = family.len();
    Structuring::full(
        (0..n)
            .map(|x| closure_unchecked(family, model, ElementSet::singleton(n, x)))
            .collect(),
    )
}

/// Elementary closures restricted to `domain` (typically the elements of a
/// partial target structuring).
pub fn elementary_closures_over<M, I>(family: &NeighborhoodFamily, model: &M, domain: I) -> Result<Structuring>
where
    M: Propagation + ?Sized,
    I: IntoIterator<Item = usize>,
{
    model.check(family)?;
    let n = family.len();
    let mut entries = Vec::new();
    for x in domain {
        family.check_element(x)?;
        entries.push((x, closure_unchecked(family, model, ElementSet::singleton(n, x))));
    }
    Structuring::from_entries(n, entries)
}

fn check_set(family: &NeighborhoodFamily, set: &ElementSet) -> Result<()> {
    if set.universe() != family.len() {
        return Err(Error::InvalidArgument(format!(
            "set over a universe of size {} used with a family over {} elements",
            set.universe(),
            family.len()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{abcd_family, abcd_target_linear, abcd_target_nonlinear, set, A, B, C, D};

    fn dnf(s: &str) -> Dnf {
        s.parse().unwrap()
    }

    #[test]
    fn predicate_examples() {
        let fam = abcd_family();
        assert!(predicate_eval(&fam, 3, &set(&[B]), C).unwrap());
        assert!(!predicate_eval(&fam, 2, &set(&[B]), D).unwrap());
        for i in 1..=4 {
            for x in 0..4 {
                assert!(!predicate_eval(&fam, i, &ElementSet::empty(4), x).unwrap());
            }
        }
        assert!(predicate_eval(&fam, 5, &set(&[B]), C).is_err());
        assert!(predicate_eval(&fam, 0, &set(&[B]), C).is_err());
    }

    #[test]
    fn dnf_pseudo_closure_examples() {
        let fam = abcd_family();
        let q = dnf("(q1 & q2) | q3");
        assert_eq!(pseudo_closure_dnf(&fam, &q, &set(&[A])).unwrap(), set(&[A, B]));
        assert_eq!(pseudo_closure_dnf(&fam, &q, &set(&[B, C])).unwrap(), set(&[B, C, D]));
        let any = set(&[A, D]);
        assert_eq!(pseudo_closure_dnf(&fam, &Dnf::empty(), &any).unwrap(), any);
        assert!(pseudo_closure_dnf(&fam, &dnf("q5"), &any).is_err());
    }

    #[test]
    fn weighted_pseudo_closure_examples() {
        let fam = abcd_family();
        let w = WeightVector::from_slice(&[1.0, 0.5, 0.5, 1.0, 0.0]).unwrap();
        assert_eq!(pseudo_closure_weighted(&fam, &w, &set(&[A])).unwrap(), set(&[A, B]));
        assert_eq!(pseudo_closure_weighted(&fam, &w, &set(&[D])).unwrap(), set(&[D]));
        let short = WeightVector::from_slice(&[1.0, 0.5, 0.5, 1.0]).unwrap();
        assert!(matches!(
            pseudo_closure_weighted(&fam, &short, &set(&[A])),
            Err(Error::InvalidModel(_))
        ));
    }

    #[test]
    fn closure_examples() {
        let fam = abcd_family();
        let q1 = dnf("(q1 & q2) | q3");
        let q2 = dnf("(q1 & q2) | (q3 & q4)");
        assert_eq!(closure(&fam, &q1, &set(&[A])).unwrap(), set(&[A, B, C, D]));
        assert_eq!(closure(&fam, &q2, &set(&[C])).unwrap(), set(&[C]));
        let closed = set(&[B, C, D]);
        let (f, applications) = closure_iterated(&fam, &q1, &closed).unwrap();
        assert_eq!(f, closed);
        assert_eq!(applications, 1);
    }

    #[test]
    fn elementary_closure_examples() {
        let fam = abcd_family();
        assert_eq!(elementary_closures(&fam, &dnf("(q1 & q2) | q3")).unwrap(), abcd_target_linear());
        assert_eq!(elementary_closures(&fam, &dnf("(q1 & q2) | (q3 & q4)")).unwrap(), abcd_target_nonlinear());
        assert_eq!(elementary_closures(&fam, &Dnf::empty()).unwrap(), Structuring::identity(4));
        let w = WeightVector::from_slice(&[1.0, 0.5, 0.5, 1.0, 0.0]).unwrap();
        assert_eq!(elementary_closures(&fam, &w).unwrap(), abcd_target_linear());
    }

    #[test]
    fn restricted_structuring() {
        let fam = abcd_family();
        let s = elementary_closures_over(&fam, &dnf("(q1 & q2) | q3"), [B, D]).unwrap();
        assert_eq!(s.domain().collect::<Vec<_>>(), vec![B, D]);
        assert_eq!(s.get(B), abcd_target_linear().get(B));
    }

    #[test]
    fn model_text() {
        let m: Model = "1 0.5 0.5 1 0".parse().unwrap();
        assert!(matches!(m, Model::Weights(_)));
        let m: Model = "(q1 & q2) | q3".parse().unwrap();
        assert_eq!(m.to_string(), "q3 | (q1 & q2)");
    }
}
