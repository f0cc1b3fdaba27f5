//! Multiple-instance view of a target structuring.
//!
//! Every element `x` with target closure `F*(x)` defines positive bags
//! `bag+(x, A)` for `{x} ⊆ A ⊊ F*(x)` (some instance `(A, y)` with
//! `y ∈ F*(x) \ A` must fire) and negative bags `bag-(x, y)` for
//! `y ∉ F*(x)` (no instance `(A, y)` with `{x} ⊆ A ⊆ F*(x)` may fire).
//! Elements sharing a closure share their positive bags.
//!
//! The module offers closed-form totals, the estimate of covered positive
//! bags under the elementary coverage assumption, the count of negative
//! bags reached by learned closures, the intrinsic measure built on them,
//! and a brute-force bag generator used as a test oracle.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::closure::Propagation;
use crate::error::{Error, Result};
use crate::family::{NeighborhoodFamily, PredicateMask};
use crate::measures::check_compatible;
use crate::set::ElementSet;
use crate::structuring::Structuring;

/// Caps guarding the exponential parts of bag accounting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BagLimits {
    /// Largest target closure accepted by the closed-form counts.
    pub max_closure_size: usize,
    /// Largest equivalence class accepted by the covered-positive estimate.
    pub max_class_size: usize,
    /// Largest universe accepted by [`generate_bags_bruteforce`].
    pub max_bruteforce_universe: usize,
}

impl Default for BagLimits {
    fn default() -> Self {
        BagLimits {
            max_closure_size: 62,
            max_class_size: 20,
            max_bruteforce_universe: 16,
        }
    }
}

impl BagLimits {
    /// Default limits with no cap on closure sizes; counts are exact big
    /// integers either way.
    pub fn unbounded_closures() -> Self {
        BagLimits {
            max_closure_size: usize::MAX,
            ..Self::default()
        }
    }
}

/// `|L[bottom, top]|`, or `|L[bottom, top[|` when `exclusive_top`.
pub fn sublattice_size(bottom: &ElementSet, top: &ElementSet, exclusive_top: bool) -> Result<BigUint> {
    if bottom.universe() != top.universe() || !bottom.is_subset(top) {
        return Err(Error::InvalidArgument(format!("{bottom} is not a subset of {top}")));
    }
    let size = BigUint::one() << (top.len() - bottom.len());
    Ok(if exclusive_top { size - 1u32 } else { size })
}

/// Elements of the target domain sharing one closure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceClass {
    pub members: Vec<usize>,
    pub closure: ElementSet,
}

/// Classes ordered by their smallest member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalencePartition {
    classes: Vec<EquivalenceClass>,
}

impl EquivalencePartition {
    pub fn classes(&self) -> &[EquivalenceClass] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class_of(&self, x: usize) -> Option<usize> {
        self.classes.iter().position(|c| c.members.contains(&x))
    }
}

pub fn equivalence_partition(target: &Structuring) -> EquivalencePartition {
    let mut index: HashMap<&ElementSet, usize> = HashMap::new();
    let mut classes: Vec<EquivalenceClass> = Vec::new();
    for (x, closure) in target.entries() {
        match index.get(closure) {
            Some(&k) => classes[k].members.push(x),
            None => {
                index.insert(closure, classes.len());
                classes.push(EquivalenceClass {
                    members: vec![x],
                    closure: closure.clone(),
                });
            }
        }
    }
    EquivalencePartition { classes }
}

fn check_closure_cap(class: &EquivalenceClass, limits: &BagLimits) -> Result<()> {
    if class.closure.len() > limits.max_closure_size {
        return Err(Error::Size {
            what: "target closure size",
            actual: class.closure.len(),
            limit: limits.max_closure_size,
        });
    }
    Ok(())
}

fn check_class_cap(class: &EquivalenceClass, limits: &BagLimits) -> Result<()> {
    if class.members.len() > limits.max_class_size {
        return Err(Error::Size {
            what: "equivalence class size",
            actual: class.members.len(),
            limit: limits.max_class_size,
        });
    }
    Ok(())
}

fn pow2(e: usize) -> BigUint {
    BigUint::one() << e
}

fn binomial(n: usize, k: usize) -> BigUint {
    let mut c = BigUint::one();
    for i in 0..k {
        c = c * (n - i) / (i + 1);
    }
    c
}

/// Positive bags generated by one class: sum over `i` of
/// `(-1)^(i+1) C(m, i) (2^(f-i) - 1)`.
fn class_positive_bags(class: &EquivalenceClass) -> BigUint {
    let m = class.members.len();
    let f = class.closure.len();
    let mut total = BigInt::zero();
    for i in 1..=m {
        let term = BigInt::from(binomial(m, i)) * (BigInt::from(pow2(f - i)) - 1);
        if i % 2 == 1 {
            total += term;
        } else {
            total -= term;
        }
    }
    total.to_biguint().expect("inclusion-exclusion count is non-negative")
}

/// `B+`: number of distinct positive bags.
pub fn total_positive_bags(target: &Structuring, limits: &BagLimits) -> Result<BigUint> {
    let mut total = BigUint::zero();
    for class in equivalence_partition(target).classes() {
        check_closure_cap(class, limits)?;
        total += class_positive_bags(class);
    }
    Ok(total)
}

/// `B-`: number of negative bags, `Σ |E \ F*(x)|`.
pub fn total_negative_bags(target: &Structuring) -> usize {
    target.entries().map(|(_, c)| target.universe() - c.len()).sum()
}

/// `F_Q*(x) = F_Q(x) ∩ F*(x)` for each member of `class`.
fn true_parts(class: &EquivalenceClass, learned: &Structuring) -> Result<Vec<ElementSet>> {
    class
        .members
        .iter()
        .map(|&x| {
            learned
                .get(x)
                .map(|fq| fq.intersection(&class.closure))
                .ok_or_else(|| Error::InvalidArgument(format!("learned structuring lacks element {x}")))
        })
        .collect()
}

/// Sets `C ⊊ F*_k` meeting the class whose members in `C` all keep their
/// learned true part inside `C`: the bags the estimate treats as uncovered.
fn class_uncovered(class: &EquivalenceClass, parts: &[ElementSet]) -> BigUint {
    let m = class.members.len();
    let f = class.closure.len();
    let n = class.closure.universe();
    let members = ElementSet::from_members(n, class.members.iter().copied());
    let within: Vec<u32> = parts
        .iter()
        .map(|g| {
            class
                .members
                .iter()
                .enumerate()
                .filter(|(_, &y)| g.contains(y))
                .fold(0u32, |acc, (j, _)| acc | 1 << j)
        })
        .collect();
    let outside: Vec<ElementSet> = parts.iter().map(|g| g.difference(&members)).collect();

    // Depth-first walk over subsets S of the class, carrying the members
    // required by S and the union of the true parts outside the class.
    #[allow(clippy::too_many_arguments)]
    fn walk(
        j: usize,
        chosen: u32,
        need: u32,
        out: &ElementSet,
        within: &[u32],
        outside: &[ElementSet],
        free: usize,
        acc: &mut BigUint,
    ) {
        if j == within.len() {
            if chosen != 0 && need & !chosen == 0 {
                *acc += pow2(free - out.len());
            }
            return;
        }
        walk(j + 1, chosen, need, out, within, outside, free, acc);
        let widened = out.union(&outside[j]);
        walk(j + 1, chosen | 1 << j, need | within[j], &widened, within, outside, free, acc);
    }

    let mut acc = BigUint::zero();
    walk(0, 0, 0, &ElementSet::empty(n), &within, &outside, f - m, &mut acc);
    // S = class admits C = F*_k itself, which is not a bag.
    acc - 1u32
}

/// `B+_Q`: estimated number of positive bags covered by the model whose
/// elementary closures are `learned`.
///
/// A bag `bag+(A)` of a class counts as covered when some class member
/// `x ∈ A` has a learned true part `F_Q*(x)` not contained in `A`.
pub fn covered_positive_estimate(target: &Structuring, learned: &Structuring, limits: &BagLimits) -> Result<BigUint> {
    check_compatible(target, learned)?;
    let mut total = BigUint::zero();
    for class in equivalence_partition(target).classes() {
        check_closure_cap(class, limits)?;
        check_class_cap(class, limits)?;
        let parts = true_parts(class, learned)?;
        total += class_positive_bags(class) - class_uncovered(class, &parts);
    }
    Ok(total)
}

/// Same quantity as [`covered_positive_estimate`], evaluated term by term
/// as an alternating sum over subsets `B` of each class of
/// `(2^(f-|B|) - 1) - r(B)`, where `r(B) + 1` is the size of the union of
/// the sub-lattices `L[F_Q*(x) ∪ B, F*_k]`, `x ∈ B`, itself obtained by
/// inclusion-exclusion over their bottoms. Costs `3^m` per class.
pub fn covered_positive_inclusion_exclusion(
    target: &Structuring,
    learned: &Structuring,
    limits: &BagLimits,
) -> Result<BigUint> {
    check_compatible(target, learned)?;
    let mut total = BigInt::zero();
    for class in equivalence_partition(target).classes() {
        check_closure_cap(class, limits)?;
        check_class_cap(class, limits)?;
        let parts = true_parts(class, learned)?;
        let m = class.members.len();
        let f = class.closure.len();
        let n = class.closure.universe();
        for b in 1u32..(1 << m) {
            let b_set = ElementSet::from_members(n, (0..m).filter(|j| b >> j & 1 == 1).map(|j| class.members[j]));
            // Union of the sub-lattices above F_Q*(x) ∪ B for x in B.
            let mut union = BigInt::zero();
            let mut sub = b;
            while sub != 0 {
                let mut bottom = b_set.clone();
                for j in (0..m).filter(|j| sub >> j & 1 == 1) {
                    bottom.union_with(&parts[j]);
                }
                let term = BigInt::from(pow2(f - bottom.len()));
                if sub.count_ones() % 2 == 1 {
                    union += term;
                } else {
                    union -= term;
                }
                sub = (sub - 1) & b;
            }
            let r = union - 1;
            let term = (BigInt::from(pow2(f - b.count_ones() as usize)) - 1) - r;
            if b.count_ones() % 2 == 1 {
                total += term;
            } else {
                total -= term;
            }
        }
    }
    if total.is_negative() {
        return Err(Error::InvalidArgument("negative covered-bag count".into()));
    }
    Ok(total.to_biguint().expect("non-negative"))
}

/// `B-_Q = Σ |F_Q(x) \ F*(x)|` over the target domain.
///
/// Counts the negative bags whose target the learned closure reaches. A
/// conjunctive model can also fire on a source inside `F*(x)` that is not
/// closed under it, so with closures inside the target this may be 0 while
/// an enumerated negative bag is covered.
pub fn covered_negative(target: &Structuring, learned: &Structuring) -> Result<usize> {
    check_compatible(target, learned)?;
    let mut total = 0;
    for (x, fs) in target.entries() {
        let fq = learned
            .get(x)
            .ok_or_else(|| Error::InvalidArgument(format!("learned structuring lacks element {x}")))?;
        total += fq.difference_len(fs);
    }
    Ok(total)
}

/// `log2` of an arbitrary-precision integer (`-inf` for zero).
pub fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return x.to_f64().unwrap_or(0.0).log2();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().expect("64-bit value").log2() + shift as f64
}

/// `h = log2(B+_Q) / (log2(B+_Q) + B-_Q + p)`, or 0 when `B+_Q <= 1`.
pub fn intrinsic_from_counts(covered_positive: &BigUint, covered_negative: usize, p: f64) -> f64 {
    if *covered_positive <= BigUint::one() {
        return 0.0;
    }
    let lp = log2_big(covered_positive);
    lp / (lp + covered_negative as f64 + p)
}

pub fn intrinsic_measure(target: &Structuring, learned: &Structuring, p: f64, limits: &BagLimits) -> Result<f64> {
    if !(p >= 0.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("p = {p} must be a finite non-negative number")));
    }
    let bq = covered_positive_estimate(target, learned, limits)?;
    let nq = covered_negative(target, learned)?;
    Ok(intrinsic_from_counts(&bq, nq, p))
}

/// Total and covered bag counts for one candidate structuring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BagAccounts {
    pub total_positive: BigUint,
    pub total_negative: usize,
    pub covered_positive_estimate: BigUint,
    pub covered_negative: usize,
}

pub fn bag_accounts(target: &Structuring, learned: &Structuring, limits: &BagLimits) -> Result<BagAccounts> {
    Ok(BagAccounts {
        total_positive: total_positive_bags(target, limits)?,
        total_negative: total_negative_bags(target),
        covered_positive_estimate: covered_positive_estimate(target, learned, limits)?,
        covered_negative: covered_negative(target, learned)?,
    })
}

/// One `(A, y)` pair with its predicate values `q_i(A, y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub source: ElementSet,
    pub target: usize,
    pub features: PredicateMask,
}

impl Instance {
    /// Features as a 0/1 vector `(q_1, ..., q_k)`.
    pub fn feature_vector(&self, k: usize) -> Vec<u8> {
        (0..k).map(|i| (self.features >> i & 1) as u8).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BagLabel {
    Positive,
    Negative,
}

/// A labelled bag. Positive bags list every class member of their source
/// set as origin; negative bags have a single origin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bag {
    pub label: BagLabel,
    pub origins: Vec<usize>,
    pub instances: Vec<Instance>,
}

impl Bag {
    /// Standard multiple-instance coverage: some instance fires.
    pub fn is_covered<M: Propagation + ?Sized>(&self, model: &M) -> bool {
        self.instances.iter().any(|i| model.fires(i.features))
    }
}

/// Bags of every element of the target domain, materialized explicitly.
///
/// Positive bags come first, grouped by equivalence class; negative bags
/// follow in `(x, y)` order.
pub fn generate_bags_bruteforce(
    family: &NeighborhoodFamily,
    target: &Structuring,
    limits: &BagLimits,
) -> Result<Vec<Bag>> {
    let n = family.len();
    if n > limits.max_bruteforce_universe {
        return Err(Error::Size {
            what: "universe size for bag enumeration",
            actual: n,
            limit: limits.max_bruteforce_universe,
        });
    }
    if target.universe() != n {
        return Err(Error::InvalidArgument(format!(
            "structuring over {} elements, family over {n}",
            target.universe()
        )));
    }
    let mut bags = Vec::new();
    for class in equivalence_partition(target).classes() {
        let top: Vec<usize> = class.closure.iter().collect();
        for mask in 1u32..(1 << top.len()) - 1 {
            let source = ElementSet::from_members(n, (0..top.len()).filter(|j| mask >> j & 1 == 1).map(|j| top[j]));
            let origins: Vec<usize> = class.members.iter().copied().filter(|&x| source.contains(x)).collect();
            if origins.is_empty() {
                continue;
            }
            let instances = class
                .closure
                .iter()
                .filter(|&y| !source.contains(y))
                .map(|y| Instance {
                    features: family.satisfied(&source, y),
                    source: source.clone(),
                    target: y,
                })
                .collect();
            bags.push(Bag {
                label: BagLabel::Positive,
                origins,
                instances,
            });
        }
    }
    for (x, closure) in target.entries() {
        let free: Vec<usize> = closure.iter().filter(|&y| y != x).collect();
        let sources: Vec<ElementSet> = (0u32..1 << free.len())
            .map(|mask| {
                let mut s = ElementSet::singleton(n, x);
                for (j, &y) in free.iter().enumerate() {
                    if mask >> j & 1 == 1 {
                        s.insert(y);
                    }
                }
                s
            })
            .collect();
        for y in (0..n).filter(|&y| !closure.contains(y)) {
            let instances = sources
                .iter()
                .map(|s| Instance {
                    features: family.satisfied(s, y),
                    source: s.clone(),
                    target: y,
                })
                .collect();
            bags.push(Bag {
                label: BagLabel::Negative,
                origins: vec![x],
                instances,
            });
        }
    }
    Ok(bags)
}

/// Bag counts obtained from an explicit bag list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OracleCounts {
    pub positive: usize,
    pub negative: usize,
    pub covered_positive: usize,
    pub covered_negative: usize,
}

pub fn oracle_counts<M: Propagation + ?Sized>(bags: &[Bag], model: &M) -> OracleCounts {
    let mut c = OracleCounts::default();
    for bag in bags {
        let covered = bag.is_covered(model);
        match bag.label {
            BagLabel::Positive => {
                c.positive += 1;
                c.covered_positive += covered as usize;
            }
            BagLabel::Negative => {
                c.negative += 1;
                c.covered_negative += covered as usize;
            }
        }
    }
    c
}

/// Line-oriented dump: `+ x A : y1 y2 ...` for positive bags (`x` is the
/// smallest origin) and `- x y : A1 ; A2 ; ...` for negative ones.
pub fn dump_bags(bags: &[Bag]) -> String {
    let mut out = String::new();
    for bag in bags {
        let x = bag.origins[0];
        match bag.label {
            BagLabel::Positive => {
                let source = &bag.instances[0].source;
                let _ = write!(out, "+ {x} {source} :");
                for i in &bag.instances {
                    let _ = write!(out, " {}", i.target);
                }
            }
            BagLabel::Negative => {
                let y = bag.instances[0].target;
                let sources: Vec<String> = bag.instances.iter().map(|i| i.source.to_string()).collect();
                let _ = write!(out, "- {x} {y} : {}", sources.join(" ; "));
            }
        }
        out.push('\n');
    }
    out
}
