#![allow(dead_code)]

use pretopo::{simplify_dnf, Clause, Dnf, ElementSet, NeighborhoodFamily, Universe};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Reflexive family over `n` elements with `k` neighborhoods, each
/// neighbor included with probability `density`.
pub fn random_family(rng: &mut impl Rng, n: usize, k: usize, density: f64) -> NeighborhoodFamily {
    let lists = (0..k)
        .map(|_| {
            (0..n)
                .map(|x| (0..n).filter(|&y| y == x || rng.gen_bool(density)).collect())
                .collect()
        })
        .collect();
    NeighborhoodFamily::new(Universe::indexed(n).unwrap(), lists).unwrap()
}

/// Non-empty well-formed DNF over predicates `1..=k`.
pub fn random_dnf(rng: &mut impl Rng, k: usize) -> Dnf {
    let clauses: Vec<Clause> = (0..rng.gen_range(1..=k))
        .map(|_| Clause::from_mask(rng.gen_range(1..1u64 << k)).unwrap())
        .collect();
    simplify_dnf(&clauses)
}

pub fn random_set(rng: &mut impl Rng, n: usize) -> ElementSet {
    ElementSet::from_members(n, (0..n).filter(|_| rng.gen_bool(0.5)))
}

pub fn subsets(n: usize) -> impl Iterator<Item = ElementSet> {
    (0u32..1 << n).map(move |m| ElementSet::from_members(n, (0..n).filter(|&i| m >> i & 1 == 1)))
}

/// Instance size parameters: `n` in 1..=8, `k` in 1..=5, density.
pub fn random_shape(rng: &mut impl Rng) -> (usize, usize, f64) {
    (rng.gen_range(1..=8), rng.gen_range(1..=5), rng.gen_range(0.1..0.6))
}
