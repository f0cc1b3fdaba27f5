//! Greedy clause-by-clause construction of a DNF, guided either by the
//! F-measure (greedy) or by the intrinsic measure (mi).

use std::cmp::Ordering;
use std::collections::HashSet;
use std::time::Instant;

use super::{Algorithm, LearnResult, LearnerConfig, Measure, Score, Scorer};
use crate::dnf::{Clause, Dnf};
use crate::error::{Error, Result};
use crate::family::NeighborhoodFamily;
use crate::structuring::Structuring;

/// A clause together with the score of the DNF it extends.
#[derive(Debug, Clone)]
pub struct ScoredClause {
    pub clause: Clause,
    /// Score of `simplify(current ∨ clause)`.
    pub score: Score,
    pub(crate) structuring: Structuring,
}

/// Higher score first, then fewer predicates, then lexicographic.
fn rank(a: &ScoredClause, b: &ScoredClause) -> Ordering {
    b.score.quality_cmp(&a.score).then_with(|| a.clause.cmp(&b.clause))
}

pub(crate) fn search_clause(scorer: &mut Scorer<'_>, current: &Dnf, k: usize, beam: usize) -> Result<Option<ScoredClause>> {
    let mut seen: HashSet<Clause> = HashSet::new();
    let mut frontier: Vec<Clause> = (1..=k).map(|i| Clause::single(i).expect("valid index")).collect();
    let mut best: Option<ScoredClause> = None;
    loop {
        let mut candidates: Vec<Clause> = frontier
            .drain(..)
            .filter(|c| !current.absorbs(*c) && seen.insert(*c))
            .collect();
        if candidates.is_empty() {
            break;
        }
        candidates.sort();
        let mut scored = Vec::with_capacity(candidates.len());
        for clause in candidates {
            let (score, structuring) = scorer.evaluate_dnf(&current.or(clause))?;
            scored.push(ScoredClause {
                clause,
                score,
                structuring,
            });
        }
        scored.sort_by(rank);
        scored.truncate(beam);
        if best.as_ref().is_none_or(|b| rank(&scored[0], b) == Ordering::Less) {
            best = Some(scored[0].clone());
        }
        frontier = scored
            .iter()
            .flat_map(|s| (1..=k).filter(move |&i| !s.clause.contains(i)).map(move |i| s.clause.with(i)))
            .collect();
    }
    Ok(best)
}

/// Beam search for the clause whose addition to `current` scores best
/// under `measure`. Returns `None` when every clause is already implied by
/// `current`.
pub fn best_clause(
    family: &NeighborhoodFamily,
    target: &Structuring,
    current: &Dnf,
    beam_size: usize,
    measure: Measure,
) -> Result<Option<ScoredClause>> {
    if beam_size == 0 {
        return Err(Error::Config("beam_size must be at least 1".into()));
    }
    let mut scorer = Scorer::new(family, target, measure)?;
    search_clause(&mut scorer, current, family.k(), beam_size)
}

fn run(family: &NeighborhoodFamily, target: &Structuring, config: &LearnerConfig, measure: Measure) -> Result<LearnResult> {
    config.validate()?;
    let start = Instant::now();
    let mut scorer = Scorer::new(family, target, measure)?;
    let mut dnf = Dnf::empty();
    let (mut score, mut structuring) = scorer.evaluate_dnf(&dnf)?;
    let mut accepted = Vec::new();
    let mut iterations = 0;
    while iterations < config.max_iter {
        iterations += 1;
        match search_clause(&mut scorer, &dnf, family.k(), config.beam_size)? {
            Some(c) if c.score > score => {
                dnf = dnf.or(c.clause);
                score = c.score;
                structuring = c.structuring;
                accepted.push(score.clone());
            }
            _ => break,
        }
    }
    scorer.finish(dnf.into(), score.value, structuring, iterations, accepted, config.p, start.elapsed())
}

/// Greedy construction scored by the F-measure.
pub fn greedy_lps(family: &NeighborhoodFamily, target: &Structuring, config: &LearnerConfig) -> Result<LearnResult> {
    if config.algorithm != Algorithm::Greedy {
        return Err(Error::Config(format!("greedy_lps called with algorithm {}", config.algorithm)));
    }
    run(family, target, config, Measure::Extrinsic)
}

/// Greedy construction scored by the intrinsic measure.
pub fn mi_lps(family: &NeighborhoodFamily, target: &Structuring, config: &LearnerConfig) -> Result<LearnResult> {
    if config.algorithm != Algorithm::Mi {
        return Err(Error::Config(format!("mi_lps called with algorithm {}", config.algorithm)));
    }
    run(family, target, config, Measure::Intrinsic { p: config.p })
}
