//! Learning strategies for propagation models.
//!
//! All learners score a candidate model by computing its elementary
//! closures over the elements where the target is defined (one
//! "structuring call") and comparing them with the target, either through
//! the F-measure ([`Measure::Extrinsic`]) or through the bag-based
//! intrinsic measure ([`Measure::Intrinsic`]).

mod config;
mod genetic;
mod greedy;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::time::Duration;

use num_bigint::BigUint;

pub use config::{Algorithm, LearnerConfig};
pub use genetic::{genetic_lps, genetic_lps_with_population, project_weights};
pub use greedy::{best_clause, greedy_lps, mi_lps, ScoredClause};

use crate::bags::{covered_negative, covered_positive_estimate, intrinsic_from_counts, intrinsic_measure, BagLimits};
use crate::closure::{elementary_closures_over, Model, Propagation};
use crate::dnf::Dnf;
use crate::error::{Error, Result};
use crate::family::NeighborhoodFamily;
use crate::measures::{extrinsic_measure, Extrinsic};
use crate::structuring::Structuring;

/// Quality measure guiding a search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Measure {
    /// F-measure between learned and target elementary closures.
    Extrinsic,
    /// Bag-based measure `h` with penalty weight `p`.
    Intrinsic { p: f64 },
}

/// A measure value, carrying for the intrinsic measure the exact bag
/// counts it derives from.
///
/// Intrinsic values of large structurings can coincide in double
/// precision while the underlying counts differ (`B+_Q` is a big
/// integer), so equal values are ordered by fewer covered negative bags,
/// then more covered positive bags.
#[derive(Debug, Clone, PartialEq)]
pub struct Score {
    pub value: f64,
    counts: Option<(usize, BigUint)>,
}

impl Score {
    pub fn new(value: f64) -> Self {
        Score { value, counts: None }
    }

    pub(crate) fn with_counts(value: f64, covered_negative: usize, covered_positive: BigUint) -> Self {
        Score {
            value,
            counts: Some((covered_negative, covered_positive)),
        }
    }

    /// Total order, greater is better.
    pub fn quality_cmp(&self, other: &Score) -> Ordering {
        self.value.total_cmp(&other.value).then_with(|| match (&self.counts, &other.counts) {
            (Some((n1, b1)), Some((n2, b2))) => n2.cmp(n1).then_with(|| b1.cmp(b2)),
            _ => Ordering::Equal,
        })
    }
}

impl PartialOrd for Score {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.quality_cmp(other))
    }
}

#[derive(Debug, Clone)]
pub struct LearnResult {
    pub model: Model,
    /// Score of `model` under the learner's own measure.
    pub final_score: f64,
    pub extrinsic: Extrinsic,
    /// Intrinsic measure of `model` with the configured `p`; `None` when a
    /// size cap prevents computing it.
    pub intrinsic: Option<f64>,
    /// Elementary closures of `model` over the target's domain.
    pub structuring: Structuring,
    /// Generations (genetic) or clause searches (greedy, mi) performed.
    pub iterations: usize,
    pub structuring_calls: usize,
    /// Successive improvements of the best score.
    pub accepted_scores: Vec<Score>,
    pub wall_time: Duration,
}

/// Runs the learner selected by `config.algorithm`.
pub fn learn(family: &NeighborhoodFamily, target: &Structuring, config: &LearnerConfig) -> Result<LearnResult> {
    match config.algorithm {
        Algorithm::GeneticNumeric | Algorithm::GeneticLogical => genetic_lps(family, target, config),
        Algorithm::Greedy => greedy_lps(family, target, config),
        Algorithm::Mi => mi_lps(family, target, config),
    }
}

/// Scores candidate models and counts structuring calls.
pub(crate) struct Scorer<'a> {
    family: &'a NeighborhoodFamily,
    target: &'a Structuring,
    measure: Measure,
    limits: BagLimits,
    calls: usize,
    memo: HashMap<Dnf, (Score, Structuring)>,
}

impl<'a> Scorer<'a> {
    pub(crate) fn new(family: &'a NeighborhoodFamily, target: &'a Structuring, measure: Measure) -> Result<Self> {
        if target.universe() != family.len() {
            return Err(Error::Config(format!(
                "target structuring over {} elements, family over {}",
                target.universe(),
                family.len()
            )));
        }
        if target.domain_len() == 0 {
            return Err(Error::EmptyInput("target structuring has no defined element".into()));
        }
        Ok(Scorer {
            family,
            target,
            measure,
            limits: BagLimits::unbounded_closures(),
            calls: 0,
            memo: HashMap::new(),
        })
    }

    pub(crate) fn score_structuring(&self, learned: &Structuring) -> Result<Score> {
        match self.measure {
            Measure::Extrinsic => Ok(Score::new(extrinsic_measure(self.target, learned)?.f_measure)),
            Measure::Intrinsic { p } => {
                let bq = covered_positive_estimate(self.target, learned, &self.limits)?;
                let nq = covered_negative(self.target, learned)?;
                Ok(Score::with_counts(intrinsic_from_counts(&bq, nq, p), nq, bq))
            }
        }
    }

    /// One structuring call followed by scoring.
    pub(crate) fn evaluate<M: Propagation + ?Sized>(&mut self, model: &M) -> Result<(Score, Structuring)> {
        let structuring = elementary_closures_over(self.family, model, self.target.domain())?;
        self.calls += 1;
        let score = self.score_structuring(&structuring)?;
        Ok((score, structuring))
    }

    /// Like [`Scorer::evaluate`] for DNFs, reusing earlier results for a
    /// DNF already scored in this run.
    pub(crate) fn evaluate_dnf(&mut self, dnf: &Dnf) -> Result<(Score, Structuring)> {
        if let Some(hit) = self.memo.get(dnf) {
            return Ok(hit.clone());
        }
        let result = self.evaluate(dnf)?;
        self.memo.insert(dnf.clone(), result.clone());
        Ok(result)
    }

    /// Assembles the result record for a returned model.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn finish(
        &self,
        model: Model,
        final_score: f64,
        structuring: Structuring,
        iterations: usize,
        accepted_scores: Vec<Score>,
        p: f64,
        wall_time: Duration,
    ) -> Result<LearnResult> {
        let extrinsic = extrinsic_measure(self.target, &structuring)?;
        let intrinsic = match intrinsic_measure(self.target, &structuring, p, &self.limits) {
            Ok(h) => Some(h),
            Err(Error::Size { .. }) => None,
            Err(e) => return Err(e),
        };
        Ok(LearnResult {
            model,
            final_score,
            extrinsic,
            intrinsic,
            structuring,
            iterations,
            structuring_calls: self.calls,
            accepted_scores,
            wall_time,
        })
    }
}
