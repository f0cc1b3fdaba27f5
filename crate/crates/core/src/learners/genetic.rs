//! Genetic search over weight vectors or DNFs, scored by the F-measure.
//!
//! Each generation scores the population, keeps the best individual
//! unchanged, and fills the rest by size-2 tournament selection, crossover
//! and mutation. The run stops after `max_iter` generations or once the
//! best score has repeated for `required_iter_convergence` generations.

use std::collections::HashMap;
use std::fmt::Display;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Algorithm, LearnResult, LearnerConfig, Measure, Score, Scorer};
use crate::closure::{Model, Propagation};
use crate::dnf::{Clause, Dnf};
use crate::error::{Error, Result};
use crate::family::NeighborhoodFamily;
use crate::structuring::Structuring;
use crate::weights::WeightVector;

const WEIGHT_FLOOR: f64 = 1e-6;
const WEIGHT_NOISE: f64 = 0.2;

trait Genome: Clone + Display + Propagation + Sized {
    fn random(k: usize, rng: &mut ChaCha8Rng) -> Self;
    fn crossover(&self, other: &Self, rng: &mut ChaCha8Rng) -> (Self, Self);
    fn mutate(&self, k: usize, rng: &mut ChaCha8Rng) -> Self;
    fn into_model(self) -> Model;
    fn from_model(model: Model) -> Option<Self>;
}

/// Maps arbitrary `(w0, w1, ..., wk)` values onto the feasible set:
/// negative weights become 0, `w0` is floored at a small positive value,
/// and the weights are rescaled when their sum falls below `w0`.
pub fn project_weights(values: &[f64]) -> Result<WeightVector> {
    let (&w0, rest) = values
        .split_first()
        .ok_or_else(|| Error::InvalidModel("empty weight vector".into()))?;
    let mut w0 = if w0.is_finite() { w0.max(WEIGHT_FLOOR) } else { 1.0 };
    let mut ws: Vec<f64> = rest.iter().map(|&w| if w.is_finite() { w.max(0.0) } else { 0.0 }).collect();
    let sum: f64 = ws.iter().sum();
    if sum == 0.0 {
        ws.iter_mut().for_each(|w| *w = w0);
    } else if sum < w0 {
        let scale = w0 / sum;
        ws.iter_mut().for_each(|w| *w *= scale);
    }
    let sum: f64 = ws.iter().sum();
    if sum < w0 {
        w0 = sum;
    }
    WeightVector::new(w0, ws)
}

impl Genome for WeightVector {
    fn random(k: usize, rng: &mut ChaCha8Rng) -> Self {
        let values: Vec<f64> = (0..=k).map(|_| rng.gen::<f64>()).collect();
        project_weights(&values).expect("projection yields a feasible vector")
    }

    fn crossover(&self, other: &Self, rng: &mut ChaCha8Rng) -> (Self, Self) {
        let alpha: f64 = rng.gen();
        let a = values(self);
        let b = values(other);
        let mix = |x: f64, y: f64, t: f64| t * x + (1.0 - t) * y;
        let c1: Vec<f64> = a.iter().zip(&b).map(|(&x, &y)| mix(x, y, alpha)).collect();
        let c2: Vec<f64> = a.iter().zip(&b).map(|(&x, &y)| mix(x, y, 1.0 - alpha)).collect();
        (
            project_weights(&c1).expect("feasible"),
            project_weights(&c2).expect("feasible"),
        )
    }

    fn mutate(&self, _k: usize, rng: &mut ChaCha8Rng) -> Self {
        let noisy: Vec<f64> = values(self)
            .into_iter()
            .map(|v| v + rng.gen_range(-WEIGHT_NOISE..=WEIGHT_NOISE))
            .collect();
        project_weights(&noisy).expect("feasible")
    }

    fn into_model(self) -> Model {
        Model::Weights(self)
    }

    fn from_model(model: Model) -> Option<Self> {
        match model {
            Model::Weights(w) => Some(w),
            Model::Dnf(_) => None,
        }
    }
}

fn values(w: &WeightVector) -> Vec<f64> {
    std::iter::once(w.threshold()).chain(w.weights().iter().copied()).collect()
}

fn random_clause(k: usize, rng: &mut ChaCha8Rng) -> Clause {
    let mask = if k >= 64 { rng.gen_range(1..=u64::MAX) } else { rng.gen_range(1..(1u64 << k)) };
    Clause::from_mask(mask).expect("non-empty mask")
}

impl Genome for Dnf {
    fn random(k: usize, rng: &mut ChaCha8Rng) -> Self {
        let count = rng.gen_range(1..=k);
        Dnf::new((0..count).map(|_| random_clause(k, rng)))
    }

    /// Clauses common to both parents go to both children; every other
    /// clause goes to one child picked uniformly.
    fn crossover(&self, other: &Self, rng: &mut ChaCha8Rng) -> (Self, Self) {
        let mut pool: Vec<Clause> = self.clauses().iter().chain(other.clauses()).copied().collect();
        pool.sort();
        pool.dedup();
        let (mut c1, mut c2) = (Vec::new(), Vec::new());
        for c in pool {
            let in_a = self.clauses().contains(&c);
            let in_b = other.clauses().contains(&c);
            if in_a && in_b {
                c1.push(c);
                c2.push(c);
            } else if rng.gen_bool(0.5) {
                c1.push(c);
            } else {
                c2.push(c);
            }
        }
        (Dnf::new(c1), Dnf::new(c2))
    }

    fn mutate(&self, k: usize, rng: &mut ChaCha8Rng) -> Self {
        let mut clauses = self.clauses().to_vec();
        let op = if clauses.is_empty() { 2 } else { rng.gen_range(0..4) };
        match op {
            0 => {
                let j = rng.gen_range(0..clauses.len());
                clauses[j] = clauses[j].with(rng.gen_range(1..=k));
            }
            1 => {
                let j = rng.gen_range(0..clauses.len());
                let preds: Vec<usize> = clauses[j].predicates().collect();
                let drop = preds[rng.gen_range(0..preds.len())];
                let rest: Vec<usize> = preds.into_iter().filter(|&p| p != drop).collect();
                if rest.is_empty() {
                    clauses.remove(j);
                } else {
                    clauses[j] = Clause::new(&rest).expect("non-empty");
                }
            }
            2 => clauses.push(Clause::single(rng.gen_range(1..=k)).expect("valid index")),
            _ => {
                clauses.remove(rng.gen_range(0..clauses.len()));
            }
        }
        Dnf::new(clauses)
    }

    fn into_model(self) -> Model {
        Model::Dnf(self)
    }

    fn from_model(model: Model) -> Option<Self> {
        match model {
            Model::Dnf(d) => Some(d),
            Model::Weights(_) => None,
        }
    }
}

/// Index of the best scored individual, earliest on ties.
fn best_index(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, s) in scores.iter().enumerate() {
        if *s > scores[best] {
            best = i;
        }
    }
    best
}

fn evolve<G: Genome>(
    family: &NeighborhoodFamily,
    target: &Structuring,
    config: &LearnerConfig,
    mut rng: ChaCha8Rng,
    initial: Vec<G>,
) -> Result<LearnResult> {
    let start = Instant::now();
    let k = family.k();
    let mut scorer = Scorer::new(family, target, Measure::Extrinsic)?;
    // Individual, and its score when already known.
    let mut population: Vec<(G, Option<f64>)> = initial.into_iter().map(|g| (g, None)).collect();
    let mut cache: HashMap<String, f64> = HashMap::new();
    let mut score = 0.0;
    let mut iter_conv = 0;
    let mut best: Option<(G, f64, Structuring)> = None;
    let mut accepted = Vec::new();
    let mut iter = 0;
    while iter < config.max_iter {
        iter += 1;
        let mut scores = Vec::with_capacity(population.len());
        let mut fresh: Vec<Option<Structuring>> = Vec::with_capacity(population.len());
        for (g, known) in &population {
            let key = g.to_string();
            match known.or_else(|| cache.get(&key).copied()) {
                Some(s) => {
                    scores.push(s);
                    fresh.push(None);
                }
                None => {
                    let (s, structuring) = scorer.evaluate(g)?;
                    let s = s.value;
                    cache.insert(key, s);
                    scores.push(s);
                    fresh.push(Some(structuring));
                }
            }
        }
        let bi = best_index(&scores);
        let best_score = scores[bi];
        if best.is_none() {
            // The first generation's best has been scored in this generation.
            let structuring = fresh[bi].take().expect("first generation is scored fresh");
            best = Some((population[bi].0.clone(), best_score, structuring));
        }
        let mut terminated = false;
        if best_score == score {
            iter_conv += 1;
            terminated = iter_conv >= config.required_iter_convergence;
        } else if best_score > score {
            iter_conv = 1;
            score = best_score;
            accepted.push(Score::new(score));
            if let Some(structuring) = fresh[bi].take() {
                best = Some((population[bi].0.clone(), best_score, structuring));
            }
        }
        if terminated {
            break;
        }
        population = breed(&population, &scores, bi, config, k, &mut rng);
    }
    let (g, s, structuring) = best.expect("at least one generation ran");
    scorer.finish(g.into_model(), s, structuring, iter, accepted, config.p, start.elapsed())
}

fn tournament(scores: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let i = rng.gen_range(0..scores.len());
    let j = rng.gen_range(0..scores.len());
    if scores[j] > scores[i] || (scores[j] == scores[i] && j < i) {
        j
    } else {
        i
    }
}

fn breed<G: Genome>(
    population: &[(G, Option<f64>)],
    scores: &[f64],
    elite: usize,
    config: &LearnerConfig,
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<(G, Option<f64>)> {
    let size = population.len();
    let mut next = Vec::with_capacity(size);
    next.push((population[elite].0.clone(), Some(scores[elite])));
    while next.len() < size {
        let a = &population[tournament(scores, rng)].0;
        let b = &population[tournament(scores, rng)].0;
        let (mut c1, mut c2) = if rng.gen_bool(config.crossover_rate) {
            a.crossover(b, rng)
        } else {
            (a.clone(), b.clone())
        };
        if rng.gen_bool(config.mutation_rate) {
            c1 = c1.mutate(k, rng);
        }
        if rng.gen_bool(config.mutation_rate) {
            c2 = c2.mutate(k, rng);
        }
        next.push((c1, None));
        if next.len() < size {
            next.push((c2, None));
        }
    }
    next
}

fn check_genetic(config: &LearnerConfig) -> Result<()> {
    config.validate()?;
    if !config.algorithm.is_genetic() {
        return Err(Error::Config(format!("genetic_lps called with algorithm {}", config.algorithm)));
    }
    Ok(())
}

/// Genetic search from a random initial population of
/// `config.initial_pop` individuals.
pub fn genetic_lps(family: &NeighborhoodFamily, target: &Structuring, config: &LearnerConfig) -> Result<LearnResult> {
    check_genetic(config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let k = family.k();
    match config.algorithm {
        Algorithm::GeneticNumeric => {
            let pop = (0..config.initial_pop).map(|_| WeightVector::random(k, &mut rng)).collect();
            evolve(family, target, config, rng, pop)
        }
        _ => {
            let pop = (0..config.initial_pop).map(|_| Dnf::random(k, &mut rng)).collect();
            evolve(family, target, config, rng, pop)
        }
    }
}

/// Genetic search from a caller-supplied initial population, whose models
/// must match the configured representation.
pub fn genetic_lps_with_population(
    family: &NeighborhoodFamily,
    target: &Structuring,
    config: &LearnerConfig,
    population: Vec<Model>,
) -> Result<LearnResult> {
    check_genetic(config)?;
    if population.len() < 2 {
        return Err(Error::Config("initial population needs at least two individuals".into()));
    }
    for m in &population {
        m.check(family)?;
    }
    let rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mismatch = || Error::Config(format!("population does not match algorithm {}", config.algorithm));
    match config.algorithm {
        Algorithm::GeneticNumeric => {
            let pop = population
                .into_iter()
                .map(WeightVector::from_model)
                .collect::<Option<Vec<_>>>()
                .ok_or_else(mismatch)?;
            evolve(family, target, config, rng, pop)
        }
        _ => {
            let pop = population
                .into_iter()
                .map(Dnf::from_model)
                .collect::<Option<Vec<_>>>()
                .ok_or_else(mismatch)?;
            evolve(family, target, config, rng, pop)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{abcd_family, abcd_target_linear, abcd_target_nonlinear};

    fn config(algorithm: Algorithm, pop: usize, seed: u64) -> LearnerConfig {
        LearnerConfig {
            initial_pop: pop,
            rng_seed: seed,
            ..LearnerConfig::new(algorithm)
        }
    }

    #[test]
    fn projection_is_feasible() {
        let w = project_weights(&[0.0, 0.0, 0.0]).unwrap();
        assert!(w.threshold() > 0.0);
        let w = project_weights(&[2.0, 0.1, -1.0, 0.3]).unwrap();
        assert!(w.weights().iter().sum::<f64>() >= w.threshold());
        assert!(w.weights().iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn logical_recovers_linear_target() {
        let r = genetic_lps(&abcd_family(), &abcd_target_linear(), &config(Algorithm::GeneticLogical, 40, 3)).unwrap();
        assert_eq!(r.extrinsic.f_measure, 1.0);
        assert!(matches!(r.model, Model::Dnf(ref d) if d.is_well_formed()));
    }

    #[test]
    fn numeric_cannot_reach_nonlinear_target() {
        let r = genetic_lps(&abcd_family(), &abcd_target_nonlinear(), &config(Algorithm::GeneticNumeric, 40, 5)).unwrap();
        assert!(r.extrinsic.f_measure < 1.0);
        assert!(matches!(r.model, Model::Weights(_)));
    }

    #[test]
    fn identical_population_converges() {
        let q: Dnf = "q1 | q3".parse().unwrap();
        let c = LearnerConfig {
            mutation_rate: 0.0,
            required_iter_convergence: 4,
            ..config(Algorithm::GeneticLogical, 6, 1)
        };
        let r = genetic_lps_with_population(&abcd_family(), &abcd_target_linear(), &c, vec![Model::Dnf(q.clone()); 6]).unwrap();
        assert_eq!(r.iterations, 4);
        assert_eq!(r.model, Model::Dnf(q));
        assert_eq!(r.structuring_calls, 1);
    }

    #[test]
    fn deterministic_per_seed() {
        let c = config(Algorithm::GeneticNumeric, 20, 9);
        let a = genetic_lps(&abcd_family(), &abcd_target_linear(), &c).unwrap();
        let b = genetic_lps(&abcd_family(), &abcd_target_linear(), &c).unwrap();
        assert_eq!(a.model, b.model);
        assert_eq!(a.structuring_calls, b.structuring_calls);
        assert_eq!(a.accepted_scores, b.accepted_scores);
    }
}
