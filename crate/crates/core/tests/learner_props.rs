mod common;

use common::*;
use pretopo::learners::*;
use pretopo::measures::extrinsic_measure;
use pretopo::{elementary_closures, simplify_dnf, Clause, Dnf, Model, NeighborhoodFamily, Structuring, WeightVector};
use proptest::prelude::*;
use rand::Rng;

fn instance(seed: u64) -> (NeighborhoodFamily, Structuring) {
    let mut r = rng(seed);
    let n = r.gen_range(2..=8);
    let k = r.gen_range(1..=4);
    let d = r.gen_range(0.1..0.6);
    let family = random_family(&mut r, n, k, d);
    let target = elementary_closures(&family, &random_dnf(&mut r, k)).unwrap();
    (family, target)
}

fn small_config(algorithm: Algorithm, seed: u64) -> LearnerConfig {
    LearnerConfig {
        initial_pop: 12,
        max_iter: 8,
        required_iter_convergence: 3,
        beam_size: 2,
        rng_seed: seed,
        ..LearnerConfig::new(algorithm)
    }
}

fn check_well_formed(model: &Model) {
    match model {
        Model::Dnf(d) => assert!(d.is_well_formed(), "{d}"),
        Model::Weights(w) => assert!(WeightVector::new(w.threshold(), w.weights().to_vec()).is_ok(), "{w}"),
    }
}

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 40,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn runs_are_deterministic_and_well_formed(seed in any::<u64>()) {
        let (family, target) = instance(seed);
        for algorithm in Algorithm::ALL {
            let c = small_config(algorithm, seed);
            let a = learn(&family, &target, &c).unwrap();
            let b = learn(&family, &target, &c).unwrap();
            prop_assert_eq!(&a.model, &b.model);
            prop_assert_eq!(a.final_score, b.final_score);
            prop_assert_eq!(&a.structuring, &b.structuring);
            prop_assert_eq!(a.structuring_calls, b.structuring_calls);
            prop_assert_eq!(&a.accepted_scores, &b.accepted_scores);
            check_well_formed(&a.model);
            prop_assert_eq!(&a.structuring, &elementary_closures(&family, &a.model).unwrap());
            prop_assert_eq!(a.extrinsic, extrinsic_measure(&target, &a.structuring).unwrap());
        }
    }

    #[test]
    fn structuring_calls_stay_within_budget(seed in any::<u64>()) {
        let (family, target) = instance(seed);
        let k = family.k();
        for algorithm in Algorithm::ALL {
            let c = small_config(algorithm, seed);
            let r = learn(&family, &target, &c).unwrap();
            let bound = if algorithm.is_genetic() {
                c.initial_pop * c.max_iter
            } else {
                1 + c.max_iter * c.beam_size * k * k
            };
            prop_assert!(r.structuring_calls <= bound, "{algorithm}: {} > {bound}", r.structuring_calls);
        }
    }

    #[test]
    fn greedy_scores_strictly_increase(seed in any::<u64>()) {
        let (family, target) = instance(seed);
        for algorithm in [Algorithm::Greedy, Algorithm::Mi] {
            let r = learn(&family, &target, &small_config(algorithm, seed)).unwrap();
            for w in r.accepted_scores.windows(2) {
                prop_assert!(w[0] < w[1]);
            }
            if let Some(last) = r.accepted_scores.last() {
                prop_assert_eq!(last.value, r.final_score);
            }
        }
    }

    #[test]
    fn wide_beam_is_exhaustive(seed in any::<u64>()) {
        let (family, target) = instance(seed);
        let k = family.k();
        let exhaustive = |measure: Measure| {
            (1u64..1 << k)
                .map(|m| {
                    let clause = Clause::from_mask(m).unwrap();
                    let s = elementary_closures(&family, &Dnf::new([clause])).unwrap();
                    let value = match measure {
                        Measure::Extrinsic => extrinsic_measure(&target, &s).unwrap().f_measure,
                        Measure::Intrinsic { p } => pretopo::bags::intrinsic_measure(&target, &s, p, &pretopo::bags::BagLimits::unbounded_closures()).unwrap(),
                    };
                    (value, clause)
                })
                .fold(None, |best: Option<(f64, Clause)>, (v, c)| match best {
                    Some((bv, _)) if bv >= v => best,
                    _ => Some((v, c)),
                })
                .unwrap()
        };
        for measure in [Measure::Extrinsic, Measure::Intrinsic { p: 1.0 }] {
            let found = best_clause(&family, &target, &Dnf::empty(), k, measure).unwrap().unwrap();
            let (value, _) = exhaustive(measure);
            prop_assert_eq!(found.score.value, value);
        }
    }
}

#[test]
fn genetic_budget_is_reached_without_convergence() {
    let (family, target) = instance(11);
    let c = LearnerConfig {
        required_iter_convergence: 1000,
        ..small_config(Algorithm::GeneticLogical, 5)
    };
    let r = learn(&family, &target, &c).unwrap();
    assert_eq!(r.iterations, c.max_iter);
    assert!(r.structuring_calls <= c.initial_pop * c.max_iter);
}

#[test]
fn seeded_population_recovers_its_model() {
    let (family, target) = instance(21);
    let dnf = simplify_dnf(&[Clause::single(1).unwrap()]);
    let population = vec![Model::Dnf(dnf); 4];
    let c = LearnerConfig {
        initial_pop: 4,
        ..small_config(Algorithm::GeneticLogical, 1)
    };
    let r = genetic_lps_with_population(&family, &target, &c, population).unwrap();
    assert!(r.final_score >= extrinsic_measure(&target, &elementary_closures(&family, &Dnf::new([Clause::single(1).unwrap()])).unwrap()).unwrap().f_measure);
}
