mod common;

use common::*;
use pretopo::learners::project_weights;
use pretopo::{
    closure, closure_iterated, elementary_closures, predicate_eval, pseudo_closure_dnf, pseudo_closure_weighted,
    simplify_dnf, weights_to_dnf, Clause, Dnf, ElementSet, DEFAULT_ENUMERATION_CAP,
};
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn pseudo_closure_grows(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (n, k, d) = random_shape(&mut r);
        let fam = random_family(&mut r, n, k, d);
        let dnf = random_dnf(&mut r, k);
        let a = random_set(&mut r, n);
        prop_assert!(a.is_subset(&pseudo_closure_dnf(&fam, &dnf, &a).unwrap()));
        prop_assert!(a.is_subset(&pseudo_closure_dnf(&fam, &Dnf::empty(), &a).unwrap()));
    }

    #[test]
    fn isotony(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (n, k, d) = random_shape(&mut r);
        let fam = random_family(&mut r, n, k, d);
        let dnf = random_dnf(&mut r, k);
        let a = random_set(&mut r, n);
        let b = a.union(&random_set(&mut r, n));
        prop_assert!(pseudo_closure_dnf(&fam, &dnf, &a).unwrap().is_subset(&pseudo_closure_dnf(&fam, &dnf, &b).unwrap()));
        prop_assert!(closure(&fam, &dnf, &a).unwrap().is_subset(&closure(&fam, &dnf, &b).unwrap()));
    }

    #[test]
    fn closure_is_a_fixpoint(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (n, k, d) = random_shape(&mut r);
        let fam = random_family(&mut r, n, k, d);
        let dnf = random_dnf(&mut r, k);
        let a = random_set(&mut r, n);
        let c = closure(&fam, &dnf, &a).unwrap();
        prop_assert_eq!(&closure(&fam, &dnf, &c).unwrap(), &c);
        prop_assert_eq!(&pseudo_closure_dnf(&fam, &dnf, &c).unwrap(), &c);
    }

    #[test]
    fn worklist_closure_matches_iteration(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (n, k, d) = random_shape(&mut r);
        let fam = random_family(&mut r, n, k, d);
        let dnf = random_dnf(&mut r, k);
        let a = random_set(&mut r, n);
        let (iterated, steps) = closure_iterated(&fam, &dnf, &a).unwrap();
        prop_assert_eq!(closure(&fam, &dnf, &a).unwrap(), iterated);
        prop_assert!(steps >= 1 && steps <= n + 1);
    }

    #[test]
    fn predicates_are_monotone(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (n, k, d) = random_shape(&mut r);
        let fam = random_family(&mut r, n, k, d);
        let a = random_set(&mut r, n);
        let b = a.union(&random_set(&mut r, n));
        for i in 1..=k {
            for x in 0..n {
                if predicate_eval(&fam, i, &a, x).unwrap() {
                    prop_assert!(predicate_eval(&fam, i, &b, x).unwrap());
                }
            }
        }
    }

    #[test]
    fn weights_agree_with_their_dnf(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=8);
        let k = r.gen_range(1..=6);
        let d = r.gen_range(0.1..0.6);
        let fam = random_family(&mut r, n, k, d);
        let raw: Vec<f64> = (0..=k).map(|_| r.gen_range(0.0..1.0)).collect();
        let w = project_weights(&raw).unwrap();
        let dnf = weights_to_dnf(&w, DEFAULT_ENUMERATION_CAP).unwrap();
        prop_assert!(dnf.is_well_formed());
        for a in subsets(n) {
            prop_assert_eq!(pseudo_closure_weighted(&fam, &w, &a).unwrap(), pseudo_closure_dnf(&fam, &dnf, &a).unwrap());
        }
    }

    #[test]
    fn simplification_preserves_meaning(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (n, k, d) = random_shape(&mut r);
        let fam = random_family(&mut r, n, k, d);
        let raw: Vec<Clause> = (0..r.gen_range(1..=6)).map(|_| Clause::from_mask(r.gen_range(1..1u64 << k)).unwrap()).collect();
        let simplified = simplify_dnf(&raw);
        prop_assert!(simplified.is_well_formed());
        for a in subsets(n) {
            for x in 0..n {
                let sat = fam.satisfied(&a, x);
                prop_assert_eq!(raw.iter().any(|c| c.holds(sat)), simplified.holds(sat));
            }
        }
    }
}

#[test]
fn empty_dnf_closures_are_singletons() {
    let mut r = rng(3);
    let fam = random_family(&mut r, 6, 3, 0.5);
    let s = elementary_closures(&fam, &Dnf::empty()).unwrap();
    for x in 0..6 {
        assert_eq!(s.get(x).unwrap(), &ElementSet::singleton(6, x));
    }
}
