use std::sync::Arc;

use fiblang_core::fibration::{
    comprehensive_factorization, grothendieck, is_discrete_fibration, iso_over_base, reindexing,
    to_presheaf, Fibration,
};
use fiblang_core::kernel::{natural_iso_check, validate_category, FinCategory};
use fiblang_core::testing::{
    perturb, random_category, random_functor, random_presheaf, relabel_projection, Perturbation,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn setup(seed: u64) -> (ChaCha8Rng, Arc<FinCategory>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = Arc::new(random_category(&mut rng, 4, 10));
    (rng, l)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn presheaf_round_trip(seed in any::<u64>()) {
        let (mut rng, l) = setup(seed);
        let p = random_presheaf(&mut rng, &l, 3);
        let fib = grothendieck(&p).unwrap();
        prop_assert!(validate_category(fib.total()).is_empty());
        prop_assert!(is_discrete_fibration(fib.proj()).holds());
        let back = to_presheaf(&fib).unwrap();
        prop_assert!(natural_iso_check(&back, &p).unwrap().is_some());
    }

    #[test]
    fn fibration_round_trip(seed in any::<u64>()) {
        let (mut rng, l) = setup(seed);
        let p = random_presheaf(&mut rng, &l, 3);
        let fib = Fibration::new(relabel_projection(&mut rng, grothendieck(&p).unwrap().proj())).unwrap();
        let again = grothendieck(&to_presheaf(&fib).unwrap()).unwrap();
        prop_assert!(iso_over_base(&again, &fib).is_some());
    }

    #[test]
    fn reindexing_is_the_stored_action(seed in any::<u64>()) {
        let (mut rng, l) = setup(seed);
        let p = random_presheaf(&mut rng, &l, 3);
        let fib = grothendieck(&p).unwrap();
        for (f, a) in l.morphisms() {
            let r = reindexing(&fib, f).unwrap();
            for (x2, x1) in p.action(f).unwrap() {
                let e2 = format!("{x2}@{}", a.tgt);
                let e1 = format!("{x1}@{}", a.src);
                prop_assert_eq!(r.map[e2.as_str()].as_str(), e1.as_str());
            }
        }
    }

    #[test]
    fn reindexing_is_contravariantly_functorial(seed in any::<u64>()) {
        let (mut rng, l) = setup(seed);
        let fib = grothendieck(&random_presheaf(&mut rng, &l, 3)).unwrap();
        for ((g, f), gf) in l.composition_table() {
            let (rg, rf, rgf) = (
                reindexing(&fib, g).unwrap(),
                reindexing(&fib, f).unwrap(),
                reindexing(&fib, gf).unwrap(),
            );
            for (e, x) in &rgf.map {
                prop_assert_eq!(&rf.map[&rg.map[e]], x);
            }
        }
        for i in l.identities().values() {
            let r = reindexing(&fib, i).unwrap();
            prop_assert!(r.map.iter().all(|(a, b)| a == b));
        }
    }

    #[test]
    fn perturbed_projections_fail(seed in any::<u64>()) {
        let (mut rng, l) = setup(seed);
        let p = random_presheaf(&mut rng, &l, 3);
        let fib = grothendieck(&p).unwrap();
        for how in [Perturbation::DeleteLift, Perturbation::DuplicateLift] {
            if let Some(bad) = perturb(&mut rng, fib.proj(), how) {
                prop_assert!(!is_discrete_fibration(&bad).holds());
            }
        }
    }

    #[test]
    fn factorization_composes_back(seed in any::<u64>()) {
        let (mut rng, l) = setup(seed);
        let d = Arc::new(random_category(&mut rng, 4, 10));
        let p = random_functor(&mut rng, d, l);
        let fact = comprehensive_factorization(&p).unwrap();
        prop_assert!(is_discrete_fibration(fact.fibration.proj()).holds());
        prop_assert_eq!(fact.first.then(fact.fibration.proj()).unwrap(), p);
    }

    #[test]
    fn factorization_of_a_fibration_is_itself(seed in any::<u64>()) {
        let (mut rng, l) = setup(seed);
        let fib = grothendieck(&random_presheaf(&mut rng, &l, 3)).unwrap();
        let fact = comprehensive_factorization(fib.proj()).unwrap();
        prop_assert!(iso_over_base(&fact.fibration, &fib).is_some());
        let objects: std::collections::BTreeSet<_> = fact.first.object_map().values().collect();
        prop_assert_eq!(objects.len(), fib.total().object_count());
    }
}

#[test]
fn iso_search_rejects_different_fibrations() {
    let l = Arc::new(FinCategory::arrow("A", "f", "B"));
    let ids = |xs: &[&str]| xs.iter().map(fiblang_core::Id::new).collect();
    let mk = |target: &str| {
        fiblang_core::kernel::SetFunctor::new(
            Arc::new(l.opposite()),
            [
                ("A".into(), ids(&["a0", "a1"])),
                ("B".into(), ids(&["b0", "b1"])),
            ]
            .into(),
            [(
                "f".into(),
                [("b0".into(), "a0".into()), ("b1".into(), target.into())].into(),
            )]
            .into(),
        )
        .unwrap()
    };
    let same = grothendieck(&mk("a0")).unwrap();
    let split = grothendieck(&mk("a1")).unwrap();
    assert!(iso_over_base(&same, &split).is_none());
    assert!(iso_over_base(&split, &split).is_some());
}
