use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use fiblang_core::fibration::is_discrete_fibration;
use fiblang_core::kernel::{CatFunctor, FinCategory, SetFunctor};
use fiblang_core::speaker::{
    acquire_by_example, acquire_by_example_merged, acquire_by_paraphrasis,
    tautological_explanation, validate_explanation, Explanation, Outcome, ParaphrasisOptions,
    Speaker,
};
use fiblang_core::testing::{
    emptied_above, oracle_acquire_by_example, random_category, random_presheaf, with_fresh_object,
};
use fiblang_core::Id;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn examples(rng: &mut ChaCha8Rng) -> BTreeSet<Id> {
    (0..rng.gen_range(1..=3))
        .map(|i| Id::from(format!("s{i}")))
        .collect()
}

/// A learner with an empty fibre over a randomly chosen object.
fn learner_with_gap(rng: &mut ChaCha8Rng) -> (Speaker, Id) {
    let l = Arc::new(random_category(rng, 4, 10));
    let target = (*l.objects().collect::<Vec<_>>().choose(rng).unwrap()).clone();
    let p = emptied_above(&random_presheaf(rng, &l, 3), &target);
    (Speaker::new("q", l, p).unwrap(), target)
}

fn restrict_to_old(after: &Speaker, old: &SetFunctor) -> SetFunctor {
    let lop = old.base().clone();
    let k = CatFunctor::new_unchecked(
        lop.clone(),
        after.meaning().base().clone(),
        lop.objects().map(|x| (x.clone(), x.clone())).collect(),
        lop.morphism_ids().map(|m| (m.clone(), m.clone())).collect(),
    );
    after.meaning().restrict(&k).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn example_matches_the_comma_oracle(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (q, target) = learner_with_gap(&mut rng);
        let s = examples(&mut rng);
        let (after, _) = acquire_by_example(&q, &target, &s, None).unwrap();
        prop_assert_eq!(after.meaning(), &oracle_acquire_by_example(&q, &target, &s));
        prop_assert!(is_discrete_fibration(after.fibration().proj()).holds());
    }

    #[test]
    fn fresh_words_take_exactly_the_examples(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = random_category(&mut rng, 4, 10);
        let l = Arc::new(with_fresh_object(&base, "fresh"));
        let p = emptied_above(&random_presheaf(&mut rng, &l, 3), "fresh");
        let q = Speaker::new("q", l, p).unwrap();
        let s = examples(&mut rng);
        let (after, _) = acquire_by_example(&q, "fresh", &s, None).unwrap();
        prop_assert_eq!(after.fibre("fresh").unwrap(), &s);
        for x in base.objects() {
            prop_assert_eq!(after.fibre(x).unwrap(), q.fibre(x).unwrap());
        }
    }

    #[test]
    fn merging_into_an_empty_fibre_is_plain_acquisition(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (q, target) = learner_with_gap(&mut rng);
        let s = examples(&mut rng);
        let plain = acquire_by_example(&q, &target, &s, None).unwrap().0;
        let merged = acquire_by_example_merged(&q, &target, &s, &BTreeMap::new()).unwrap().0;
        prop_assert_eq!(plain, merged);
    }

    #[test]
    fn tautological_explanations_are_exact(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = Arc::new(random_category(&mut rng, 4, 10));
        let p = Speaker::new("p", l.clone(), random_presheaf(&mut rng, &l, 3)).unwrap();
        for x in l.objects() {
            let check = validate_explanation(&p, &tautological_explanation(&p, x).unwrap()).unwrap();
            prop_assert!(check.valid && check.exact);
        }
    }

    #[test]
    fn paraphrasis_installs_the_limit(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = random_category(&mut rng, 4, 10);
        let l = Arc::new(with_fresh_object(&base, "L"));
        let old: Vec<Id> = base.objects().cloned().collect();
        let k = rng.gen_range(1..=3);
        let e = Explanation {
            shape: Arc::new(FinCategory::discrete((0..k).map(|i| format!("a{i}")))),
            objects: (0..k)
                .map(|i| (Id::from(format!("a{i}")), old.choose(&mut rng).unwrap().clone()))
                .collect(),
            morphisms: BTreeMap::new(),
            target: "L".into(),
            embedding: None,
        };

        let teacher_meaning = random_presheaf(&mut rng, &l, 3);
        let probe = Speaker::new("t", l.clone(), emptied_above(&teacher_meaning, "L")).unwrap();
        let apex = e.limit(&probe).unwrap();
        prop_assume!(!apex.is_empty());
        let mut values = teacher_meaning.values().clone();
        values.insert("L".into(), apex.element_ids("").into_iter().collect());
        let mut actions = teacher_meaning.actions().clone();
        actions.insert("id_L".into(), values["L"].iter().map(|x| (x.clone(), x.clone())).collect());
        let teacher = Speaker::from_tables("t", l.clone(), values, actions).unwrap();
        let teacher_before = teacher.clone();

        let learner = Speaker::new("q", l.clone(), emptied_above(&random_presheaf(&mut rng, &l, 3), "L")).unwrap();
        let (after, report) =
            acquire_by_paraphrasis(&teacher, &learner, "L", &e, &ParaphrasisOptions::new("ev")).unwrap();
        prop_assert_eq!(&teacher, &teacher_before);

        let limit = e.limit(&learner).unwrap();
        if limit.is_empty() {
            prop_assert_eq!(report.outcome, Outcome::NoSense);
            prop_assert_eq!(&after, &learner);
            return Ok(());
        }
        prop_assert_eq!(report.outcome, Outcome::Learned);
        prop_assert_eq!(after.fibre("L").unwrap().len(), limit.len());
        prop_assert_eq!(report.new_edges.len(), k);
        for edge in &report.new_edges {
            let leg = limit.leg(&edge.leg, "ev:").unwrap();
            prop_assert_eq!(after.meaning().action(&edge.morphism).unwrap(), &leg);
        }
        let back = restrict_to_old(&after, learner.meaning());
        for x in &old {
            prop_assert_eq!(back.value(x).unwrap(), learner.fibre(x).unwrap());
        }
        for (m, a) in base.morphisms() {
            prop_assert_eq!(after.language().arrow_of(m).unwrap(), a);
            prop_assert_eq!(back.action(m).unwrap(), learner.meaning().action(m).unwrap());
        }
    }
}
