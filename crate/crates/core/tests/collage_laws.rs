use std::collections::BTreeMap;
use std::sync::Arc;

use fiblang_core::collage::{
    canonical_functor, collage_is_finite, extend_set_functor, fp_collage, normalize_word, Token,
    Word,
};
use fiblang_core::kernel::{
    free_category, validate_category, validate_functor, FinCategory, Quiver,
};
use fiblang_core::testing::{
    one_edge_word_count, pipeline_words, random_category, random_set_functor,
};
use fiblang_core::Id;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_quiver(rng: &mut ChaCha8Rng, c: &FinCategory, max_edges: usize) -> Quiver {
    let objs: Vec<&Id> = c.objects().collect();
    let mut q = Quiver::new(c.objects().cloned());
    for k in 0..rng.gen_range(0..=max_edges) {
        let a = *objs.choose(rng).unwrap();
        let b = *objs.choose(rng).unwrap();
        q = q.with_edge(format!("q{k}"), a.clone(), b.clone());
    }
    q
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn empty_quiver_changes_nothing(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = Arc::new(random_category(&mut rng, 4, 10));
        let col = fp_collage(c.clone(), Quiver::new(c.objects().cloned()), None).unwrap();
        prop_assert_eq!(col.to_fincategory().as_ref(), c.as_ref());
        let k = canonical_functor(&col);
        let images: std::collections::BTreeSet<_> = k.morphism_map().values().collect();
        prop_assert_eq!(images.len(), col.to_fincategory().morphism_count());
    }

    #[test]
    fn collage_matches_the_pipeline(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = Arc::new(random_category(&mut rng, 3, 6));
        let q = random_quiver(&mut rng, &c, 2);
        let n = 2;
        let col = fp_collage(c.clone(), q.clone(), Some(n)).unwrap();
        let ours: std::collections::BTreeSet<Word> = col.words().values().cloned().collect();
        prop_assert_eq!(ours, pipeline_words(&c, &q, n));
        let one = col.words().values().filter(|w| w.edge_count() == 1).count();
        prop_assert_eq!(one, one_edge_word_count(&c, &q));
    }

    #[test]
    fn closed_collages_are_categories(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = Arc::new(random_category(&mut rng, 4, 10));
        let q = random_quiver(&mut rng, &c, 3);
        if collage_is_finite(&c, &q).unwrap() {
            let col = fp_collage(c.clone(), q, None).unwrap();
            prop_assert!(col.is_closed());
            prop_assert!(validate_category(col.to_fincategory()).is_empty());
            prop_assert!(validate_functor(&canonical_functor(&col)).is_empty());
        } else {
            prop_assert!(fp_collage(c, q, None).is_err());
        }
    }

    #[test]
    fn discrete_bases_give_free_categories(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=4);
        let c = Arc::new(FinCategory::discrete((0..n).map(|i| format!("X{i}"))));
        let q = random_quiver(&mut rng, &c, 3);
        let bound = 3;
        let col = fp_collage(c, q.clone(), Some(bound)).unwrap();
        let free = free_category(&q, Some(bound)).unwrap();
        prop_assert_eq!(col.to_fincategory().morphism_count(), free.category.morphism_count());
    }

    #[test]
    fn extension_is_functorial(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = Arc::new(random_category(&mut rng, 3, 8));
        let q = random_quiver(&mut rng, &c, 2);
        prop_assume!(collage_is_finite(&c, &q).unwrap());
        let m = random_set_functor(&mut rng, c.clone(), 2);
        let mut acts = BTreeMap::new();
        for (e, a) in &q.edges {
            let targets: Vec<&Id> = m.value(&a.tgt).unwrap().iter().collect();
            let src = m.value(&a.src).unwrap();
            prop_assume!(!targets.is_empty() || src.is_empty());
            let act: BTreeMap<Id, Id> = src
                .iter()
                .map(|x| (x.clone(), (*targets.choose(&mut rng).unwrap()).clone()))
                .collect();
            acts.insert(e.clone(), act);
        }
        let col = fp_collage(c, q, None).unwrap();
        // SetFunctor::new checks every composite in the collage's table.
        let ext = extend_set_functor(&m, &col, &acts).unwrap();
        prop_assert_eq!(ext.restrict(&canonical_functor(&col)).unwrap(), m);
    }

    #[test]
    fn normalization_is_confluent(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = Arc::new(random_category(&mut rng, 3, 8));
        let q = random_quiver(&mut rng, &c, 3);
        let col = fp_collage(c.clone(), q.clone(), Some(3)).unwrap();
        let small: Vec<&Word> = col.words().values().filter(|w| w.edge_count() <= 1).collect();
        for _ in 0..40 {
            let w1 = *small.choose(&mut rng).unwrap();
            let next: Vec<&&Word> = small.iter().filter(|w| w.src(&c).unwrap() == w1.tgt(&c).unwrap()).collect();
            let w2 = **next.choose(&mut rng).unwrap();
            let next: Vec<&&Word> = small.iter().filter(|w| w.src(&c).unwrap() == w2.tgt(&c).unwrap()).collect();
            let w3 = **next.choose(&mut rng).unwrap();
            let left = col.compose_words(w3, &col.compose_words(w2, w1).unwrap()).unwrap();
            let right = col.compose_words(&col.compose_words(w3, w2).unwrap(), w1).unwrap();
            prop_assert_eq!(&left, &right);
            let raw: Vec<Token> = [w1, w2, w3].iter().flat_map(|w| w.tokens()).collect();
            prop_assert_eq!(&normalize_word(&c, &q, &raw).unwrap(), &left);
            prop_assert_eq!(normalize_word(&c, &q, &left.tokens()).unwrap(), left);
        }
    }
}
