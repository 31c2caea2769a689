use std::sync::Arc;

use fiblang_core::kernel::{
    connected_components, free_category, set_limit, underlying_quiver, validate_category,
    FinCategory, Quiver,
};
use fiblang_core::testing::{brute_force_limit, random_category, random_set_functor};
use fiblang_core::Id;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn category(seed: u64) -> FinCategory {
    random_category(&mut ChaCha8Rng::seed_from_u64(seed), 4, 10)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn generated_categories_are_lawful(seed in any::<u64>()) {
        let c = category(seed);
        prop_assert!(validate_category(&c).is_empty());
    }

    #[test]
    fn opposite_is_an_involution(seed in any::<u64>()) {
        let c = category(seed);
        let op = c.opposite();
        prop_assert!(validate_category(&op).is_empty());
        prop_assert_eq!(op.opposite(), c);
    }

    #[test]
    fn components_ignore_direction(seed in any::<u64>()) {
        let c = category(seed);
        prop_assert_eq!(connected_components(&c), connected_components(&c.opposite()));
    }

    #[test]
    fn counit_is_functorial(seed in any::<u64>(), len1 in 0usize..4, len2 in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = category(seed);
        let start = c.objects().next().unwrap().clone();
        let walk = |rng: &mut ChaCha8Rng, from: &Id, n: usize| {
            let mut at = from.clone();
            let mut path = Vec::new();
            for _ in 0..n {
                let outs: Vec<(Id, Id)> = c.out_of(&at).map(|(m, a)| (m.clone(), a.tgt.clone())).collect();
                let (m, t) = outs[rand::Rng::gen_range(rng, 0..outs.len())].clone();
                path.push(m);
                at = t;
            }
            (path, at)
        };
        let (p1, mid) = walk(&mut rng, &start, len1);
        let (p2, _) = walk(&mut rng, &mid, len2);
        let whole: Vec<Id> = p1.iter().chain(&p2).cloned().collect();
        let a = c.compose_path(&start, &whole).unwrap();
        let f = c.compose_path(&start, &p1).unwrap();
        let g = c.compose_path(&mid, &p2).unwrap();
        prop_assert_eq!(&a, c.compose(&g, &f).unwrap());
    }

    #[test]
    fn limits_match_the_product_filter(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = Arc::new(category(seed));
        let f = random_set_functor(&mut rng, shape, 3);
        let cone = set_limit(&f);
        let fast: std::collections::BTreeSet<Vec<Id>> = cone.apex.iter().cloned().collect();
        prop_assert_eq!(fast.len(), cone.len());
        prop_assert_eq!(fast, brute_force_limit(&f));
    }

    #[test]
    fn categories_round_trip_through_json(seed in any::<u64>()) {
        let c = category(seed);
        let s = serde_json::to_string(&c).unwrap();
        let back: FinCategory = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), s);
        prop_assert_eq!(back, c);
    }
}

#[test]
fn free_categories_count_paths() {
    // Acyclic: |morphisms| = |vertices| + |paths of length ≥ 1|.
    let q = Quiver::new(["A", "B", "C", "D"])
        .with_edge("f", "A", "B")
        .with_edge("g", "B", "C")
        .with_edge("h", "B", "C")
        .with_edge("k", "C", "D");
    let free = free_category(&q, None).unwrap();
    // length 1: 4, length 2: fg, fh, gk, hk, length 3: fgk, fhk
    assert_eq!(free.category.morphism_count(), 4 + 4 + 4 + 2);
    assert!(validate_category(&free.category).is_empty());
    let u = underlying_quiver(&free.category);
    assert_eq!(u.edges.len(), free.category.morphism_count());
}

#[test]
fn cospan_limit() {
    let shape = Arc::new(
        FinCategory::builder()
            .object("a")
            .object("b")
            .object("c")
            .morphism("u", "a", "c")
            .morphism("v", "b", "c")
            .build()
            .unwrap(),
    );
    let ids = |xs: &[&str]| xs.iter().map(Id::new).collect();
    let f = fiblang_core::kernel::SetFunctor::new(
        shape,
        [
            ("a".into(), ids(&["x1", "x2"])),
            ("b".into(), ids(&["y1"])),
            ("c".into(), ids(&["z1", "z2"])),
        ]
        .into(),
        [
            (
                "u".into(),
                [("x1".into(), "z1".into()), ("x2".into(), "z2".into())].into(),
            ),
            ("v".into(), [("y1".into(), "z1".into())].into()),
        ]
        .into(),
    )
    .unwrap();
    let cone = set_limit(&f);
    assert_eq!(
        cone.apex,
        vec![vec![Id::new("x1"), Id::new("y1"), Id::new("z1")]]
    );
    assert_eq!(brute_force_limit(&f).len(), 1);
}
