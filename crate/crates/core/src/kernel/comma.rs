use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::category::FinCategory;
use super::functor::CatFunctor;
use super::union_find::UnionFind;
use crate::error::{Error, Result};
use crate::id::Id;

/// An object `(d, f : L → p d)` of a comma category `L ↓ p`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CommaObject {
    pub d: Id,
    pub f: Id,
}

impl CommaObject {
    pub fn id(&self) -> Id {
        Id::from(format!("{}|{}", self.d, self.f))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommaCategory {
    pub category: FinCategory,
    pub labels: BTreeMap<Id, CommaObject>,
}

/// `L ↓ p`: objects are pairs `(d, f : L → p d)`; a morphism
/// `(d₁, f₁) → (d₂, f₂)` is `g : d₁ → d₂` with `p(g)∘f₁ = f₂`.
pub fn comma_category(l: &str, p: &CatFunctor) -> Result<CommaCategory> {
    let dom = p.dom();
    let cod = p.cod();
    if !cod.has_object(l) {
        return Err(Error::UnknownObject(Id::new(l)));
    }
    let mut b = FinCategory::builder();
    let mut labels = BTreeMap::new();
    for d in dom.objects() {
        let pd = p.on_object(d)?;
        for f in cod.hom(l, pd) {
            let o = CommaObject {
                d: d.clone(),
                f: f.clone(),
            };
            let oid = o.id();
            b = b
                .object(oid.clone())
                .identity(oid.clone(), Id::from(format!("{}|{}", dom.identity(d)?, f)));
            labels.insert(oid, o);
        }
    }
    // Morphism ids are `g|f₁`, determined by the underlying g and the source.
    let mut arrows: Vec<(Id, Id, Id, Id)> = Vec::new();
    for (g, a) in dom.morphisms() {
        if dom.is_identity(g) {
            continue;
        }
        let pg = p.on_morphism(g)?;
        for f1 in cod.hom(l, p.on_object(&a.src)?) {
            let f2 = cod.compose(pg, f1)?;
            let src = CommaObject {
                d: a.src.clone(),
                f: f1.clone(),
            }
            .id();
            let tgt = CommaObject {
                d: a.tgt.clone(),
                f: f2.clone(),
            }
            .id();
            let mid = Id::from(format!("{g}|{f1}"));
            b = b.morphism(mid.clone(), src, tgt);
            arrows.push((mid, g.clone(), f1.clone(), f2.clone()));
        }
    }
    // Composites: (g₂|f₂)∘(g₁|f₁) = (g₂∘g₁)|f₁.
    let mut by_source: BTreeMap<(Id, Id), Vec<(Id, Id)>> = BTreeMap::new();
    for (mid, g, f1, _) in &arrows {
        let d = dom.src(g)?.clone();
        by_source
            .entry((d, f1.clone()))
            .or_default()
            .push((mid.clone(), g.clone()));
    }
    for (m1, g1, f1, f2) in &arrows {
        let d2 = dom.tgt(g1)?.clone();
        for (m2, g2) in by_source.get(&(d2, f2.clone())).into_iter().flatten() {
            let g21 = dom.compose(g2, g1)?;
            b = b.compose(m2.clone(), m1.clone(), Id::from(format!("{g21}|{f1}")));
        }
    }
    let category = b.build_unchecked()?;
    Ok(CommaCategory { category, labels })
}

/// `π₀`: objects grouped by zigzag connectivity, blocks ordered by their
/// least object.
pub fn connected_components(c: &FinCategory) -> Vec<BTreeSet<Id>> {
    let objs: Vec<&Id> = c.objects().collect();
    let ix: BTreeMap<&Id, usize> = objs.iter().enumerate().map(|(i, o)| (*o, i)).collect();
    let mut uf = UnionFind::new(objs.len());
    for (_, a) in c.morphisms() {
        uf.union(ix[&a.src], ix[&a.tgt]);
    }
    uf.blocks()
        .into_iter()
        .map(|b| b.into_iter().map(|i| objs[i].clone()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::kernel::validate_category;

    #[test]
    fn comma_over_terminal_identity() {
        let t = Arc::new(FinCategory::terminal());
        let c = comma_category("*", &CatFunctor::identity(t)).unwrap();
        assert_eq!(c.category.object_count(), 1);
        assert_eq!(c.category.morphism_count(), 1);
    }

    #[test]
    fn comma_with_empty_domain_is_empty() {
        let empty = Arc::new(FinCategory::builder().build().unwrap());
        let t = Arc::new(FinCategory::terminal());
        let p = CatFunctor::new(empty, t, BTreeMap::new(), BTreeMap::new()).unwrap();
        let c = comma_category("*", &p).unwrap();
        assert_eq!(c.category.object_count(), 0);
    }

    #[test]
    fn comma_of_chain_is_a_category() {
        let chain = Arc::new(
            FinCategory::builder()
                .object("A")
                .object("B")
                .object("C")
                .morphism("f", "A", "B")
                .morphism("g", "B", "C")
                .morphism("gf", "A", "C")
                .compose("g", "f", "gf")
                .build()
                .unwrap(),
        );
        let c = comma_category("A", &CatFunctor::identity(chain)).unwrap();
        // (A,id) (B,f) (C,gf)
        assert_eq!(c.category.object_count(), 3);
        assert!(validate_category(&c.category).is_empty());
        assert_eq!(connected_components(&c.category).len(), 1);
    }

    #[test]
    fn components_of_discrete_and_arrow() {
        let d = FinCategory::discrete(["A", "B", "C"]);
        assert_eq!(connected_components(&d).len(), 3);
        let a = FinCategory::arrow("A", "f", "B");
        assert_eq!(connected_components(&a).len(), 1);
    }

    #[test]
    fn components_of_zigzag() {
        let c = FinCategory::builder()
            .object("A")
            .object("B")
            .object("C")
            .object("D")
            .morphism("f", "A", "B")
            .morphism("g", "C", "B")
            .build()
            .unwrap();
        let blocks = connected_components(&c);
        assert_eq!(
            blocks,
            vec![
                ["A", "B", "C"].into_iter().map(Id::new).collect(),
                ["D"].into_iter().map(Id::new).collect::<BTreeSet<_>>(),
            ]
        );
        assert_eq!(connected_components(&c.opposite()), blocks);
    }
}
