use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::category::FinCategory;
use super::functor::{validate_functor, CatFunctor};
use super::set_functor::SetFunctor;
use super::Violation;
use crate::id::{tuple_id, Id};

/// A finite diagram: a functor out of a finite shape category.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagram {
    pub labels: CatFunctor,
}

impl Diagram {
    pub fn new(labels: CatFunctor) -> Self {
        Diagram { labels }
    }

    pub fn shape(&self) -> &Arc<FinCategory> {
        self.labels.dom()
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate_functor(&self.labels)
    }
}

/// The limit of a Set-valued diagram: all compatible families.
///
/// Tuples list one component per shape object, in the shape's object order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitCone {
    pub objects: Vec<Id>,
    pub apex: Vec<Vec<Id>>,
}

impl LimitCone {
    pub fn len(&self) -> usize {
        self.apex.len()
    }

    pub fn is_empty(&self) -> bool {
        self.apex.is_empty()
    }

    /// Canonical names of the apex elements, optionally prefixed.
    pub fn element_ids(&self, prefix: &str) -> Vec<Id> {
        self.apex
            .iter()
            .map(|t| Id::from(format!("{prefix}{}", tuple_id(t))))
            .collect()
    }

    /// The projection onto shape object `a`, keyed by prefixed apex names.
    pub fn leg(&self, a: &str, prefix: &str) -> Option<BTreeMap<Id, Id>> {
        let i = self.objects.iter().position(|o| o.as_str() == a)?;
        Some(
            self.element_ids(prefix)
                .into_iter()
                .zip(&self.apex)
                .map(|(n, t)| (n, t[i].clone()))
                .collect(),
        )
    }
}

/// Limit of a Set-valued functor on a finite shape, by depth-first search
/// over the product that rejects a partial family as soon as a shape
/// morphism between assigned components disagrees.
pub fn set_limit(f: &SetFunctor) -> LimitCone {
    let shape = f.base();
    let objects: Vec<Id> = shape.objects().cloned().collect();
    let ix: BTreeMap<&Id, usize> = objects.iter().enumerate().map(|(i, o)| (o, i)).collect();
    let values: Vec<Vec<&Id>> = objects
        .iter()
        .map(|o| f.values()[o].iter().collect())
        .collect();

    // Constraints that become checkable once position i is assigned.
    type Check<'a> = (usize, usize, &'a BTreeMap<Id, Id>);
    let mut checks: Vec<Vec<Check>> = vec![Vec::new(); objects.len()];
    for (m, a) in shape.morphisms() {
        if shape.is_identity(m) {
            continue;
        }
        let (s, t) = (ix[&a.src], ix[&a.tgt]);
        checks[s.max(t)].push((s, t, &f.actions()[m]));
    }

    let mut apex = Vec::new();
    let mut partial: Vec<&Id> = Vec::with_capacity(objects.len());
    extend(&values, &checks, &mut partial, &mut apex);
    LimitCone { objects, apex }
}

type Checks<'a> = [Vec<(usize, usize, &'a BTreeMap<Id, Id>)>];

fn extend<'a>(
    values: &[Vec<&'a Id>],
    checks: &Checks<'_>,
    partial: &mut Vec<&'a Id>,
    apex: &mut Vec<Vec<Id>>,
) {
    let i = partial.len();
    if i == values.len() {
        apex.push(partial.iter().map(|x| (*x).clone()).collect());
        return;
    }
    for x in &values[i] {
        partial.push(x);
        let ok = checks[i]
            .iter()
            .all(|(s, t, act)| act.get(partial[*s]) == Some(partial[*t]));
        if ok {
            extend(values, checks, partial, apex);
        }
        partial.pop();
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;

    fn set(xs: &[&str]) -> BTreeSet<Id> {
        xs.iter().map(Id::new).collect()
    }

    #[test]
    fn limit_over_point_is_the_value() {
        let f = SetFunctor::new(
            Arc::new(FinCategory::terminal()),
            [("*".into(), set(&["x", "y"]))].into(),
            BTreeMap::new(),
        )
        .unwrap();
        let l = set_limit(&f);
        assert_eq!(l.apex, vec![vec![Id::new("x")], vec![Id::new("y")]]);
        assert_eq!(l.element_ids(""), vec![Id::new("(x)"), Id::new("(y)")]);
    }

    #[test]
    fn binary_product() {
        let f = SetFunctor::new(
            Arc::new(FinCategory::discrete(["a", "b"])),
            [
                ("a".into(), set(&["1", "2"])),
                ("b".into(), set(&["x", "y", "z"])),
            ]
            .into(),
            BTreeMap::new(),
        )
        .unwrap();
        assert_eq!(set_limit(&f).len(), 6);
    }

    #[test]
    fn cospan_pullback() {
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
        let f = SetFunctor::new(
            shape,
            [
                ("a".into(), set(&["x1", "x2"])),
                ("b".into(), set(&["y1"])),
                ("c".into(), set(&["z1", "z2"])),
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
        let l = set_limit(&f);
        assert_eq!(
            l.apex,
            vec![vec![Id::new("x1"), Id::new("y1"), Id::new("z1")]]
        );
        assert_eq!(
            l.leg("b", "e/").unwrap(),
            BTreeMap::from([(Id::new("e/(x1,y1,z1)"), Id::new("y1"))])
        );
    }

    #[test]
    fn empty_factor_gives_empty_apex() {
        let f = SetFunctor::new(
            Arc::new(FinCategory::discrete(["a", "b"])),
            [("a".into(), set(&["1"])), ("b".into(), set(&[]))].into(),
            BTreeMap::new(),
        )
        .unwrap();
        assert!(set_limit(&f).is_empty());
    }
}
