use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::category::FinCategory;
use super::functor::{same_category, CatFunctor};
use super::Violation;
use crate::error::{Error, Result};
use crate::id::Id;

/// A covariant functor from a finite category into finite sets.
///
/// Presheaves are stored with `base` set to the opposite category.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetFunctor {
    base: Arc<FinCategory>,
    values: BTreeMap<Id, BTreeSet<Id>>,
    actions: BTreeMap<Id, BTreeMap<Id, Id>>,
}

impl SetFunctor {
    /// Identity actions may be omitted; they are filled in before the
    /// functor laws are checked.
    pub fn new(
        base: Arc<FinCategory>,
        values: BTreeMap<Id, BTreeSet<Id>>,
        actions: BTreeMap<Id, BTreeMap<Id, Id>>,
    ) -> Result<Self> {
        let f = Self::new_unchecked(base, values, actions);
        let report = validate_set_functor(&f);
        if report.is_empty() {
            Ok(f)
        } else {
            Err(Error::InvalidSetFunctor(report))
        }
    }

    pub fn new_unchecked(
        base: Arc<FinCategory>,
        values: BTreeMap<Id, BTreeSet<Id>>,
        mut actions: BTreeMap<Id, BTreeMap<Id, Id>>,
    ) -> Self {
        for (x, i) in base.identities() {
            if let Some(v) = values.get(x) {
                actions
                    .entry(i.clone())
                    .or_insert_with(|| v.iter().map(|e| (e.clone(), e.clone())).collect());
            }
        }
        SetFunctor {
            base,
            values,
            actions,
        }
    }

    /// The functor sending every object to the same one-element set.
    pub fn constant_singleton(base: Arc<FinCategory>, element: &str) -> Self {
        let e = Id::new(element);
        let values = base
            .objects()
            .map(|x| (x.clone(), BTreeSet::from([e.clone()])))
            .collect();
        let actions = base
            .morphism_ids()
            .map(|m| (m.clone(), BTreeMap::from([(e.clone(), e.clone())])))
            .collect();
        SetFunctor {
            base,
            values,
            actions,
        }
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.base
    }

    pub fn values(&self) -> &BTreeMap<Id, BTreeSet<Id>> {
        &self.values
    }

    pub fn actions(&self) -> &BTreeMap<Id, BTreeMap<Id, Id>> {
        &self.actions
    }

    pub fn value(&self, x: &str) -> Result<&BTreeSet<Id>> {
        self.values
            .get(x)
            .ok_or_else(|| Error::UnknownObject(Id::new(x)))
    }

    pub fn action(&self, m: &str) -> Result<&BTreeMap<Id, Id>> {
        self.actions
            .get(m)
            .ok_or_else(|| Error::UnknownMorphism(Id::new(m)))
    }

    pub fn apply(&self, m: &str, x: &str) -> Result<&Id> {
        self.action(m)?
            .get(x)
            .ok_or_else(|| Error::UnknownObject(Id::new(x)))
    }

    /// Precompose with `along : A → base`, giving a functor on `A`.
    pub fn restrict(&self, along: &CatFunctor) -> Result<SetFunctor> {
        if !same_category(along.cod(), &self.base) {
            return Err(Error::BaseMismatch);
        }
        let values = along
            .object_map()
            .iter()
            .map(|(a, x)| Ok((a.clone(), self.value(x)?.clone())))
            .collect::<Result<_>>()?;
        let actions = along
            .morphism_map()
            .iter()
            .map(|(a, m)| Ok((a.clone(), self.action(m)?.clone())))
            .collect::<Result<_>>()?;
        Ok(SetFunctor {
            base: along.dom().clone(),
            values,
            actions,
        })
    }
}

pub fn validate_set_functor(f: &SetFunctor) -> Vec<Violation> {
    let mut out = Vec::new();
    for x in f.base.objects() {
        if !f.values.contains_key(x) {
            out.push(Violation::NotTotal { at: x.clone() });
        }
    }
    for (m, a) in f.base.morphisms() {
        let Some(act) = f.actions.get(m) else {
            out.push(Violation::NotTotal { at: m.clone() });
            continue;
        };
        let (Some(src), Some(tgt)) = (f.values.get(&a.src), f.values.get(&a.tgt)) else {
            continue;
        };
        for x in src {
            match act.get(x) {
                None => out.push(Violation::NotTotal { at: m.clone() }),
                Some(y) if !tgt.contains(y) => out.push(Violation::ActionOutOfRange {
                    morphism: m.clone(),
                    element: x.clone(),
                }),
                Some(_) => {}
            }
        }
        if act.keys().any(|x| !src.contains(x)) {
            out.push(Violation::ActionOutOfRange {
                morphism: m.clone(),
                element: act.keys().find(|x| !src.contains(*x)).unwrap().clone(),
            });
        }
    }
    if !out.is_empty() {
        return out;
    }
    for (x, i) in f.base.identities() {
        if f.actions[i].iter().any(|(a, b)| a != b) {
            out.push(Violation::IdentityNotPreserved { object: x.clone() });
        }
    }
    for ((g, h), gh) in f.base.composition_table() {
        let (ag, ah, agh) = (&f.actions[g], &f.actions[h], &f.actions[gh]);
        if agh.iter().any(|(x, z)| ag.get(&ah[x]) != Some(z)) {
            out.push(Violation::CompositionNotPreserved {
                second: g.clone(),
                first: h.clone(),
            });
        }
    }
    out
}

/// Components `object ↦ (element ↦ element)` of a natural isomorphism.
pub type NaturalIso = BTreeMap<Id, BTreeMap<Id, Id>>;

/// Search for a natural isomorphism `F ≅ G` by backtracking with forward
/// propagation along every morphism.
pub fn natural_iso_check(f: &SetFunctor, g: &SetFunctor) -> Result<Option<NaturalIso>> {
    if !same_category(&f.base, &g.base) {
        return Err(Error::BaseMismatch);
    }
    let objs: Vec<&Id> = f.base.objects().collect();
    let fvals: Vec<Vec<&Id>> = objs.iter().map(|o| f.values[*o].iter().collect()).collect();
    let gvals: Vec<Vec<&Id>> = objs.iter().map(|o| g.values[*o].iter().collect()).collect();
    if fvals.iter().zip(&gvals).any(|(a, b)| a.len() != b.len()) {
        return Ok(None);
    }
    let obj_ix: BTreeMap<&Id, usize> = objs.iter().enumerate().map(|(i, o)| (*o, i)).collect();
    let index = |vals: &[&Id]| -> BTreeMap<Id, usize> {
        vals.iter()
            .enumerate()
            .map(|(i, v)| ((*v).clone(), i))
            .collect()
    };
    let fix: Vec<_> = fvals.iter().map(|v| index(v)).collect();
    let gix: Vec<_> = gvals.iter().map(|v| index(v)).collect();

    // out[o] = [(target object, F-action, G-action)] as index tables.
    type Edge = (usize, Vec<usize>, Vec<usize>);
    let mut out: Vec<Vec<Edge>> = vec![Vec::new(); objs.len()];
    for (m, a) in f.base.morphisms() {
        let (s, t) = (obj_ix[&a.src], obj_ix[&a.tgt]);
        let fa = fvals[s].iter().map(|x| fix[t][&f.actions[m][*x]]).collect();
        let ga = gvals[s].iter().map(|x| gix[t][&g.actions[m][*x]]).collect();
        out[s].push((t, fa, ga));
    }

    let empty = Assignment {
        fwd: fvals.iter().map(|v| vec![None; v.len()]).collect(),
        inv: fvals.iter().map(|v| vec![None; v.len()]).collect(),
    };
    let Some(sol) = search(empty, &out) else {
        return Ok(None);
    };
    let iso = objs
        .iter()
        .enumerate()
        .map(|(o, x)| {
            let comp = sol.fwd[o]
                .iter()
                .enumerate()
                .map(|(i, y)| (fvals[o][i].clone(), gvals[o][y.unwrap()].clone()))
                .collect();
            ((*x).clone(), comp)
        })
        .collect();
    Ok(Some(iso))
}

#[derive(Clone)]
struct Assignment {
    fwd: Vec<Vec<Option<usize>>>,
    inv: Vec<Vec<Option<usize>>>,
}

type Arrows = [Vec<(usize, Vec<usize>, Vec<usize>)>];

impl Assignment {
    fn assign(&mut self, o: usize, x: usize, y: usize, out: &Arrows) -> bool {
        let mut queue = vec![(o, x, y)];
        while let Some((o, x, y)) = queue.pop() {
            match (self.fwd[o][x], self.inv[o][y]) {
                (Some(y0), _) if y0 == y => continue,
                (None, None) => {
                    self.fwd[o][x] = Some(y);
                    self.inv[o][y] = Some(x);
                }
                _ => return false,
            }
            for (t, fa, ga) in &out[o] {
                queue.push((*t, fa[x], ga[y]));
            }
        }
        true
    }
}

fn search(state: Assignment, out: &Arrows) -> Option<Assignment> {
    let next = state
        .fwd
        .iter()
        .enumerate()
        .find_map(|(o, row)| row.iter().position(Option::is_none).map(|x| (o, x)));
    let Some((o, x)) = next else {
        return Some(state);
    };
    for y in 0..state.inv[o].len() {
        if state.inv[o][y].is_some() {
            continue;
        }
        let mut s = state.clone();
        if s.assign(o, x, y, out) {
            if let Some(done) = search(s, out) {
                return Some(done);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[&str]) -> BTreeSet<Id> {
        xs.iter().map(Id::new).collect()
    }

    fn func(pairs: &[(&str, &str)]) -> BTreeMap<Id, Id> {
        pairs
            .iter()
            .map(|(a, b)| (Id::new(a), Id::new(b)))
            .collect()
    }

    fn arrow_functor(a: &[&str], b: &[&str], f: &[(&str, &str)]) -> SetFunctor {
        let base = Arc::new(FinCategory::arrow("A", "f", "B"));
        SetFunctor::new(
            base,
            [("A".into(), set(a)), ("B".into(), set(b))].into(),
            [("f".into(), func(f))].into(),
        )
        .unwrap()
    }

    #[test]
    fn self_iso_is_identity_family() {
        let f = arrow_functor(&["a1", "a2"], &["b"], &[("a1", "b"), ("a2", "b")]);
        let iso = natural_iso_check(&f, &f).unwrap().unwrap();
        for comp in iso.values() {
            assert!(comp.iter().all(|(x, y)| x == y));
        }
    }

    #[test]
    fn size_mismatch_has_no_witness() {
        let f = arrow_functor(&["a1", "a2"], &["b"], &[("a1", "b"), ("a2", "b")]);
        let g = arrow_functor(&["a1"], &["b"], &[("a1", "b")]);
        assert_eq!(natural_iso_check(&f, &g).unwrap(), None);
    }

    #[test]
    fn renamed_singletons_are_iso() {
        let base = Arc::new(FinCategory::arrow("A", "f", "B"));
        let f = SetFunctor::constant_singleton(base.clone(), "x");
        let g = SetFunctor::constant_singleton(base, "y");
        let iso = natural_iso_check(&f, &g).unwrap().unwrap();
        assert_eq!(iso[&Id::new("A")], func(&[("x", "y")]));
        assert_eq!(iso[&Id::new("B")], func(&[("x", "y")]));
    }

    #[test]
    fn same_sizes_different_shape_is_not_iso() {
        // a1,a2 ↦ b1 versus a1 ↦ b1, a2 ↦ b2
        let f = arrow_functor(&["a1", "a2"], &["b1", "b2"], &[("a1", "b1"), ("a2", "b1")]);
        let g = arrow_functor(&["a1", "a2"], &["b1", "b2"], &[("a1", "b1"), ("a2", "b2")]);
        assert_eq!(natural_iso_check(&f, &g).unwrap(), None);
    }

    #[test]
    fn base_mismatch_is_an_error() {
        let f = SetFunctor::constant_singleton(Arc::new(FinCategory::terminal()), "x");
        let g = SetFunctor::constant_singleton(Arc::new(FinCategory::discrete(["A"])), "x");
        assert_eq!(natural_iso_check(&f, &g), Err(Error::BaseMismatch));
    }

    #[test]
    fn broken_composition_is_reported() {
        let base = Arc::new(
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
        let f = SetFunctor::new_unchecked(
            base,
            [
                ("A".into(), set(&["a"])),
                ("B".into(), set(&["b"])),
                ("C".into(), set(&["c1", "c2"])),
            ]
            .into(),
            [
                ("f".into(), func(&[("a", "b")])),
                ("g".into(), func(&[("b", "c1")])),
                ("gf".into(), func(&[("a", "c2")])),
            ]
            .into(),
        );
        assert_eq!(
            validate_set_functor(&f),
            vec![Violation::CompositionNotPreserved {
                second: "g".into(),
                first: "f".into()
            }]
        );
    }
}
