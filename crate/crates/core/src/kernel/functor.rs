use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::category::FinCategory;
use super::Violation;
use crate::error::{Error, Result};
use crate::id::Id;

/// A functor between finite categories, given by its object and morphism
/// tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatFunctor {
    dom: Arc<FinCategory>,
    cod: Arc<FinCategory>,
    objects: BTreeMap<Id, Id>,
    morphisms: BTreeMap<Id, Id>,
}

impl CatFunctor {
    pub fn new(
        dom: Arc<FinCategory>,
        cod: Arc<FinCategory>,
        objects: BTreeMap<Id, Id>,
        morphisms: BTreeMap<Id, Id>,
    ) -> Result<Self> {
        let f = Self::new_unchecked(dom, cod, objects, morphisms);
        let report = validate_functor(&f);
        if report.is_empty() {
            Ok(f)
        } else {
            Err(Error::InvalidFunctor(report))
        }
    }

    pub fn new_unchecked(
        dom: Arc<FinCategory>,
        cod: Arc<FinCategory>,
        objects: BTreeMap<Id, Id>,
        morphisms: BTreeMap<Id, Id>,
    ) -> Self {
        CatFunctor {
            dom,
            cod,
            objects,
            morphisms,
        }
    }

    /// Build from an object map and the images of the non-identity
    /// morphisms; identities are mapped to identities.
    pub fn from_maps<O, M>(
        dom: Arc<FinCategory>,
        cod: Arc<FinCategory>,
        objects: O,
        morphisms: M,
    ) -> Result<Self>
    where
        O: IntoIterator<Item = (Id, Id)>,
        M: IntoIterator<Item = (Id, Id)>,
    {
        let objects: BTreeMap<Id, Id> = objects.into_iter().collect();
        let mut mmap: BTreeMap<Id, Id> = morphisms.into_iter().collect();
        for (x, i) in dom.identities() {
            if let Some(y) = objects.get(x) {
                let j = cod.identity(y)?;
                mmap.entry(i.clone()).or_insert_with(|| j.clone());
            }
        }
        Self::new(dom, cod, objects, mmap)
    }

    pub fn identity(c: Arc<FinCategory>) -> Self {
        let objects = c.objects().map(|x| (x.clone(), x.clone())).collect();
        let morphisms = c.morphism_ids().map(|m| (m.clone(), m.clone())).collect();
        CatFunctor {
            dom: c.clone(),
            cod: c,
            objects,
            morphisms,
        }
    }

    pub fn dom(&self) -> &Arc<FinCategory> {
        &self.dom
    }

    pub fn cod(&self) -> &Arc<FinCategory> {
        &self.cod
    }

    pub fn object_map(&self) -> &BTreeMap<Id, Id> {
        &self.objects
    }

    pub fn morphism_map(&self) -> &BTreeMap<Id, Id> {
        &self.morphisms
    }

    pub fn on_object(&self, x: &str) -> Result<&Id> {
        self.objects
            .get(x)
            .ok_or_else(|| Error::UnknownObject(Id::new(x)))
    }

    pub fn on_morphism(&self, m: &str) -> Result<&Id> {
        self.morphisms
            .get(m)
            .ok_or_else(|| Error::UnknownMorphism(Id::new(m)))
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &CatFunctor) -> Result<CatFunctor> {
        if !same_category(&self.cod, &other.dom) {
            return Err(Error::BaseMismatch);
        }
        let objects = self
            .objects
            .iter()
            .map(|(x, y)| Ok((x.clone(), other.on_object(y)?.clone())))
            .collect::<Result<_>>()?;
        let morphisms = self
            .morphisms
            .iter()
            .map(|(m, n)| Ok((m.clone(), other.on_morphism(n)?.clone())))
            .collect::<Result<_>>()?;
        Ok(CatFunctor {
            dom: self.dom.clone(),
            cod: other.cod.clone(),
            objects,
            morphisms,
        })
    }

    /// The same tables read as a functor `dom^op → cod^op`.
    pub fn opposite(&self) -> CatFunctor {
        CatFunctor {
            dom: Arc::new(self.dom.opposite()),
            cod: Arc::new(self.cod.opposite()),
            objects: self.objects.clone(),
            morphisms: self.morphisms.clone(),
        }
    }
}

pub(crate) fn same_category(a: &Arc<FinCategory>, b: &Arc<FinCategory>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Totality, endpoints, identities and composites, all checked exhaustively.
pub fn validate_functor(f: &CatFunctor) -> Vec<Violation> {
    let mut out = Vec::new();
    for x in f.dom.objects() {
        match f.objects.get(x) {
            None => out.push(Violation::NotTotal { at: x.clone() }),
            Some(y) if !f.cod.has_object(y) => out.push(Violation::UnknownObject {
                at: x.clone(),
                object: y.clone(),
            }),
            Some(_) => {}
        }
    }
    for (m, a) in f.dom.morphisms() {
        let Some(n) = f.morphisms.get(m) else {
            out.push(Violation::NotTotal { at: m.clone() });
            continue;
        };
        let Ok(b) = f.cod.arrow_of(n) else {
            out.push(Violation::UnknownMorphism {
                at: m.clone(),
                morphism: n.clone(),
            });
            continue;
        };
        if f.objects.get(&a.src) != Some(&b.src) || f.objects.get(&a.tgt) != Some(&b.tgt) {
            out.push(Violation::EndpointsNotPreserved {
                morphism: m.clone(),
            });
        }
    }
    if !out.is_empty() {
        return out;
    }
    for (x, i) in f.dom.identities() {
        let y = &f.objects[x];
        if f.cod.identity(y).ok() != Some(&f.morphisms[i]) {
            out.push(Violation::IdentityNotPreserved { object: x.clone() });
        }
    }
    for ((g, h), gh) in f.dom.composition_table() {
        let lhs = &f.morphisms[gh];
        match f.cod.compose(&f.morphisms[g], &f.morphisms[h]) {
            Ok(rhs) if rhs == lhs => {}
            Err(Error::NotClosed) => {}
            _ => out.push(Violation::CompositionNotPreserved {
                second: g.clone(),
                first: h.clone(),
            }),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arrow() -> Arc<FinCategory> {
        Arc::new(FinCategory::arrow("A", "f", "B"))
    }

    #[test]
    fn identity_functor_is_valid() {
        let f = CatFunctor::identity(arrow());
        assert!(validate_functor(&f).is_empty());
    }

    #[test]
    fn collapsing_arrow_onto_point() {
        let t = Arc::new(FinCategory::terminal());
        let f = CatFunctor::from_maps(
            arrow(),
            t,
            [("A".into(), "*".into()), ("B".into(), "*".into())],
            [("f".into(), "id_*".into())],
        )
        .unwrap();
        assert_eq!(f.on_morphism("f").unwrap(), "id_*");
    }

    #[test]
    fn endpoint_violation_is_reported() {
        let f = CatFunctor::new_unchecked(
            arrow(),
            arrow(),
            [("A".into(), "B".into()), ("B".into(), "B".into())].into(),
            [
                ("f".into(), "f".into()),
                ("id_A".into(), "id_B".into()),
                ("id_B".into(), "id_B".into()),
            ]
            .into(),
        );
        assert_eq!(
            validate_functor(&f),
            vec![Violation::EndpointsNotPreserved {
                morphism: "f".into()
            }]
        );
    }

    #[test]
    fn composite_and_opposite() {
        let id = CatFunctor::identity(arrow());
        assert_eq!(id.then(&id).unwrap(), id);
        let op = id.opposite();
        assert!(validate_functor(&op).is_empty());
        assert_eq!(op.opposite(), id);
    }
}
