//! Discrete fibrations and their equivalence with presheaves.
//!
//! A presheaf on `L` is stored as a [`SetFunctor`] on `L.opposite()`. Its
//! category of elements has one object `x@A` per element `x ∈ P(A)` and one
//! morphism `f@x'` per pair `f : A → B`, `x' ∈ P(B)`, running
//! `P(f)(x')@A → x'@B`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::id::Id;
use crate::kernel::{
    comma_category, connected_components, validate_functor, CatFunctor, CommaObject, FinCategory,
    SetFunctor, Violation,
};

/// A functor with unique lifts, together with its lift table
/// `(total object E, base morphism f into p E) ↦ h`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CatFunctor", into = "CatFunctor")]
pub struct Fibration {
    proj: CatFunctor,
    lifts: BTreeMap<(Id, Id), Id>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FibrationCheck {
    Fibration(BTreeMap<(Id, Id), Id>),
    /// A pair `(E, f)` with zero or several lifts.
    Counterexample {
        object: Id,
        morphism: Id,
        lifts: Vec<Id>,
    },
}

impl FibrationCheck {
    pub fn holds(&self) -> bool {
        matches!(self, FibrationCheck::Fibration(_))
    }
}

/// Only source, target and the projection tables are consulted, so this
/// also runs on functors whose domain is not a lawful category.
pub fn is_discrete_fibration(p: &CatFunctor) -> FibrationCheck {
    let total = p.dom();
    let base = p.cod();
    let mut by_target: BTreeMap<(&Id, &Id), Vec<&Id>> = BTreeMap::new();
    for (h, a) in total.morphisms() {
        if let Some(ph) = p.morphism_map().get(h) {
            by_target.entry((&a.tgt, ph)).or_default().push(h);
        }
    }
    let mut lifts = BTreeMap::new();
    for e in total.objects() {
        let Some(pe) = p.object_map().get(e) else {
            continue;
        };
        for (f, _) in base.into_obj(pe) {
            let found = by_target.get(&(e, f)).map(Vec::as_slice).unwrap_or(&[]);
            if found.len() != 1 {
                return FibrationCheck::Counterexample {
                    object: e.clone(),
                    morphism: f.clone(),
                    lifts: found.iter().map(|h| (*h).clone()).collect(),
                };
            }
            lifts.insert((e.clone(), f.clone()), found[0].clone());
        }
    }
    FibrationCheck::Fibration(lifts)
}

impl Fibration {
    pub fn new(proj: CatFunctor) -> Result<Self> {
        match is_discrete_fibration(&proj) {
            FibrationCheck::Fibration(lifts) => Ok(Fibration { proj, lifts }),
            FibrationCheck::Counterexample {
                object,
                morphism,
                lifts,
            } => Err(Error::NotAFibration {
                object,
                morphism,
                lifts: lifts.len(),
            }),
        }
    }

    pub fn proj(&self) -> &CatFunctor {
        &self.proj
    }

    pub fn total(&self) -> &Arc<FinCategory> {
        self.proj.dom()
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        self.proj.cod()
    }

    pub fn lift_table(&self) -> &BTreeMap<(Id, Id), Id> {
        &self.lifts
    }

    /// The unique `h` with target `e` over `f`.
    pub fn lift(&self, e: &str, f: &str) -> Result<&Id> {
        self.lifts
            .get(&(Id::new(e), Id::new(f)))
            .ok_or_else(|| Error::UnknownMorphism(Id::new(f)))
    }

    /// Total objects over `c`, in identifier order.
    pub fn fibre(&self, c: &str) -> Vec<Id> {
        self.proj
            .object_map()
            .iter()
            .filter(|(_, b)| b.as_str() == c)
            .map(|(e, _)| e.clone())
            .collect()
    }
}

impl TryFrom<CatFunctor> for Fibration {
    type Error = Error;

    fn try_from(p: CatFunctor) -> Result<Self> {
        let report = validate_functor(&p);
        if !report.is_empty() {
            return Err(Error::InvalidFunctor(report));
        }
        Fibration::new(p)
    }
}

impl From<Fibration> for CatFunctor {
    fn from(f: Fibration) -> Self {
        f.proj
    }
}

/// The subcategory of a functor's domain sitting over one base object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fibre {
    pub objects: Vec<Id>,
    pub morphisms: Vec<Id>,
}

pub fn fibre(p: &CatFunctor, c: &str) -> Result<Fibre> {
    let id_c = p.cod().identity(c)?;
    let objects = p
        .object_map()
        .iter()
        .filter(|(_, b)| b.as_str() == c)
        .map(|(e, _)| e.clone())
        .collect();
    let morphisms = p
        .morphism_map()
        .iter()
        .filter(|(_, b)| *b == id_c)
        .map(|(h, _)| h.clone())
        .collect();
    Ok(Fibre { objects, morphisms })
}

pub fn element_object_id(base_object: &str, element: &str) -> Id {
    Id::from(format!("{element}@{base_object}"))
}

fn element_morphism_id(base_morphism: &str, target_element: &str) -> Id {
    Id::from(format!("{base_morphism}@{target_element}"))
}

/// Category of elements of a presheaf `P` (a functor on `L^op`), projected
/// onto `L`.
pub fn grothendieck(presheaf: &SetFunctor) -> Result<Fibration> {
    grothendieck_with_elements(presheaf).map(|(f, _)| f)
}

/// Total object ↦ (base object, element).
pub type Elements = BTreeMap<Id, (Id, Id)>;

/// As [`grothendieck`], also returning where each total object came from.
pub fn grothendieck_with_elements(presheaf: &SetFunctor) -> Result<(Fibration, Elements)> {
    let base = Arc::new(presheaf.base().opposite());
    let mut b = FinCategory::builder();
    let mut elements = BTreeMap::new();
    let mut omap = BTreeMap::new();
    let mut mmap = BTreeMap::new();
    for (a, xs) in presheaf.values() {
        for x in xs {
            let e = element_object_id(a, x);
            b = b.object(e.clone());
            elements.insert(e.clone(), (a.clone(), x.clone()));
            omap.insert(e, a.clone());
        }
    }
    for (f, arr) in base.morphisms() {
        let act = presheaf.action(f)?;
        let is_id = base.is_identity(f);
        for x2 in presheaf.value(&arr.tgt)? {
            let x1 = &act[x2];
            let h = element_morphism_id(f, x2);
            let src = element_object_id(&arr.src, x1);
            let tgt = element_object_id(&arr.tgt, x2);
            b = if is_id {
                b.identity(tgt, h.clone())
            } else {
                b.morphism(h.clone(), src, tgt)
            };
            mmap.insert(h, f.clone());
        }
    }
    for ((g, f), gf) in base.composition_table() {
        let act_g = presheaf.action(g)?;
        for x3 in presheaf.value(base.tgt(g)?)? {
            b = b.compose(
                element_morphism_id(g, x3),
                element_morphism_id(f, &act_g[x3]),
                element_morphism_id(gf, x3),
            );
        }
    }
    if !base.is_closed() {
        b = b.truncated();
    }
    let total = Arc::new(b.build_unchecked()?);
    let proj = CatFunctor::new_unchecked(total, base, omap, mmap);
    Ok((Fibration::new(proj)?, elements))
}

/// The presheaf of fibres: `A ↦ fibre(A)`, with `f : A → B` acting
/// `fibre(B) → fibre(A)` by taking sources of unique lifts.
pub fn to_presheaf(p: &Fibration) -> Result<SetFunctor> {
    let base = p.base();
    let values: BTreeMap<Id, BTreeSet<Id>> = base
        .objects()
        .map(|c| (c.clone(), p.fibre(c).into_iter().collect()))
        .collect();
    let mut actions = BTreeMap::new();
    for (f, a) in base.morphisms() {
        let mut act = BTreeMap::new();
        for e in &values[&a.tgt] {
            let h = p.lift(e, f)?;
            act.insert(e.clone(), p.total().src(h)?.clone());
        }
        actions.insert(f.clone(), act);
    }
    SetFunctor::new(Arc::new(base.opposite()), values, actions)
}

/// The reindexing function of `f : A → B`, from `fibre(B)` to `fibre(A)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReindexMap {
    pub morphism: Id,
    pub map: BTreeMap<Id, Id>,
}

pub fn reindexing(p: &Fibration, f: &str) -> Result<ReindexMap> {
    let tgt = p.base().tgt(f)?;
    let map = p
        .fibre(tgt)
        .into_iter()
        .map(|e| {
            let h = p.lift(&e, f)?;
            Ok((e, p.total().src(h)?.clone()))
        })
        .collect::<Result<_>>()?;
    Ok(ReindexMap {
        morphism: Id::new(f),
        map,
    })
}

/// Empty iff `h` is a functor between the total categories with
/// `q.proj ∘ h = p.proj`.
pub fn validate_fibration_morphism(h: &CatFunctor, p: &Fibration, q: &Fibration) -> Vec<Violation> {
    let mut out = Vec::new();
    if p.base() != q.base() {
        out.push(Violation::ProjectionMismatch {
            at: Id::new("base"),
        });
        return out;
    }
    if h.dom() != p.total() || h.cod() != q.total() {
        out.push(Violation::ProjectionMismatch {
            at: Id::new("total"),
        });
        return out;
    }
    out.extend(validate_functor(h));
    if !out.is_empty() {
        return out;
    }
    for (x, y) in h.object_map() {
        if q.proj.on_object(y).ok() != p.proj.on_object(x).ok() {
            out.push(Violation::ProjectionMismatch { at: x.clone() });
        }
    }
    for (m, n) in h.morphism_map() {
        if q.proj.on_morphism(n).ok() != p.proj.on_morphism(m).ok() {
            out.push(Violation::ProjectionMismatch { at: m.clone() });
        }
    }
    out
}

/// Search for an isomorphism of total categories commuting with both
/// projections. Returns the object bijection; morphisms follow from lifts.
pub fn iso_over_base(p: &Fibration, q: &Fibration) -> Option<BTreeMap<Id, Id>> {
    if p.base() != q.base() || p.total().morphism_count() != q.total().morphism_count() {
        return None;
    }
    let base = p.base();
    for c in base.objects() {
        if p.fibre(c).len() != q.fibre(c).len() {
            return None;
        }
    }
    let pt = p.total();
    let qt = q.total();
    let order: Vec<Id> = pt.objects().cloned().collect();
    search_iso(p, q, &order, BTreeMap::new(), BTreeSet::new(), pt, qt)
}

fn search_iso(
    p: &Fibration,
    q: &Fibration,
    order: &[Id],
    fwd: BTreeMap<Id, Id>,
    used: BTreeSet<Id>,
    pt: &FinCategory,
    qt: &FinCategory,
) -> Option<BTreeMap<Id, Id>> {
    let Some(next) = order.iter().find(|x| !fwd.contains_key(*x)) else {
        // Every morphism h : x → y must go to the lift at φ(y) with source φ(x).
        let ok = pt.morphisms().all(|(h, a)| {
            let f = &p.proj.morphism_map()[h];
            q.lift(&fwd[&a.tgt], f).ok().and_then(|k| qt.src(k).ok()) == Some(&fwd[&a.src])
        });
        return ok.then_some(fwd);
    };
    let c = &p.proj.object_map()[next];
    for cand in q.fibre(c) {
        if used.contains(&cand) {
            continue;
        }
        let (mut f2, mut u2) = (fwd.clone(), used.clone());
        if propagate(p, q, next.clone(), cand, &mut f2, &mut u2) {
            if let Some(done) = search_iso(p, q, order, f2, u2, pt, qt) {
                return Some(done);
            }
        }
    }
    None
}

fn propagate(
    p: &Fibration,
    q: &Fibration,
    x: Id,
    y: Id,
    fwd: &mut BTreeMap<Id, Id>,
    used: &mut BTreeSet<Id>,
) -> bool {
    let mut queue = vec![(x, y)];
    while let Some((x, y)) = queue.pop() {
        match fwd.get(&x) {
            Some(y0) if *y0 == y => continue,
            Some(_) => return false,
            None if used.contains(&y) => return false,
            None => {
                fwd.insert(x.clone(), y.clone());
                used.insert(y.clone());
            }
        }
        for (h, a) in p.total().into_obj(&x) {
            let f = &p.proj.morphism_map()[h];
            let Ok(k) = q.lift(&y, f) else {
                return false;
            };
            let Ok(ys) = q.total().src(k) else {
                return false;
            };
            queue.push((a.src.clone(), ys.clone()));
        }
    }
    true
}

/// `p = fibration.proj ∘ first`, with `fibration` the category of elements
/// of `components : A ↦ π₀(A ↓ p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub first: CatFunctor,
    pub fibration: Fibration,
    pub components: SetFunctor,
    /// `(base object, component name) ↦` the representative comma object.
    pub representatives: BTreeMap<(Id, Id), CommaObject>,
}

/// Preferred representative of a π₀ block: comma objects with an identity
/// leg first, then by `(d, f)`.
fn representative<'a>(
    base: &FinCategory,
    block: impl Iterator<Item = &'a CommaObject>,
) -> &'a CommaObject {
    block
        .min_by_key(|o| (!base.is_identity(&o.f), &o.d, &o.f))
        .expect("blocks are nonempty")
}

pub fn comprehensive_factorization(p: &CatFunctor) -> Result<Factorization> {
    let base = p.cod();
    let mut values: BTreeMap<Id, BTreeSet<Id>> = BTreeMap::new();
    // (base object, d, f) ↦ component name
    let mut block_of: BTreeMap<(Id, CommaObject), Id> = BTreeMap::new();
    let mut representatives = BTreeMap::new();
    for a in base.objects() {
        let comma = comma_category(a, p)?;
        let mut names = BTreeSet::new();
        for block in connected_components(&comma.category) {
            let members: Vec<&CommaObject> = block.iter().map(|o| &comma.labels[o]).collect();
            let rep = representative(base, members.iter().copied());
            let name = rep.id();
            for m in &members {
                block_of.insert((a.clone(), (*m).clone()), name.clone());
            }
            representatives.insert((a.clone(), name.clone()), rep.clone());
            names.insert(name);
        }
        values.insert(a.clone(), names);
    }
    // k : A' → A acts π₀(A ↓ p) → π₀(A' ↓ p) by precomposition.
    let mut actions = BTreeMap::new();
    for (k, arr) in base.morphisms() {
        let mut act = BTreeMap::new();
        for name in &values[&arr.tgt] {
            let rep = &representatives[&(arr.tgt.clone(), name.clone())];
            let moved = CommaObject {
                d: rep.d.clone(),
                f: base.compose(&rep.f, k)?.clone(),
            };
            act.insert(name.clone(), block_of[&(arr.src.clone(), moved)].clone());
        }
        actions.insert(k.clone(), act);
    }
    let components = SetFunctor::new(Arc::new(base.opposite()), values, actions)?;
    let fibration = grothendieck(&components)?;

    let dom = p.dom();
    let home = |d: &Id| -> Result<(Id, Id)> {
        let pd = p.on_object(d)?.clone();
        let o = CommaObject {
            d: d.clone(),
            f: base.identity(&pd)?.clone(),
        };
        Ok((pd.clone(), block_of[&(pd, o)].clone()))
    };
    let mut omap = BTreeMap::new();
    for d in dom.objects() {
        let (pd, name) = home(d)?;
        omap.insert(d.clone(), element_object_id(&pd, &name));
    }
    let mut mmap = BTreeMap::new();
    for (g, a) in dom.morphisms() {
        let (_, name) = home(&a.tgt)?;
        mmap.insert(g.clone(), element_morphism_id(p.on_morphism(g)?, &name));
    }
    let first = CatFunctor::new(dom.clone(), fibration.total().clone(), omap, mmap)?;
    Ok(Factorization {
        first,
        fibration,
        components,
        representatives,
    })
}
