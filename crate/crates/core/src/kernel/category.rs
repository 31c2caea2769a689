use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::Violation;
use crate::error::{Error, Result};
use crate::id::Id;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Arrow {
    pub src: Id,
    pub tgt: Id,
}

/// A category given by explicit finite tables.
///
/// `compose` is keyed `(g, f) ↦ g∘f`. A category built from a truncated
/// construction has `closed == false`: some composable pairs have no entry,
/// and validation only checks the entries that exist.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawCategory", into = "RawCategory")]
pub struct FinCategory {
    objects: BTreeSet<Id>,
    morphisms: BTreeMap<Id, Arrow>,
    identities: BTreeMap<Id, Id>,
    compose: BTreeMap<(Id, Id), Id>,
    closed: bool,
    hom: BTreeMap<(Id, Id), Vec<Id>>,
}

impl FinCategory {
    pub fn builder() -> CategoryBuilder {
        CategoryBuilder::default()
    }

    /// The category with one object `*` and only its identity.
    pub fn terminal() -> Self {
        Self::discrete(["*"])
    }

    pub fn discrete<I, S>(objects: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<Id>,
    {
        let mut b = Self::builder();
        for o in objects {
            b = b.object(o);
        }
        b.build().expect("discrete categories are valid")
    }

    /// `src → tgt` with a single non-identity arrow.
    pub fn arrow(src: &str, name: &str, tgt: &str) -> Self {
        Self::builder()
            .object(src)
            .object(tgt)
            .morphism(name, src, tgt)
            .build()
            .expect("arrow category is valid")
    }

    pub fn objects(&self) -> impl ExactSizeIterator<Item = &Id> + Clone {
        self.objects.iter()
    }

    pub fn morphisms(&self) -> impl ExactSizeIterator<Item = (&Id, &Arrow)> + Clone {
        self.morphisms.iter()
    }

    pub fn morphism_ids(&self) -> impl ExactSizeIterator<Item = &Id> + Clone {
        self.morphisms.keys()
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn morphism_count(&self) -> usize {
        self.morphisms.len()
    }

    pub fn has_object(&self, x: &str) -> bool {
        self.objects.contains(x)
    }

    pub fn has_morphism(&self, m: &str) -> bool {
        self.morphisms.contains_key(m)
    }

    pub fn arrow_of(&self, m: &str) -> Result<&Arrow> {
        self.morphisms
            .get(m)
            .ok_or_else(|| Error::UnknownMorphism(Id::new(m)))
    }

    pub fn src(&self, m: &str) -> Result<&Id> {
        self.arrow_of(m).map(|a| &a.src)
    }

    pub fn tgt(&self, m: &str) -> Result<&Id> {
        self.arrow_of(m).map(|a| &a.tgt)
    }

    pub fn identity(&self, x: &str) -> Result<&Id> {
        self.identities
            .get(x)
            .ok_or_else(|| Error::UnknownObject(Id::new(x)))
    }

    pub fn identities(&self) -> &BTreeMap<Id, Id> {
        &self.identities
    }

    pub fn is_identity(&self, m: &str) -> bool {
        match self.morphisms.get(m) {
            Some(a) => self.identities.get(&a.src).is_some_and(|i| i.as_str() == m),
            None => false,
        }
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn composition_table(&self) -> &BTreeMap<(Id, Id), Id> {
        &self.compose
    }

    /// Morphisms `x → y`, in identifier order.
    pub fn hom(&self, x: &str, y: &str) -> &[Id] {
        self.hom
            .get(&(Id::new(x), Id::new(y)))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Morphisms with the given source.
    pub fn out_of<'a>(&'a self, x: &'a str) -> impl Iterator<Item = (&'a Id, &'a Arrow)> + 'a {
        self.morphisms
            .iter()
            .filter(move |(_, a)| a.src.as_str() == x)
    }

    /// Morphisms with the given target.
    pub fn into_obj<'a>(&'a self, x: &'a str) -> impl Iterator<Item = (&'a Id, &'a Arrow)> + 'a {
        self.morphisms
            .iter()
            .filter(move |(_, a)| a.tgt.as_str() == x)
    }

    /// `g∘f`.
    pub fn compose(&self, g: &str, f: &str) -> Result<&Id> {
        let fa = self.arrow_of(f)?;
        let ga = self.arrow_of(g)?;
        if fa.tgt != ga.src {
            return Err(Error::NotComposable {
                first: Id::new(f),
                second: Id::new(g),
            });
        }
        self.compose
            .get(&(Id::new(g), Id::new(f)))
            .ok_or(Error::NotClosed)
    }

    /// Fold a path (first-applied first) down to a single morphism; the empty
    /// path at `at` is its identity.
    pub fn compose_path(&self, at: &str, path: &[Id]) -> Result<Id> {
        let mut acc = self.identity(at)?.clone();
        for m in path {
            acc = self.compose(m, &acc)?.clone();
        }
        Ok(acc)
    }

    pub fn opposite(&self) -> FinCategory {
        let morphisms = self
            .morphisms
            .iter()
            .map(|(m, a)| {
                (
                    m.clone(),
                    Arrow {
                        src: a.tgt.clone(),
                        tgt: a.src.clone(),
                    },
                )
            })
            .collect();
        let compose = self
            .compose
            .iter()
            .map(|((g, f), h)| ((f.clone(), g.clone()), h.clone()))
            .collect();
        FinCategory::assemble(
            self.objects.clone(),
            morphisms,
            self.identities.clone(),
            compose,
            self.closed,
        )
    }

    /// Non-identity morphisms.
    pub fn proper_morphisms(&self) -> impl Iterator<Item = (&Id, &Arrow)> {
        self.morphisms.iter().filter(|(m, _)| !self.is_identity(m))
    }

    fn assemble(
        objects: BTreeSet<Id>,
        morphisms: BTreeMap<Id, Arrow>,
        identities: BTreeMap<Id, Id>,
        compose: BTreeMap<(Id, Id), Id>,
        closed: bool,
    ) -> Self {
        let mut hom: BTreeMap<(Id, Id), Vec<Id>> = BTreeMap::new();
        for (m, a) in &morphisms {
            hom.entry((a.src.clone(), a.tgt.clone()))
                .or_default()
                .push(m.clone());
        }
        FinCategory {
            objects,
            morphisms,
            identities,
            compose,
            closed,
            hom,
        }
    }
}

/// Incremental construction of a [`FinCategory`].
///
/// Identities default to `id_X` and their composition entries are filled in
/// automatically; everything else must be listed.
#[derive(Debug, Clone, Default)]
pub struct CategoryBuilder {
    objects: Vec<Id>,
    morphisms: Vec<(Id, Id, Id)>,
    identities: Vec<(Id, Id)>,
    compose: Vec<(Id, Id, Id)>,
    truncated: bool,
}

impl CategoryBuilder {
    pub fn object(mut self, x: impl Into<Id>) -> Self {
        self.objects.push(x.into());
        self
    }

    pub fn morphism(mut self, m: impl Into<Id>, src: impl Into<Id>, tgt: impl Into<Id>) -> Self {
        self.morphisms.push((m.into(), src.into(), tgt.into()));
        self
    }

    pub fn identity(mut self, x: impl Into<Id>, m: impl Into<Id>) -> Self {
        self.identities.push((x.into(), m.into()));
        self
    }

    /// Record `g∘f = h`.
    pub fn compose(mut self, g: impl Into<Id>, f: impl Into<Id>, h: impl Into<Id>) -> Self {
        self.compose.push((g.into(), f.into(), h.into()));
        self
    }

    pub fn truncated(mut self) -> Self {
        self.truncated = true;
        self
    }

    pub fn build(self) -> Result<FinCategory> {
        let c = self.build_unchecked()?;
        let report = validate_category(&c);
        if report.is_empty() {
            Ok(c)
        } else {
            Err(Error::InvalidCategory(report))
        }
    }

    /// Assemble the tables without checking the category laws. Only
    /// structurally unrepresentable input (duplicate ids, dangling
    /// endpoints) is rejected.
    pub fn build_unchecked(self) -> Result<FinCategory> {
        let mut objects = BTreeSet::new();
        for o in self.objects {
            if !objects.insert(o.clone()) {
                return Err(Error::DuplicateId(o));
            }
        }
        let mut morphisms = BTreeMap::new();
        for (m, s, t) in self.morphisms {
            for end in [&s, &t] {
                if !objects.contains(end) {
                    return Err(Error::UnknownObject(end.clone()));
                }
            }
            if morphisms
                .insert(m.clone(), Arrow { src: s, tgt: t })
                .is_some()
            {
                return Err(Error::DuplicateId(m));
            }
        }
        let mut identities = BTreeMap::new();
        for (x, m) in self.identities {
            if !objects.contains(&x) {
                return Err(Error::UnknownObject(x));
            }
            match morphisms.get(&m) {
                Some(a) if a.src == x && a.tgt == x => {}
                Some(_) => return Err(Error::DuplicateId(m)),
                None => {
                    morphisms.insert(
                        m.clone(),
                        Arrow {
                            src: x.clone(),
                            tgt: x.clone(),
                        },
                    );
                }
            }
            identities.insert(x, m);
        }
        for x in &objects {
            if !identities.contains_key(x) {
                let m = Id::from(format!("id_{x}"));
                if morphisms.contains_key(&m) {
                    return Err(Error::DuplicateId(m));
                }
                morphisms.insert(
                    m.clone(),
                    Arrow {
                        src: x.clone(),
                        tgt: x.clone(),
                    },
                );
                identities.insert(x.clone(), m);
            }
        }
        let mut compose = BTreeMap::new();
        for (g, f, h) in self.compose {
            compose.insert((g, f), h);
        }
        for (m, a) in &morphisms {
            let id_src = &identities[&a.src];
            let id_tgt = &identities[&a.tgt];
            compose
                .entry((m.clone(), id_src.clone()))
                .or_insert_with(|| m.clone());
            compose
                .entry((id_tgt.clone(), m.clone()))
                .or_insert_with(|| m.clone());
        }
        Ok(FinCategory::assemble(
            objects,
            morphisms,
            identities,
            compose,
            !self.truncated,
        ))
    }
}

/// Check every category law exhaustively. Empty means valid.
///
/// On a truncated category missing composites are allowed and triples whose
/// composites are missing are skipped.
pub fn validate_category(c: &FinCategory) -> Vec<Violation> {
    let mut out = Vec::new();
    for x in &c.objects {
        match c.identities.get(x) {
            None => out.push(Violation::MissingIdentity { object: x.clone() }),
            Some(i) => match c.morphisms.get(i) {
                Some(a) if a.src == *x && a.tgt == *x => {}
                _ => out.push(Violation::BadIdentity {
                    object: x.clone(),
                    morphism: i.clone(),
                }),
            },
        }
    }
    for (m, a) in &c.morphisms {
        for end in [&a.src, &a.tgt] {
            if !c.objects.contains(end) {
                out.push(Violation::UnknownObject {
                    at: m.clone(),
                    object: end.clone(),
                });
            }
        }
    }
    if !out.is_empty() {
        return out;
    }

    for ((g, f), h) in &c.compose {
        let (Some(ga), Some(fa)) = (c.morphisms.get(g), c.morphisms.get(f)) else {
            let missing = if c.morphisms.contains_key(g) { f } else { g };
            out.push(Violation::UnknownMorphism {
                at: h.clone(),
                morphism: missing.clone(),
            });
            continue;
        };
        if fa.tgt != ga.src {
            out.push(Violation::NotComposable {
                second: g.clone(),
                first: f.clone(),
            });
            continue;
        }
        match c.morphisms.get(h) {
            None => out.push(Violation::UnknownMorphism {
                at: h.clone(),
                morphism: h.clone(),
            }),
            Some(ha) if ha.src != fa.src || ha.tgt != ga.tgt => {
                out.push(Violation::CompositeEndpoints {
                    second: g.clone(),
                    first: f.clone(),
                    composite: h.clone(),
                })
            }
            Some(_) => {}
        }
    }

    for (f, fa) in &c.morphisms {
        let id_src = &c.identities[&fa.src];
        let id_tgt = &c.identities[&fa.tgt];
        for (g, ff) in [(f, id_src), (id_tgt, f)] {
            match c.compose.get(&(g.clone(), ff.clone())) {
                Some(h) if h == f => {}
                Some(_) => out.push(Violation::IdentityNotNeutral {
                    identity: if g == f { ff.clone() } else { g.clone() },
                    morphism: f.clone(),
                }),
                None if c.closed => out.push(Violation::MissingComposite {
                    second: g.clone(),
                    first: ff.clone(),
                }),
                None => {}
            }
        }
    }

    if c.closed {
        for (f, fa) in &c.morphisms {
            for g in c.out_of(&fa.tgt).map(|(g, _)| g) {
                if !c.compose.contains_key(&(g.clone(), f.clone())) {
                    out.push(Violation::MissingComposite {
                        second: g.clone(),
                        first: f.clone(),
                    });
                }
            }
        }
    }
    if !out.is_empty() {
        return out;
    }

    for (f, fa) in &c.morphisms {
        for (g, ga) in c.out_of(&fa.tgt) {
            let Some(gf) = c.compose.get(&(g.clone(), f.clone())) else {
                continue;
            };
            for (h, _) in c.out_of(&ga.tgt) {
                let Some(hg) = c.compose.get(&(h.clone(), g.clone())) else {
                    continue;
                };
                let left = c.compose.get(&(h.clone(), gf.clone()));
                let right = c.compose.get(&(hg.clone(), f.clone()));
                if let (Some(l), Some(r)) = (left, right) {
                    if l != r {
                        out.push(Violation::NotAssociative {
                            third: h.clone(),
                            second: g.clone(),
                            first: f.clone(),
                            left: l.clone(),
                            right: r.clone(),
                        });
                    }
                }
            }
        }
    }
    out
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCategory {
    objects: Vec<Id>,
    #[serde(default)]
    morphisms: Vec<RawMorphism>,
    #[serde(default)]
    identities: BTreeMap<Id, Id>,
    #[serde(default)]
    compose: Vec<(Id, Id, Id)>,
    #[serde(default = "yes")]
    closed: bool,
}

fn yes() -> bool {
    true
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMorphism {
    id: Id,
    src: Id,
    tgt: Id,
}

impl TryFrom<RawCategory> for FinCategory {
    type Error = Error;

    fn try_from(raw: RawCategory) -> Result<Self> {
        let mut b = FinCategory::builder();
        for o in raw.objects {
            b = b.object(o);
        }
        for (x, m) in raw.identities {
            b = b.identity(x, m);
        }
        for m in raw.morphisms {
            if b.identities.iter().any(|(_, i)| *i == m.id) {
                continue;
            }
            b = b.morphism(m.id, m.src, m.tgt);
        }
        for (g, f, h) in raw.compose {
            b = b.compose(g, f, h);
        }
        if !raw.closed {
            b = b.truncated();
        }
        b.build()
    }
}

impl From<FinCategory> for RawCategory {
    fn from(c: FinCategory) -> Self {
        RawCategory {
            objects: c.objects.into_iter().collect(),
            morphisms: c
                .morphisms
                .into_iter()
                .map(|(id, a)| RawMorphism {
                    id,
                    src: a.src,
                    tgt: a.tgt,
                })
                .collect(),
            identities: c.identities,
            compose: c.compose.into_iter().map(|((g, f), h)| (g, f, h)).collect(),
            closed: c.closed,
        }
    }
}
