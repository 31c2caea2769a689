use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::explanation::{validate_explanation, Explanation};
use super::Speaker;
use crate::collage::{extend_set_functor, fp_collage};
use crate::error::{Error, Result};
use crate::fibration::{
    comprehensive_factorization, element_object_id, grothendieck_with_elements,
};
use crate::id::Id;
use crate::kernel::{
    CatFunctor, CommaObject, FinCategory, LimitCone, Quiver, SetFunctor, UnionFind,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AcquisitionKind {
    Example,
    MergedExample,
    Paraphrasis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Learned,
    NoSense,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitSummary {
    pub objects: Vec<Id>,
    pub elements: Vec<Id>,
}

impl LimitSummary {
    fn new(limit: &LimitCone, prefix: &str) -> Self {
        LimitSummary {
            objects: limit.objects.clone(),
            elements: limit.element_ids(prefix),
        }
    }
}

/// A quiver edge added by paraphrasis. `from → to` is the direction of the
/// cone leg (the edge in the opposite of the language); `morphism` is the
/// bare edge as a language morphism, running `to → from`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjoinedEdge {
    pub edge: Id,
    pub leg: Id,
    pub from: Id,
    pub to: Id,
    pub morphism: Id,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcquisitionReport {
    pub kind: AcquisitionKind,
    pub learner: Id,
    pub target: Id,
    pub outcome: Outcome,
    pub fibres_before: BTreeMap<Id, usize>,
    pub fibres_after: BTreeMap<Id, usize>,
    /// Elements present after but not before, per object.
    pub new_elements: BTreeMap<Id, Vec<Id>>,
    pub new_morphisms: Vec<Id>,
    pub new_edges: Vec<AdjoinedEdge>,
    pub limit: Option<LimitSummary>,
}

impl AcquisitionReport {
    fn new(kind: AcquisitionKind, before: &Speaker, after: &Speaker, target: &str) -> Self {
        let mut new_elements = BTreeMap::new();
        for (x, now) in after.meaning().values() {
            let old = before.fibre(x).ok();
            let added: Vec<Id> = now
                .iter()
                .filter(|e| old.is_none_or(|o| !o.contains(*e)))
                .cloned()
                .collect();
            if !added.is_empty() {
                new_elements.insert(x.clone(), added);
            }
        }
        AcquisitionReport {
            kind,
            learner: before.name().clone(),
            target: Id::new(target),
            outcome: Outcome::Learned,
            fibres_before: before.fibre_sizes(),
            fibres_after: after.fibre_sizes(),
            new_elements,
            new_morphisms: Vec::new(),
            new_edges: Vec::new(),
            limit: None,
        }
    }
}

/// Component presheaf plus the chosen representative of each component.
struct Components {
    presheaf: SetFunctor,
    representatives: BTreeMap<(Id, Id), CommaObject>,
}

/// Rename components after their representatives: `(d, id)` becomes the
/// label of `d`, and `(d, f)` becomes `label·f`.
fn rename(language: &FinCategory, c: &Components, labels: &BTreeMap<Id, Id>) -> Result<SetFunctor> {
    let mut names: BTreeMap<Id, BTreeMap<Id, Id>> = BTreeMap::new();
    let mut values = BTreeMap::new();
    for (x, blocks) in c.presheaf.values() {
        let mut seen = BTreeSet::new();
        let mut map = BTreeMap::new();
        for b in blocks {
            let rep = &c.representatives[&(x.clone(), b.clone())];
            let label = &labels[&rep.d];
            let name = if language.is_identity(&rep.f) {
                label.clone()
            } else {
                Id::from(format!("{label}·{}", rep.f))
            };
            if !seen.insert(name.clone()) {
                return Err(Error::NameCollision(name));
            }
            map.insert(b.clone(), name);
        }
        values.insert(x.clone(), seen);
        names.insert(x.clone(), map);
    }
    let base = c.presheaf.base();
    let mut actions = BTreeMap::new();
    for (k, act) in c.presheaf.actions() {
        let arr = base.arrow_of(k)?;
        let (from, to) = (&names[&arr.src], &names[&arr.tgt]);
        actions.insert(
            k.clone(),
            act.iter()
                .map(|(a, b)| (from[a].clone(), to[b].clone()))
                .collect(),
        );
    }
    SetFunctor::new(base.clone(), values, actions)
}

fn check_examples(learner: &Speaker, target: &str, examples: &BTreeSet<Id>) -> Result<()> {
    if !learner.language().has_object(target) {
        return Err(Error::UnknownObject(Id::new(target)));
    }
    if examples.is_empty() {
        return Err(Error::EmptyExample);
    }
    Ok(())
}

/// Learn `target` from examples `S`: the learner's category of elements
/// plus one isolated object per example over `target`, re-fibred by the
/// comprehensive factorization.
pub fn acquire_by_example(
    learner: &Speaker,
    target: &str,
    examples: &BTreeSet<Id>,
    teacher: Option<&Speaker>,
) -> Result<(Speaker, AcquisitionReport)> {
    check_examples(learner, target, examples)?;
    let language = learner.language();
    let size = learner.fibre(target)?.len();
    if size > 0 {
        return Err(Error::FibreNotEmpty {
            object: Id::new(target),
            size,
        });
    }
    if let Some(t) = teacher {
        if t.language() != language {
            return Err(Error::LanguageMismatch);
        }
        let known = t.fibre(target)?;
        if let Some(s) = examples.iter().find(|s| !known.contains(*s)) {
            return Err(Error::ExampleNotInTeacherFibre(s.clone()));
        }
    }

    let (fib, elements) = grothendieck_with_elements(learner.meaning())?;
    let total = fib.total();
    let mut labels: BTreeMap<Id, Id> = elements
        .iter()
        .map(|(o, (_, x))| (o.clone(), x.clone()))
        .collect();
    let mut b = FinCategory::builder();
    let mut omap = fib.proj().object_map().clone();
    let mut mmap = fib.proj().morphism_map().clone();
    for x in total.objects() {
        b = b.object(x.clone());
    }
    for (x, i) in total.identities() {
        b = b.identity(x.clone(), i.clone());
    }
    for (m, a) in total.proper_morphisms() {
        b = b.morphism(m.clone(), a.src.clone(), a.tgt.clone());
    }
    for ((g, f), h) in total.composition_table() {
        if !total.is_identity(g) && !total.is_identity(f) {
            b = b.compose(g.clone(), f.clone(), h.clone());
        }
    }
    let id_target = language.identity(target)?;
    for s in examples {
        let o = element_object_id(target, s);
        if labels.insert(o.clone(), s.clone()).is_some() {
            return Err(Error::NameCollision(o));
        }
        let i = Id::from(format!("id_{o}"));
        if total.has_morphism(&i) {
            return Err(Error::NameCollision(i));
        }
        b = b.object(o.clone()).identity(o.clone(), i.clone());
        omap.insert(o, Id::new(target));
        mmap.insert(i, id_target.clone());
    }
    if !total.is_closed() {
        b = b.truncated();
    }
    let d = Arc::new(b.build_unchecked()?);
    let t = CatFunctor::new_unchecked(d, language.clone(), omap, mmap);
    let fact = comprehensive_factorization(&t)?;
    let components = Components {
        presheaf: fact.components,
        representatives: fact.representatives,
    };
    let meaning = rename(language, &components, &labels)?;
    let after = Speaker::new(learner.name().clone(), language.clone(), meaning)?
        .with_adjoined(learner.adjoined().clone())?;
    let report = AcquisitionReport::new(AcquisitionKind::Example, learner, &after, target);
    Ok((after, report))
}

/// Learn `target` from examples `S` when the fibre is already populated:
/// each old element `x` over `target` is identified with `u(x) ∈ S`.
///
/// Components are computed from a presentation: the union-find runs over
/// comma pairs linked by generating morphisms only, since identifying
/// objects of a category need not leave a category behind.
pub fn acquire_by_example_merged(
    learner: &Speaker,
    target: &str,
    examples: &BTreeSet<Id>,
    merge: &BTreeMap<Id, Id>,
) -> Result<(Speaker, AcquisitionReport)> {
    check_examples(learner, target, examples)?;
    let language = learner.language();
    let fibre = learner.fibre(target)?;
    for x in fibre {
        let s = merge.get(x).ok_or_else(|| Error::MergeNotTotal {
            object: Id::new(target),
            element: x.clone(),
        })?;
        if !examples.contains(s) {
            return Err(Error::MergeOutsideExample { element: s.clone() });
        }
    }

    let (fib, elements) = grothendieck_with_elements(learner.meaning())?;
    let total = fib.total();
    let proj = fib.proj();
    // Old total object ↦ node of the presentation.
    let mut node_of: BTreeMap<Id, Id> = BTreeMap::new();
    let mut nodes: BTreeMap<Id, Id> = BTreeMap::new();
    let mut labels: BTreeMap<Id, Id> = BTreeMap::new();
    for (o, (x_obj, x)) in &elements {
        if x_obj.as_str() != target {
            node_of.insert(o.clone(), o.clone());
            nodes.insert(o.clone(), x_obj.clone());
            labels.insert(o.clone(), x.clone());
        }
    }
    for s in examples {
        let o = element_object_id(target, s);
        if nodes.insert(o.clone(), Id::new(target)).is_some() {
            return Err(Error::NameCollision(o));
        }
        labels.insert(o, s.clone());
    }
    for x in fibre {
        node_of.insert(
            element_object_id(target, x),
            element_object_id(target, &merge[x]),
        );
    }
    let edges: Vec<(&Id, &Id, &Id)> = total
        .proper_morphisms()
        .map(|(h, a)| (&node_of[&a.src], &node_of[&a.tgt], &proj.morphism_map()[h]))
        .collect();

    let components = presented_components(language, &nodes, &edges)?;
    let meaning = rename(language, &components, &labels)?;
    let after = Speaker::new(learner.name().clone(), language.clone(), meaning)?
        .with_adjoined(learner.adjoined().clone())?;
    let report = AcquisitionReport::new(AcquisitionKind::MergedExample, learner, &after, target);
    Ok((after, report))
}

/// `A ↦ π₀(A ↓ T)` for a functor `T` given by generators: `nodes` maps each
/// object to its image, `edges` are `(source, target, image)`.
fn presented_components(
    language: &FinCategory,
    nodes: &BTreeMap<Id, Id>,
    edges: &[(&Id, &Id, &Id)],
) -> Result<Components> {
    let mut values = BTreeMap::new();
    let mut representatives = BTreeMap::new();
    let mut block_of: BTreeMap<(Id, CommaObject), Id> = BTreeMap::new();
    for x in language.objects() {
        let mut index: BTreeMap<CommaObject, usize> = BTreeMap::new();
        for (d, td) in nodes {
            for f in language.hom(x, td) {
                let n = index.len();
                index.insert(
                    CommaObject {
                        d: d.clone(),
                        f: f.clone(),
                    },
                    n,
                );
            }
        }
        let mut uf = UnionFind::new(index.len());
        for &(a, b, g) in edges {
            for f1 in language.hom(x, &nodes[a]) {
                let f2 = language.compose(g, f1)?;
                let i = index[&CommaObject {
                    d: a.clone(),
                    f: f1.clone(),
                }];
                let j = index[&CommaObject {
                    d: b.clone(),
                    f: f2.clone(),
                }];
                uf.union(i, j);
            }
        }
        let items: Vec<&CommaObject> = index.keys().collect();
        let mut names = BTreeSet::new();
        for block in uf.blocks() {
            let rep = block
                .iter()
                .map(|&i| items[i])
                .min_by_key(|o| (!language.is_identity(&o.f), &o.d, &o.f))
                .expect("blocks are nonempty");
            let name = rep.id();
            for &i in &block {
                block_of.insert((x.clone(), items[i].clone()), name.clone());
            }
            representatives.insert((x.clone(), name.clone()), rep.clone());
            names.insert(name);
        }
        values.insert(x.clone(), names);
    }
    let mut actions = BTreeMap::new();
    for (k, arr) in language.morphisms() {
        let mut act = BTreeMap::new();
        for name in &values[&arr.tgt] {
            let rep = &representatives[&(arr.tgt.clone(), name.clone())];
            let moved = CommaObject {
                d: rep.d.clone(),
                f: language.compose(&rep.f, k)?.clone(),
            };
            act.insert(name.clone(), block_of[&(arr.src.clone(), moved)].clone());
        }
        actions.insert(k.clone(), act);
    }
    let presheaf = SetFunctor::new(Arc::new(language.opposite()), values, actions)?;
    Ok(Components {
        presheaf,
        representatives,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParaphrasisOptions {
    /// Prefix for new edge and element identifiers.
    pub event: Id,
    /// Maximum number of adjoined edges per morphism of the new language.
    pub bound: Option<usize>,
    /// Meaning-actions on the new fibre for language morphisms into the
    /// explained object, keyed by morphism; each maps new elements to
    /// elements of the morphism's source fibre.
    #[serde(default)]
    pub edge_overrides: BTreeMap<Id, BTreeMap<Id, Id>>,
}

impl ParaphrasisOptions {
    pub fn new(event: impl Into<Id>) -> Self {
        ParaphrasisOptions {
            event: event.into(),
            bound: None,
            edge_overrides: BTreeMap::new(),
        }
    }
}

/// Learn `target` from the teacher's explanation: the learner's own limit
/// over the explanation becomes the new fibre, and the language gains one
/// morphism per cone leg whose meaning is that leg.
pub fn acquire_by_paraphrasis(
    teacher: &Speaker,
    learner: &Speaker,
    target: &str,
    e: &Explanation,
    options: &ParaphrasisOptions,
) -> Result<(Speaker, AcquisitionReport)> {
    if teacher.language() != learner.language() {
        return Err(Error::LanguageMismatch);
    }
    if e.target.as_str() != target {
        return Err(Error::TargetMismatch {
            expected: Id::new(target),
            found: e.target.clone(),
        });
    }
    let check = validate_explanation(teacher, e)?;
    if !check.valid {
        return Err(Error::InvalidExplanation);
    }
    if check.vacuous {
        return Err(Error::VacuousExplanation);
    }
    let size = learner.fibre(target)?.len();
    if size > 0 {
        return Err(Error::FibreNotEmpty {
            object: Id::new(target),
            size,
        });
    }

    let limit = e.limit(learner)?;
    let prefix = format!("{}:", options.event);
    if limit.is_empty() {
        let mut report =
            AcquisitionReport::new(AcquisitionKind::Paraphrasis, learner, learner, target);
        report.outcome = Outcome::NoSense;
        report.limit = Some(LimitSummary::new(&limit, &prefix));
        return Ok((learner.clone(), report));
    }

    let old = learner.meaning();
    let lop = old.base();
    let apex: BTreeSet<Id> = limit.element_ids(&prefix).into_iter().collect();
    let mut values = old.values().clone();
    values.insert(Id::new(target), apex.clone());

    for m in options.edge_overrides.keys() {
        let out_of_target = lop.arrow_of(m).is_ok_and(|a| a.src.as_str() == target);
        if !out_of_target || lop.is_identity(m) {
            return Err(Error::OverrideNotAtTarget(m.clone()));
        }
    }
    let mut actions = BTreeMap::new();
    let mut unforced = Vec::new();
    for (g, arr) in lop.proper_morphisms() {
        if arr.src.as_str() == target {
            if let Some(o) = options.edge_overrides.get(g) {
                actions.insert(g.clone(), o.clone());
            } else if let [only] = values[&arr.tgt].iter().collect::<Vec<_>>()[..] {
                actions.insert(
                    g.clone(),
                    apex.iter().map(|x| (x.clone(), only.clone())).collect(),
                );
            } else {
                unforced.push(g.clone());
            }
        } else {
            // Into the target slot the old domain is empty, so this is the
            // empty function.
            actions.insert(g.clone(), old.action(g)?.clone());
        }
    }
    if !unforced.is_empty() {
        return Err(Error::UnforcedActionAtL {
            object: Id::new(target),
            morphisms: unforced,
        });
    }
    let extended = SetFunctor::new(lop.clone(), values, actions)?;

    let mut q = Quiver::new(lop.objects().cloned());
    let mut legs = BTreeMap::new();
    let mut new_edges = Vec::new();
    for a in &limit.objects {
        let to = e.objects[a].clone();
        let edge = Id::from(format!("{}/leg:{a}", options.event));
        q.add_edge(edge.clone(), target, to.clone())?;
        legs.insert(edge.clone(), limit.leg(a, &prefix).expect("shape object"));
        let morphism = Id::from(format!(
            "{};{edge};{}",
            lop.identity(target)?,
            lop.identity(&to)?
        ));
        new_edges.push(AdjoinedEdge {
            edge,
            leg: a.clone(),
            from: Id::new(target),
            to,
            morphism,
        });
    }
    let collage = fp_collage(lop.clone(), q, options.bound)?;
    let meaning = extend_set_functor(&extended, &collage, &legs)?;
    let language = Arc::new(collage.to_fincategory().opposite());
    let new_morphisms: Vec<Id> = collage.adjoined().cloned().collect();
    let adjoined = learner
        .adjoined()
        .iter()
        .chain(&new_morphisms)
        .cloned()
        .collect();
    let after = Speaker::new(learner.name().clone(), language, meaning)?.with_adjoined(adjoined)?;

    let mut report = AcquisitionReport::new(AcquisitionKind::Paraphrasis, learner, &after, target);
    report.new_morphisms = new_morphisms;
    report.new_edges = new_edges;
    report.limit = Some(LimitSummary::new(&limit, &prefix));
    Ok((after, report))
}
