//! Random generators and brute-force oracles for tests.
//!
//! The oracles deliberately avoid the library's optimized paths: limits are
//! computed by filtering the full product, components by naive label
//! propagation over explicitly enumerated comma objects.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::collage::{normalize_word, Token, Word};
use crate::error::Result;
use crate::id::Id;
use crate::kernel::{
    free_category, quiver_pushout, underlying_quiver, CatFunctor, FinCategory, Quiver, SetFunctor,
    Side,
};
use crate::pregroup::{Grammar, PregroupType, SimpleType};
use crate::speaker::Speaker;

fn obj(i: usize) -> Id {
    Id::from(format!("X{i}"))
}

/// Free category on a random DAG with `n` vertices and a few edges.
pub fn random_free_dag<R: Rng>(rng: &mut R, n: usize, max_morphisms: usize) -> FinCategory {
    loop {
        let mut q = Quiver::new((0..n).map(obj));
        let edges = rng.gen_range(0..=n + 1);
        for k in 0..edges {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a < b {
                q = q.with_edge(format!("e{k}"), obj(a), obj(b));
            }
        }
        let free = free_category(&q, None).expect("acyclic");
        if free.category.morphism_count() <= max_morphisms {
            return free.category;
        }
    }
}

/// A random poset on `n` objects (thin, transitively closed), with
/// morphisms named `Xi<Xj`.
pub fn random_poset<R: Rng>(rng: &mut R, n: usize, max_morphisms: usize) -> FinCategory {
    loop {
        let mut le = vec![vec![false; n]; n];
        for (i, row) in le.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = i < j && rng.gen_bool(0.4);
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if le[i][k] && le[k][j] {
                        le[i][j] = true;
                    }
                }
            }
        }
        let name = |i: usize, j: usize| Id::from(format!("X{i}<X{j}"));
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| le[i][j])
            .collect();
        if pairs.len() + n > max_morphisms {
            continue;
        }
        let mut b = FinCategory::builder();
        for i in 0..n {
            b = b.object(obj(i));
        }
        for &(i, j) in &pairs {
            b = b.morphism(name(i, j), obj(i), obj(j));
        }
        for &(i, j) in &pairs {
            for &(j2, k) in &pairs {
                if j == j2 {
                    b = b.compose(name(j, k), name(i, j), name(i, k));
                }
            }
        }
        return b.build().expect("posets are categories");
    }
}

/// Add a non-identity endomorphism at `X0`: either an idempotent that acts
/// as the identity on every other morphism, or an involution (only when
/// `X0` has no other morphisms in or out).
pub fn with_endomorphism<R: Rng>(rng: &mut R, c: &FinCategory) -> FinCategory {
    let x = obj(0);
    let isolated = c.proper_morphisms().all(|(_, a)| a.src != x && a.tgt != x);
    let mut b = FinCategory::builder();
    for o in c.objects() {
        b = b.object(o.clone());
    }
    for (m, a) in c.proper_morphisms() {
        b = b.morphism(m.clone(), a.src.clone(), a.tgt.clone());
    }
    for ((g, f), h) in c.composition_table() {
        if !c.is_identity(g) && !c.is_identity(f) {
            b = b.compose(g.clone(), f.clone(), h.clone());
        }
    }
    let id_x = c.identity(&x).expect("X0 exists").clone();
    b = b.morphism("u", x.clone(), x.clone());
    if isolated && rng.gen_bool(0.5) {
        b = b.compose("u", "u", id_x);
    } else {
        b = b.compose("u", "u", "u");
        for (m, a) in c.proper_morphisms() {
            if a.src == x {
                b = b.compose(m.clone(), "u", m.clone());
            }
            if a.tgt == x {
                b = b.compose("u", m.clone(), m.clone());
            }
        }
    }
    b.build().expect("endomorphism extension is lawful")
}

/// A random category with at most `max_objects` objects and
/// `max_morphisms` morphisms (identities included).
pub fn random_category<R: Rng>(
    rng: &mut R,
    max_objects: usize,
    max_morphisms: usize,
) -> FinCategory {
    let n = rng.gen_range(1..=max_objects);
    let c = match rng.gen_range(0..3) {
        0 => random_free_dag(rng, n, max_morphisms),
        1 => random_poset(rng, n, max_morphisms),
        _ => FinCategory::discrete((0..n).map(obj)),
    };
    if c.morphism_count() < max_morphisms && rng.gen_bool(0.3) {
        with_endomorphism(rng, &c)
    } else {
        c
    }
}

/// Solve for functorial actions by backtracking, trying values in a random
/// order. `values` must cover every object of `base`.
fn solve_actions<R: Rng>(
    rng: &mut R,
    base: &FinCategory,
    values: &BTreeMap<Id, Vec<Id>>,
) -> Option<BTreeMap<Id, BTreeMap<Id, Id>>> {
    let morphisms: Vec<&Id> = base
        .morphism_ids()
        .filter(|m| !base.is_identity(m))
        .collect();
    let mut unknowns: Vec<(Id, Id)> = Vec::new();
    for m in &morphisms {
        for x in &values[base.src(m).ok()?] {
            unknowns.push(((*m).clone(), x.clone()));
        }
    }
    let mut act: BTreeMap<Id, BTreeMap<Id, Id>> = morphisms
        .iter()
        .map(|m| ((*m).clone(), BTreeMap::new()))
        .collect();
    for (x, i) in base.identities() {
        act.insert(
            i.clone(),
            values[x].iter().map(|v| (v.clone(), v.clone())).collect(),
        );
    }
    let mut budget = 20_000usize;
    if assign(rng, base, values, &unknowns, 0, &mut act, &mut budget) {
        Some(act)
    } else {
        None
    }
}

fn consistent(base: &FinCategory, act: &BTreeMap<Id, BTreeMap<Id, Id>>) -> bool {
    base.composition_table().iter().all(|((g, f), h)| {
        let (Some(fa), Some(ga), Some(ha)) = (act.get(f), act.get(g), act.get(h)) else {
            return true;
        };
        fa.iter().all(|(x, y)| match (ga.get(y), ha.get(x)) {
            (Some(a), Some(b)) => a == b,
            _ => true,
        })
    })
}

fn assign<R: Rng>(
    rng: &mut R,
    base: &FinCategory,
    values: &BTreeMap<Id, Vec<Id>>,
    unknowns: &[(Id, Id)],
    i: usize,
    act: &mut BTreeMap<Id, BTreeMap<Id, Id>>,
    budget: &mut usize,
) -> bool {
    if i == unknowns.len() {
        return true;
    }
    if *budget == 0 {
        return false;
    }
    *budget -= 1;
    let (m, x) = &unknowns[i];
    let mut choices = values[base.tgt(m).expect("known")].clone();
    choices.shuffle(rng);
    for y in choices {
        act.entry(m.clone()).or_default().insert(x.clone(), y);
        if consistent(base, act) && assign(rng, base, values, unknowns, i + 1, act, budget) {
            return true;
        }
        act.get_mut(m).expect("inserted").remove(x);
    }
    false
}

/// A random Set-valued functor on `base` with value sets of size at most
/// `max_size`. Element names are `{object}.{k}`.
pub fn random_set_functor<R: Rng>(
    rng: &mut R,
    base: Arc<FinCategory>,
    max_size: usize,
) -> SetFunctor {
    loop {
        let values: BTreeMap<Id, Vec<Id>> = base
            .objects()
            .map(|x| {
                let n = rng.gen_range(0..=max_size);
                (
                    x.clone(),
                    (0..n).map(|k| Id::from(format!("{x}.{k}"))).collect(),
                )
            })
            .collect();
        if let Some(actions) = solve_actions(rng, &base, &values) {
            let values = values
                .into_iter()
                .map(|(x, v)| (x, v.into_iter().collect()))
                .collect();
            return SetFunctor::new(base, values, actions).expect("solver output is functorial");
        }
    }
}

/// A random presheaf on `language`, i.e. a functor on its opposite.
pub fn random_presheaf<R: Rng>(rng: &mut R, language: &FinCategory, max_size: usize) -> SetFunctor {
    random_set_functor(rng, Arc::new(language.opposite()), max_size)
}

/// A random functor `dom → cod`; falls back to a constant functor when a
/// few random object assignments admit no morphism assignment.
pub fn random_functor<R: Rng>(
    rng: &mut R,
    dom: Arc<FinCategory>,
    cod: Arc<FinCategory>,
) -> CatFunctor {
    let targets: Vec<&Id> = cod.objects().collect();
    for _ in 0..20 {
        let omap: BTreeMap<Id, Id> = dom
            .objects()
            .map(|x| {
                (
                    x.clone(),
                    (*targets.choose(rng).expect("nonempty cod")).clone(),
                )
            })
            .collect();
        if let Some(mmap) = solve_functor(rng, &dom, &cod, &omap) {
            return CatFunctor::new(dom, cod, omap, mmap).expect("solver output is a functor");
        }
    }
    let c = targets[0].clone();
    let id_c = cod.identity(&c).expect("object").clone();
    CatFunctor::new(
        dom.clone(),
        cod,
        dom.objects().map(|x| (x.clone(), c.clone())).collect(),
        dom.morphism_ids()
            .map(|m| (m.clone(), id_c.clone()))
            .collect(),
    )
    .expect("constant functor")
}

fn solve_functor<R: Rng>(
    rng: &mut R,
    dom: &FinCategory,
    cod: &FinCategory,
    omap: &BTreeMap<Id, Id>,
) -> Option<BTreeMap<Id, Id>> {
    let mut mmap: BTreeMap<Id, Id> = dom
        .identities()
        .iter()
        .map(|(x, i)| Ok((i.clone(), cod.identity(&omap[x])?.clone())))
        .collect::<Result<_>>()
        .ok()?;
    let todo: Vec<(&Id, Vec<Id>)> = dom
        .proper_morphisms()
        .map(|(m, a)| (m, cod.hom(&omap[&a.src], &omap[&a.tgt]).to_vec()))
        .collect();
    fn ok(dom: &FinCategory, cod: &FinCategory, mmap: &BTreeMap<Id, Id>) -> bool {
        dom.composition_table().iter().all(|((g, f), h)| {
            match (mmap.get(g), mmap.get(f), mmap.get(h)) {
                (Some(g2), Some(f2), Some(h2)) => cod.compose(g2, f2).is_ok_and(|c| c == h2),
                _ => true,
            }
        })
    }
    fn go<R: Rng>(
        rng: &mut R,
        dom: &FinCategory,
        cod: &FinCategory,
        todo: &[(&Id, Vec<Id>)],
        mmap: &mut BTreeMap<Id, Id>,
        budget: &mut usize,
    ) -> bool {
        let Some(((m, choices), rest)) = todo.split_first() else {
            return true;
        };
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        let mut choices = choices.clone();
        choices.shuffle(rng);
        for c in choices {
            mmap.insert((*m).clone(), c);
            if ok(dom, cod, mmap) && go(rng, dom, cod, rest, mmap, budget) {
                return true;
            }
            mmap.remove(*m);
        }
        false
    }
    let mut budget = 20_000;
    go(rng, dom, cod, &todo, &mut mmap, &mut budget).then_some(mmap)
}

/// Rename every object and morphism of `c` through a random bijection onto
/// `{prefix}{k}`, returning the renamed category and the two renamings.
pub fn relabel<R: Rng>(
    rng: &mut R,
    c: &FinCategory,
    prefix: &str,
) -> (FinCategory, BTreeMap<Id, Id>, BTreeMap<Id, Id>) {
    let mut objs: Vec<&Id> = c.objects().collect();
    objs.shuffle(rng);
    let omap: BTreeMap<Id, Id> = objs
        .into_iter()
        .enumerate()
        .map(|(k, x)| (x.clone(), Id::from(format!("{prefix}o{k}"))))
        .collect();
    let mut mors: Vec<&Id> = c.morphism_ids().collect();
    mors.shuffle(rng);
    let mmap: BTreeMap<Id, Id> = mors
        .into_iter()
        .enumerate()
        .map(|(k, m)| (m.clone(), Id::from(format!("{prefix}m{k}"))))
        .collect();
    let mut b = FinCategory::builder();
    for x in c.objects() {
        b = b.object(omap[x].clone());
    }
    for (x, i) in c.identities() {
        b = b.identity(omap[x].clone(), mmap[i].clone());
    }
    for (m, a) in c.proper_morphisms() {
        b = b.morphism(mmap[m].clone(), omap[&a.src].clone(), omap[&a.tgt].clone());
    }
    for ((g, f), h) in c.composition_table() {
        if !c.is_identity(g) && !c.is_identity(f) {
            b = b.compose(mmap[g].clone(), mmap[f].clone(), mmap[h].clone());
        }
    }
    if !c.is_closed() {
        b = b.truncated();
    }
    (b.build_unchecked().expect("relabelled"), omap, mmap)
}

/// Precompose a projection with a random relabelling of its domain.
pub fn relabel_projection<R: Rng>(rng: &mut R, p: &CatFunctor) -> CatFunctor {
    let (c, omap, mmap) = relabel(rng, p.dom(), "r");
    let inv_o: BTreeMap<&Id, &Id> = omap.iter().map(|(a, b)| (b, a)).collect();
    let inv_m: BTreeMap<&Id, &Id> = mmap.iter().map(|(a, b)| (b, a)).collect();
    CatFunctor::new(
        Arc::new(c.clone()),
        p.cod().clone(),
        c.objects()
            .map(|x| (x.clone(), p.object_map()[inv_o[x]].clone()))
            .collect(),
        c.morphism_ids()
            .map(|m| (m.clone(), p.morphism_map()[inv_m[m]].clone()))
            .collect(),
    )
    .expect("relabelling preserves functoriality")
}

/// Ways to break a discrete fibration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Perturbation {
    /// Remove one non-identity morphism (and the compositions naming it).
    DeleteLift,
    /// Add a parallel copy of one morphism over the same base morphism.
    DuplicateLift,
}

/// Apply a perturbation to a projection. `DeleteLift` returns `None` when
/// the total category has no non-identity morphism.
pub fn perturb<R: Rng>(rng: &mut R, p: &CatFunctor, how: Perturbation) -> Option<CatFunctor> {
    let total = p.dom();
    let omap = p.object_map().clone();
    let mut mmap = p.morphism_map().clone();
    let mut b = FinCategory::builder();
    for x in total.objects() {
        b = b.object(x.clone());
    }
    for (x, i) in total.identities() {
        b = b.identity(x.clone(), i.clone());
    }
    let proper: Vec<&Id> = total.proper_morphisms().map(|(m, _)| m).collect();
    match how {
        Perturbation::DeleteLift => {
            let victim = (*proper.choose(rng)?).clone();
            for (m, a) in total.proper_morphisms() {
                if *m != victim {
                    b = b.morphism(m.clone(), a.src.clone(), a.tgt.clone());
                }
            }
            for ((g, f), h) in total.composition_table() {
                let touches = [g, f, h].iter().any(|m| **m == victim);
                if !touches && !total.is_identity(g) && !total.is_identity(f) {
                    b = b.compose(g.clone(), f.clone(), h.clone());
                }
            }
            mmap.remove(&victim);
        }
        Perturbation::DuplicateLift => {
            let all: Vec<&Id> = total.morphism_ids().collect();
            let orig = (*all.choose(rng)?).clone();
            let copy = Id::from(format!("{orig}'"));
            for (m, a) in total.proper_morphisms() {
                b = b.morphism(m.clone(), a.src.clone(), a.tgt.clone());
            }
            let a = total.arrow_of(&orig).ok()?;
            b = b.morphism(copy.clone(), a.src.clone(), a.tgt.clone());
            mmap.insert(copy, mmap[&orig].clone());
        }
    }
    let dom = Arc::new(b.truncated().build_unchecked().ok()?);
    Some(CatFunctor::new_unchecked(dom, p.cod().clone(), omap, mmap))
}

/// Every compatible family, by filtering the full product.
pub fn brute_force_limit(f: &SetFunctor) -> BTreeSet<Vec<Id>> {
    let shape = f.base();
    let objects: Vec<&Id> = shape.objects().collect();
    let sets: Vec<Vec<&Id>> = objects
        .iter()
        .map(|x| f.value(x).expect("object").iter().collect())
        .collect();
    let mut out = BTreeSet::new();
    if sets.iter().any(Vec::is_empty) {
        return out;
    }
    let pos: BTreeMap<&Id, usize> = objects.iter().enumerate().map(|(i, x)| (*x, i)).collect();
    let mut idx = vec![0usize; sets.len()];
    loop {
        let tuple: Vec<&Id> = idx.iter().zip(&sets).map(|(i, s)| s[*i]).collect();
        let ok = shape
            .morphisms()
            .all(|(m, a)| f.action(m).expect("action")[tuple[pos[&a.src]]] == *tuple[pos[&a.tgt]]);
        if ok {
            out.insert(tuple.into_iter().cloned().collect());
        }
        let mut k = sets.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < sets[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Number of collage morphisms carrying exactly one quiver edge:
/// `Σ_q |morphisms into src q| · |morphisms out of tgt q|`.
pub fn one_edge_word_count(c: &FinCategory, q: &Quiver) -> usize {
    q.edges
        .values()
        .map(|a| c.into_obj(&a.src).count() * c.out_of(&a.tgt).count())
        .sum()
}

/// Collage words with at most `n` edges, via the explicit pipeline: quiver
/// pushout of the underlying quiver with `q`, free category on paths of
/// length at most `2n + 1`, then folding base segments.
pub fn pipeline_words(c: &FinCategory, q: &Quiver, n: usize) -> BTreeSet<Word> {
    let po = quiver_pushout(&underlying_quiver(c), q).expect("same vertices");
    let mut out: BTreeSet<Word> = c.morphism_ids().map(|m| Word::base(m.clone())).collect();
    // Depth-first over paths of length at most 2n + 1, pruning once a path
    // carries more than n quiver edges.
    let mut stack: Vec<(Id, Vec<Token>, usize)> =
        c.objects().map(|x| (x.clone(), Vec::new(), 0)).collect();
    while let Some((at, raw, edges)) = stack.pop() {
        if !raw.is_empty() {
            out.insert(normalize_word(c, q, &raw).expect("paths compose"));
        }
        if raw.len() == 2 * n + 1 {
            continue;
        }
        for (e, arr) in po.quiver.out_edges(&at) {
            let (tok, extra) = match &po.origin[e] {
                (Side::Base, x) => (Token::Base(x.clone()), 0),
                (Side::Extra, x) => (Token::Edge(x.clone()), 1),
            };
            if edges + extra > n {
                continue;
            }
            let mut next = raw.clone();
            next.push(tok);
            stack.push((arr.tgt.clone(), next, edges + extra));
        }
    }
    out
}

/// Connected components of `X ↓ T` for each `X`, where `T` is given by its
/// object images and generating edges `(d1, d2, T g)`. Components are found
/// by repeated minimum-label propagation.
pub fn oracle_components(
    language: &FinCategory,
    nodes: &BTreeMap<Id, Id>,
    edges: &[(Id, Id, Id)],
) -> BTreeMap<Id, Vec<BTreeSet<(Id, Id)>>> {
    let mut out = BTreeMap::new();
    for x in language.objects() {
        let mut items: Vec<(Id, Id)> = Vec::new();
        for (d, td) in nodes {
            for (f, a) in language.morphisms() {
                if a.src == *x && a.tgt == *td {
                    items.push((d.clone(), f.clone()));
                }
            }
        }
        let mut label: Vec<usize> = (0..items.len()).collect();
        let mut links = Vec::new();
        for (d1, d2, g) in edges {
            for (i, (d, f)) in items.iter().enumerate() {
                if d == d1 {
                    let f2 = language.compose(g, f).expect("composable").clone();
                    let j = items
                        .iter()
                        .position(|(e, h)| e == d2 && *h == f2)
                        .expect("comma object");
                    links.push((i, j));
                }
            }
        }
        let mut changed = true;
        while changed {
            changed = false;
            for &(i, j) in &links {
                let m = label[i].min(label[j]);
                if label[i] != m || label[j] != m {
                    label[i] = m;
                    label[j] = m;
                    changed = true;
                }
            }
        }
        let mut blocks: BTreeMap<usize, BTreeSet<(Id, Id)>> = BTreeMap::new();
        for (i, it) in items.into_iter().enumerate() {
            blocks.entry(label[i]).or_default().insert(it);
        }
        out.insert(x.clone(), blocks.into_values().collect());
    }
    out
}

/// Independent recomputation of acquisition by example: explicit elements
/// of the learner's presheaf, the examples as isolated elements over
/// `target`, comma pairs and propagated labels. Components are named like
/// the library names them: by the label of a representative preferring
/// identity legs, then the smallest `(element@object, leg)`.
pub fn oracle_acquire_by_example(
    learner: &Speaker,
    target: &str,
    examples: &BTreeSet<Id>,
) -> SetFunctor {
    let lang = learner.language();
    let meaning = learner.meaning();
    let mut nodes = BTreeMap::new();
    let mut labels = BTreeMap::new();
    for (a, xs) in meaning.values() {
        for x in xs {
            let d = Id::from(format!("{x}@{a}"));
            nodes.insert(d.clone(), a.clone());
            labels.insert(d, x.clone());
        }
    }
    for s in examples {
        let d = Id::from(format!("{s}@{target}"));
        nodes.insert(d.clone(), Id::new(target));
        labels.insert(d, s.clone());
    }
    let mut edges = Vec::new();
    for (f, a) in lang.proper_morphisms() {
        for (x2, x1) in meaning.action(f).expect("action") {
            edges.push((
                Id::from(format!("{x1}@{}", a.src)),
                Id::from(format!("{x2}@{}", a.tgt)),
                f.clone(),
            ));
        }
    }
    let comps = oracle_components(lang, &nodes, &edges);
    let mut name_of: BTreeMap<(Id, Id, Id), Id> = BTreeMap::new();
    let mut values = BTreeMap::new();
    for (x, blocks) in &comps {
        let mut names = BTreeSet::new();
        for block in blocks {
            let rep = block
                .iter()
                .min_by_key(|(d, f)| (!lang.is_identity(f), d.clone(), f.clone()))
                .expect("nonempty");
            let name = if lang.is_identity(&rep.1) {
                labels[&rep.0].clone()
            } else {
                Id::from(format!("{}·{}", labels[&rep.0], rep.1))
            };
            for (d, f) in block {
                name_of.insert((x.clone(), d.clone(), f.clone()), name.clone());
            }
            names.insert(name);
        }
        values.insert(x.clone(), names);
    }
    let mut actions = BTreeMap::new();
    for (k, a) in lang.morphisms() {
        let mut act = BTreeMap::new();
        for ((x, d, f), name) in &name_of {
            if x == &a.tgt {
                let f2 = lang.compose(f, k).expect("composable").clone();
                act.insert(
                    name.clone(),
                    name_of[&(a.src.clone(), d.clone(), f2)].clone(),
                );
            }
        }
        actions.insert(k.clone(), act);
    }
    SetFunctor::new(Arc::new(lang.opposite()), values, actions).expect("oracle presheaf")
}

/// Whether `goal` is reachable from `t` by contractions and order-0 induced
/// steps, by plain depth-first search without memoization.
pub fn pregroup_reachable(g: &Grammar, t: &[SimpleType], goal: &[SimpleType]) -> bool {
    if t == goal {
        return true;
    }
    for i in 0..t.len().saturating_sub(1) {
        let (x, y) = (&t[i], &t[i + 1]);
        let ok = y.z == x.z + 1
            && if x.z % 2 == 0 {
                g.leq(&x.base, &y.base)
            } else {
                g.leq(&y.base, &x.base)
            };
        if ok {
            let mut v = t.to_vec();
            v.drain(i..i + 2);
            if pregroup_reachable(g, &v, goal) {
                return true;
            }
        }
    }
    for (i, x) in t.iter().enumerate() {
        if x.z != 0 {
            continue;
        }
        for b in g.basic_types() {
            if *b != x.base && g.leq(&x.base, b) {
                let mut v = t.to_vec();
                v[i] = SimpleType::new(b.clone(), 0);
                if pregroup_reachable(g, &v, goal) {
                    return true;
                }
            }
        }
    }
    false
}

/// A random type string over `basic` with adjoint orders in `-z..=z`.
pub fn random_pregroup_type<R: Rng>(rng: &mut R, basic: &[Id], len: usize, z: i32) -> PregroupType {
    PregroupType(
        (0..len)
            .map(|_| {
                SimpleType::new(
                    basic.choose(rng).expect("nonempty").clone(),
                    rng.gen_range(-z..=z),
                )
            })
            .collect(),
    )
}

/// `c` with one extra object `x` carrying only its identity.
pub fn with_fresh_object(c: &FinCategory, x: &str) -> FinCategory {
    let mut b = FinCategory::builder()
        .object(x)
        .identity(x, format!("id_{x}"));
    for y in c.objects() {
        b = b.object(y.clone());
    }
    for (y, i) in c.identities() {
        b = b.identity(y.clone(), i.clone());
    }
    for (m, a) in c.proper_morphisms() {
        b = b.morphism(m.clone(), a.src.clone(), a.tgt.clone());
    }
    for ((g, f), h) in c.composition_table() {
        if !c.is_identity(g) && !c.is_identity(f) {
            b = b.compose(g.clone(), f.clone(), h.clone());
        }
    }
    b.build().expect("coproduct with a point")
}

/// The largest subpresheaf of `p` (on `L^op`) that is empty over `target`:
/// every object reached from `target` in `L` loses its elements.
pub fn emptied_above(p: &SetFunctor, target: &str) -> SetFunctor {
    let lang = p.base().opposite();
    let cleared: BTreeSet<&Id> = lang
        .objects()
        .filter(|y| !lang.hom(target, y).is_empty())
        .collect();
    let values = p
        .values()
        .iter()
        .map(|(x, xs)| {
            let keep = if cleared.contains(x) {
                BTreeSet::new()
            } else {
                xs.clone()
            };
            (x.clone(), keep)
        })
        .collect();
    let actions = p
        .actions()
        .iter()
        .map(|(m, act)| {
            let tgt = lang.tgt(m).expect("morphism");
            let keep = if cleared.contains(tgt) {
                BTreeMap::new()
            } else {
                act.clone()
            };
            (m.clone(), keep)
        })
        .collect();
    SetFunctor::new(p.base().clone(), values, actions).expect("subpresheaf")
}
