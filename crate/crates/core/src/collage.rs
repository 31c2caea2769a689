//! Freely adjoining quiver edges to a finite category.
//!
//! Morphisms of the collage are words `c0 q1 c1 … qn cn` with each `ci` a
//! base morphism (identities included) and each `qj` a quiver edge. Since the
//! edges satisfy no relations, every morphism has exactly one such word and
//! composition is concatenation followed by composing the two base morphisms
//! that meet in the middle.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::id::Id;
use crate::kernel::{CatFunctor, FinCategory, Quiver, SetFunctor};

/// One letter of a raw or normal-form word.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Token {
    Base(Id),
    Edge(Id),
}

/// Normal-form word: `bases.len() == edges.len() + 1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "Vec<Token>", try_from = "Vec<Token>")]
pub struct Word {
    bases: Vec<Id>,
    edges: Vec<Id>,
}

impl Word {
    pub fn base(m: impl Into<Id>) -> Self {
        Word {
            bases: vec![m.into()],
            edges: Vec::new(),
        }
    }

    pub fn bases(&self) -> &[Id] {
        &self.bases
    }

    pub fn edges(&self) -> &[Id] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn tokens(&self) -> Vec<Token> {
        let mut out = Vec::with_capacity(2 * self.edges.len() + 1);
        for (i, c) in self.bases.iter().enumerate() {
            if i > 0 {
                out.push(Token::Edge(self.edges[i - 1].clone()));
            }
            out.push(Token::Base(c.clone()));
        }
        out
    }

    /// Morphism identifier in the collage. A 0-edge word keeps the base
    /// identifier, so the canonical functor is the identity on names.
    pub fn id(&self) -> Id {
        if self.edges.is_empty() {
            return self.bases[0].clone();
        }
        let tokens = self.tokens();
        let parts: Vec<&str> = tokens
            .iter()
            .map(|t| match t {
                Token::Base(m) | Token::Edge(m) => m.as_str(),
            })
            .collect();
        Id::from(parts.join(";"))
    }

    pub fn src<'a>(&self, base: &'a FinCategory) -> Result<&'a Id> {
        base.src(&self.bases[0])
    }

    pub fn tgt<'a>(&self, base: &'a FinCategory) -> Result<&'a Id> {
        base.tgt(self.bases.last().expect("nonempty"))
    }

    /// `later ∘ self`, without bound checks.
    pub fn then(&self, later: &Word, base: &FinCategory) -> Result<Word> {
        let last = self.bases.last().expect("nonempty");
        let joint = base.compose(&later.bases[0], last)?.clone();
        let mut bases = self.bases[..self.bases.len() - 1].to_vec();
        bases.push(joint);
        bases.extend_from_slice(&later.bases[1..]);
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&later.edges);
        Ok(Word { bases, edges })
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl From<Word> for Vec<Token> {
    fn from(w: Word) -> Self {
        w.tokens()
    }
}

impl TryFrom<Vec<Token>> for Word {
    type Error = String;

    fn try_from(tokens: Vec<Token>) -> std::result::Result<Self, String> {
        let mut bases = Vec::new();
        let mut edges = Vec::new();
        for (i, t) in tokens.into_iter().enumerate() {
            match (i % 2, t) {
                (0, Token::Base(m)) => bases.push(m),
                (1, Token::Edge(e)) => edges.push(e),
                (_, t) => {
                    return Err(format!(
                        "token {i} ({t:?}) breaks the base/edge alternation"
                    ))
                }
            }
        }
        if bases.len() != edges.len() + 1 {
            return Err("a word starts and ends with a base morphism".into());
        }
        Ok(Word { bases, edges })
    }
}

fn check_vertices(c: &FinCategory, q: &Quiver) -> Result<()> {
    if c.objects().eq(q.vertices.iter()) {
        Ok(())
    } else {
        Err(Error::VertexMismatch)
    }
}

/// A quiver edge lying on a directed cycle of the reachability graph
/// (quiver edges plus one step per non-identity base morphism), if any.
fn cycle_through_edge<'a>(c: &FinCategory, q: &'a Quiver) -> Option<&'a Id> {
    let mut succ: BTreeMap<&Id, BTreeSet<&Id>> = BTreeMap::new();
    for (_, a) in c.proper_morphisms() {
        succ.entry(&a.src).or_default().insert(&a.tgt);
    }
    for a in q.edges.values() {
        succ.entry(&a.src).or_default().insert(&a.tgt);
    }
    q.edges.iter().find_map(|(e, a)| {
        let mut seen = BTreeSet::from([&a.tgt]);
        let mut stack = vec![&a.tgt];
        while let Some(v) = stack.pop() {
            if *v == a.src {
                return Some(e);
            }
            for w in succ.get(v).into_iter().flatten() {
                if seen.insert(*w) {
                    stack.push(*w);
                }
            }
        }
        None
    })
}

pub fn collage_is_finite(c: &FinCategory, q: &Quiver) -> Result<bool> {
    check_vertices(c, q)?;
    Ok(cycle_through_edge(c, q).is_none())
}

/// Fold adjacent base morphisms of a raw alternating sequence, inserting
/// identities around edges that have no base morphism beside them.
pub fn normalize_word(c: &FinCategory, q: &Quiver, raw: &[Token]) -> Result<Word> {
    let mut at = match raw.first() {
        None => return Err(Error::EmptyPath),
        Some(Token::Base(m)) => c.src(m)?.clone(),
        Some(Token::Edge(e)) => q.edge(e)?.src.clone(),
    };
    let mut bases = Vec::new();
    let mut edges = Vec::new();
    let mut segment: Vec<Id> = Vec::new();
    let mut start = at.clone();
    let mut prev: Option<&Id> = None;
    for t in raw {
        match t {
            Token::Base(m) => {
                if c.src(m)? != &at {
                    return Err(not_composable(prev, m));
                }
                at = c.tgt(m)?.clone();
                segment.push(m.clone());
                prev = Some(m);
            }
            Token::Edge(e) => {
                let arr = q.edge(e)?;
                if arr.src != at {
                    return Err(not_composable(prev, e));
                }
                bases.push(c.compose_path(&start, &segment)?);
                segment.clear();
                edges.push(e.clone());
                at = arr.tgt.clone();
                start = at.clone();
                prev = Some(e);
            }
        }
    }
    bases.push(c.compose_path(&start, &segment)?);
    Ok(Word { bases, edges })
}

fn not_composable(prev: Option<&Id>, next: &Id) -> Error {
    Error::NotComposable {
        first: prev.cloned().unwrap_or_else(|| Id::new("")),
        second: next.clone(),
    }
}

/// `base ≀ quiver`, possibly truncated at `bound` quiver edges per word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollageCategory {
    base: Arc<FinCategory>,
    quiver: Quiver,
    bound: Option<usize>,
    words: BTreeMap<Id, Word>,
    category: Arc<FinCategory>,
}

impl CollageCategory {
    pub fn base(&self) -> &Arc<FinCategory> {
        &self.base
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn bound(&self) -> Option<usize> {
        self.bound
    }

    pub fn is_closed(&self) -> bool {
        self.category.is_closed()
    }

    /// Every morphism's normal-form word, keyed by morphism identifier.
    pub fn words(&self) -> &BTreeMap<Id, Word> {
        &self.words
    }

    pub fn word(&self, m: &str) -> Result<&Word> {
        self.words
            .get(m)
            .ok_or_else(|| Error::UnknownMorphism(Id::new(m)))
    }

    /// The collage as a plain table category.
    pub fn to_fincategory(&self) -> &Arc<FinCategory> {
        &self.category
    }

    /// Morphisms carrying at least one quiver edge.
    pub fn adjoined(&self) -> impl Iterator<Item = &Id> {
        self.words
            .iter()
            .filter(|(_, w)| w.edge_count() > 0)
            .map(|(m, _)| m)
    }

    /// `later ∘ earlier` on words, refusing results beyond the bound.
    pub fn compose_words(&self, later: &Word, earlier: &Word) -> Result<Word> {
        let edges = later.edge_count() + earlier.edge_count();
        if let Some(bound) = self.bound {
            if edges > bound {
                return Err(Error::BoundExceeded { edges, bound });
            }
        }
        if later.src(&self.base)? != earlier.tgt(&self.base)? {
            return Err(Error::NotComposable {
                first: earlier.id(),
                second: later.id(),
            });
        }
        earlier.then(later, &self.base)
    }
}

pub fn fp_collage(c: Arc<FinCategory>, q: Quiver, bound: Option<usize>) -> Result<CollageCategory> {
    check_vertices(&c, &q)?;
    if let (Some(e), None) = (cycle_through_edge(&c, &q), bound) {
        return Err(Error::UnboundedHomSet(e.clone()));
    }
    let limit = bound.unwrap_or(usize::MAX);

    let mut levels: Vec<Vec<Word>> =
        vec![c.morphism_ids().map(|m| Word::base(m.clone())).collect()];
    let mut closed = true;
    loop {
        let last = levels.last().expect("level 0");
        let mut next = Vec::new();
        for w in last {
            let x = w.tgt(&c)?;
            for (e, arr) in q.out_edges(x) {
                for (m, _) in c.out_of(&arr.tgt) {
                    let mut w2 = w.clone();
                    w2.edges.push(e.clone());
                    w2.bases.push(m.clone());
                    next.push(w2);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        if levels.len() > limit {
            closed = false;
            break;
        }
        levels.push(next);
    }

    let words: BTreeMap<Id, Word> = levels.into_iter().flatten().map(|w| (w.id(), w)).collect();
    let mut b = FinCategory::builder();
    for x in c.objects() {
        b = b.object(x.clone());
    }
    for (x, i) in c.identities() {
        b = b.identity(x.clone(), i.clone());
    }
    let mut by_src: BTreeMap<&Id, Vec<&Word>> = BTreeMap::new();
    for (m, w) in &words {
        if !c.is_identity(m) {
            b = b.morphism(m.clone(), w.src(&c)?.clone(), w.tgt(&c)?.clone());
        }
        by_src.entry(w.src(&c)?).or_default().push(w);
    }
    for f in words.values() {
        for g in by_src.get(f.tgt(&c)?).into_iter().flatten() {
            if f.edge_count() + g.edge_count() <= limit {
                let gf = f.then(g, &c)?;
                b = b.compose(g.id(), f.id(), gf.id());
            }
        }
    }
    if !closed {
        b = b.truncated();
    }
    let category = Arc::new(b.build_unchecked()?);
    Ok(CollageCategory {
        base: c,
        quiver: q,
        bound,
        words,
        category,
    })
}

/// The identity-on-objects embedding `K : base → collage`.
pub fn canonical_functor(collage: &CollageCategory) -> CatFunctor {
    let base = collage.base();
    CatFunctor::new_unchecked(
        base.clone(),
        collage.to_fincategory().clone(),
        base.objects().map(|x| (x.clone(), x.clone())).collect(),
        base.morphism_ids()
            .map(|m| (m.clone(), m.clone()))
            .collect(),
    )
}

/// Extend `m` (a functor on the collage's base) to the collage, sending each
/// quiver edge to the given function.
pub fn extend_set_functor(
    m: &SetFunctor,
    collage: &CollageCategory,
    edge_actions: &BTreeMap<Id, BTreeMap<Id, Id>>,
) -> Result<SetFunctor> {
    if m.base() != collage.base() {
        return Err(Error::BaseMismatch);
    }
    for (e, arr) in &collage.quiver().edges {
        let act = edge_actions
            .get(e)
            .ok_or_else(|| Error::MissingEdgeAction(e.clone()))?;
        let dom = m.value(&arr.src)?;
        if dom.iter().any(|x| !act.contains_key(x)) {
            return Err(Error::MissingEdgeAction(e.clone()));
        }
    }
    let mut actions = BTreeMap::new();
    for (id, w) in collage.words() {
        let mut act: BTreeMap<Id, Id> = m.action(&w.bases[0])?.clone();
        for (e, c) in w.edges.iter().zip(&w.bases[1..]) {
            let (ea, ca) = (&edge_actions[e], m.action(c)?);
            for y in act.values_mut() {
                *y = ca[&ea[&*y]].clone();
            }
        }
        actions.insert(id.clone(), act);
    }
    SetFunctor::new(
        collage.to_fincategory().clone(),
        m.values().clone(),
        actions,
    )
}
