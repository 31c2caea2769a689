//! Pregroup grammars: contraction search, sentence checking, and finite
//! language categories whose only morphisms are reductions.

mod types;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::id::Id;
use crate::kernel::FinCategory;

pub use types::{PregroupType, SimpleType};

pub const DEFAULT_Z_MAX: u32 = 2;

/// One rewriting step on a type string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "lowercase")]
pub enum Step {
    /// Remove the adjacent pair at `pos`, `pos + 1`.
    Contract { pos: usize },
    /// Replace the basic type at `pos` (adjoint order 0) by a larger one.
    Induce { pos: usize, to: Id },
}

/// Basic types, their partial order and the adjoint bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grammar {
    basic: BTreeSet<Id>,
    /// Reflexive-transitive closure, as `a ↦ {b | a ≤ b}`.
    above: BTreeMap<Id, BTreeSet<Id>>,
    z_max: u32,
}

impl Grammar {
    pub fn new<I, S>(basic: I, order: &[(Id, Id)], z_max: u32) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<Id>,
    {
        let basic: BTreeSet<Id> = basic.into_iter().map(Into::into).collect();
        let mut above: BTreeMap<Id, BTreeSet<Id>> = basic
            .iter()
            .map(|a| (a.clone(), BTreeSet::from([a.clone()])))
            .collect();
        for (a, b) in order {
            for x in [a, b] {
                if !basic.contains(x) {
                    return Err(Error::UnknownBasicType(x.clone()));
                }
            }
            above.get_mut(a).expect("checked").insert(b.clone());
        }
        // Warshall closure; basic type sets are tiny.
        let keys: Vec<Id> = basic.iter().cloned().collect();
        for k in &keys {
            for i in &keys {
                if above[i].contains(k) {
                    let extra = above[k].clone();
                    above.get_mut(i).expect("present").extend(extra);
                }
            }
        }
        for a in &keys {
            for b in &above[a] {
                if a < b && above[b].contains(a) {
                    return Err(Error::OrderNotAntisymmetric(a.clone(), b.clone()));
                }
            }
        }
        Ok(Grammar {
            basic,
            above,
            z_max,
        })
    }

    pub fn z_max(&self) -> u32 {
        self.z_max
    }

    pub fn basic_types(&self) -> &BTreeSet<Id> {
        &self.basic
    }

    pub fn leq(&self, a: &str, b: &str) -> bool {
        self.above.get(a).is_some_and(|s| s.contains(b))
    }

    /// Parse and check basic types and adjoint bounds.
    pub fn parse(&self, s: &str) -> Result<PregroupType> {
        let t = PregroupType::parse(s)?;
        self.check(&t)?;
        Ok(t)
    }

    pub fn check(&self, t: &PregroupType) -> Result<()> {
        for st in &t.0 {
            if !self.basic.contains(&st.base) {
                return Err(Error::UnknownBasicType(st.base.clone()));
            }
            if st.z.unsigned_abs() > self.z_max {
                return Err(Error::AdjointOrderTooLarge {
                    ty: st.to_string(),
                    z_max: self.z_max,
                });
            }
        }
        Ok(())
    }

    fn contracts(&self, x: &SimpleType, y: &SimpleType) -> bool {
        if y.z != x.z + 1 {
            return false;
        }
        if x.z.rem_euclid(2) == 0 {
            self.leq(&x.base, &y.base)
        } else {
            self.leq(&y.base, &x.base)
        }
    }

    fn contractions(&self, t: &PregroupType) -> Vec<(Step, PregroupType)> {
        let mut out = Vec::new();
        for pos in 0..t.len().saturating_sub(1) {
            if self.contracts(&t.0[pos], &t.0[pos + 1]) {
                let mut v = t.0.clone();
                v.drain(pos..pos + 2);
                out.push((Step::Contract { pos }, PregroupType(v)));
            }
        }
        out
    }

    fn steps(&self, t: &PregroupType) -> Vec<(Step, PregroupType)> {
        let mut out = self.contractions(t);
        for (pos, st) in t.0.iter().enumerate() {
            if st.z != 0 {
                continue;
            }
            for b in &self.above[&st.base] {
                if *b != st.base {
                    let mut v = t.0.clone();
                    v[pos] = SimpleType::new(b.clone(), 0);
                    out.push((Step::Induce { pos, to: b.clone() }, PregroupType(v)));
                }
            }
        }
        out
    }

    /// Apply one step, failing if it does not apply.
    pub fn apply(&self, t: &PregroupType, step: &Step) -> Option<PregroupType> {
        match step {
            Step::Contract { pos } => {
                let (x, y) = (t.0.get(*pos)?, t.0.get(pos + 1)?);
                self.contracts(x, y).then(|| {
                    let mut v = t.0.clone();
                    v.drain(*pos..pos + 2);
                    PregroupType(v)
                })
            }
            Step::Induce { pos, to } => {
                let x = t.0.get(*pos)?;
                (x.z == 0 && x.base != *to && self.leq(&x.base, to)).then(|| {
                    let mut v = t.0.clone();
                    v[*pos] = SimpleType::new(to.clone(), 0);
                    PregroupType(v)
                })
            }
        }
    }

    /// Replay a derivation; `None` if some step does not apply.
    pub fn replay(&self, t: &PregroupType, steps: &[Step]) -> Option<PregroupType> {
        steps
            .iter()
            .try_fold(t.clone(), |acc, s| self.apply(&acc, s))
    }

    /// Shortest derivation from `t` to `goal`, by breadth-first search over
    /// the finitely many strings reachable from `t`.
    pub fn reduce(&self, t: &PregroupType, goal: &PregroupType) -> Option<Vec<Step>> {
        let mut parent: BTreeMap<PregroupType, Option<(PregroupType, Step)>> = BTreeMap::new();
        parent.insert(t.clone(), None);
        let mut queue = VecDeque::from([t.clone()]);
        while let Some(cur) = queue.pop_front() {
            if cur == *goal {
                let mut steps = Vec::new();
                let mut at = &cur;
                while let Some(Some((prev, step))) = parent.get(at) {
                    steps.push(step.clone());
                    at = prev;
                }
                steps.reverse();
                return Some(steps);
            }
            if cur.len() < goal.len() {
                continue;
            }
            for (step, next) in self.steps(&cur) {
                if !parent.contains_key(&next) {
                    parent.insert(next.clone(), Some((cur.clone(), step)));
                    queue.push_back(next);
                }
            }
        }
        None
    }
}

/// Words with their candidate types, and a sentence type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LexiconFile", into = "LexiconFile")]
pub struct Lexicon {
    grammar: Grammar,
    order: Vec<(Id, Id)>,
    sentence: PregroupType,
    words: BTreeMap<Id, Vec<PregroupType>>,
}

/// On-disk form of a lexicon.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LexiconFile {
    pub basic_types: Vec<Id>,
    #[serde(default)]
    pub order: Vec<(Id, Id)>,
    pub sentence: String,
    #[serde(default = "default_z_max")]
    pub z_max: u32,
    pub words: BTreeMap<Id, Vec<String>>,
}

fn default_z_max() -> u32 {
    DEFAULT_Z_MAX
}

impl TryFrom<LexiconFile> for Lexicon {
    type Error = Error;

    fn try_from(f: LexiconFile) -> Result<Self> {
        let grammar = Grammar::new(f.basic_types, &f.order, f.z_max)?;
        let sentence = grammar.parse(&f.sentence)?;
        let mut words = BTreeMap::new();
        for (w, types) in f.words {
            if types.is_empty() {
                return Err(Error::TypeSyntax(format!("word `{w}` has no types")));
            }
            let parsed = types
                .iter()
                .map(|t| grammar.parse(t))
                .collect::<Result<_>>()?;
            words.insert(w, parsed);
        }
        Ok(Lexicon {
            grammar,
            order: f.order,
            sentence,
            words,
        })
    }
}

impl From<Lexicon> for LexiconFile {
    fn from(l: Lexicon) -> Self {
        LexiconFile {
            basic_types: l.grammar.basic.iter().cloned().collect(),
            order: l.order,
            sentence: l.sentence.to_string(),
            z_max: l.grammar.z_max,
            words: l
                .words
                .into_iter()
                .map(|(w, ts)| (w, ts.iter().map(ToString::to_string).collect()))
                .collect(),
        }
    }
}

/// A successful parse: the chosen type of each word and a derivation of the
/// sentence type from their concatenation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parse {
    pub types: Vec<PregroupType>,
    pub derivation: Vec<Step>,
}

impl Lexicon {
    pub fn grammar(&self) -> &Grammar {
        &self.grammar
    }

    pub fn sentence(&self) -> &PregroupType {
        &self.sentence
    }

    pub fn types_of(&self, word: &str) -> Result<&[PregroupType]> {
        self.words
            .get(word)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownWord(Id::new(word)))
    }

    /// The shortest derivation over all type choices (first choice wins
    /// ties), or `None` if no choice reduces to the sentence type.
    pub fn sentence_check(&self, words: &[&str]) -> Result<Option<Parse>> {
        let options: Vec<&[PregroupType]> = words
            .iter()
            .map(|w| self.types_of(w))
            .collect::<Result<_>>()?;
        let mut best: Option<Parse> = None;
        let mut choice = vec![0usize; options.len()];
        loop {
            let types: Vec<PregroupType> = choice
                .iter()
                .zip(&options)
                .map(|(i, o)| o[*i].clone())
                .collect();
            let t = PregroupType::concat(&types);
            if let Some(derivation) = self.grammar.reduce(&t, &self.sentence) {
                if best
                    .as_ref()
                    .is_none_or(|b| derivation.len() < b.derivation.len())
                {
                    best = Some(Parse { types, derivation });
                }
            }
            // Odometer over the choices, last word fastest.
            let mut k = options.len();
            loop {
                if k == 0 {
                    return Ok(best);
                }
                k -= 1;
                choice[k] += 1;
                if choice[k] < options[k].len() {
                    break;
                }
                choice[k] = 0;
            }
        }
    }
}

/// A labelled object of a pregroup-generated language.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Phrase {
    pub label: Id,
    #[serde(rename = "type")]
    pub ty: PregroupType,
}

/// Thin category with one object per phrase, plus one object (named by its
/// type string) per further type reachable by contractions. There is a
/// morphism `X => Y` iff `Y`'s type is reached from `X`'s by at least one
/// contraction, so distinct phrases of the same irreducible type are
/// unrelated.
pub fn language_category_from_lexicon(
    grammar: &Grammar,
    phrases: &[Phrase],
) -> Result<FinCategory> {
    let mut objects: BTreeMap<Id, PregroupType> = BTreeMap::new();
    for p in phrases {
        grammar.check(&p.ty)?;
        if objects.insert(p.label.clone(), p.ty.clone()).is_some() {
            return Err(Error::DuplicateId(p.label.clone()));
        }
    }
    // Strict contraction reachability, per type.
    let mut below: BTreeMap<PregroupType, BTreeSet<PregroupType>> = BTreeMap::new();
    let mut todo: Vec<PregroupType> = phrases.iter().map(|p| p.ty.clone()).collect();
    while let Some(t) = todo.pop() {
        if below.contains_key(&t) {
            continue;
        }
        let next: BTreeSet<PregroupType> = grammar
            .contractions(&t)
            .into_iter()
            .map(|(_, n)| n)
            .collect();
        todo.extend(next.iter().cloned());
        below.insert(t, next);
    }
    let types: Vec<PregroupType> = below.keys().cloned().collect();
    // Contractions shorten strings, so processing by length gives closures.
    let mut reach: BTreeMap<PregroupType, BTreeSet<PregroupType>> = BTreeMap::new();
    let mut by_len = types.clone();
    by_len.sort_by_key(PregroupType::len);
    for t in by_len {
        let mut r = BTreeSet::new();
        for n in &below[&t] {
            r.insert(n.clone());
            r.extend(reach[n].iter().cloned());
        }
        reach.insert(t, r);
    }
    let reached: BTreeSet<&PregroupType> = reach.values().flatten().collect();
    for t in reached {
        let name = Id::from(t.to_string());
        objects.entry(name).or_insert_with(|| t.clone());
    }

    let arrow = |x: &Id, y: &Id| Id::from(format!("{x}=>{y}"));
    let mut b = FinCategory::builder();
    for x in objects.keys() {
        b = b.object(x.clone());
    }
    let mut hom: Vec<(&Id, &Id)> = Vec::new();
    for (x, tx) in &objects {
        for (y, ty) in &objects {
            if reach[tx].contains(ty) {
                b = b.morphism(arrow(x, y), x.clone(), y.clone());
                hom.push((x, y));
            }
        }
    }
    for &(x, y) in &hom {
        for &(y2, z) in &hom {
            if y == y2 {
                b = b.compose(arrow(y, z), arrow(x, y), arrow(x, z));
            }
        }
    }
    b.build()
}
