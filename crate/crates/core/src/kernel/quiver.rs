use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::category::{Arrow, FinCategory};
use crate::error::{Error, Result};
use crate::id::Id;

/// A directed multigraph `E ⇉ V`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quiver {
    pub vertices: BTreeSet<Id>,
    pub edges: BTreeMap<Id, Arrow>,
}

impl Quiver {
    pub fn new<I, S>(vertices: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<Id>,
    {
        Quiver {
            vertices: vertices.into_iter().map(Into::into).collect(),
            edges: BTreeMap::new(),
        }
    }

    pub fn with_edge(mut self, e: impl Into<Id>, src: impl Into<Id>, tgt: impl Into<Id>) -> Self {
        self.add_edge(e, src, tgt)
            .expect("edge endpoints are vertices");
        self
    }

    pub fn add_edge(
        &mut self,
        e: impl Into<Id>,
        src: impl Into<Id>,
        tgt: impl Into<Id>,
    ) -> Result<()> {
        let (e, src, tgt) = (e.into(), src.into(), tgt.into());
        for end in [&src, &tgt] {
            if !self.vertices.contains(end) {
                return Err(Error::UnknownObject(end.clone()));
            }
        }
        if self.edges.contains_key(&e) {
            return Err(Error::DuplicateId(e));
        }
        self.edges.insert(e, Arrow { src, tgt });
        Ok(())
    }

    pub fn edge(&self, e: &str) -> Result<&Arrow> {
        self.edges
            .get(e)
            .ok_or_else(|| Error::UnknownEdge(Id::new(e)))
    }

    pub fn out_edges<'a>(&'a self, v: &'a str) -> impl Iterator<Item = (&'a Id, &'a Arrow)> + 'a {
        self.edges.iter().filter(move |(_, a)| a.src.as_str() == v)
    }

    /// Some edge lying on a directed cycle, if any.
    pub fn find_cycle_edge(&self) -> Option<&Id> {
        // An edge u → v lies on a cycle iff u is reachable from v.
        self.edges
            .iter()
            .find(|(_, a)| self.reachable(&a.tgt).contains(&a.src))
            .map(|(e, _)| e)
    }

    fn reachable(&self, from: &Id) -> BTreeSet<Id> {
        let mut seen = BTreeSet::from([from.clone()]);
        let mut stack = vec![from.clone()];
        while let Some(v) = stack.pop() {
            for (_, a) in self.out_edges(&v) {
                if seen.insert(a.tgt.clone()) {
                    stack.push(a.tgt.clone());
                }
            }
        }
        seen
    }
}

pub fn discrete_quiver<I, S>(vertices: I) -> Quiver
where
    I: IntoIterator<Item = S>,
    S: Into<Id>,
{
    Quiver::new(vertices)
}

/// Every morphism, identities included, becomes an edge.
pub fn underlying_quiver(c: &FinCategory) -> Quiver {
    Quiver {
        vertices: c.objects().cloned().collect(),
        edges: c.morphisms().map(|(m, a)| (m.clone(), a.clone())).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Base,
    Extra,
}

impl Side {
    pub fn tag(self) -> &'static str {
        match self {
            Side::Base => "base",
            Side::Extra => "extra",
        }
    }
}

/// Pushout of two quivers over their shared discrete vertex set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuiverPushout {
    pub quiver: Quiver,
    pub origin: BTreeMap<Id, (Side, Id)>,
}

impl QuiverPushout {
    pub fn tagged(side: Side, e: &Id) -> Id {
        Id::from(format!("{}.{}", side.tag(), e))
    }
}

pub fn quiver_pushout(base: &Quiver, extra: &Quiver) -> Result<QuiverPushout> {
    if base.vertices != extra.vertices {
        return Err(Error::VertexMismatch);
    }
    let mut quiver = Quiver {
        vertices: base.vertices.clone(),
        edges: BTreeMap::new(),
    };
    let mut origin = BTreeMap::new();
    for (side, q) in [(Side::Base, base), (Side::Extra, extra)] {
        for (e, a) in &q.edges {
            let t = QuiverPushout::tagged(side, e);
            quiver.edges.insert(t.clone(), a.clone());
            origin.insert(t, (side, e.clone()));
        }
    }
    Ok(QuiverPushout { quiver, origin })
}

/// The path category of a quiver, with each morphism's edge path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeCategory {
    pub category: FinCategory,
    /// Edge sequence (first-traversed first) of every morphism.
    pub paths: BTreeMap<Id, Vec<Id>>,
}

impl FreeCategory {
    pub fn path_id(path: &[Id]) -> Id {
        let parts: Vec<&str> = path.iter().map(Id::as_str).collect();
        Id::from(parts.join(";"))
    }
}

/// Paths of length at most `bound` (all paths when the quiver is acyclic and
/// no bound is given). Truncated results are flagged non-closed.
pub fn free_category(q: &Quiver, bound: Option<usize>) -> Result<FreeCategory> {
    let cyclic = q.find_cycle_edge();
    if let (Some(e), None) = (cyclic, bound) {
        return Err(Error::UnboundedHomSet(e.clone()));
    }
    let limit = bound.unwrap_or(usize::MAX);

    let mut paths: BTreeMap<Id, (Id, Id, Vec<Id>)> = BTreeMap::new();
    let mut frontier: Vec<(Id, Id, Vec<Id>)> = q
        .vertices
        .iter()
        .map(|v| (v.clone(), v.clone(), Vec::new()))
        .collect();
    let mut closed = true;
    let mut len = 0;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for (s, t, p) in frontier {
            if !p.is_empty() {
                let id = FreeCategory::path_id(&p);
                if paths
                    .insert(id.clone(), (s.clone(), t.clone(), p.clone()))
                    .is_some()
                {
                    return Err(Error::DuplicateId(id));
                }
            }
            for (e, a) in q.out_edges(&t) {
                let mut p2 = p.clone();
                p2.push(e.clone());
                next.push((s.clone(), a.tgt.clone(), p2));
            }
        }
        len += 1;
        if len > limit {
            closed = next.is_empty();
            break;
        }
        frontier = next;
    }

    let mut b = FinCategory::builder();
    for v in &q.vertices {
        b = b
            .object(v.clone())
            .identity(v.clone(), Id::from(format!("id_{v}")));
    }
    for (id, (s, t, _)) in &paths {
        b = b.morphism(id.clone(), s.clone(), t.clone());
    }
    let mut by_src: BTreeMap<&Id, Vec<(&Id, &Vec<Id>)>> = BTreeMap::new();
    for (id, (s, _, p)) in &paths {
        by_src.entry(s).or_default().push((id, p));
    }
    for (f, (_, t, pf)) in &paths {
        for (g, pg) in by_src.get(t).into_iter().flatten() {
            if pf.len() + pg.len() <= limit {
                let mut cat = pf.clone();
                cat.extend(pg.iter().cloned());
                b = b.compose((*g).clone(), f.clone(), FreeCategory::path_id(&cat));
            }
        }
    }
    if !closed {
        b = b.truncated();
    }
    let category = b.build()?;
    let mut out_paths: BTreeMap<Id, Vec<Id>> =
        paths.into_iter().map(|(id, (_, _, p))| (id, p)).collect();
    for i in category.identities().values() {
        out_paths.insert(i.clone(), Vec::new());
    }
    Ok(FreeCategory {
        category,
        paths: out_paths,
    })
}
