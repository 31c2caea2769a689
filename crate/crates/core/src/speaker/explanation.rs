use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::Speaker;
use crate::error::{Error, Result};
use crate::id::{tuple_id, Id};
use crate::kernel::{set_limit, CatFunctor, FinCategory, LimitCone};

/// A finite diagram in a language with a target object, optionally with an
/// embedding of the limit's apex (named by tuple identifiers such as
/// `(e1,b1,f1)`) into the target's fibre.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Explanation {
    pub shape: Arc<FinCategory>,
    /// Shape object ↦ language object.
    pub objects: BTreeMap<Id, Id>,
    /// Shape morphism ↦ language morphism; identities may be omitted.
    #[serde(default)]
    pub morphisms: BTreeMap<Id, Id>,
    pub target: Id,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<BTreeMap<Id, Id>>,
}

impl Explanation {
    /// The diagram as a functor into `language`.
    pub fn diagram(&self, language: &Arc<FinCategory>) -> Result<CatFunctor> {
        if !language.has_object(&self.target) {
            return Err(Error::DiagramOutsideLanguage);
        }
        let maps_in = self.objects.values().all(|x| language.has_object(x))
            && self.morphisms.values().all(|m| language.has_morphism(m));
        if !maps_in {
            return Err(Error::DiagramOutsideLanguage);
        }
        CatFunctor::from_maps(
            self.shape.clone(),
            language.clone(),
            self.objects.clone(),
            self.morphisms.clone(),
        )
    }

    /// The limit of the speaker's meaning over the diagram: a compatible
    /// family picks one meaning per shape object, and a shape morphism
    /// `a → a'` acts from the `a'` component to the `a` component.
    pub fn limit(&self, speaker: &Speaker) -> Result<LimitCone> {
        let d = self.diagram(speaker.language())?.opposite();
        Ok(set_limit(&speaker.meaning().restrict(&d)?))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplanationCheck {
    pub valid: bool,
    pub exact: bool,
    pub vacuous: bool,
    pub limit: LimitCone,
    /// Apex element ↦ fibre element. Without a supplied embedding the apex
    /// names themselves stand for fibre elements and this is empty.
    pub embedding: BTreeMap<Id, Id>,
}

/// With an embedding, valid iff it is an injection from the apex into
/// `fibre(target)` and exact iff it is a bijection. Without one, the apex is
/// compared by cardinality only.
pub fn validate_explanation(p: &Speaker, e: &Explanation) -> Result<ExplanationCheck> {
    let limit = e.limit(p)?;
    let fibre = p.fibre(&e.target)?;
    let apex: BTreeSet<Id> = limit.element_ids("").into_iter().collect();
    let (valid, exact, embedding) = match &e.embedding {
        Some(emb) => {
            let keys: BTreeSet<&Id> = emb.keys().collect();
            let image: BTreeSet<&Id> = emb.values().collect();
            let valid = keys == apex.iter().collect()
                && image.len() == emb.len()
                && image.iter().all(|y| fibre.contains(*y));
            (valid, valid && image.len() == fibre.len(), emb.clone())
        }
        None => (
            apex.len() <= fibre.len(),
            apex.len() == fibre.len(),
            BTreeMap::new(),
        ),
    };
    Ok(ExplanationCheck {
        valid,
        exact,
        vacuous: limit.is_empty(),
        limit,
        embedding,
    })
}

/// The one-object explanation of `target` by itself.
pub fn tautological_explanation(p: &Speaker, target: &str) -> Result<Explanation> {
    let fibre = p.fibre(target)?;
    let embedding = fibre.iter().map(|x| (tuple_id([x]), x.clone())).collect();
    Ok(Explanation {
        shape: Arc::new(FinCategory::terminal()),
        objects: [(Id::new("*"), Id::new(target))].into(),
        morphisms: BTreeMap::new(),
        target: Id::new(target),
        embedding: Some(embedding),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(xs: &[&str]) -> BTreeSet<Id> {
        xs.iter().map(Id::new).collect()
    }

    fn evil_cat(cats: &[&str]) -> Speaker {
        let lang = Arc::new(FinCategory::discrete(["evil", "black", "feline", "cat"]));
        Speaker::from_tables(
            "p",
            lang,
            [
                ("evil".into(), ids(&["e1", "e2"])),
                ("black".into(), ids(&["b1"])),
                ("feline".into(), ids(&["f1", "f2"])),
                ("cat".into(), ids(cats)),
            ]
            .into(),
            BTreeMap::new(),
        )
        .unwrap()
    }

    fn black_evil_feline(embed: bool) -> Explanation {
        let embedding = embed.then(|| {
            [
                ("(b1,e1,f1)", "c11"),
                ("(b1,e1,f2)", "c12"),
                ("(b1,e2,f1)", "c21"),
                ("(b1,e2,f2)", "c22"),
            ]
            .into_iter()
            .map(|(a, b)| (Id::new(a), Id::new(b)))
            .collect()
        });
        Explanation {
            shape: Arc::new(FinCategory::discrete(["a_black", "b_evil", "c_feline"])),
            objects: [
                ("a_black".into(), "black".into()),
                ("b_evil".into(), "evil".into()),
                ("c_feline".into(), "feline".into()),
            ]
            .into(),
            morphisms: BTreeMap::new(),
            target: "cat".into(),
            embedding,
        }
    }

    #[test]
    fn black_evil_feline_is_exact_with_four_cats() {
        let p = evil_cat(&["c11", "c12", "c21", "c22"]);
        let r = validate_explanation(&p, &black_evil_feline(true)).unwrap();
        assert!(r.valid && r.exact && !r.vacuous);
        assert_eq!(r.limit.len(), 4);

        let p5 = evil_cat(&["c11", "c12", "c21", "c22", "c33"]);
        let r = validate_explanation(&p5, &black_evil_feline(true)).unwrap();
        assert!(r.valid && !r.exact);

        let r = validate_explanation(&p5, &black_evil_feline(false)).unwrap();
        assert!(r.valid && !r.exact);
    }

    #[test]
    fn non_injective_embedding_is_invalid() {
        let p = evil_cat(&["c11", "c12", "c21", "c22"]);
        let mut e = black_evil_feline(true);
        e.embedding
            .as_mut()
            .unwrap()
            .insert("(b1,e2,f2)".into(), "c11".into());
        assert!(!validate_explanation(&p, &e).unwrap().valid);
    }

    #[test]
    fn empty_fibre_makes_explanations_vacuous() {
        let mut p = evil_cat(&[]);
        p = Speaker::from_tables(
            "p",
            p.language().clone(),
            [("black".into(), ids(&[])), ("evil".into(), ids(&["e1"]))].into(),
            BTreeMap::new(),
        )
        .unwrap();
        let r = validate_explanation(&p, &black_evil_feline(false)).unwrap();
        assert!(r.vacuous && r.valid);
    }

    #[test]
    fn tautological_explanations_are_exact() {
        for cats in [&[][..], &["x"][..], &["a", "b", "c", "d", "e"][..]] {
            let p = evil_cat(cats);
            let e = tautological_explanation(&p, "cat").unwrap();
            let r = validate_explanation(&p, &e).unwrap();
            assert!(r.valid && r.exact);
            assert_eq!(r.limit.len(), cats.len());
            assert_eq!(r.vacuous, cats.is_empty());
        }
    }

    #[test]
    fn diagram_must_land_in_the_language() {
        let p = evil_cat(&[]);
        let mut e = black_evil_feline(false);
        e.objects.insert("a_black".into(), "dog".into());
        assert_eq!(
            validate_explanation(&p, &e),
            Err(Error::DiagramOutsideLanguage)
        );
    }

    #[test]
    fn morphisms_in_the_shape_constrain_the_limit() {
        // language: cat --is--> feline; fibre(feline) = {t, l}, fibre(cat) = {c}
        // with is*(t) = c, is*(l) = c. Diagram: the arrow itself.
        let lang = Arc::new(FinCategory::arrow("cat", "is", "feline"));
        let p = Speaker::from_tables(
            "p",
            lang,
            [
                ("cat".into(), ids(&["c"])),
                ("feline".into(), ids(&["t", "l"])),
            ]
            .into(),
            [(
                "is".into(),
                [("t".into(), "c".into()), ("l".into(), "c".into())].into(),
            )]
            .into(),
        )
        .unwrap();
        let e = Explanation {
            shape: Arc::new(FinCategory::arrow("a", "u", "b")),
            objects: [("a".into(), "cat".into()), ("b".into(), "feline".into())].into(),
            morphisms: [("u".into(), "is".into())].into(),
            target: "feline".into(),
            embedding: None,
        };
        let r = validate_explanation(&p, &e).unwrap();
        assert_eq!(
            r.limit.apex,
            vec![
                vec![Id::new("c"), Id::new("l")],
                vec![Id::new("c"), Id::new("t")]
            ]
        );
        assert!(r.exact);
    }
}
