//! Speakers of a language, explanations, and vocabulary acquisition.
//!
//! A speaker's meaning is a presheaf on its language, stored as a
//! [`SetFunctor`] on `language.opposite()`: a morphism `f : A → B` of the
//! language acts `fibre(B) → fibre(A)`.

mod acquire;
mod explanation;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fibration::{grothendieck, Fibration};
use crate::id::Id;
use crate::kernel::{FinCategory, SetFunctor};

pub use acquire::{
    acquire_by_example, acquire_by_example_merged, acquire_by_paraphrasis, AcquisitionKind,
    AcquisitionReport, AdjoinedEdge, LimitSummary, Outcome, ParaphrasisOptions,
};
pub use explanation::{
    tautological_explanation, validate_explanation, Explanation, ExplanationCheck,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "SpeakerFile", into = "SpeakerFile")]
pub struct Speaker {
    name: Id,
    language: Arc<FinCategory>,
    meaning: SetFunctor,
    /// Language morphisms that came from adjoined quiver edges.
    adjoined: BTreeSet<Id>,
    fibration: Fibration,
}

impl PartialEq for Speaker {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.language == other.language
            && self.meaning == other.meaning
            && self.adjoined == other.adjoined
    }
}

impl Eq for Speaker {}

impl Speaker {
    pub fn new(
        name: impl Into<Id>,
        language: Arc<FinCategory>,
        meaning: SetFunctor,
    ) -> Result<Self> {
        if **meaning.base() != language.opposite() {
            return Err(Error::BaseMismatch);
        }
        let fibration = grothendieck(&meaning)?;
        Ok(Speaker {
            name: name.into(),
            language,
            meaning,
            adjoined: BTreeSet::new(),
            fibration,
        })
    }

    /// Build from fibres and actions (`f : A → B` maps `fibre(B)` to
    /// `fibre(A)`). Missing fibres are empty; missing actions are allowed
    /// when their domain is empty.
    pub fn from_tables(
        name: impl Into<Id>,
        language: Arc<FinCategory>,
        mut fibres: BTreeMap<Id, BTreeSet<Id>>,
        mut actions: BTreeMap<Id, BTreeMap<Id, Id>>,
    ) -> Result<Self> {
        for x in fibres.keys() {
            if !language.has_object(x) {
                return Err(Error::UnknownObject(x.clone()));
            }
        }
        for m in actions.keys() {
            if !language.has_morphism(m) {
                return Err(Error::UnknownMorphism(m.clone()));
            }
        }
        for x in language.objects() {
            fibres.entry(x.clone()).or_default();
        }
        for (m, a) in language.morphisms() {
            if fibres[&a.tgt].is_empty() && !language.is_identity(m) {
                actions.entry(m.clone()).or_default();
            }
        }
        let base = Arc::new(language.opposite());
        let meaning = SetFunctor::new(base, fibres, actions)?;
        Speaker::new(name, language, meaning)
    }

    pub fn with_adjoined(mut self, adjoined: BTreeSet<Id>) -> Result<Self> {
        if let Some(m) = adjoined.iter().find(|m| !self.language.has_morphism(m)) {
            return Err(Error::UnknownMorphism(m.clone()));
        }
        self.adjoined = adjoined;
        Ok(self)
    }

    pub fn renamed(mut self, name: impl Into<Id>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &Id {
        &self.name
    }

    pub fn language(&self) -> &Arc<FinCategory> {
        &self.language
    }

    pub fn meaning(&self) -> &SetFunctor {
        &self.meaning
    }

    /// The category of elements of the meaning, projected onto the language.
    pub fn fibration(&self) -> &Fibration {
        &self.fibration
    }

    pub fn adjoined(&self) -> &BTreeSet<Id> {
        &self.adjoined
    }

    pub fn fibre(&self, x: &str) -> Result<&BTreeSet<Id>> {
        self.meaning.value(x)
    }

    pub fn fibre_sizes(&self) -> BTreeMap<Id, usize> {
        self.meaning
            .values()
            .iter()
            .map(|(x, v)| (x.clone(), v.len()))
            .collect()
    }
}

/// On-disk form of a speaker.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeakerFile {
    pub name: Id,
    pub language: FinCategory,
    #[serde(default)]
    pub fibres: BTreeMap<Id, BTreeSet<Id>>,
    #[serde(default)]
    pub actions: BTreeMap<Id, BTreeMap<Id, Id>>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub adjoined: BTreeSet<Id>,
}

impl TryFrom<SpeakerFile> for Speaker {
    type Error = Error;

    fn try_from(f: SpeakerFile) -> Result<Self> {
        Speaker::from_tables(f.name, Arc::new(f.language), f.fibres, f.actions)?
            .with_adjoined(f.adjoined)
    }
}

impl From<Speaker> for SpeakerFile {
    fn from(s: Speaker) -> Self {
        let actions = s
            .meaning
            .actions()
            .iter()
            .filter(|(m, _)| !s.language.is_identity(m))
            .map(|(m, a)| (m.clone(), a.clone()))
            .collect();
        SpeakerFile {
            name: s.name,
            language: (*s.language).clone(),
            fibres: s.meaning.values().clone(),
            actions,
            adjoined: s.adjoined,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(xs: &[&str]) -> BTreeSet<Id> {
        xs.iter().map(Id::new).collect()
    }

    #[test]
    fn tables_and_round_trip() {
        let lang = Arc::new(FinCategory::arrow("cat", "is", "feline"));
        let s = Speaker::from_tables(
            "alice",
            lang,
            [
                ("cat".into(), ids(&["salem"])),
                ("feline".into(), ids(&["salem", "tiger"])),
            ]
            .into(),
            [(
                "is".into(),
                [
                    ("salem".into(), "salem".into()),
                    ("tiger".into(), "salem".into()),
                ]
                .into(),
            )]
            .into(),
        );
        // `is : cat → feline` acts fibre(feline) → fibre(cat).
        let s = s.unwrap();
        assert_eq!(s.fibre("cat").unwrap().len(), 1);
        assert_eq!(s.fibration().total().object_count(), 3);
        let json = serde_json::to_string(&s).unwrap();
        let back: Speaker = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        assert_eq!(serde_json::to_string(&back).unwrap(), json);
    }

    #[test]
    fn missing_actions_need_empty_domains() {
        let lang = Arc::new(FinCategory::arrow("cat", "is", "feline"));
        let ok = Speaker::from_tables(
            "bob",
            lang.clone(),
            [("cat".into(), ids(&["c"]))].into(),
            BTreeMap::new(),
        );
        assert!(ok.is_ok());
        let bad = Speaker::from_tables(
            "bob",
            lang,
            [("feline".into(), ids(&["f"]))].into(),
            BTreeMap::new(),
        );
        assert!(matches!(bad, Err(Error::InvalidSetFunctor(_))));
    }
}
