//! On-disk scenario format. A scenario declares categories, speakers and
//! explanations, then lists events and assertions over the resulting stages.
//! Stage `k` is the state after the first `k` events; stage 0 is the
//! declarations alone.

use std::collections::{BTreeMap, BTreeSet};

use fiblang_core::kernel::FinCategory;
use fiblang_core::pregroup::Phrase;
use fiblang_core::speaker::Outcome;
use fiblang_core::Id;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub categories: BTreeMap<Id, CategoryDecl>,
    pub speakers: BTreeMap<Id, SpeakerDecl>,
    #[serde(default)]
    pub explanations: BTreeMap<Id, ExplanationDecl>,
    #[serde(default)]
    pub events: Vec<Event>,
    #[serde(default)]
    pub assertions: Vec<Assertion>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum CategoryDecl {
    Explicit(FinCategory),
    /// Objects are the phrases plus every type reached from them by
    /// contractions; morphisms are reductions.
    Pregroup(PregroupDecl),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PregroupDecl {
    pub basic_types: Vec<Id>,
    #[serde(default)]
    pub order: Vec<(Id, Id)>,
    #[serde(default = "default_z_max")]
    pub z_max: u32,
    pub phrases: Vec<Phrase>,
}

fn default_z_max() -> u32 {
    fiblang_core::pregroup::DEFAULT_Z_MAX
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeakerDecl {
    /// Name of a declared category.
    pub language: Id,
    #[serde(default)]
    pub fibres: BTreeMap<Id, BTreeSet<Id>>,
    /// Meaning of each non-identity morphism `f : A → B`, as a function
    /// from the fibre over `B` to the fibre over `A`.
    #[serde(default)]
    pub actions: BTreeMap<Id, BTreeMap<Id, Id>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum ExplanationDecl {
    Explicit(Box<ExplicitExplanation>),
    /// Resolved against the speaker's binding at the stage where it is used.
    Tautological {
        speaker: Id,
        target: Id,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitExplanation {
    /// The declared category the diagram lands in.
    pub language: Id,
    pub shape: FinCategory,
    pub objects: BTreeMap<Id, Id>,
    #[serde(default)]
    pub morphisms: BTreeMap<Id, Id>,
    pub target: Id,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<BTreeMap<Id, Id>>,
}

/// Acquisition events replace the learner's binding (or bind `as`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Event {
    Example {
        #[serde(default)]
        id: Option<Id>,
        learner: Id,
        target: Id,
        examples: BTreeSet<Id>,
        #[serde(default)]
        teacher: Option<Id>,
        #[serde(default, rename = "as")]
        bind_as: Option<Id>,
    },
    MergedExample {
        #[serde(default)]
        id: Option<Id>,
        learner: Id,
        target: Id,
        examples: BTreeSet<Id>,
        #[serde(default)]
        merge: BTreeMap<Id, Id>,
        #[serde(default, rename = "as")]
        bind_as: Option<Id>,
    },
    Paraphrasis {
        #[serde(default)]
        id: Option<Id>,
        teacher: Id,
        learner: Id,
        target: Id,
        explanation: Id,
        #[serde(default)]
        bound: Option<usize>,
        #[serde(default)]
        edge_overrides: BTreeMap<Id, BTreeMap<Id, Id>>,
        #[serde(default, rename = "as")]
        bind_as: Option<Id>,
    },
    ValidateExplanation {
        #[serde(default)]
        id: Option<Id>,
        speaker: Id,
        explanation: Id,
    },
}

impl Event {
    pub fn explicit_id(&self) -> Option<&Id> {
        match self {
            Event::Example { id, .. }
            | Event::MergedExample { id, .. }
            | Event::Paraphrasis { id, .. }
            | Event::ValidateExplanation { id, .. } => id.as_ref(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Event::Example { .. } => "example",
            Event::MergedExample { .. } => "merged-example",
            Event::Paraphrasis { .. } => "paraphrasis",
            Event::ValidateExplanation { .. } => "validate-explanation",
        }
    }

    /// Speakers read by the event.
    pub fn reads(&self) -> Vec<(&'static str, &Id)> {
        match self {
            Event::Example {
                learner, teacher, ..
            } => {
                let mut v = vec![("learner", learner)];
                v.extend(teacher.iter().map(|t| ("teacher", t)));
                v
            }
            Event::MergedExample { learner, .. } => vec![("learner", learner)],
            Event::Paraphrasis {
                teacher, learner, ..
            } => vec![("teacher", teacher), ("learner", learner)],
            Event::ValidateExplanation { speaker, .. } => vec![("speaker", speaker)],
        }
    }

    /// The binding the event writes, if any.
    pub fn writes(&self) -> Option<&Id> {
        match self {
            Event::Example {
                learner, bind_as, ..
            }
            | Event::MergedExample {
                learner, bind_as, ..
            }
            | Event::Paraphrasis {
                learner, bind_as, ..
            } => Some(bind_as.as_ref().unwrap_or(learner)),
            Event::ValidateExplanation { .. } => None,
        }
    }

    pub fn explanation(&self) -> Option<&Id> {
        match self {
            Event::Paraphrasis { explanation, .. }
            | Event::ValidateExplanation { explanation, .. } => Some(explanation),
            _ => None,
        }
    }
}

/// A check on the state at `stage` (default: after the last event).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Assertion {
    FibreSize {
        speaker: Id,
        object: Id,
        size: usize,
        #[serde(default)]
        stage: Option<usize>,
    },
    Fibre {
        speaker: Id,
        object: Id,
        elements: BTreeSet<Id>,
        #[serde(default)]
        stage: Option<usize>,
    },
    FibreNonempty {
        speaker: Id,
        object: Id,
        #[serde(default)]
        stage: Option<usize>,
    },
    /// Number of non-identity morphisms in the speaker's language.
    MorphismCount {
        speaker: Id,
        count: usize,
        #[serde(default)]
        stage: Option<usize>,
    },
    HomSize {
        speaker: Id,
        src: Id,
        tgt: Id,
        size: usize,
        #[serde(default)]
        stage: Option<usize>,
    },
    Outcome {
        event: Id,
        outcome: Outcome,
    },
    NewMorphisms {
        event: Id,
        count: usize,
    },
    Explanation {
        event: Id,
        #[serde(default)]
        valid: Option<bool>,
        #[serde(default)]
        exact: Option<bool>,
        #[serde(default)]
        vacuous: Option<bool>,
        #[serde(default)]
        apex_size: Option<usize>,
    },
    /// The speaker's binding is structurally equal at both stages.
    Unchanged {
        speaker: Id,
        from: usize,
        #[serde(default)]
        to: Option<usize>,
    },
    /// Both speakers share a language and their fibrations are isomorphic
    /// over it.
    Iso {
        left: Id,
        right: Id,
        #[serde(default)]
        stage: Option<usize>,
    },
    /// The old language embeds in the later one by identity on names, and
    /// the later meaning restricted along it agrees with the earlier meaning
    /// away from the `except` objects.
    Restricts {
        speaker: Id,
        from: usize,
        #[serde(default)]
        to: Option<usize>,
        #[serde(default)]
        except: BTreeSet<Id>,
    },
}

impl Assertion {
    pub fn kind(&self) -> &'static str {
        match self {
            Assertion::FibreSize { .. } => "fibre-size",
            Assertion::Fibre { .. } => "fibre",
            Assertion::FibreNonempty { .. } => "fibre-nonempty",
            Assertion::MorphismCount { .. } => "morphism-count",
            Assertion::HomSize { .. } => "hom-size",
            Assertion::Outcome { .. } => "outcome",
            Assertion::NewMorphisms { .. } => "new-morphisms",
            Assertion::Explanation { .. } => "explanation",
            Assertion::Unchanged { .. } => "unchanged",
            Assertion::Iso { .. } => "iso",
            Assertion::Restricts { .. } => "restricts",
        }
    }

    /// Speakers named by the assertion, with the stages they are read at.
    pub fn speakers(&self) -> Vec<(&Id, Option<usize>)> {
        match self {
            Assertion::FibreSize { speaker, stage, .. }
            | Assertion::Fibre { speaker, stage, .. }
            | Assertion::FibreNonempty { speaker, stage, .. }
            | Assertion::MorphismCount { speaker, stage, .. }
            | Assertion::HomSize { speaker, stage, .. } => vec![(speaker, *stage)],
            Assertion::Unchanged { speaker, from, to }
            | Assertion::Restricts {
                speaker, from, to, ..
            } => {
                vec![(speaker, Some(*from)), (speaker, *to)]
            }
            Assertion::Iso { left, right, stage } => vec![(left, *stage), (right, *stage)],
            Assertion::Outcome { .. }
            | Assertion::NewMorphisms { .. }
            | Assertion::Explanation { .. } => {
                vec![]
            }
        }
    }

    pub fn event(&self) -> Option<&Id> {
        match self {
            Assertion::Outcome { event, .. }
            | Assertion::NewMorphisms { event, .. }
            | Assertion::Explanation { event, .. } => Some(event),
            _ => None,
        }
    }
}
