//! Parsing, reference checking and construction of the declared objects.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::Arc;

use fiblang_core::kernel::FinCategory;
use fiblang_core::pregroup::{language_category_from_lexicon, Grammar};
use fiblang_core::speaker::{Explanation, Speaker};
use fiblang_core::Id;

use crate::error::{Result, ScenarioError};
use crate::model::{Assertion, CategoryDecl, Event, ExplanationDecl, Scenario};

/// A parsed scenario together with its source text, for line lookups.
#[derive(Debug, Clone)]
pub struct Source {
    pub text: String,
    pub scenario: Scenario,
}

impl Source {
    pub fn read(path: &Path) -> Result<Source> {
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Source::parse(text)
    }

    pub fn parse(text: String) -> Result<Source> {
        let scenario = serde_json::from_str(&text).map_err(|e| ScenarioError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Ok(Source { text, scenario })
    }

    /// First line on which `"key": value` appears, `value` given as JSON.
    pub fn line_of(&self, key: &str, value: &str) -> Option<usize> {
        let quoted = format!("\"{key}\"");
        let mut from = 0;
        while let Some(i) = self.text[from..].find(&quoted) {
            let start = from + i;
            let rest = self.text[start + quoted.len()..].trim_start();
            if let Some(rest) = rest.strip_prefix(':') {
                if rest.trim_start().starts_with(value) {
                    return Some(self.text[..start].matches('\n').count() + 1);
                }
            }
            from = start + quoted.len();
        }
        None
    }

    fn line_of_id(&self, key: &str, value: &Id) -> Option<usize> {
        self.line_of(key, &format!("\"{value}\""))
    }

    fn missing(&self, what: &str, key: &str, name: &Id) -> ScenarioError {
        ScenarioError::Reference {
            message: format!("{what} `{name}` is not declared"),
            line: self.line_of_id(key, name),
        }
    }
}

/// Stable identifier of the event at 1-based position `n`.
pub fn event_id(event: &Event, n: usize) -> Id {
    event
        .explicit_id()
        .cloned()
        .unwrap_or_else(|| Id::from(format!("e{n}")))
}

/// Every name resolves, every speaker is bound before it is read, event ids
/// are unique and every stage exists.
pub fn check_references(src: &Source) -> Result<()> {
    let s = &src.scenario;
    for (name, sp) in &s.speakers {
        if !s.categories.contains_key(&sp.language) {
            return Err(ScenarioError::Reference {
                message: format!(
                    "category `{}` of speaker `{name}` is not declared",
                    sp.language
                ),
                line: src.line_of_id("language", &sp.language),
            });
        }
    }
    for e in s.explanations.values() {
        match e {
            ExplanationDecl::Explicit(x) if !s.categories.contains_key(&x.language) => {
                return Err(src.missing("category", "language", &x.language));
            }
            ExplanationDecl::Tautological { speaker, .. } if !s.speakers.contains_key(speaker) => {
                return Err(src.missing("speaker", "speaker", speaker));
            }
            _ => {}
        }
    }

    let mut bound: BTreeSet<&Id> = s.speakers.keys().collect();
    let mut ids = BTreeSet::new();
    for (i, ev) in s.events.iter().enumerate() {
        for (role, name) in ev.reads() {
            if !bound.contains(name) {
                return Err(src.missing("speaker", role, name));
            }
        }
        if let Some(x) = ev.explanation() {
            if !s.explanations.contains_key(x) {
                return Err(src.missing("explanation", "explanation", x));
            }
        }
        let id = event_id(ev, i + 1);
        if !ids.insert(id.clone()) {
            return Err(ScenarioError::Reference {
                message: format!("event id `{id}` is used twice"),
                line: src.line_of_id("id", &id),
            });
        }
        bound.extend(ev.writes());
    }

    let stages = s.events.len();
    for a in &s.assertions {
        for (name, stage) in a.speakers() {
            if !bound.contains(name) {
                let key = match a {
                    Assertion::Iso { left, .. } if left == name => "left",
                    Assertion::Iso { .. } => "right",
                    _ => "speaker",
                };
                return Err(src.missing("speaker", key, name));
            }
            if let Some(k) = stage.filter(|k| *k > stages) {
                return Err(ScenarioError::Reference {
                    message: format!("stage {k} does not exist (the scenario has {stages} events)"),
                    line: ["stage", "from", "to"]
                        .iter()
                        .find_map(|key| src.line_of(key, &k.to_string())),
                });
            }
        }
        if let Some(e) = a.event() {
            if !ids.contains(e) {
                return Err(src.missing("event", "event", e));
            }
        }
    }
    Ok(())
}

/// The declarations, built and validated.
#[derive(Debug, Clone)]
pub struct Declared {
    pub categories: BTreeMap<Id, Arc<FinCategory>>,
    pub speakers: BTreeMap<Id, Speaker>,
    /// Explicit explanations only; tautological ones depend on the stage.
    pub explanations: BTreeMap<Id, Explanation>,
}

pub fn build(src: &Source) -> Result<Declared> {
    check_references(src)?;
    let s = &src.scenario;
    let invalid = |what: &str, key: &str, name: &Id| {
        let context = format!("{what} `{name}`");
        let line = src
            .line_of(name.as_ref(), "{")
            .or_else(|| src.line_of_id(key, name));
        move |source| ScenarioError::Invalid {
            context,
            line,
            source,
        }
    };

    let mut categories = BTreeMap::new();
    for (name, decl) in &s.categories {
        let c = match decl {
            CategoryDecl::Explicit(c) => c.clone(),
            CategoryDecl::Pregroup(p) => Grammar::new(p.basic_types.clone(), &p.order, p.z_max)
                .and_then(|g| language_category_from_lexicon(&g, &p.phrases))
                .map_err(invalid("category", "language", name))?,
        };
        categories.insert(name.clone(), Arc::new(c));
    }

    let mut speakers = BTreeMap::new();
    for (name, decl) in &s.speakers {
        let sp = Speaker::from_tables(
            name.clone(),
            categories[&decl.language].clone(),
            decl.fibres.clone(),
            decl.actions.clone(),
        )
        .map_err(invalid("speaker", "speaker", name))?;
        speakers.insert(name.clone(), sp);
    }

    let mut explanations = BTreeMap::new();
    for (name, decl) in &s.explanations {
        if let ExplanationDecl::Explicit(x) = decl {
            let e = Explanation {
                shape: Arc::new(x.shape.clone()),
                objects: x.objects.clone(),
                morphisms: x.morphisms.clone(),
                target: x.target.clone(),
                embedding: x.embedding.clone(),
            };
            e.diagram(&categories[&x.language]).map_err(invalid(
                "explanation",
                "explanation",
                name,
            ))?;
            explanations.insert(name.clone(), e);
        }
    }
    Ok(Declared {
        categories,
        speakers,
        explanations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TEXT: &str = r#"{
  "name": "t",
  "categories": { "w": { "explicit": { "objects": ["a"] } } },
  "speakers": {
    "p": { "language": "w", "fibres": { "a": ["x"] } }
  },
  "events": [
    { "kind": "example", "learner": "q", "target": "a", "examples": ["s"] }
  ]
}"#;

    #[test]
    fn lines_are_found_by_key_and_value() {
        let src = Source::parse(TEXT.to_string()).unwrap();
        assert_eq!(src.line_of("language", "\"w\""), Some(5));
        assert_eq!(src.line_of("learner", "\"q\""), Some(8));
        assert_eq!(src.line_of("learner", "\"p\""), None);
    }

    #[test]
    fn unbound_learner_is_reported_at_its_line() {
        let src = Source::parse(TEXT.to_string()).unwrap();
        match check_references(&src).unwrap_err() {
            ScenarioError::Reference { message, line } => {
                assert_eq!(message, "speaker `q` is not declared");
                assert_eq!(line, Some(8));
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn later_events_may_read_bindings_made_by_earlier_ones() {
        let text = TEXT.replace(
            r#""learner": "q","#,
            r#""learner": "p", "as": "q","#,
        )
        .replace(
            "\n  ]\n}",
            ",\n    { \"kind\": \"example\", \"learner\": \"q\", \"target\": \"a\", \"examples\": [\"s\"] }\n  ]\n}",
        );
        let src = Source::parse(text).unwrap();
        check_references(&src).unwrap();
        assert_eq!(event_id(&src.scenario.events[1], 2), "e2");
    }

    #[test]
    fn invalid_speakers_name_their_declaration() {
        let text = TEXT
            .replace(r#""a": ["x"]"#, r#""b": ["x"]"#)
            .replace(r#""learner": "q""#, r#""learner": "p""#);
        let src = Source::parse(text).unwrap();
        let err = build(&src).unwrap_err();
        assert!(err.to_string().starts_with("line 5: speaker `p`"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }
}
