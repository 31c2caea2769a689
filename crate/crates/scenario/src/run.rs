//! Event execution, assertion checking and the canonical report.

use std::collections::{BTreeMap, BTreeSet};

use fiblang_core::dot::category_to_dot;
use fiblang_core::fibration::iso_over_base;
use fiblang_core::kernel::CatFunctor;
use fiblang_core::speaker::{
    acquire_by_example, acquire_by_example_merged, acquire_by_paraphrasis,
    tautological_explanation, validate_explanation, AcquisitionReport, Explanation,
    ParaphrasisOptions, Speaker,
};
use fiblang_core::Id;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ScenarioError};
use crate::load::{build, event_id, Declared, Source};
use crate::model::{Assertion, Event, ExplanationDecl};

/// Speaker bindings at one stage.
pub type Bindings = BTreeMap<Id, Speaker>;

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Collage bound for paraphrasis events that do not set their own.
    pub bound: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplanationSummary {
    pub speaker: Id,
    pub explanation: Id,
    pub target: Id,
    pub valid: bool,
    pub exact: bool,
    pub vacuous: bool,
    pub apex_size: usize,
    pub apex: Vec<Id>,
    pub embedding: BTreeMap<Id, Id>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventRecord {
    pub index: usize,
    pub id: Id,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub acquisition: Option<AcquisitionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub explanation: Option<ExplanationSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssertionRecord {
    pub index: usize,
    pub kind: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: String,
    pub passed: bool,
    /// The first failing event or assertion.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    pub events: Vec<EventRecord>,
    pub assertions: Vec<AssertionRecord>,
}

impl Report {
    pub fn to_canonical_string(&self) -> String {
        fiblang_core::json::to_canonical_string(self).expect("reports serialize")
    }
}

/// The state after each executed event; `stages[0]` is the declarations.
#[derive(Debug)]
pub struct Execution {
    pub declared: Declared,
    pub stages: Vec<Bindings>,
    pub events: Vec<EventRecord>,
    /// The first event error, after which nothing further ran.
    pub error: Option<ScenarioError>,
}

fn explanation_at(
    declared: &Declared,
    decl: &ExplanationDecl,
    name: &Id,
    at: &Bindings,
) -> fiblang_core::Result<Explanation> {
    match decl {
        ExplanationDecl::Explicit(_) => Ok(declared.explanations[name].clone()),
        ExplanationDecl::Tautological { speaker, target } => {
            tautological_explanation(&at[speaker], target)
        }
    }
}

pub fn summarize(
    speaker: &Speaker,
    name: &Id,
    e: &Explanation,
) -> fiblang_core::Result<ExplanationSummary> {
    let check = validate_explanation(speaker, e)?;
    Ok(ExplanationSummary {
        speaker: speaker.name().clone(),
        explanation: name.clone(),
        target: e.target.clone(),
        valid: check.valid,
        exact: check.exact,
        vacuous: check.vacuous,
        apex_size: check.limit.len(),
        apex: check.limit.element_ids(""),
        embedding: check.embedding,
    })
}

fn step(
    src: &Source,
    declared: &Declared,
    at: &Bindings,
    ev: &Event,
    id: &Id,
    opts: RunOptions,
) -> fiblang_core::Result<(Option<Speaker>, EventRecord)> {
    let mut record = EventRecord {
        index: 0,
        id: id.clone(),
        kind: ev.kind().to_string(),
        acquisition: None,
        explanation: None,
        error: None,
    };
    let learned = match ev {
        Event::Example {
            learner,
            target,
            examples,
            teacher,
            ..
        } => {
            let t = teacher.as_ref().map(|t| &at[t]);
            Some(acquire_by_example(&at[learner], target, examples, t)?)
        }
        Event::MergedExample {
            learner,
            target,
            examples,
            merge,
            ..
        } => Some(acquire_by_example_merged(
            &at[learner],
            target,
            examples,
            merge,
        )?),
        Event::Paraphrasis {
            teacher,
            learner,
            target,
            explanation,
            bound,
            edge_overrides,
            ..
        } => {
            let e = explanation_at(
                declared,
                &src.scenario.explanations[explanation],
                explanation,
                at,
            )?;
            let options = ParaphrasisOptions {
                event: id.clone(),
                bound: bound.or(opts.bound),
                edge_overrides: edge_overrides.clone(),
            };
            Some(acquire_by_paraphrasis(
                &at[teacher],
                &at[learner],
                target,
                &e,
                &options,
            )?)
        }
        Event::ValidateExplanation {
            speaker,
            explanation,
            ..
        } => {
            let e = explanation_at(
                declared,
                &src.scenario.explanations[explanation],
                explanation,
                at,
            )?;
            record.explanation = Some(summarize(&at[speaker], explanation, &e)?);
            None
        }
    };
    Ok(match learned {
        Some((after, report)) => {
            record.acquisition = Some(report);
            (Some(after), record)
        }
        None => (None, record),
    })
}

/// Run the first `upto` events (all when `None`), stopping at the first
/// event error.
pub fn execute(src: &Source, opts: RunOptions, upto: Option<usize>) -> Result<Execution> {
    let declared = build(src)?;
    let events = &src.scenario.events;
    let upto = upto.unwrap_or(events.len()).min(events.len());
    let mut stages = vec![declared.speakers.clone()];
    let mut records = Vec::new();
    let mut error = None;
    for (i, ev) in events.iter().take(upto).enumerate() {
        let n = i + 1;
        let id = event_id(ev, n);
        let at = stages.last().expect("stage 0");
        match step(src, &declared, at, ev, &id, opts) {
            Ok((after, mut record)) => {
                record.index = n;
                let mut next = at.clone();
                if let (Some(sp), Some(name)) = (after, ev.writes()) {
                    next.insert(name.clone(), sp.renamed(name.clone()));
                }
                stages.push(next);
                records.push(record);
            }
            Err(source) => {
                records.push(EventRecord {
                    index: n,
                    id: id.clone(),
                    kind: ev.kind().to_string(),
                    acquisition: None,
                    explanation: None,
                    error: Some(source.to_string()),
                });
                error = Some(ScenarioError::Event {
                    index: n,
                    id,
                    kind: ev.kind(),
                    source,
                });
                break;
            }
        }
    }
    Ok(Execution {
        declared,
        stages,
        events: records,
        error,
    })
}

fn check(x: &Execution, a: &Assertion) -> std::result::Result<String, String> {
    let last = x.stages.len() - 1;
    let at = |name: &Id, stage: Option<usize>| -> std::result::Result<&Speaker, String> {
        let k = stage.unwrap_or(last);
        x.stages
            .get(k)
            .and_then(|b| b.get(name))
            .ok_or_else(|| format!("speaker `{name}` is not bound at stage {k}"))
    };
    let fibre = |sp: &Speaker, object: &Id| -> std::result::Result<BTreeSet<Id>, String> {
        sp.fibre(object).cloned().map_err(|e| e.to_string())
    };
    let record = |event: &Id| -> std::result::Result<&EventRecord, String> {
        x.events
            .iter()
            .find(|r| &r.id == event)
            .ok_or_else(|| format!("event `{event}` did not run"))
    };
    let expect = |ok: bool, what: String| if ok { Ok(what) } else { Err(what) };

    match a {
        Assertion::FibreSize {
            speaker,
            object,
            size,
            stage,
        } => {
            let n = fibre(at(speaker, *stage)?, object)?.len();
            expect(
                n == *size,
                format!("{speaker} fibre over {object} has {n} elements, expected {size}"),
            )
        }
        Assertion::Fibre {
            speaker,
            object,
            elements,
            stage,
        } => {
            let f = fibre(at(speaker, *stage)?, object)?;
            expect(
                &f == elements,
                format!("{speaker} fibre over {object} is {f:?}, expected {elements:?}"),
            )
        }
        Assertion::FibreNonempty {
            speaker,
            object,
            stage,
        } => {
            let n = fibre(at(speaker, *stage)?, object)?.len();
            expect(
                n > 0,
                format!("{speaker} fibre over {object} has {n} elements"),
            )
        }
        Assertion::MorphismCount {
            speaker,
            count,
            stage,
        } => {
            let n = at(speaker, *stage)?.language().proper_morphisms().count();
            expect(
                n == *count,
                format!("{speaker} language has {n} non-identity morphisms, expected {count}"),
            )
        }
        Assertion::HomSize {
            speaker,
            src,
            tgt,
            size,
            stage,
        } => {
            let lang = at(speaker, *stage)?.language();
            if !lang.has_object(src) || !lang.has_object(tgt) {
                return Err(format!("{speaker} language lacks {src} or {tgt}"));
            }
            let n = lang.hom(src, tgt).len();
            expect(
                n == *size,
                format!("{speaker} hom({src}, {tgt}) has {n} morphisms, expected {size}"),
            )
        }
        Assertion::Outcome { event, outcome } => {
            let r = record(event)?;
            let got = r
                .acquisition
                .as_ref()
                .map(|a| a.outcome)
                .ok_or_else(|| format!("event `{event}` is not an acquisition"))?;
            expect(
                got == *outcome,
                format!("event {event} outcome {got:?}, expected {outcome:?}"),
            )
        }
        Assertion::NewMorphisms { event, count } => {
            let r = record(event)?;
            let n = r
                .acquisition
                .as_ref()
                .map(|a| a.new_morphisms.len())
                .ok_or_else(|| format!("event `{event}` is not an acquisition"))?;
            expect(
                n == *count,
                format!("event {event} added {n} morphisms, expected {count}"),
            )
        }
        Assertion::Explanation {
            event,
            valid,
            exact,
            vacuous,
            apex_size,
        } => {
            let r = record(event)?;
            let s = r
                .explanation
                .as_ref()
                .ok_or_else(|| format!("event `{event}` did not validate an explanation"))?;
            let ok = valid.is_none_or(|v| v == s.valid)
                && exact.is_none_or(|v| v == s.exact)
                && vacuous.is_none_or(|v| v == s.vacuous)
                && apex_size.is_none_or(|v| v == s.apex_size);
            expect(
                ok,
                format!(
                    "event {event}: valid={} exact={} vacuous={} apex={}",
                    s.valid, s.exact, s.vacuous, s.apex_size
                ),
            )
        }
        Assertion::Unchanged { speaker, from, to } => {
            let same = at(speaker, Some(*from))? == at(speaker, *to)?;
            let to = to.unwrap_or(last);
            expect(
                same,
                format!("{speaker} at stage {from} and stage {to} equal: {same}"),
            )
        }
        Assertion::Iso { left, right, stage } => {
            let (l, r) = (at(left, *stage)?, at(right, *stage)?);
            if l.language() != r.language() {
                return Err(format!("{left} and {right} speak different languages"));
            }
            let iso = iso_over_base(l.fibration(), r.fibration()).is_some();
            expect(
                iso,
                format!("{left} and {right} isomorphic over the language: {iso}"),
            )
        }
        Assertion::Restricts {
            speaker,
            from,
            to,
            except,
        } => {
            let (before, after) = (at(speaker, Some(*from))?, at(speaker, *to)?);
            let old = before.meaning().base();
            let k = CatFunctor::from_maps(
                old.clone(),
                after.meaning().base().clone(),
                old.objects().map(|x| (x.clone(), x.clone())),
                old.morphism_ids().map(|m| (m.clone(), m.clone())),
            )
            .map_err(|e| format!("old language does not embed: {e}"))?;
            let back = after.meaning().restrict(&k).map_err(|e| e.to_string())?;
            let kept = |x: &Id| !except.contains(x);
            for x in old.objects().filter(|x| kept(x)) {
                if back.value(x).ok() != before.meaning().value(x).ok() {
                    return Err(format!(
                        "{speaker} fibre over {x} differs after restriction"
                    ));
                }
            }
            for (m, arr) in old.morphisms() {
                if kept(&arr.src)
                    && kept(&arr.tgt)
                    && back.action(m).ok() != before.meaning().action(m).ok()
                {
                    return Err(format!("{speaker} action of {m} differs after restriction"));
                }
            }
            Ok(format!(
                "{speaker} restricts to its stage-{from} meaning away from {except:?}"
            ))
        }
    }
}

/// Run everything and build the report.
pub fn run(src: &Source, opts: RunOptions) -> Result<Report> {
    let x = execute(src, opts, None)?;
    let mut failure = x.error.as_ref().map(ToString::to_string);
    let mut assertions = Vec::new();
    if x.error.is_none() {
        for (i, a) in src.scenario.assertions.iter().enumerate() {
            let (passed, detail) = match check(&x, a) {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            if !passed && failure.is_none() {
                failure = Some(format!("assertion {} ({}): {detail}", i + 1, a.kind()));
            }
            assertions.push(AssertionRecord {
                index: i + 1,
                kind: a.kind().to_string(),
                passed,
                detail,
            });
        }
    }
    Ok(Report {
        scenario: src.scenario.name.clone(),
        passed: failure.is_none(),
        failure,
        events: x.events,
        assertions,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum View {
    Language,
    Total,
}

/// DOT for a speaker at a stage; adjoined morphisms (and, in the total
/// view, morphisms over them) are dashed.
pub fn export_dot(
    src: &Source,
    speaker: &Id,
    view: View,
    stage: Option<usize>,
    opts: RunOptions,
) -> Result<String> {
    let x = execute(src, opts, stage)?;
    if let Some(e) = x.error {
        return Err(e);
    }
    let k = x.stages.len() - 1;
    let sp = x.stages[k]
        .get(speaker)
        .ok_or_else(|| ScenarioError::Reference {
            message: format!("speaker `{speaker}` is not bound at stage {k}"),
            line: None,
        })?;
    let adjoined = sp.adjoined();
    Ok(match view {
        View::Language => category_to_dot(sp.language(), &format!("{speaker}.language@{k}"), |m| {
            adjoined.contains(m)
        }),
        View::Total => {
            let proj = sp.fibration().proj();
            category_to_dot(proj.dom(), &format!("{speaker}.total@{k}"), |m| {
                proj.morphism_map()
                    .get(m)
                    .is_some_and(|b| adjoined.contains(b))
            })
        }
    })
}

/// The validation summary of a declared explanation for a speaker at a stage.
pub fn explain(
    src: &Source,
    speaker: &Id,
    explanation: &Id,
    stage: Option<usize>,
    opts: RunOptions,
) -> Result<ExplanationSummary> {
    let x = execute(src, opts, stage)?;
    if let Some(e) = x.error {
        return Err(e);
    }
    let k = x.stages.len() - 1;
    let at = &x.stages[k];
    let sp = at.get(speaker).ok_or_else(|| ScenarioError::Reference {
        message: format!("speaker `{speaker}` is not bound at stage {k}"),
        line: None,
    })?;
    let decl =
        src.scenario
            .explanations
            .get(explanation)
            .ok_or_else(|| ScenarioError::Reference {
                message: format!("explanation `{explanation}` is not declared"),
                line: None,
            })?;
    let invalid = |source| ScenarioError::Invalid {
        context: format!("explanation `{explanation}` for `{speaker}`"),
        line: None,
        source,
    };
    let e = explanation_at(&x.declared, decl, explanation, at).map_err(invalid)?;
    summarize(sp, explanation, &e).map_err(invalid)
}
