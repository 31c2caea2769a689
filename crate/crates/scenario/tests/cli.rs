use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn shipped() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(root().join("scenarios"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    v.sort();
    v
}

fn fiblang(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fiblang"))
        .args(args)
        .output()
        .unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// A shipped scenario with `edit` applied to its JSON, written to a temp file.
fn edited(name: &str, edit: impl FnOnce(&mut serde_json::Value)) -> tempfile::NamedTempFile {
    let text = std::fs::read_to_string(root().join("scenarios").join(name)).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    edit(&mut v);
    let f = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(f.path(), serde_json::to_string_pretty(&v).unwrap()).unwrap();
    f
}

#[test]
fn shipped_scenarios_pass() {
    let all = shipped();
    assert!(all.len() >= 4);
    for p in all {
        let out = fiblang(&["run", path(&p)]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}: {}",
            p.display(),
            stderr(&out)
        );
        let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(report["passed"], true);
        assert!(fiblang(&["validate", path(&p)]).status.success());
    }
}

#[test]
fn shipped_scenarios_follow_the_schema() {
    let schema: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(root().join("schema/scenario.schema.json")).unwrap(),
    )
    .unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    for p in shipped() {
        let v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
        let errors: Vec<String> = validator.iter_errors(&v).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{}: {errors:?}", p.display());
    }
    let bad = serde_json::json!({
        "name": "x",
        "categories": {},
        "speakers": {},
        "events": [{"kind": "example", "learner": "a", "target": "t", "examples": ["s"], "teacher": 3}]
    });
    assert!(!validator.is_valid(&bad));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for p in shipped() {
        let a = dir.path().join("a.json");
        let b = dir.path().join("b.json");
        assert!(fiblang(&["run", path(&p), "--report", path(&a)])
            .status
            .success());
        assert!(fiblang(&["run", path(&p), "--report", path(&b)])
            .status
            .success());
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
        assert_eq!(
            std::fs::read(&a).unwrap(),
            fiblang(&["run", path(&p)]).stdout
        );
    }
}

#[test]
fn false_assertion_exits_one_and_names_it() {
    let f = edited("alice-bob.json", |v| {
        v["assertions"].as_array_mut().unwrap().push(
            serde_json::json!({"kind": "fibre-size", "speaker": "bob", "object": "cat", "size": 7}),
        );
    });
    let out = fiblang(&["run", path(f.path())]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], false);
    let failure = report["failure"].as_str().unwrap();
    assert!(
        failure.starts_with("assertion 13 (fibre-size)"),
        "{failure}"
    );
    assert!(stderr(&out).contains("assertion 13"));
}

#[test]
fn undeclared_speaker_is_a_structural_error_with_a_line() {
    let f = edited("slab.json", |v| {
        v["events"][0]["learner"] = "apprentice".into();
    });
    for cmd in ["validate", "run"] {
        let out = fiblang(&[cmd, path(f.path())]);
        assert_eq!(out.status.code(), Some(2));
        let err = stderr(&out);
        assert!(
            err.contains("speaker `apprentice` is not declared"),
            "{err}"
        );
        assert!(err.contains("line "), "{err}");
    }
}

#[test]
fn parse_errors_carry_line_and_column() {
    let f = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(f.path(), "{\n  \"name\": \"x\",\n  \"categories\": 3\n}\n").unwrap();
    let out = fiblang(&["validate", path(f.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));
}

#[test]
fn failing_events_stop_the_run() {
    // Bob already knows `cat` after the first event.
    let f = edited("look-a-cat.json", |v| {
        let again = v["events"][0].clone();
        let events = v["events"].as_array_mut().unwrap();
        events.push(again);
        events[1]["id"] = "again".into();
    });
    let out = fiblang(&["run", path(f.path())]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["events"][1]["error"]
        .as_str()
        .unwrap()
        .contains("already has 1 elements"));
    assert!(report["assertions"].as_array().unwrap().is_empty());
}

#[test]
fn paraphrasis_adds_exactly_the_dashed_edges() {
    let p = root().join("scenarios/alice-bob.json");
    let dot = |stage: &str| {
        let out = fiblang(&["export-dot", path(&p), "--speaker", "bob", "--stage", stage]);
        assert!(out.status.success(), "{}", stderr(&out));
        String::from_utf8(out.stdout).unwrap()
    };
    let (before, after) = (dot("2"), dot("3"));
    let old: Vec<&str> = before.lines().skip(1).collect();
    let new: Vec<&str> = after.lines().skip(1).collect();
    let added: Vec<&&str> = new.iter().filter(|l| !old.contains(l)).collect();
    assert!(old.iter().all(|l| new.contains(l)));
    assert_eq!(added.len(), 3);
    assert!(added
        .iter()
        .all(|l| l.contains("style=dashed") && l.contains("-> \"cat\"")));
    assert!(!before.contains("dashed"));

    let total = fiblang(&[
        "export-dot",
        path(&p),
        "--speaker",
        "bob",
        "--view",
        "total",
    ]);
    let total = String::from_utf8(total.stdout).unwrap();
    // One dashed lift per new element and leg.
    assert_eq!(total.matches("style=dashed").count(), 6);
}

#[test]
fn explain_reports_tautologies_as_exact() {
    let p = root().join("scenarios/evilcat.json");
    let out = fiblang(&[
        "explain",
        path(&p),
        "--speaker",
        "p",
        "--explanation",
        "cat-itself",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["exact"], true);
    assert_eq!(v["valid"], true);
    assert_eq!(v["apex_size"], 4);

    let out = fiblang(&[
        "explain",
        path(&p),
        "--speaker",
        "nobody",
        "--explanation",
        "cat-itself",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bound_flag_leaves_finite_collages_alone() {
    let p = root().join("scenarios/alice-bob.json");
    let plain = fiblang(&["run", path(&p)]).stdout;
    let bounded = fiblang(&["--bound", "4", "run", path(&p)]).stdout;
    assert_eq!(plain, bounded);
}
