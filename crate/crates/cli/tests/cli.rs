use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lpchange"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    stdout(&out)
}

fn ok_json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    serde_json::from_str(&ok(&all)).unwrap()
}

fn pairs(v: &Value) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = serde_json::from_value(v.clone()).unwrap();
    out.sort();
    out
}

fn owned(items: &[(&str, &str)]) -> Vec<(String, String)> {
    let mut out: Vec<_> = items
        .iter()
        .map(|(x, y)| (x.to_string(), y.to_string()))
        .collect();
    out.sort();
    out
}

#[test]
fn se_models_of_a_constraint_over_two_atoms() {
    let v = ok_json(&["se-models", &data("p1.lp")]);
    assert_eq!(v["vocabulary"], serde_json::json!(["a", "b"]));
    assert_eq!(
        pairs(&v["se_models"]),
        owned(&[("", ""), ("", "b"), ("b", "b")])
    );
    let text = ok(&["se-models", &data("p1.lp")]);
    assert_eq!(text, "vocabulary: {a,b}\n{(∅,∅), (∅,b), (b,b)}\n");
}

#[test]
fn vocabulary_flag_widens_the_interpretations() {
    let v = ok_json(&["se-models", "--vocab", "a,b,c", &data("p1.lp")]);
    assert_eq!(v["se_models"].as_array().unwrap().len(), 9);
}

#[test]
fn partial_meet_revision_prints_the_program() {
    let out = ok(&[
        "revise",
        "--method",
        "pm",
        &data("rev_p.lp"),
        &data("rev_q.lp"),
    ]);
    assert_eq!(out, "b :- a.\n:- a.\n");
    for policy in ["full", "maxichoice", "relational-max"] {
        let out = ok(&[
            "revise",
            "--policy",
            policy,
            &data("rev_p.lp"),
            &data("rev_q.lp"),
        ]);
        assert_eq!(out, "b :- a.\n:- a.\n", "{policy}");
    }
}

#[test]
fn ensconcement_revision_with_a_level_file() {
    let out = ok(&[
        "revise",
        "--method",
        "ens",
        "--ensconcement",
        &data("reve_4.ens"),
        &data("reve_p.lp"),
        &data("reve_q.lp"),
    ]);
    assert_eq!(out, "a :- b.\n:- b.\n");
}

#[test]
fn ensconcement_revision_without_a_file_lists_every_ordering() {
    let v = ok_json(&[
        "revise",
        "--method",
        "ens",
        &data("reve_p.lp"),
        &data("reve_q.lp"),
    ]);
    assert_eq!(v["per_ensconcement"].as_array().unwrap().len(), 5);
    assert!(
        v.get("se_models").is_none(),
        "outcomes differ across orderings"
    );
}

#[test]
fn contraction_keeps_the_surviving_rule() {
    let out = ok(&["contract", &data("rev_p.lp"), &data("conpm_q.lp")]);
    assert_eq!(out, "b :- a.\n");
    let out = ok(&[
        "contract",
        "--method",
        "ens",
        &data("rev_p.lp"),
        &data("conpm_q.lp"),
    ]);
    assert!(out
        .lines()
        .filter(|l| !l.starts_with('%'))
        .all(|l| l == "b :- a."));
}

#[test]
fn distance_revision_reports_se_models_and_materializes() {
    let v = ok_json(&[
        "revise",
        "--method",
        "distance",
        "--materialize",
        &data("rev_p.lp"),
        &data("rev_q.lp"),
    ]);
    assert_eq!(pairs(&v["se_models"]), owned(&[("b", "b")]));
    let program: Vec<String> = serde_json::from_value(v["materialized"].clone()).unwrap();
    assert!(!program.is_empty());
    let out = run(&[
        "contract",
        "--method",
        "distance",
        &data("rev_p.lp"),
        &data("rev_q.lp"),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn compare_renders_one_row_per_method() {
    let out = ok(&[
        "revise",
        "--compare",
        "pm,ens,distance",
        &data("rev_p.lp"),
        &data("rev_q.lp"),
    ]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 5, "{out}");
    assert!(lines[2].starts_with("pm ") && lines[2].contains("{b :- a. :- a.}"));
    assert!(lines[3].starts_with("ens ") && lines[3].contains("{b :- a. :- a.}"));
    assert!(lines[4].starts_with("distance ") && lines[4].ends_with("{(b,b)}"));
}

#[test]
fn raw_se_models_as_second_argument() {
    let out = ok(&[
        "revise",
        "--q-se-models",
        &data("p1_models.json"),
        &data("rev_p.lp"),
    ]);
    // A raw SE set adds no rules; only the compatible part of P remains.
    assert_eq!(out, "b :- a.\n");
}

#[test]
fn localized_revision_matches_the_global_result_here() {
    let global = ok(&["revise", &data("mod_p.lp"), &data("mod_q.lp")]);
    let local = ok(&[
        "revise",
        "--localized",
        &data("mod_p.lp"),
        &data("mod_q.lp"),
    ]);
    assert_eq!(global, local);
}

#[test]
fn modules_list_family_and_residue() {
    let v = ok_json(&["modules", &data("mod_p.lp"), &data("mod_q.lp")]);
    let modules = v["modules"].as_array().unwrap();
    let sets: Vec<Vec<String>> = modules
        .iter()
        .map(|m| serde_json::from_value(m["rules"].clone()).unwrap())
        .collect();
    assert!(sets.contains(&vec!["a.".to_string(), "b :- a.".to_string()]));
    assert!(sets.contains(&vec!["c :- not b.".to_string()]));
}

#[test]
fn answer_sets_and_equivalence() {
    let v = ok_json(&["answer-sets", &data("rev_p.lp")]);
    assert_eq!(v["answer_sets"], serde_json::json!(["a,b"]));
    let v = ok_json(&["equiv", &data("rev_p.lp"), &data("rev_p.lp")]);
    assert_eq!(v["strongly_equivalent"], Value::Bool(true));
    let v = ok_json(&["equiv", &data("rev_p.lp"), &data("rev_q.lp")]);
    assert_eq!(v["strongly_equivalent"], Value::Bool(false));
}

#[test]
fn canonical_program_has_the_given_models() {
    let out = ok(&["canonical", &data("p1_models.json")]);
    let path = std::env::temp_dir().join(format!("lpchange-canonical-{}.lp", std::process::id()));
    std::fs::write(&path, format!("#vocab a b.\n{out}")).unwrap();
    let v = ok_json(&["se-models", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(
        pairs(&v["se_models"]),
        owned(&[("", ""), ("", "b"), ("b", "b")])
    );
}

#[test]
fn check_reports_verdicts_with_witnesses() {
    let v = ok_json(&[
        "check",
        "--operators",
        "pm,distance",
        "--postulates",
        "*2,*5",
        "--max-rules",
        "2",
    ]);
    let reports = v["reports"].as_array().unwrap();
    let verdict = |op: &str, prop: &str| {
        reports
            .iter()
            .find(|r| r["operator"] == op && r["property"] == prop)
            .map(|r| r["verdict"].as_str().unwrap().to_string())
    };
    assert_eq!(verdict("pm:full-meet", "(*2)").as_deref(), Some("holds"));
    assert_eq!(verdict("distance", "(*2)").as_deref(), Some("fails"));
    assert_eq!(verdict("distance", "(*5)").as_deref(), Some("holds"));
    let failing = reports.iter().find(|r| r["verdict"] == "fails").unwrap();
    assert!(failing["witness"].is_object());
}

#[test]
fn sampled_check_is_reproducible() {
    let args = [
        "check",
        "--operators",
        "pm:maxichoice",
        "--sample",
        "40",
        "--seed",
        "7",
        "--format",
        "json",
    ];
    let first = ok(&args);
    assert_eq!(first, ok(&args));
    let v: Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v["programs"], 40);
}

#[test]
fn config_file_supplies_defaults() {
    let out = ok(&[
        "--config",
        &data("config.json"),
        "revise",
        &data("rev_p.lp"),
        &data("rev_q.lp"),
    ]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["result"], serde_json::json!(["b :- a.", ":- a."]));
}

#[test]
fn exit_codes_separate_domain_and_usage_errors() {
    // Domain errors.
    assert_eq!(
        run(&["se-models", &data("broken.lp")]).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["se-models", &data("missing.lp")]).status.code(),
        Some(1)
    );
    let bad_ens = run(&[
        "revise",
        "--method",
        "ens",
        "--ensconcement",
        &data("reve_bad.ens"),
        &data("reve_p.lp"),
        &data("reve_q.lp"),
    ]);
    assert_eq!(bad_ens.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad_ens.stderr).contains("invalid ensconcement"));
    let bad_policy = run(&[
        "revise",
        "--policy",
        "best",
        &data("rev_p.lp"),
        &data("rev_q.lp"),
    ]);
    assert_eq!(bad_policy.status.code(), Some(1));
    // Usage errors.
    assert_eq!(run(&["revise", "--frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
}

#[test]
fn identical_inputs_give_identical_output() {
    let args = ["revise", "--compare", "pm,ens,distance", "--format", "json"];
    let mut full: Vec<&str> = args.to_vec();
    let (p, q) = (data("reve_p.lp"), data("reve_q.lp"));
    full.extend([p.as_str(), q.as_str()]);
    assert_eq!(ok(&full), ok(&full));
}

#[test]
fn se_models_reproduces_the_nine_two_atom_listings() {
    let listings: [(&str, &[(&str, &str)]); 9] = [
        (":- a.", &[("", ""), ("", "b"), ("b", "b")]),
        (":- b.", &[("", ""), ("", "a"), ("a", "a")]),
        (
            "a :- b.",
            &[
                ("", ""),
                ("", "a"),
                ("a", "a"),
                ("", "a,b"),
                ("a", "a,b"),
                ("a,b", "a,b"),
            ],
        ),
        (
            "b :- a.",
            &[
                ("", ""),
                ("", "b"),
                ("b", "b"),
                ("", "a,b"),
                ("b", "a,b"),
                ("a,b", "a,b"),
            ],
        ),
        (
            ":- a, b.",
            &[("", ""), ("", "a"), ("a", "a"), ("", "b"), ("b", "b")],
        ),
        (
            ":- not a, b.",
            &[
                ("", ""),
                ("", "a"),
                ("a", "a"),
                ("", "a,b"),
                ("a", "a,b"),
                ("b", "a,b"),
                ("a,b", "a,b"),
            ],
        ),
        (
            ":- a, not b.",
            &[
                ("", ""),
                ("", "b"),
                ("b", "b"),
                ("", "a,b"),
                ("a", "a,b"),
                ("b", "a,b"),
                ("a,b", "a,b"),
            ],
        ),
        (
            "a ; not b.",
            &[
                ("", ""),
                ("", "a"),
                ("a", "a"),
                ("a", "a,b"),
                ("a,b", "a,b"),
            ],
        ),
        (
            "not a ; b.",
            &[
                ("", ""),
                ("", "b"),
                ("b", "b"),
                ("b", "a,b"),
                ("a,b", "a,b"),
            ],
        ),
    ];
    let dir = std::env::temp_dir().join(format!("lpchange-listings-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for (i, (text, expected)) in listings.iter().enumerate() {
        let path = dir.join(format!("p{}.lp", i + 1));
        std::fs::write(&path, text).unwrap();
        let v = ok_json(&["se-models", "--vocab", "a,b", path.to_str().unwrap()]);
        assert_eq!(pairs(&v["se_models"]), owned(expected), "P{}", i + 1);
    }
    std::fs::remove_dir_all(&dir).ok();
}
