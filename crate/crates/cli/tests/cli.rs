use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use opaque::format::{load_model, model_file, parse_model_file, LifeEntry, ModelFile};
use proptest::prelude::*;
use serde_json::Value;

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel)
}

fn opaque(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opaque")).args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    opaque(args).status.code().expect("exit code")
}

fn path(rel: &str) -> String {
    data(rel).to_string_lossy().into_owned()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    serde_json::from_slice(&opaque(&all).stdout).expect("json report")
}

#[test]
fn verify_all_succeeds() {
    assert_eq!(code(&["verify-propositions", "--all"]), 0);
}

#[test]
fn unknown_selector_is_an_input_error() {
    let out = opaque(&["verify-propositions", "prop9"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("prop9"));
}

#[test]
fn check_exit_codes() {
    assert_eq!(code(&["check", &path("models/prop1.json"), &path("claims/prop1.claims.json")]), 0);
    assert_eq!(code(&["check", &path("models/prop1.json"), &path("claims/model-only.claims.json")]), 0);
    assert_eq!(code(&["check", &path("models/malformed-probability.json")]), 2);
    assert_eq!(code(&["check", &path("models/missing.json")]), 2);
    let claimed = [path("models/prop1.json"), path("claims/claimed-better.claims.json")];
    assert_eq!(code(&["check", &claimed[0], &claimed[1], "--expect-holds"]), 1);
}

#[test]
fn malformed_probability_names_the_field() {
    let out = opaque(&["check", &path("models/malformed-probability.json")]);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("lotteries"), "{err}");
}

#[test]
fn wrong_expectation_is_a_mismatch() {
    let text = std::fs::read_to_string(data("models/prop1.json")).unwrap();
    let mut file = parse_model_file(&text).unwrap();
    let nd = file.expected.iter_mut().find(|e| matches!(e.check, opaque::format::CheckEntry::NegativeDominance { .. }));
    nd.expect("prop1 expects a NegativeDominance verdict").verdict = String::from("Violated");
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("prop1-wrong.json");
    std::fs::write(&p, file.to_json()).unwrap();
    let out = opaque(&["check", p.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["status"], "mismatch");
}

#[test]
fn reduce_reports_the_common_denominator() {
    for (file, n) in [("reduce/thirds-halves.json", 6), ("reduce/two-halves.json", 2), ("reduce/single.json", 1)] {
        let r = json(&["reduce", &path(file)]);
        assert_eq!(r["status"], "ok", "{file}");
        assert_eq!(r["sections"][0]["data"]["n"], n, "{file}");
    }
    assert_eq!(code(&["reduce", &path("reduce/no-provider.json")]), 2);
    assert_eq!(code(&["reduce", &path("reduce/no-provider.json"), "--provider", "relocation"]), 0);
    assert_eq!(code(&["reduce", &path("reduce/no-provider.json"), "--provider", "oracle"]), 2);
}

#[test]
fn complete_streams_and_guards() {
    let out = opaque(&["complete", &path("orders/antichain2.json"), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let lines: Vec<Value> =
        String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[3]["summary"]["completions"], 3);
    assert_eq!(code(&["complete", &path("orders/cyclic.json")]), 2);
    assert_eq!(code(&["complete", &path("orders/antichain9.json")]), 2);
    assert_eq!(code(&["complete", &path("models/prop1.json"), "--pareto", "--joint", "--support", "L1,L2"]), 0);
}

#[test]
fn search_outcomes() {
    let r = json(&["search", &path("search/prop1.search.json"), "--tally"]);
    assert_eq!(r["sections"][0]["data"]["verdict"], "Exhausted");
    assert_eq!(r["sections"][0]["data"]["candidates"], "55536");
    let r = json(&["search", &path("search/prop1-comparable.search.json")]);
    assert_eq!(r["sections"][0]["data"]["verdict"], "ModelFound");
    assert_eq!(code(&["search", &path("search/prop1-tight-bounds.search.json")]), 2);
}

#[test]
fn reports_are_deterministic_apart_from_timing() {
    let strip = |mut v: Value| {
        v["timing_ms"] = Value::Null;
        v
    };
    for args in [&["verify-propositions", "prop1", "prop4", "table6"][..], &["check", &path("models/hare.json")][..]] {
        assert_eq!(strip(json(args)), strip(json(args)));
    }
}

#[test]
fn emitted_models_match_the_shipped_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = opaque(&["verify-propositions", "--all", "--emit-model", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let mut seen = 0;
    for entry in std::fs::read_dir(dir.path()).unwrap() {
        let p = entry.unwrap().path();
        let name = p.file_name().unwrap().to_str().unwrap().to_owned();
        let emitted = parse_model_file(&std::fs::read_to_string(&p).unwrap()).unwrap();
        let shipped = parse_model_file(&std::fs::read_to_string(data("models").join(&name)).unwrap()).unwrap();
        assert_eq!(emitted.digest(), shipped.digest(), "{name}");
        let again = model_file(&load_model(&emitted).unwrap());
        assert_eq!(again.digest(), emitted.digest(), "{name}");
        assert_eq!(code(&["check", p.to_str().unwrap()]), 0, "{name}");
        seen += 1;
    }
    assert_eq!(seen, 12);
}

fn random_model() -> impl Strategy<Value = ModelFile> {
    let lives = prop::collection::btree_map("[a-e][+-]?", prop::option::of(-3i64..=3), 1..=5);
    let outcomes = prop::collection::vec(prop::collection::vec(prop::option::of(0usize..5), 3), 1..=5);
    let weights = prop::collection::vec(prop::collection::vec((0usize..5, 1u32..=6), 1..=3), 0..=2);
    (lives, outcomes, weights).prop_map(|(lives, outcomes, weights)| {
        let keys: Vec<String> = lives.keys().cloned().collect();
        let people: Vec<String> = (1..=3).map(|k| format!("P{k}")).collect();
        let mut named = BTreeMap::new();
        for (k, o) in outcomes.iter().enumerate() {
            let m: BTreeMap<String, String> = o
                .iter()
                .zip(&people)
                .filter_map(|(l, p)| l.map(|l| (p.clone(), keys[l % keys.len()].clone())))
                .collect();
            named.insert(format!("o{k}"), m);
        }
        let mut lotteries = BTreeMap::new();
        for (k, w) in weights.iter().enumerate() {
            let mut mass: BTreeMap<String, u32> = BTreeMap::new();
            for &(o, x) in w {
                *mass.entry(format!("o{}", o % outcomes.len())).or_default() += x;
            }
            let total: u32 = mass.values().sum();
            let gcd = |mut a: u32, mut b: u32| {
                while b != 0 {
                    (a, b) = (b, a % b);
                }
                a
            };
            let entries = mass
                .into_iter()
                .map(|(o, x)| {
                    let g = gcd(x, total);
                    (o, format!("{}/{}", x / g, total / g))
                })
                .collect();
            lotteries.insert(format!("L{}", k + 1), entries);
        }
        ModelFile {
            name: Some(String::from("random")),
            lives: lives
                .into_iter()
                .map(|(id, w)| LifeEntry { id, label: None, welfare: w.map(|w| w.to_string()) })
                .collect(),
            individuals: people,
            outcomes: named,
            lotteries,
            ..ModelFile::default()
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn model_files_round_trip(file in random_model()) {
        let parsed = parse_model_file(&file.to_json()).unwrap();
        prop_assert_eq!(&parsed, &file);
        let once = model_file(&load_model(&parsed).unwrap());
        let twice = model_file(&load_model(&parse_model_file(&once.to_json()).unwrap()).unwrap());
        prop_assert_eq!(once.digest(), twice.digest());
        prop_assert_eq!(once.lotteries.len(), file.lotteries.len());
    }
}
