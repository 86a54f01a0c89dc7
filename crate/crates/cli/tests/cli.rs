use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn run_in(dir: Option<&Path>, args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sheafcalc"));
    cmd.args(args).env_remove("SHEAFCALC_MAX_OPENS");
    if let Some(d) = dir {
        cmd.current_dir(d);
    }
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn run(args: &[&str]) -> Output {
    run_in(None, args, &[])
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn report(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = run(&full);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    json_of(&out)
}

fn error(dir: &Path, args: &[&str]) -> (i32, Value) {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = run_in(Some(dir), &full, &[]);
    let v = json_of(&out);
    assert_eq!(v["kind"], "error");
    (code(&out), v["error"].clone())
}

fn export(args: &[&str]) -> String {
    let mut full = vec!["corpus", "export"];
    full.extend(args);
    let out = run(&full);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn cohomology_of_the_circle() {
    let r = report(&["cohomology", "--space", "pseudocircle", "--sheaf", "constZ", "--max-degree", "2"]);
    assert_eq!(r["result"]["groups"], json!([[1, []], [1, []], [0, []]]));
    assert_eq!(r["result"]["oracle_agrees"], true);
    assert_eq!(r["result"]["verdict"], true);
    let mobius = report(&["cohomology", "--space", "pseudocircle", "--sheaf", "mobius", "--max-degree", "1"]);
    assert_eq!(mobius["result"]["groups"], json!([[0, []], [0, [2]]]));
}

#[test]
fn hyper_of_a_single_sheaf() {
    let h = report(&["hyper", "--space", "pseudocircle", "--complex", "single_constZ", "--max-degree", "2"]);
    let c = report(&["cohomology", "--space", "pseudocircle", "--sheaf", "constZ", "--max-degree", "2"]);
    assert_eq!(h["result"]["groups"], c["result"]["groups"]);
    assert!(h["result"]["by_p"]["degeneration_page"].as_u64().unwrap() <= 2);
    assert_eq!(h["result"]["by_p"]["extension_flags"], json!([]));
    assert!(h["result"]["by_q"]["pages"].as_array().unwrap().len() > 2);
}

#[test]
fn check_passes_on_sierpinski() {
    let out = run(&["check", "--space", "sierpinski", "--sheaf", "constZ"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("verdict: true"));
    assert!(text.lines().last().unwrap().starts_with("elapsed:"));
    let r = report(&["check", "--space", "sierpinski", "--sheaf", "constZ"]);
    let axioms = r["result"]["axioms"].as_array().unwrap();
    assert_eq!(axioms.len(), 3);
    assert!(axioms.iter().all(|a| a["uniqueness"] == true && a["gluing"] == true));
}

#[test]
fn wrong_restriction_shape_names_the_pair() {
    let dir = TempDir::new().unwrap();
    let mut doc: Value = serde_json::from_str(&export(&["--space", "sierpinski", "--sheaf", "constZ"])).unwrap();
    doc["restrictions"]["0:1"] = json!([[1, 0]]);
    fs::write(dir.path().join("bad.json"), doc.to_string()).unwrap();
    let (status, err) = error(dir.path(), &["check", "--space", "sierpinski", "--sheaf", "bad.json"]);
    assert_eq!(status, 2);
    assert_eq!(err["code"], "SchemaError");
    assert!(err["path"].as_str().unwrap().contains("0:1"), "{err}");
}

#[test]
fn restriction_against_the_order_is_rejected() {
    let dir = TempDir::new().unwrap();
    let mut doc: Value = serde_json::from_str(&export(&["--space", "sierpinski", "--sheaf", "constZ"])).unwrap();
    doc["restrictions"] = json!({ "1:0": [[1]] });
    fs::write(dir.path().join("bad.json"), doc.to_string()).unwrap();
    let (status, err) = error(dir.path(), &["cohomology", "--sheaf", "bad.json"]);
    assert_eq!((status, err["code"].as_str().unwrap()), (2, "SchemaError"));
    assert_eq!(err["path"], "$.restrictions.1:0");
}

#[test]
fn anticommuting_square_is_a_sign_violation() {
    let dir = TempDir::new().unwrap();
    let g = json!({ "gens": 1, "rels": [] });
    let doc = json!({
        "format_version": 1,
        "kind": "double_complex",
        "pmax": 1,
        "qmax": 1,
        "cells": { "0,0": g, "0,1": g, "1,0": g, "1,1": g },
        "vert": { "0,0": [[1]], "1,0": [[1]] },
        "horiz": { "0,0": [[1]], "0,1": [[-1]] },
    });
    fs::write(dir.path().join("k.json"), doc.to_string()).unwrap();
    let (status, err) = error(dir.path(), &["ss", "--complex", "k.json"]);
    assert_eq!(status, 2);
    assert_eq!(err["code"], "SignViolation");
}

#[test]
fn parse_errors_carry_a_position() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("x.json"), "{\"kind\": \"space\",\n  \"points\": [1,}").unwrap();
    let (status, err) = error(dir.path(), &["check", "--space", "x.json"]);
    assert_eq!(status, 2);
    assert_eq!(err["code"], "ParseError");
    assert_eq!(err["line"], 2);
    let out = run_in(Some(dir.path()), &["check", "--space", "x.json"], &[]);
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("x.json:2:"));
}

#[test]
fn non_integer_entries_are_rejected() {
    let dir = TempDir::new().unwrap();
    let mut doc: Value = serde_json::from_str(&export(&["--space", "point", "--sheaf", "constZ"])).unwrap();
    doc["stalks"]["pt"]["rels"] = json!([[1.5]]);
    fs::write(dir.path().join("f.json"), doc.to_string()).unwrap();
    let (status, err) = error(dir.path(), &["cohomology", "--sheaf", "f.json"]);
    assert_eq!((status, err["code"].as_str().unwrap()), (2, "SchemaError"));
    assert_eq!(err["path"], "$.stalks.pt.rels[0][0]");
}

#[test]
fn big_entries_survive() {
    let dir = TempDir::new().unwrap();
    let big = "123456789012345678901234567890";
    let text = format!(
        r#"{{"format_version": 1, "kind": "sheaf", "space": "point", "restrictions": {{}},
            "stalks": {{"pt": {{"gens": 1, "rels": [[{big}]]}}}}}}"#
    );
    fs::write(dir.path().join("f.json"), text).unwrap();
    let out = run_in(Some(dir.path()), &["cohomology", "--sheaf", "f.json", "--max-degree", "0", "--format", "json"], &[]);
    assert_eq!(code(&out), 0);
    let r = json_of(&out);
    assert_eq!(r["result"]["groups"][0][1][0].to_string(), big);
}

/// Canonical documents for every bundled space, sheaf and complex.
fn canonical_documents() -> Vec<(String, String)> {
    let spaces = ["point", "sierpinski", "discrete2", "pseudocircle", "sphere2"];
    let mut docs = Vec::new();
    for s in spaces {
        docs.push((format!("{s}.json"), export(&["--space", s])));
    }
    for (s, f) in [("sierpinski", "mod3"), ("pseudocircle", "mobius"), ("sphere2", "constZ"), ("discrete2", "sky_u")] {
        docs.push((format!("{s}_{f}.json"), export(&["--space", s, "--sheaf", f])));
    }
    docs.push(("godement.json".into(), export(&["--space", "pseudocircle", "--complex", "godement_constZ", "--max-degree", "1"])));
    for c in ["sierpinski_skyscrapers", "pseudocircle_constant_term", "zero_square", "exact_square", "one_row", "hidden_extension"] {
        docs.push((format!("{c}.json"), export(&["--complex", c])));
    }
    docs
}

#[test]
fn canonical_files_round_trip() {
    let dir = TempDir::new().unwrap();
    for (name, text) in canonical_documents() {
        assert!(text.ends_with("}\n"));
        fs::write(dir.path().join(&name), &text).unwrap();
        let doc: Value = serde_json::from_str(&text).unwrap();
        let flag = match doc["kind"].as_str().unwrap() {
            "space" => "--space",
            "sheaf" => "--sheaf",
            _ => "--complex",
        };
        let out = run_in(Some(dir.path()), &["corpus", "export", flag, &name], &[]);
        assert_eq!(code(&out), 0, "{name}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(String::from_utf8(out.stdout).unwrap(), text, "{name}");
    }
}

#[test]
fn inline_and_file_spaces() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("circle.json"), export(&["--space", "pseudocircle"])).unwrap();
    let mut doc: Value = serde_json::from_str(&export(&["--space", "pseudocircle", "--sheaf", "constZ"])).unwrap();
    doc["space"] = json!("circle.json");
    fs::write(dir.path().join("by_file.json"), doc.to_string()).unwrap();
    doc["space"] = serde_json::from_str(&export(&["--space", "pseudocircle"])).unwrap();
    fs::write(dir.path().join("inline.json"), doc.to_string()).unwrap();
    for f in ["by_file.json", "inline.json"] {
        let out = run_in(Some(dir.path()), &["cohomology", "--sheaf", f, "--format", "json"], &[]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(json_of(&out)["result"]["groups"], json!([[1, []], [1, []], [0, []]]));
    }
    let (status, err) = error(dir.path(), &["cohomology", "--space", "sphere2", "--sheaf", "inline.json"]);
    assert_eq!((status, err["code"].as_str().unwrap()), (2, "UsageError"));
}

#[test]
fn reports_are_deterministic() {
    let args = ["acyclic-check", "--space", "pseudocircle", "--sheaf", "mobius"];
    let mut a = report(&args);
    let mut b = report(&args);
    assert!(a["timing"]["elapsed_ms"].is_string());
    a.as_object_mut().unwrap().remove("timing");
    b.as_object_mut().unwrap().remove("timing");
    assert_eq!(a, b);
    assert_eq!(a["inputs"][1]["source"], "corpus:mobius");
    assert_eq!(a["inputs"][1]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn digests_follow_content_not_location() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("s.json"), export(&["--space", "sphere2"])).unwrap();
    let file = run_in(Some(dir.path()), &["check", "--space", "s.json", "--format", "json"], &[]);
    let bundled = report(&["check", "--space", "sphere2"]);
    assert_eq!(json_of(&file)["inputs"][0]["sha256"], bundled["inputs"][0]["sha256"]);
}

#[test]
fn caps_exit_with_three() {
    let dir = TempDir::new().unwrap();
    let cases: [&[&str]; 4] = [
        &["check", "--space", "pseudocircle", "--max-points", "3"],
        &["check", "--space", "sphere2", "--max-opens", "9"],
        &["cohomology", "--space", "point", "--sheaf", "constZ", "--max-degree", "9"],
        &["ss", "--complex", "zero_square", "--pages", "13"],
    ];
    for args in cases {
        let (status, err) = error(dir.path(), args);
        assert_eq!(status, 3, "{args:?}");
        assert_eq!(err["code"], "CapExceeded");
    }
    let (status, _) = error(dir.path(), &["ss", "--complex", "zero_square", "--pages-cap", "2"]);
    assert_eq!(status, 3);
    assert_eq!(code(&run(&["check", "--space", "sphere2", "--max-opens", "10"])), 0);
}

#[test]
fn opens_cap_from_the_environment() {
    let out = run_in(None, &["check", "--space", "pseudocircle"], &[("SHEAFCALC_MAX_OPENS", "6")]);
    assert_eq!(code(&out), 3);
    let out = run_in(None, &["check", "--space", "pseudocircle", "--max-opens", "7"], &[("SHEAFCALC_MAX_OPENS", "6")]);
    assert_eq!(code(&out), 0);
}

#[test]
fn unknown_names_are_input_errors() {
    let dir = TempDir::new().unwrap();
    let (status, err) = error(dir.path(), &["cohomology", "--space", "torus", "--sheaf", "constZ"]);
    assert_eq!((status, err["code"].as_str().unwrap()), (2, "UsageError"));
    assert_eq!(code(&run(&["frobnicate"])), 2);
}

#[test]
fn acyclic_check_verdicts() {
    let bad = report(&["acyclic-check", "--complex", "pseudocircle_constant_term"]);
    assert_eq!(bad["result"]["verdict"], false);
    assert_eq!(bad["result"]["outcome"], json!({ "kind": "NotAcyclic", "term": 0, "degree": 1 }));
    let good = report(&["acyclic-check", "--complex", "sierpinski_skyscrapers", "--max-degree", "1"]);
    assert_eq!(good["result"]["verdict"], true);
    assert_eq!(good["result"]["sections_cohomology"], json!([[1, []], [0, []]]));
}

#[test]
fn spectral_sequence_reports() {
    let by_p = report(&["ss", "--complex", "hidden_extension", "--axis", "p"]);
    let seq = &by_p["result"]["sequence"];
    assert_eq!(seq["total"], json!([[0, []], [0, [4]], [0, []]]));
    assert_eq!(seq["extension_flags"], json!([1]));
    assert_eq!(seq["pages"][2]["bidegree"], json!([2, -1]));
    let by_q = report(&["ss", "--complex", "hidden_extension", "--axis", "q", "--pages", "2"]);
    assert_eq!(by_q["result"]["sequence"]["pages"].as_array().unwrap().len(), 3);
    assert_eq!(by_q["result"]["sequence"]["pages"][2]["bidegree"], json!([-1, 2]));
    let row = report(&["ss", "--complex", "one_row"]);
    assert_eq!(row["result"]["sequence"]["total"], json!([[1, []], [0, []], [0, [3]]]));
}

#[test]
fn flasque_and_resolve() {
    let f = report(&["flasque", "--space", "pseudocircle", "--sheaf", "constZ"]);
    assert_eq!(f["result"]["verdict"], false);
    assert!(f["result"]["witness"].is_array());
    let s = report(&["flasque", "--space", "pseudocircle", "--sheaf", "sky_c"]);
    assert_eq!(s["result"]["verdict"], true);
    let r = report(&["resolve", "--space", "pseudocircle", "--sheaf", "constZ", "--max-degree", "1"]);
    let terms = r["result"]["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 3);
    assert!(terms.iter().all(|t| t["flasque"] == true));
    assert_eq!(terms[0]["global_sections"], json!([4, []]));
    assert_eq!(r["result"]["verdict"], true);
}

#[test]
fn corpus_run_passes() {
    let r = report(&["corpus", "run"]);
    let rows = r["result"]["criteria"].as_array().unwrap();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|c| c["pass"] == true), "{rows:?}");
    let one = report(&["corpus", "run", "--criterion", "8"]);
    assert_eq!(one["result"]["criteria"][0]["detail"], "cokernel Z = H^1");
    let list = report(&["corpus", "list"]);
    assert_eq!(list["result"]["spaces"].as_array().unwrap().len(), 5);
}
