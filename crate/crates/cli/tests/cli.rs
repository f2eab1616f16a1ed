use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run_in(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_beauville"));
    cmd.args(args).env_remove("BEAUVILLE_CACHE_DIR");
    if let Some(dir) = cache {
        cmd.env("BEAUVILLE_CACHE_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

fn run(args: &[&str]) -> Output {
    run_in(args, None)
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = args.to_vec();
    full.extend(["--format", "json", "--no-timing"]);
    let out = run(&full);
    let code = out.status.code().unwrap();
    assert!(code <= 1, "{args:?} exited {code}: {}", String::from_utf8_lossy(&out.stderr));
    (code, serde_json::from_slice(&out.stdout).expect("json output"))
}

fn schema() -> jsonschema::Validator {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/schema/output.schema.json")).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

#[test]
fn verify_known_structure_in_z5_squared() {
    let (code, doc) = json(&["verify", "--group", "ab:5", "--quad", "(1,0);(0,1);(1,2);(1,4)"]);
    assert_eq!(code, 0);
    let r = &doc["result"];
    assert_eq!(r["cond_i"], true);
    assert_eq!(r["cond_ii"], serde_json::json!([true, true]));
    assert_eq!(r["cond_iii"], true);
    assert_eq!(doc["exit_code"], 0);
}

#[test]
fn a5_search_certifies_nonexistence() {
    let (code, doc) = json(&["search", "--group", "alt:5", "--strategy", "exhaustive"]);
    assert_eq!(code, 1);
    assert_eq!(doc["result"]["status"], "nonexistence");
}

#[test]
fn hurwitz_exit_codes() {
    assert_eq!(run(&["hurwitz", "--p", "5", "--e", "1"]).status.code(), Some(1));
    assert_eq!(run(&["hurwitz", "--p", "13", "--e", "1"]).status.code(), Some(0));
    assert_eq!(run(&["hurwitz", "--p", "2", "--e", "3"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["estimate", "--group", "foo:3"],
        vec!["verify", "--group", "alt:5", "--quad", "(1 2);(1 2 3);();()"],
        vec!["verify", "--group", "psl2:7", "--quad", "[[1,0],[0,1]]"],
        vec!["search", "--group", "psl2:7", "--type1", "2,3,6", "--type2", "2,3,7"],
        vec!["triangle", "--r", "1", "--s", "3", "--t", "7"],
        vec!["classify", "--group", "alt:5", "--traces", "0,1,2"],
        vec!["triple", "--group", "psl2:5", "--r", "2", "--s", "3", "--t", "7"],
        vec!["search"],
        vec!["no-such-command"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn cap_violations_exit_3() {
    assert_eq!(run(&["chartable", "--group", "psl2:49"]).status.code(), Some(3));
    assert_eq!(run(&["search", "--group", "alt:6", "--cap-search", "10"]).status.code(), Some(3));
    assert_eq!(run(&["classes", "--group", "alt:12"]).status.code(), Some(3));
}

#[test]
fn printed_elements_reparse() {
    let mut quads: Vec<(String, String)> = Vec::new();
    for group in ["ab:7", "alt:6", "psl2:8", "psl2:9", "psl2:25"] {
        let (_, doc) = json(&["search", "--group", group]);
        quads.push((group.into(), doc["result"]["quadruple"]["text"].as_str().unwrap().into()));
    }
    let (_, doc) = json(&["search", "--group", "psl2:3^3", "--strategy", "macbeath"]);
    quads.push(("psl2:27".into(), doc["result"]["quadruple"]["text"].as_str().unwrap().into()));
    for (group, quad) in &quads {
        let (code, doc) = json(&["verify", "--group", group, "--quad", quad]);
        assert_eq!(code, 0, "{group}");
        assert_eq!(doc["result"]["verdict"], true);
    }
    // class representatives, triple and Macbeath matrices
    for group in ["psl2:2^4", "sym:5", "alt:7"] {
        let (_, doc) = json(&["classes", "--group", group]);
        for c in doc["result"]["classes"].as_array().unwrap() {
            let r = c["representative"].as_str().unwrap();
            let (code, _) = json(&["verify", "--group", group, "--quad", &format!("{r};{r};{r};{r}")]);
            assert_eq!(code, 1);
        }
    }
    let (_, doc) = json(&["triple", "--group", "alt:15", "--r", "2", "--s", "3", "--t", "7"]);
    let pair = doc["result"]["triple"]["pair"].as_str().unwrap().to_string();
    let (code, doc) = json(&["classify", "--group", "alt:15", "--pair", &pair]);
    assert_eq!((code, &doc["result"]["generates"]), (0, &Value::Bool(true)));
    let (_, doc) = json(&["classify", "--group", "psl2:2^3", "--traces", "1,t,t+1"]);
    let pair = doc["result"]["pair"].as_str().unwrap().to_string();
    let (_, again) = json(&["classify", "--group", "psl2:2^3", "--pair", &pair]);
    assert_eq!(doc["result"]["generates"], again["result"]["generates"]);
}

#[test]
fn json_output_matches_schema() {
    let v = schema();
    let runs: Vec<Vec<&str>> = vec![
        vec!["verify", "--group", "ab:5", "--quad", "(1,0);(0,1);(1,2);(1,4)"],
        vec!["verify", "--group", "ab:5", "--quad", "(1,0);(0,1);(1,0);(0,1)"],
        vec!["search", "--group", "alt:5"],
        vec!["search", "--group", "psl2:11", "--strategy", "macbeath", "--type1", "5,5,5", "--type2", "6,6,6"],
        vec!["search", "--group", "alt:9", "--strategy", "random"],
        vec!["triple", "--group", "psl2:13", "--r", "2", "--s", "3", "--t", "7"],
        vec!["triple", "--group", "alt:7", "--r", "2", "--s", "3", "--t", "7"],
        vec!["triple", "--group", "psl2:2^6", "--r", "2", "--s", "3", "--t", "7"],
        vec!["classify", "--group", "psl2:11", "--traces", "0,1,3"],
        vec!["classify", "--group", "alt:5", "--pair", "(1 2 3);(1 2 3)"],
        vec!["estimate", "--group", "psl2:11", "--samples", "500"],
        vec!["estimate", "--group", "alt:6", "--samples", "500"],
        vec!["stats", "--group", "psl2:2^5", "--samples", "500"],
        vec!["classes", "--group", "psl2:7"],
        vec!["frobenius", "--group", "alt:5"],
        vec!["frobenius", "--group", "ab:5", "--classes", "1,2,3", "--method", "brute"],
        vec!["chartable", "--group", "psl2:8"],
        vec!["zeta", "--group", "alt:6"],
        vec!["hurwitz", "--p", "29", "--e", "1", "--witness"],
        vec!["triangle", "--r", "2", "--s", "3", "--t", "6"],
    ];
    for args in runs {
        let (_, doc) = json(&args);
        let errors: Vec<String> = v.iter_errors(&doc).map(|e| format!("{} at {}", e, e.instance_path())).collect();
        assert!(errors.is_empty(), "{args:?}: {errors:?}");
    }
    // with timing the document still validates
    let out = run(&["triangle", "--r", "2", "--s", "3", "--t", "7", "--format", "json"]);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["elapsed_ms"].is_number());
    assert!(v.is_valid(&doc));
}

#[test]
fn identical_invocations_give_identical_bytes() {
    let args = ["estimate", "--group", "psl2:13", "--samples", "3000", "--format", "json", "--no-timing"];
    let a = run(&args).stdout;
    assert_eq!(a, run(&args).stdout);
    // the pool size changes nothing but the echoed config
    let mut one: Value = serde_json::from_slice(&run(&[&args[..], &["--workers", "1"]].concat()).stdout).unwrap();
    let mut four: Value = serde_json::from_slice(&run(&[&args[..], &["--workers", "4"]].concat()).stdout).unwrap();
    one["config"]["workers"] = Value::Null;
    four["config"]["workers"] = Value::Null;
    one["result"]["config"]["workers"] = Value::Null;
    four["result"]["config"]["workers"] = Value::Null;
    assert_eq!(one, four);
}

#[test]
fn config_is_echoed_with_defaults() {
    let (_, doc) = json(&["estimate", "--group", "psl2:7", "--samples", "100"]);
    let c = &doc["config"];
    assert_eq!(c["seed"], beauville::DEFAULT_SEED);
    assert_eq!(c["samples"], 100);
    assert_eq!(c["cap_enumeration"], "1000000");
    assert_eq!(c["cap_table"], "10000");
    assert_eq!(c["cap_search"], 1_000_000_000u64);
}

#[test]
fn character_tables_persist_in_cache_dir() {
    let dir = tempfile::tempdir().unwrap();
    let first = run_in(&["chartable", "--group", "alt:6", "--format", "json", "--no-timing"], Some(dir.path()));
    assert_eq!(first.status.code(), Some(0));
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 1);
    let second = run_in(&["chartable", "--group", "alt:6", "--format", "json", "--no-timing"], Some(dir.path()));
    let (a, b): (Value, Value) = (serde_json::from_slice(&first.stdout).unwrap(), serde_json::from_slice(&second.stdout).unwrap());
    assert_eq!(a["result"], b["result"]);
    let out = run_in(&["zeta", "--group", "alt:6", "--format", "tsv"], Some(dir.path()));
    assert!(String::from_utf8_lossy(&out.stdout).contains("result.degrees\t1,5,5,8,8,9,10"));
}

#[test]
fn out_and_log_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.json");
    let log = dir.path().join("runs.jsonl");
    for _ in 0..2 {
        let o = run(&["triangle", "--r", "2", "--s", "3", "--t", "7", "--format", "json", "--out", out.to_str().unwrap(), "--log", log.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        assert!(o.stdout.is_empty());
    }
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["result"]["class"], "hyperbolic");
    let lines: Vec<Value> = std::fs::read_to_string(&log).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
}

#[test]
fn non_hurwitz_groups_have_no_237_triple() {
    for group in ["alt:7", "psl2:2^6"] {
        let (code, doc) = json(&["triple", "--group", group, "--r", "2", "--s", "3", "--t", "7"]);
        assert_eq!((code, doc["result"]["status"].as_str()), (1, Some("none")), "{group}");
    }
}

#[test]
fn frobenius_methods_agree() {
    let (_, brute) = json(&["frobenius", "--group", "psl2:7", "--method", "brute"]);
    let (_, chars) = json(&["frobenius", "--group", "psl2:7", "--method", "character"]);
    assert_eq!(brute["result"], chars["result"]);
}
