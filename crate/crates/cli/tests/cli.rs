use std::process::{Command, Output};

use serde_json::Value;

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cartan-adelic"));
    cmd.args(args).env_remove("CI").env_remove("CARTAN_ADELIC_BUDGET");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap_or_else(|e| panic!("not JSON ({e}): {}", stdout(o)))
}

fn schema() -> jsonschema::JSONSchema {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/schema/output.schema.json")).unwrap();
    jsonschema::JSONSchema::compile(&serde_json::from_str(&text).unwrap()).unwrap()
}

#[test]
fn conductor_report() {
    let o = run(&["bound", "conductor", "--N", "11"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["formula_id"], "adelic_conductor");
    assert_eq!(v["rounding"], "up");
    assert!((v["value_f64"].as_f64().unwrap() / 1.127599146611382e15 - 1.0).abs() < 1e-12);
}

#[test]
fn mertens_reports_no_failures() {
    let o = run(&["verify", "mertens", "--max-k", "2263"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["summary"], "0 failures");
    let pretty = run(&["verify", "mertens", "--max-k", "2263", "--max-n", "1000", "--pretty"]);
    assert!(stdout(&pretty).lines().any(|l| l.starts_with("summary") && l.ends_with("0 failures")));
}

#[test]
fn cartan_queries() {
    // the enumerated index at 5^2 is 250; the closed form (p-1) p^(2n-1) / 2 agrees
    let o = run(&["cartan", "--p", "5", "--n", "2", "--kind", "nonsplit+", "--index"]);
    assert_eq!((o.status.code(), stdout(&o)), (Some(0), "250\n".to_string()));
    let o = run(&["cartan", "--p", "3", "--n", "2", "--kind", "nonsplit+", "--order"]);
    assert_eq!(stdout(&o), "144\n");
    let o = run(&["cartan", "--p", "3", "--n", "1", "--kind", "split", "--elements"]);
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines.len(), 4);
    assert!(lines.contains(&"2,0;0,1".to_string()));
}

#[test]
fn eigen_and_complement() {
    let v = json(&run(&["lift", "eigen", "--p", "5", "--n", "2", "--matrix", "0,-1;1,0"]));
    assert_eq!(v["roots"].as_array().unwrap().len(), 2);
    assert!(v["roots"][0].as_str().unwrap().contains("*sqrt(2)"));
    let v = json(&run(&["lift", "complement", "--p", "3", "--n", "2", "--gens", "0,2;1,0|1,3;3,1"]));
    assert_eq!((v["group_order"].as_u64(), v["complement_order"].as_u64()), (Some(36), Some(4)));
}

#[test]
fn exit_codes() {
    let o = run(&["bound", "conductor", "--N", "12"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["error"]["kind"], "NotSquarefree");
    let o = run(&["lift", "eigen", "--p", "5", "--n", "1", "--matrix", "1,1;0,1"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["error"]["kind"], "RepeatedRoots");
    assert_eq!(run(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(run(&[]).status.code(), Some(64));
    assert_eq!(run(&["cartan", "--p", "5", "--n", "1", "--kind", "torus"]).status.code(), Some(64));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn seeds_are_required_in_ci() {
    let args = ["verify", "cartan-tower", "--p", "3", "--samples", "4"];
    let o = run_env(&args, &[("CI", "true")]);
    assert_eq!(o.status.code(), Some(64));
    let o = run_env(&[&args[..], &["--seed", "5"]].concat(), &[("CI", "true")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(run(&args).status.code(), Some(0));
}

#[test]
fn identical_seed_gives_identical_output() {
    let args = ["verify", "cartan-tower", "--p", "3", "--samples", "25", "--seed", "11"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["violations"].as_array().unwrap().len(), 0);
}

#[test]
fn budget_override_caps_enumeration() {
    let o = run_env(&["cartan", "--p", "5", "--n", "2", "--kind", "borel", "--order"], &[("CARTAN_ADELIC_BUDGET", "100")]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["error"]["kind"], "SizeCap");
    let o = run(&["cartan", "--p", "5", "--n", "2", "--kind", "borel", "--order"]);
    assert_eq!(stdout(&o), "10000\n");
}

#[test]
fn json_outputs_match_the_schema() {
    let schema = schema();
    let cases: &[&[&str]] = &[
        &["bound", "height", "--F", "0"],
        &["bound", "height", "--F", "-0.5", "--refined"],
        &["bound", "j", "--value", "-2^12*5^3*11*13^4/3^13"],
        &["bound", "conductor", "--N", "11"],
        &["bound", "lambda", "--F", "3.5"],
        &["bound", "height", "--F", "-1"],
        &["cartan", "--p", "7", "--n", "1", "--kind", "split+"],
        &["lie", "--p", "3", "--n", "2", "--gens", "1,3;0,1|2,0;0,1"],
        &["lie", "--p", "3", "--n", "2", "--gens", "bad"],
        &["lift", "complement", "--p", "3", "--n", "2", "--gens", "0,2;1,0"],
        &["lift", "eigen", "--p", "7", "--n", "2", "--matrix", "1,2;3,4"],
        &["local", "--p", "11", "--n", "2", "--e", "1", "--ell", "5", "--reduction", "ord"],
        &["local", "--p", "13", "--n", "1", "--e", "2"],
        &["assemble", "--case", "A", "--lambda", "11", "--beta", "1", "--delta7", "1"],
        &["assemble", "--case", "A", "--lambda", "7", "--beta", "1", "--c-ns", "2", "--delta7", "8"],
        &["assemble", "--case", "B", "--lambda", "1"],
        &["known", "--j", "3^3*41^3*61^3*149^3"],
        &["known", "--j", "1/2"],
        &["verify", "mertens", "--max-n", "5000", "--max-k", "50"],
        &["verify", "cartan-index", "--p", "3", "--n", "2"],
        &["verify", "cartan-tower", "--p", "3", "--samples", "10", "--seed", "3"],
    ];
    for args in cases {
        let o = run(args);
        let v = json(&o);
        let msgs: Vec<String> = match schema.validate(&v) {
            Ok(()) => continue,
            Err(errors) => errors.map(|e| e.to_string()).collect(),
        };
        panic!("{args:?}: {msgs:?}");
    }
}
