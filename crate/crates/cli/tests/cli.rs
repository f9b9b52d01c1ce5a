use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn dsynth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dsynth")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn example1_synthesizes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k.json");
    let o = dsynth(&[
        "synthesize",
        &fixture("example1.net.json"),
        &fixture("example1.ctr.json"),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let file: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(file["mode"], "distributed");
    assert_eq!(file["controllers"].as_array().unwrap().len(), 2);
}

#[test]
fn example1_controller_file_on_stdout() {
    let o = dsynth(&["synthesize", &fixture("example1.net.json"), &fixture("example1.ctr.json"), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["success"], true);
    assert_eq!(report["verified"], true);
    assert_eq!(report["controller_file"]["controllers"][0]["subsystem"], "S1");
}

#[test]
fn example2_fails_at_s1() {
    let o = dsynth(&["synthesize", &fixture("example2.net.json"), &fixture("example2.ctr.json")]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("failed at S1"), "{text}");
    assert!(text.contains("S1 (depth 1) candidate 1/1: lra false -> infeasible"), "{text}");

    let o = dsynth(&["synthesize", &fixture("example2.net.json"), &fixture("example2.ctr.json"), "--json", "--oracle"]);
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["failure"]["subsystem"], "S1");
    assert_eq!(report["oracle"]["distributed_realizable"], true);
}

#[test]
fn tampered_controller_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    let (net, ctr) = (fixture("example1.net.json"), fixture("example1.ctr.json"));
    let o = dsynth(&["synthesize", &net, &ctr, "--out", good.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = dsynth(&["verify", &net, &ctr, good.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let mut file: Value = serde_json::from_str(&std::fs::read_to_string(&good).unwrap()).unwrap();
    for k in file["controllers"].as_array_mut().unwrap() {
        for row in k["rows"].as_array_mut().unwrap() {
            row["controls"] = "0".into();
        }
    }
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, serde_json::to_string(&file).unwrap()).unwrap();
    let o = dsynth(&["verify", &net, &ctr, bad.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["holds"], false);
    assert_eq!(report["counterexample_inputs"], serde_json::json!(["e1", "e2"]));
    assert_eq!(report["counterexample"].as_str().unwrap().chars().next(), Some('1'));
}

#[test]
fn central_controller_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.json");
    let (net, ctr) = (fixture("example2.net.json"), fixture("example2.ctr.json"));
    let o = dsynth(&["synthesize", &net, &ctr, "--central", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = dsynth(&["verify", &net, &ctr, out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn distribute_lists_both_splits() {
    let o = dsynth(&[
        "distribute",
        &fixture("example3.net.json"),
        &fixture("example3.ctr.json"),
        "--subsystem",
        "S2",
        "--oracle",
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["distributions"].as_array().unwrap().len(), 2);
    assert_eq!(report["oracle"]["agrees"], true);
}

#[test]
fn validate_reports() {
    let o = dsynth(&["validate", &fixture("example4.net.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("not a forest"));

    let dir = tempfile::tempdir().unwrap();
    let cyclic = dir.path().join("cyclic.json");
    std::fs::write(
        &cyclic,
        r#"{"subsystems":[
            {"name":"A","controls":[],"env_inputs":["x"],"outputs":[{"name":"p","expr":"x"}]},
            {"name":"B","controls":[],"env_inputs":["z"],"outputs":[{"name":"q","expr":"z"}]}],
          "wiring":[{"from_sys":"A","from_output":"p","to_sys":"B","to_input":"z"},
                    {"from_sys":"B","from_output":"q","to_sys":"A","to_input":"x"}]}"#,
    )
    .unwrap();
    let o = dsynth(&["validate", cyclic.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("violation"));
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, "").unwrap();
    assert_eq!(dsynth(&["validate", empty.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(dsynth(&["validate", "/no/such/file"]).status.code(), Some(2));
    assert_eq!(dsynth(&["frobnicate"]).status.code(), Some(2));
    let o = dsynth(&[
        "distribute",
        &fixture("example1.net.json"),
        &fixture("example1.ctr.json"),
        "--subsystem",
        "S9",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn eps_report() {
    let o = dsynth(&["eps", &fixture("eps_scaled.topology.json"), "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["faithful"], true);
    assert_eq!(report["certificate"], true);
    assert_eq!(report["success"], true);
    assert_eq!(report["central_realizable"], true);
    assert_eq!(report["groups"].as_array().unwrap().len(), 3);

    let o = dsynth(&[
        "eps",
        &fixture("eps_scaled.topology.json"),
        "--partition",
        &fixture("eps_single.partition.json"),
    ]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn output_is_deterministic() {
    let args = ["synthesize", &fixture("example4.net.json"), &fixture("example4.ctr.json"), "--json"];
    let (a, b) = (dsynth(&args), dsynth(&args));
    assert_eq!(a.stdout, b.stdout);
}
