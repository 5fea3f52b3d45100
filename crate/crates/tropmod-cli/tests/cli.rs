use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn tropmod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tropmod")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

#[test]
fn enumerate_counts() {
    let o = tropmod(&["enumerate", "--genus", "1", "--markings", "2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["schema"], "tropmod/1");
    assert_eq!(v["graphs"].as_array().unwrap().len(), 5);
    assert_eq!(v["f_vector"], serde_json::json!([1, 2, 2]));

    let o = tropmod(&["enumerate", "--genus", "2", "--markings", "0", "--maximal-only"]);
    let rows = stdout(&o).lines().filter(|l| l.starts_with(|c: char| c.is_ascii_digit())).count();
    assert_eq!(rows, 2);

    let o = tropmod(&["enumerate", "--genus", "0", "--markings", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not a stable pair"));
}

#[test]
fn stack_dumps() {
    let v = json(&tropmod(&["stack", "--genus", "1", "--markings", "1", "--presentation"]));
    let dims = |key: &str| -> Vec<u64> {
        v[key]["objects"].as_array().unwrap().iter().map(|o| o["cone"]["lattice_rank"].as_u64().unwrap()).collect()
    };
    assert_eq!(dims("atlas"), vec![0, 1]);
    assert_eq!(dims("relations"), vec![0, 1, 1]);

    let v = json(&tropmod(&["stack", "--genus", "1", "--markings", "2"]));
    assert_eq!(v["objects"].as_array().unwrap().len(), 5);

    let dot = stdout(&tropmod(&["stack", "--genus", "1", "--markings", "1", "--format", "dot"]));
    assert_eq!(dot.lines().filter(|l| l.contains("[label=\"G")).count(), 2);
}

#[test]
fn json_output_is_deterministic_and_reparses() {
    let a = stdout(&tropmod(&["stack", "--genus", "1", "--markings", "2"]));
    let b = stdout(&tropmod(&["stack", "--genus", "1", "--markings", "2"]));
    assert_eq!(a, b);
    let s = tropmod_core::io::stack_from_json(&a).unwrap();
    assert_eq!(tropmod_core::io::stack_to_json(&s).trim_end(), a.trim_end());
}

#[test]
fn verify_targets() {
    let loop1 = data("loop1.json");
    let o = tropmod(&["verify", "universal", "--curve", loop1.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let waffle = data("waffle.json");
    let o = tropmod(&["verify", "axioms", "--stack", waffle.to_str().unwrap()]);
    let text = stdout(&o);
    assert!(text.contains("cone-space: pass"));
    assert!(text.contains("cone-complex: fail"));
    assert_eq!(o.status.code(), Some(0));
    let o = tropmod(&["verify", "axioms", "--stack", waffle.to_str().unwrap(), "--require-cone-complex"]);
    assert_eq!(o.status.code(), Some(1));

    let square = data("square.json");
    let o = tropmod(&["verify", "squares", "--degeneration", square.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["passed"], true);
}

#[test]
fn budget_exit_code() {
    let loop1 = data("loop1.json");
    let o = tropmod(&["verify", "universal", "--curve", loop1.to_str().unwrap(), "--budget", "1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn cone_over_forget_clutch() {
    let loop1 = data("loop1.json");
    let dot = stdout(&tropmod(&["cone-over", "--curve", loop1.to_str().unwrap(), "--out", "dot"]));
    assert!(dot.contains("xlabel=\"s_1\""));
    let v = json(&tropmod(&["cone-over", "--curve", loop1.to_str().unwrap(), "--out", "json"]));
    assert_eq!(v["presentation"]["objects"].as_array().unwrap().len(), 5);

    let dir = tempfile::tempdir().unwrap();
    let tail = dir.path().join("tail.json");
    std::fs::write(
        &tail,
        r#"{"cone":{"lattice_rank":1,"rays":[[1]]},
            "graph":{"vertices":[{"id":0,"weight":1},{"id":1,"weight":0}],"edges":[[0,1]],
                     "legs":[{"label":1,"vertex":1},{"label":2,"vertex":1}]},
            "lengths":{"0":[3]}}"#,
    )
    .unwrap();
    let v = json(&tropmod(&["forget", "--curve", tail.to_str().unwrap(), "--leg", "2"]));
    assert_eq!(v["case"], "absorbed");
    assert_eq!(v["datum"], serde_json::json!({"kind": "leg", "label": 1, "d": [3]}));

    let out = dir.path().join("dumbbell.json");
    let o = tropmod(&[
        "clutch",
        "--left",
        tail.to_str().unwrap(),
        "--right",
        tail.to_str().unwrap(),
        "--star",
        "2",
        "--bullet",
        "2",
        "--length",
        "[5]",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2), "labels 1 clash");
    let o = tropmod(&[
        "clutch",
        "--left",
        tail.to_str().unwrap(),
        "--star",
        "1",
        "--bullet",
        "2",
        "--length",
        "[2]",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let c = tropmod_core::io::curve_from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!((c.genus(), c.graph.num_legs()), (2, 0));

    let o = tropmod(&["clutch", "--left", tail.to_str().unwrap(), "--length", "five"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn tropicalize_the_square() {
    let square = data("square.json");
    let v = json(&tropmod(&["tropicalize", "--degeneration", square.to_str().unwrap()]));
    assert_eq!(v["graph"]["edges"].as_array().unwrap().len(), 4);
    assert_eq!(v["graph"]["legs"].as_array().unwrap().len(), 4);
}
