use std::path::PathBuf;
use std::process::{Command, Output};

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn ptgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptgraph")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn p5() -> String {
    scratch("p5.el", "5 4\n0 1\n1 2\n2 3\n3 4\n").display().to_string()
}

fn k2() -> String {
    scratch("k2.el", "2 1\n0 1\n").display().to_string()
}

fn claw() -> String {
    scratch("claw.el", "4 3\n0 1\n0 2\n0 3\n").display().to_string()
}

#[test]
fn path_on_an_edge_is_accepted_with_json() {
    let out = ptgraph(&["recognize", "--graph", &p5(), "--tree", &k2(), "--json"]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["mode"], "proper");
    assert_eq!(doc["models"].as_object().unwrap().len(), 5);
}

#[test]
fn claw_on_an_edge_is_rejected() {
    let out = ptgraph(&["recognize", "--graph", &claw(), "--tree", &k2()]);
    assert_eq!(code(&out), 1);
}

#[test]
fn malformed_input_reports_position() {
    let bad = scratch("bad.el", "2 1\n0 x\n").display().to_string();
    let out = ptgraph(&["recognize", "--graph", &bad, "--tree", &k2()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2, column 3"));
}

#[test]
fn missing_file_is_an_input_error() {
    let out = ptgraph(&["verify", "--graph", "/nonexistent/g.el", "--rep", "/nonexistent/r.json"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn emitted_representation_verifies_and_round_trips() {
    let out = ptgraph(&["recognize", "--graph", &p5(), "--tree", &k2(), "--json"]);
    let text = stdout(&out);
    let rep = scratch("p5.json", &text).display().to_string();
    assert_eq!(
        code(&ptgraph(&[
            "verify",
            "--graph",
            &p5(),
            "--rep",
            &rep,
            "--mode",
            "proper"
        ])),
        0
    );
    let parsed = ptgraph::Representation::from_json(&text).unwrap();
    assert_eq!(parsed.to_json(), text.trim_end());
    assert_eq!(code(&ptgraph(&["verify", "--graph", &claw(), "--rep", &rep])), 1);
}

#[test]
fn oracle_agrees_on_the_claw() {
    assert_eq!(code(&ptgraph(&["oracle", "--graph", &claw(), "--tree", &claw()])), 0);
    assert_eq!(code(&ptgraph(&["oracle", "--graph", &claw(), "--tree", &k2()])), 1);
}

#[test]
fn chains_and_leafage() {
    let out = ptgraph(&["chains", "--graph", &p5(), "--json"]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["chains"].as_array().unwrap().len(), 1);
    let out = ptgraph(&["leafage", "--graph", &claw()]);
    assert_eq!(stdout(&out).trim(), "3");
    let c4 = scratch("c4.el", "4 4\n0 1\n1 2\n2 3\n3 0\n").display().to_string();
    assert_eq!(code(&ptgraph(&["leafage", "--graph", &c4])), 1);
}

#[test]
fn gadget_certify_then_extract() {
    let poset = scratch("p.poset", "min: a b\nmax: c d\nrel: a c\nrel: a d\nrel: b d\n")
        .display()
        .to_string();
    let out = ptgraph(&["gadget", "certify", "--poset", &poset, "--json"]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["certificate"].as_array().unwrap().len(), 3);
    let rep = scratch("d.json", &doc["representation"].to_string())
        .display()
        .to_string();
    let out = ptgraph(&["gadget", "extract", "--poset", &poset, "--rep", &rep]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("valid"));
    let build = ptgraph(&["gadget", "build", "--poset", &poset]);
    assert!(stdout(&build).starts_with("8 "));
}

#[test]
fn generation_is_seed_determined() {
    let a = stdout(&ptgraph(&["gen", "--kind", "chordal", "--n", "9", "--seed", "7"]));
    let b = stdout(&ptgraph(&["gen", "--kind", "chordal", "--n", "9", "--seed", "7"]));
    assert_eq!(a, b);
    let rep = PathBuf::from(env!("CARGO_TARGET_TMPDIR"))
        .join("cli/planted.json")
        .display()
        .to_string();
    let g = stdout(&ptgraph(&[
        "gen",
        "--kind",
        "planted",
        "--n",
        "6",
        "--tree",
        &claw(),
        "--seed",
        "2",
        "--rep-out",
        &rep,
    ]));
    let gp = scratch("planted.el", &g).display().to_string();
    assert_eq!(code(&ptgraph(&["verify", "--graph", &gp, "--rep", &rep])), 0);
}

#[test]
fn corpus_output_is_independent_of_jobs() {
    let one = ptgraph(&["corpus", "--max-n", "5", "--max-t", "4", "--jobs", "1", "--json"]);
    let two = ptgraph(&["corpus", "--max-n", "5", "--max-t", "4", "--jobs", "2", "--json"]);
    assert_eq!(code(&one), 0);
    assert_eq!(stdout(&one), stdout(&two));
}
