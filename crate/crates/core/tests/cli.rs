use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opacity-edit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn verify_reports_the_leak() {
    let o = run(&["verify", &fixture("six_state.aut")]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.starts_with("NOT OPAQUE\n"));
    assert!(out.contains("intruder sees ab\n"));
    assert!(out.contains("estimate {5}\n"));

    let o = run(&["verify", &fixture("six_state_swapped.aut")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "OPAQUE\n");
}

#[test]
fn malformed_input_exits_2_with_line_number() {
    let o = run(&["verify", &fixture("malformed.aut")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 5:"), "{}", stderr(&o));

    let o = run(&["verify", "/nonexistent/plant.aut"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["game", &fixture("six_state.aut"), "--ops", "insert", "--max-insert", "0"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unenforceable_exits_3() {
    for cmd in ["synthesize", "mechanism", "trim"] {
        let o = run(&[cmd, &fixture("unenforceable.aut")]);
        assert_eq!(o.status.code(), Some(3), "{cmd}");
        assert!(stdout(&o).contains("not ic-enforceable at this configuration"), "{cmd}");
    }
}

#[test]
fn synthesize_then_check_and_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("six_state.mealy");
    let t = t.to_str().unwrap();
    let o = run(&["synthesize", &fixture("six_state.aut"), "--ops", "sub", "--max-insert", "0", "-o", t]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(t).unwrap();
    assert!(text.starts_with("policy passthrough-first\ninputs b c d\n"));
    assert!(text.contains("q0 b / c q1\n"));

    let o = run(&["check", &fixture("six_state.aut"), "--transducer", t]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "PASS\n");

    let o = run(&["simulate", &fixture("six_state.aut"), "abc", "--transducer", t]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows[0], "event\toutput\tintruder\tdefender\tleak");
    assert_eq!(rows[2], "b\tc\t{3,6}\t{4,6}\tno");
    assert_eq!(rows.len(), 4);
    assert!(rows[3].starts_with("c\td\t{6}\t"));

    let o = run(&["simulate", &fixture("six_state.aut"), "dd", "--transducer", t]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn check_prints_a_json_counterexample() {
    let o = run(&["check", &fixture("six_state.aut"), "--identity"]);
    assert_eq!(o.status.code(), Some(1));
    let line = stdout(&o);
    let v: serde_json::Value = serde_json::from_str(line.trim()).unwrap();
    assert_eq!(v["property"], "confidentiality");
    assert_eq!(v["trace"], "ab");
}

#[test]
fn bad_transducer_file_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("bad.mealy");
    std::fs::write(&t, "policy x\ninputs b c d\nstates q0\ninitial q0\nq0 z / c q0\n").unwrap();
    let o = run(&["check", &fixture("six_state.aut"), "--transducer", t.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 5"), "{}", stderr(&o));
}

#[test]
fn gen_is_seeded_and_parseable() {
    let a = stdout(&run(&["gen", "--seed", "7", "--incomparable"]));
    let b = stdout(&run(&["gen", "--seed", "7", "--incomparable"]));
    assert_eq!(a, b);
    let m = opacity_edit::parse_model(&a).unwrap();
    assert!(m.profile.is_incomparable());
    assert_eq!(run(&["gen"]).status.code(), Some(2));
}

#[test]
fn export_dot_writes_every_stage() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = run(&["export-dot", &fixture("six_state.aut"), "--ops", "sub", "--max-insert", "0", "--dot", d]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut names: Vec<String> = std::fs::read_dir(d)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(
        names,
        ["em.dot", "game.dot", "observer_d.dot", "observer_i.dot", "observer_o.dot", "plant.dot", "transducer.dot", "trimmed.dot", "uem.dot"]
    );
    assert_eq!(run(&["export-dot", &fixture("six_state.aut")]).status.code(), Some(2));
}

#[test]
fn observers_and_game_listings() {
    let o = run(&["observers", &fixture("six_state.aut")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("defender observer, reacts to {b,c,d}\n  initial {1,3}\n"), "{out}");
    assert!(out.contains("  {1,3} b {2,5}\n"));

    let o = run(&["game", &fixture("six_state.aut"), "--ops", "sub", "--max-insert", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("A ({5},{5},{2,5}) utility 0\n"));

    let o = run(&["trim", &fixture("six_state.aut"), "--ops", "sub", "--max-insert", "0"]);
    assert!(stdout(&o).contains("disabled b→b at [({5},{3,6},{1,3}),b] -> ({5},{5},{2,5})\n"));
}

#[test]
fn verbose_logs_stage_sizes() {
    let o = run(&["-v", "synthesize", &fixture("six_state.aut")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("transducer"), "{}", stderr(&o));
}
