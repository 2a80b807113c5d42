use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn aliquot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aliquot")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn sinv_lists_preimages() {
    let out = aliquot(&["sinv", "28"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "28\n");

    let out = aliquot(&["sinv", "2"]);
    assert_eq!((code(&out), stdout(&out)), (0, String::new()));

    let out = aliquot(&["--json", "sinv", "28"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v[0]["m"], 28);
}

#[test]
fn odd_input_is_a_usage_error() {
    assert_eq!(code(&aliquot(&["sinv", "5"])), 2);
    assert_eq!(code(&aliquot(&["frobnicate"])), 2);
    assert_eq!(code(&aliquot(&["sinv"])), 2);
}

#[test]
fn orbit_text() {
    assert_eq!(stdout(&aliquot(&["orbit", "220"])), "220 284 | cycle [220, 284]\n");
    assert_eq!(stdout(&aliquot(&["orbit", "12"])), "12 16 15 | odd 15\n");
    assert_eq!(stdout(&aliquot(&["orbit", "6"])), "6 | cycle [6]\n");
    assert_eq!(stdout(&aliquot(&["orbit", "12", "--prime-stop"])), "12 | prime-predecessor 12 (11 prime, s(121) = 12)\n");
}

#[test]
fn classify_statuses() {
    assert_eq!(stdout(&aliquot(&["classify", "28"])), "finite size=1 nodes=[28]\n");
    assert_eq!(stdout(&aliquot(&["classify", "16"])), "potentially_infinite cert=(15,0,1)\n");
    let out = aliquot(&["--json", "classify", "954536"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["result"]["status"], "finite");
    assert_eq!(v["result"]["nodes"].as_array().unwrap().len(), 4);
}

#[test]
fn strict_indeterminate_exits_3() {
    // A tiny node cap cannot hold the amicable pair's predecessor tree.
    let out = aliquot(&["--max-nodes", "1", "classify", "356408", "--strict"]);
    assert_eq!(code(&out), 3);
    assert!(stdout(&out).starts_with("indeterminate limit=max_nodes"));
    assert_eq!(code(&aliquot(&["--max-nodes", "1", "classify", "356408"])), 0);
}

#[test]
fn component_dot() {
    let out = aliquot(&["component", "28"]);
    assert_eq!(stdout(&out), "digraph aliquot {\n  28;\n  28 -> 28;\n}\n");

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pair.dot");
    let out = aliquot(&["component", "356408", "--dot", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("digraph aliquot {\n  356408;\n  399592;\n"));

    assert_eq!(code(&aliquot(&["component", "16"])), 3);
}

fn scan_lines(path: &Path) -> Vec<serde_json::Value> {
    fs::read_to_string(path).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn scan_file_and_resume() {
    let dir = tempfile::tempdir().unwrap();
    let full = dir.path().join("full.jsonl");
    assert_eq!(code(&aliquot(&["scan", "--limit", "300", "--out", full.to_str().unwrap()])), 0);
    let lines = scan_lines(&full);
    let records = lines.iter().filter(|l| l.get("n").is_some()).count();
    assert_eq!(records, 150);
    let summary = &lines.last().unwrap()["summary"];
    assert_eq!(summary["records"], 150);
    assert_eq!(summary["finite_components"], 1);
    // 6, 220 and 284 stop on a prime predecessor before closing their cycles.
    let cycles: Vec<u64> = summary["cycles"].as_array().unwrap().iter().map(|c| c["id"].as_u64().unwrap()).collect();
    assert_eq!(cycles, vec![28]);

    // Cut the file mid-line, then resume: the result must match byte for byte.
    let bytes = fs::read(&full).unwrap();
    let partial = dir.path().join("partial.jsonl");
    fs::write(&partial, &bytes[..bytes.len() / 2]).unwrap();
    assert_eq!(code(&aliquot(&["scan", "--limit", "300", "--out", partial.to_str().unwrap()])), 0);
    assert_eq!(fs::read(&partial).unwrap(), bytes);

    // Rerunning a finished scan changes nothing.
    assert_eq!(code(&aliquot(&["scan", "--limit", "300", "--out", full.to_str().unwrap()])), 0);
    assert_eq!(fs::read(&full).unwrap(), bytes);

    let out = aliquot(&["stats", "--in", full.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("[1e1, 1e2)"));
}

#[test]
fn scan_to_stdout() {
    let out = aliquot(&["scan", "--limit", "2"]);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], r#"{"n":2,"status":"potentially_infinite","certificate":{"m":1,"j":0,"k":1}}"#);
    assert!(lines[1].starts_with(r#"{"summary":{"limit":2,"records":1,"#));
    assert_eq!(code(&aliquot(&["scan", "--limit", "1"])), 2);
}

#[test]
fn stats_needs_a_finished_scan() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cut.jsonl");
    fs::write(&path, "{\"n\":2,\"status\":\"potentially_infinite\",\"certificate\":{\"m\":1,\"j\":0,\"k\":1}}\n").unwrap();
    assert_eq!(code(&aliquot(&["stats", "--in", path.to_str().unwrap()])), 4);
    assert_eq!(code(&aliquot(&["stats", "--in", dir.path().join("missing").to_str().unwrap()])), 4);
}

#[test]
fn goldbach() {
    let out = aliquot(&["verify-goldbach", "--limit", "1000"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "ok, max minimal p = 73 (n = 992)\n");
    assert_eq!(code(&aliquot(&["verify-goldbach", "--limit", "6"])), 2);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.toml");
    fs::write(&good, "bound = 300\nmax_steps = 5\n").unwrap();
    let good = good.to_str().unwrap();
    assert_eq!(stdout(&aliquot(&["--config", good, "orbit", "138"])), "138 150 222 234 312 | exceeded-bound 312\n");
    // The flag wins over the file.
    let out = stdout(&aliquot(&["--config", good, "--bound", "1000", "orbit", "138"]));
    assert!(out.ends_with("| steps-exhausted 528\n"), "{out}");

    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "bonud = 100\n").unwrap();
    assert_eq!(code(&aliquot(&["--config", bad.to_str().unwrap(), "sinv", "28"])), 2);
    assert_eq!(code(&aliquot(&["--config", dir.path().join("nope.toml").to_str().unwrap(), "sinv", "28"])), 4);
}
