use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn maxcsp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maxcsp")).args(args).output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = maxcsp(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classify_and_degree() {
    assert_eq!(stdout(&["classify", "XOR"]), "np_hard (not 0-valid, not 1-valid, not 2-monotone)\n");
    assert_eq!(stdout(&["classify", "OR2"]), "poly_time_solvable (1-valid)\n");
    assert_eq!(stdout(&["degree", "NAE3"]), "2\n");
    assert_eq!(stdout(&["degree", "RNAE2"]), "4\n");
    assert!(stdout(&["classify", "--verbose", "XOR:neg"]).lines().count() == 3);
}

#[test]
fn poly_and_decompose() {
    assert_eq!(stdout(&["poly", "OR2"]), "OR2: x1 + x2 - x1*x2\n");
    let lc = stdout(&["decompose", "--base", "EX3", "--target", "OR3[x1,x2,~x3]"]);
    assert!(lc.starts_with("combination EX3 3\n"));
}

#[test]
fn generation_is_replayable() {
    let args = ["generate", "NAE3:lit", "--nvars", "6", "--apps", "20", "--seed", "11"];
    let a = stdout(&args);
    assert_eq!(a, stdout(&args));
    assert!(a.starts_with("maxcsp 6 "));
}

#[test]
fn transform_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.txt");
    let output = dir.path().join("out.txt");
    fs::write(&input, stdout(&["generate", "2SAT", "--nvars", "5", "--apps", "8", "--seed", "3"])).unwrap();
    let out = maxcsp(&["transform", "linear", path(&input), "--from", "2SAT", "--to", "XOR", "--verify", "-o", path(&output)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout(&["verify", path(&input), path(&output)]);
    assert!(report.ends_with("result PASS\n"), "{report}");

    let text = fs::read_to_string(&output).unwrap();
    let header = text.lines().next().unwrap();
    let fields: Vec<&str> = header.split_whitespace().collect();
    let bumped = format!("{} {} {} {} {}", fields[0], fields[1], fields[2], fields[3], fields[4].parse::<i64>().unwrap() + 1);
    fs::write(&output, text.replacen(header, &bumped, 1)).unwrap();
    let out = maxcsp(&["verify", path(&input), path(&output)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn kernelize_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.txt");
    let kernel = dir.path().join("kernel.txt");
    fs::write(&input, stdout(&["generate", "NAE3:lit", "--nvars", "6", "--apps", "40", "--range", "n", "--seed", "5"])).unwrap();
    let out = maxcsp(&["kernelize", path(&input), "--to", "NAE3:lit", "-o", path(&kernel)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout(&["verify", path(&input), path(&kernel)]);
    assert!(report.ends_with("result PASS\n"), "{report}");
}

#[test]
fn solve_and_compress() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.txt");
    fs::write(&input, "maxcsp 2 1 N 1\nOR2 1 1 2\n").unwrap();
    assert_eq!(stdout(&["solve", path(&input)]), "optimum 1\nwitness 01\ngeq yes\neq yes\n");
    assert_eq!(stdout(&["compress", path(&input)]), "polynomial 2\nthreshold 1\n1 1\n1 2\n-1 1 2\n");
}

#[test]
fn vertex_cover_reduction() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    let inst = dir.path().join("vc.txt");
    fs::write(&graph, "graph 3 3\n1 2\n2 3\n1 3\n").unwrap();
    fs::write(&inst, stdout(&["vc-reduce", path(&graph), "-k", "2"])).unwrap();
    assert!(stdout(&["solve", path(&inst)]).contains("geq yes"));
    fs::write(&inst, stdout(&["vc-reduce", path(&graph), "-k", "1"])).unwrap();
    assert!(stdout(&["solve", path(&inst)]).contains("geq no"));
}

#[test]
fn diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.txt");
    fs::write(&input, "maxcsp 2 1 N 1\nOR2 -1 1 2\n").unwrap();
    let out = maxcsp(&["solve", path(&input)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("weight range violation"));

    let out = maxcsp(&["implement", "XOR", "T"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("C-closed"));

    let lang = dir.path().join("imp.txt");
    fs::write(&lang, "constraint IMP 2\n00\n01\n11\nend\n").unwrap();
    assert_eq!(stdout(&["degree", path(&lang)]), "2\n");
}
