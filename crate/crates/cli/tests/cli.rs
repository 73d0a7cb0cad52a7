use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vreglab")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(o: &Output) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn torus_info_orders() {
    let o = run(&["torus-info", "--family", "G2", "--twist", "coxeter", "--q", "4"]);
    assert!(o.status.success());
    assert_eq!(rows(&o)[0][3], "13");
    let o = run(&["torus-info", "--family", "GL(2)", "--q", "3"]);
    assert_eq!(rows(&o)[0][3], "8");
    let o = run(&["torus-info", "--family", "GL(3)", "--twist", "identity", "--q", "5"]);
    assert_eq!(rows(&o)[0][3], "64");
    assert_eq!(rows(&o)[0][5], "3");
}

#[test]
fn scan_star_g2_fails_only_at_two() {
    let o = run(&["scan-star", "--family", "G2", "--q-range", "2..13"]);
    assert!(o.status.success());
    let failing: Vec<String> = rows(&o).into_iter().filter(|r| r[7] == "false").map(|r| r[2].clone()).collect();
    assert_eq!(failing, vec!["2"]);
    assert!(rows(&o).iter().all(|r| r[10] == "3"));
}

#[test]
fn scan_star_gl_threshold() {
    let o = run(&["scan-star", "--family", "GL(2..8)", "--q", "2,3,4,5,7,8,9", "--threshold", "2n"]);
    let mut failing: Vec<(u64, usize)> = rows(&o)
        .into_iter()
        .filter(|r| r[9] == "false")
        .map(|r| (r[2].parse().unwrap(), r[0].trim_start_matches("GL(").trim_end_matches(')').parse().unwrap()))
        .collect();
    failing.sort_unstable();
    assert_eq!(failing, vec![(2, 2), (2, 4), (2, 6), (3, 2)]);
}

#[test]
fn empty_subset_always_passes() {
    let o = run(&["scan-star", "--family", "G2", "--family", "Sp(4)", "--twist", "all", "--q-range", "2..5", "--subset", "empty"]);
    assert!(rows(&o).iter().all(|r| r[7] == "true" && r[4] == "0"));
}

#[test]
fn json_output_parses() {
    let o = run(&["torus-info", "--family", "SL(3)", "--twist", "all", "--q", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 3);
}

#[test]
fn howe_on_trivial_and_generic_characters() {
    let dir = tempfile::tempdir().unwrap();
    let trivial = write(dir.path(), "t.json", r#"{"depth":1,"depth_zero":[0],"levels":[{"m":1,"functional":[0,0]}]}"#);
    let o = run(&["howe", "--family", "GL(2)", "--q", "3", "--character", &trivial, "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["jumps"].as_array().unwrap().len(), 0);
    let generic = write(dir.path(), "g.json", r#"{"depth":1,"depth_zero":[1],"levels":[{"m":1,"functional":[0,1]}]}"#);
    let o = run(&["howe", "--family", "GL(2)", "--q", "3", "--character", &generic, "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["zero_toral"], true);
}

#[test]
fn epsilon_odd_depth_is_trivial() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(dir.path(), "g.json", r#"{"depth":1,"depth_zero":[1],"levels":[{"m":1,"functional":[0,1]}]}"#);
    let o = run(&["epsilon", "--family", "GL(2)", "--q", "3", "--character", &c]);
    assert!(o.status.success());
    let r = rows(&o);
    assert_eq!(r.len(), 6);
    assert!(r.iter().all(|row| row[2] == "1" && row[3] == "1"));
}

#[test]
fn epsilon_even_depth_gl2_is_the_parity_sign() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(dir.path(), "g.json", r#"{"depth":2,"depth_zero":[0],"levels":[{"m":1,"functional":[0,0]},{"m":2,"functional":[0,1]}]}"#);
    let o = run(&["epsilon", "--family", "GL(2)", "--q", "3", "--character", &c]);
    for row in rows(&o) {
        let k: u64 = row[0].parse().unwrap();
        let expected = if k % 2 == 1 { "-1" } else { "1" };
        assert_eq!(row[2], expected);
        assert_eq!(row[5], expected);
    }
}

#[test]
fn predict_gl2_zero_toral() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(dir.path(), "g.json", r#"{"depth":1,"depth_zero":[1],"levels":[{"m":1,"functional":[0,1]}]}"#);
    let o = run(&["predict", "--family", "GL(2)", "--q", "3", "--character", &c]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = rows(&o);
    assert_eq!(r.len(), 6);
    assert!(r.iter().all(|row| row[2] == "1" && row[4].split(';').count() == 2));
    let nt = write(dir.path(), "n.json", r#"{"depth":1,"depth_zero":[1],"levels":[{"m":1,"functional":[1,0]}]}"#);
    let o = run(&["predict", "--family", "GL(2)", "--q", "3", "--character", &nt]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn henniart_exhaustive_and_random() {
    let o = run(&["henniart", "--family", "GL(2)", "--q", "3", "--depth", "1"]);
    assert!(o.status.success());
    assert_eq!(rows(&o)[0][8], "0");
    let o = run(&["henniart", "--family", "GL(2)", "--q", "5", "--mode", "random", "--trials", "300", "--seed", "9", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["report"]["pairs_tested"], 300);
}

#[test]
fn henniart_refuses_when_star_fails() {
    let o = run(&["henniart", "--family", "G2", "--q", "2", "--depth", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("fails"));
}

#[test]
fn subgroup_by_indices() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", "[0]");
    let o = run(&["henniart", "--family", "GL(2)", "--q", "3", "--group", &g]);
    assert!(o.status.success());
    // with the trivial group every character is admissible
    assert_eq!(rows(&o)[0][5], "72");
}

#[test]
fn bad_arguments_exit_nonzero() {
    assert_eq!(run(&["torus-info", "--q", "6"]).status.code(), Some(2));
    assert_eq!(run(&["torus-info", "--family", "E9"]).status.code(), Some(2));
    assert_eq!(run(&["torus-info", "--cap", "0"]).status.code(), Some(2));
}

#[test]
fn cap_marks_rows() {
    let o = run(&["scan-star", "--family", "GL(4)", "--q", "9", "--cap", "100"]);
    assert!(o.status.success());
    assert!(!rows(&o)[0][11].is_empty());
}
