use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sep4(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sep4")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn emit(name: &str, extra: &[&str], path: &Path) {
    let mut args = vec!["gallery", name, "--out", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = sep4(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn classify_divincenzo_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("dv.json");
    emit("divincenzo", &[], &f);
    let o = sep4(&["classify", "--input", f.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["rule_fired"], "Chow222");
    assert_eq!(report["verdict"], "Entangled");
}

#[test]
fn classify_product_projector_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("p.json");
    fs::write(&f, r#"{"dims":[2,2],"matrix":[[[0,0],[0,0],[0,0],[0,0]],[[0,0],[1,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]]]}"#).unwrap();
    let o = sep4(&["classify", "--input", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("rule: Rank1Product"));
}

#[test]
fn malformed_input_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.json");
    fs::write(&f, "{ not json").unwrap();
    assert_eq!(sep4(&["classify", "--input", f.to_str().unwrap()]).status.code(), Some(3));
    let missing = dir.path().join("missing.json");
    assert_eq!(sep4(&["classify", "--input", missing.to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(sep4(&["classify"]).status.code(), Some(3));
}

#[test]
fn tol_chow_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("dv.json");
    emit("divincenzo", &[], &f);
    // |F| of this state is about 84, so a huge threshold makes it vanish
    let o = Command::new(env!("CARGO_BIN_EXE_sep4"))
        .args(["classify", "--input", f.to_str().unwrap(), "--json"])
        .env("SEP4_TOL_CHOW", "1000")
        .output()
        .unwrap();
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["chow"]["tol_chow"], 1000.0);
    assert_eq!(o.status.code(), Some(0));
    let o = Command::new(env!("CARGO_BIN_EXE_sep4"))
        .args(["classify", "--input", f.to_str().unwrap(), "--tol-chow", "1e-8"])
        .env("SEP4_TOL_CHOW", "1000")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn negative_tolerance_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("dv.json");
    emit("divincenzo", &[], &f);
    let o = sep4(&["classify", "--input", f.to_str().unwrap(), "--tol-rank=-1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn chow_print_layouts() {
    let o = sep4(&["chow", "--system", "2x2", "--print"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "[[+p1],[+p2];[+p3],[+p4]]");

    let o = sep4(&["chow", "--system", "Mx2:5", "--print", "--json"]);
    let m: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = m.as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r.as_array().unwrap().len() == 5));
    assert_eq!(rows[0][0][0]["tuple"], serde_json::json!([1, 3, 5, 7]));

    assert_eq!(sep4(&["chow", "--system", "5x5", "--print"]).status.code(), Some(3));
}

#[test]
fn chow_eval_example_range() {
    // rows of R for a = b = 1
    let rows = [
        [1, 0, 0, 0, 1, 0, 0, 0, 0],
        [0, 1, 0, 1, 0, 0, 0, 1, 0],
        [0, 0, 0, 0, 1, 0, 1, 0, 1],
        [0, 0, 0, 0, 0, 1, 0, 1, 0],
    ];
    let basis: Vec<Vec<[f64; 2]>> =
        rows.iter().map(|r| r.iter().map(|&x| [x as f64, 0.0]).collect()).collect();
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("r.json");
    fs::write(&f, serde_json::json!({ "rows": basis }).to_string()).unwrap();
    let o = sep4(&["chow", "--system", "3x3", "--eval", f.to_str().unwrap(), "--json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let re = v["unnormalized"][0].as_f64().unwrap();
    let im = v["unnormalized"][1].as_f64().unwrap();
    assert!((re + 1.0).abs() < 1e-12 && im.abs() < 1e-12, "{v}");

    let three = dir.path().join("three.json");
    fs::write(&three, serde_json::json!({ "rows": &basis[..3] }).to_string()).unwrap();
    let o = sep4(&["chow", "--system", "3x3", "--eval", three.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("dimension 3"));
}

#[test]
fn batch_with_one_corrupt_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in");
    fs::create_dir(&input).unwrap();
    for i in 0..9 {
        let seed = i.to_string();
        let a = (i / 3).to_string();
        let f = input.join(format!("s{i:02}.json"));
        match i % 3 {
            0 => emit("random-separable", &["--seed", &seed, "--dims", "2,3", "--terms", "2"], &f),
            1 => emit("example-ab", &["--a", &a, "--b", "1"], &f),
            _ => emit("divincenzo", &[], &f),
        }
    }
    fs::write(input.join("s09.json"), "[1, 2").unwrap();
    let out = dir.path().join("results.jsonl");
    let o = sep4(&["batch", "--input", input.to_str().unwrap(), "--out", out.to_str().unwrap(), "--parallel", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("10 files"));
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 10);
    let names: Vec<&str> = lines.iter().map(|l| l["file"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    assert_eq!(lines.iter().filter(|l| l.get("error").is_some()).count(), 1);
    assert!(lines[9]["error"].is_string());
    // a = 0 is separable, other example states are entangled
    assert_eq!(lines[1]["report"]["verdict"], "Separable");
    assert_eq!(lines[4]["report"]["verdict"], "Entangled");

    // identical reruns give identical output
    let out2 = dir.path().join("again.jsonl");
    sep4(&["batch", "--input", input.to_str().unwrap(), "--out", out2.to_str().unwrap(), "--parallel", "1"]);
    assert_eq!(fs::read_to_string(&out2).unwrap(), text);
}

#[test]
fn batch_empty_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("results.jsonl");
    let input = dir.path().join("empty");
    fs::create_dir(&input).unwrap();
    let o = sep4(&["batch", "--input", input.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&out).unwrap(), "");
}

#[test]
fn version_lists_table_checksums() {
    let o = sep4(&["--version"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for label in ["2x2", "3x2", "4x2", "2x3", "3x3", "2x2x2"] {
        assert!(text.contains(&format!("chow_{label} sha256:")), "{text}");
    }
}

#[test]
fn gallery_emits_to_stdout() {
    let o = sep4(&["gallery", "upb-complement"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["dims"], serde_json::json!([2, 2, 2]));
    assert_eq!(v["matrix"].as_array().unwrap().len(), 8);
}
