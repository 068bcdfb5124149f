use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use tempfile::TempDir;

const STAR0: &str = "k=3\narity=2\n0 0\n0 1\n0 2\n1 0\n1 1\n2 0\n2 2\n";
const STAR1: &str = "# star at 1\nk=3\narity=2\n0 0\n0 1\n1 0\n1 1\n1 2\n2 1\n2 2\n";
const U0: &str = "k=3\narity=1\n0\n";
const U12: &str = "k=3\narity=1\n1\n2\n";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_clonecert"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

struct Files {
    dir: TempDir,
}

impl Files {
    fn new() -> Files {
        let f = Files {
            dir: TempDir::new().unwrap(),
        };
        f.put("star0.txt", STAR0);
        f.put("star1.txt", STAR1);
        f.put("u0.txt", U0);
        f.put("u12.txt", U12);
        f
    }

    fn put(&self, name: &str, text: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        fs::write(&p, text).unwrap();
        p
    }

    fn path(&self, name: &str) -> String {
        self.dir.path().join(name).to_string_lossy().into_owned()
    }
}

#[test]
fn validate_center_and_chains() {
    let f = Files::new();
    let o = run(&["validate", &f.path("star0.txt")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("center {0}"));

    let mut full = String::from("k=3\narity=2\n");
    for a in 0..3 {
        for b in 0..3 {
            full.push_str(&format!("{a} {b}\n"));
        }
    }
    f.put("full.txt", &full);
    let o = run(&["validate", &f.path("full.txt")]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("ImproperCenter"));

    let o = run(&["center", &f.path("star1.txt")]);
    assert_eq!(stdout(&o).trim(), "{1}");

    let rho2 =
        "k=4\narity=2\n0 0\n1 1\n2 2\n3 3\n0 1\n1 0\n0 2\n2 0\n0 3\n3 0\n1 2\n2 1\n1 3\n3 1\n";
    f.put("rho2.txt", rho2);
    let o = run(&["chains", &f.path("rho2.txt")]);
    assert_eq!(stdout(&o), "{0,1,2}\n{0,1,3}\n");
}

#[test]
fn parse_errors_exit_one() {
    let f = Files::new();
    f.put("bad.txt", "k=3\narity=2\n0 3\n");
    let o = run(&["validate", &f.path("bad.txt")]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    assert_eq!(code(&run(&["validate", &f.path("missing.txt")])), 1);
    assert_eq!(code(&run(&["no-such-command"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn duplicate_tuples_warn_but_succeed() {
    let f = Files::new();
    f.put("dup.txt", "k=3\narity=1\n0\n0\n");
    let o = run(&["validate", &f.path("dup.txt")]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("duplicate"));
}

#[test]
fn classify_human_and_json() {
    let f = Files::new();
    let o = run(&["classify", &f.path("star0.txt"), &f.path("u0.txt")]);
    assert!(stdout(&o).starts_with("verdict: TypeI"));
    let o = run(&[
        "--json",
        "classify",
        &f.path("star0.txt"),
        &f.path("u12.txt"),
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "TypeII");
    assert!(v["reasons"]
        .as_array()
        .unwrap()
        .iter()
        .any(|r| r.as_str().unwrap().starts_with("I:")));
}

#[test]
fn certify_then_verify_and_tamper() {
    let f = Files::new();
    let cert = f.path("cert.json");
    let o = run(&[
        "certify",
        &f.path("star0.txt"),
        &f.path("star1.txt"),
        "--out",
        &cert,
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(code(&run(&["verify", &cert])), 0);

    let mut v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    let n = v["f_mid"]["table"].as_array().unwrap().len();
    v["f_mid"]["table"] = serde_json::json!(vec![1; n]);
    fs::write(&cert, serde_json::to_string(&v).unwrap()).unwrap();
    let o = run(&["verify", &cert]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("FAIL clause b"));

    let o = run(&["certify", &f.path("star0.txt"), &f.path("u0.txt")]);
    assert_eq!(code(&o), 2);
}

#[test]
fn verify_against_another_pair_fails() {
    let f = Files::new();
    let cert = f.path("cert.json");
    run(&[
        "certify",
        &f.path("star0.txt"),
        &f.path("star1.txt"),
        "--out",
        &cert,
    ]);
    let o = run(&[
        "verify",
        &cert,
        "--rho",
        &f.path("star1.txt"),
        "--sigma",
        &f.path("star0.txt"),
    ]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("clause pair"));
}

#[test]
fn interpolate_reports_checks() {
    let f = Files::new();
    let o = run(&[
        "interpolate",
        &f.path("star0.txt"),
        &f.path("u0.txt"),
        "--g",
        "1,1,1",
        "--target",
        "0,2,0",
    ]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("PASS H(ext(x)) = target(x)"));
    assert!(!out.contains("FAIL"));
    f.put("g.op", "k=3 arity=1 table=0 0 0\n");
    let o = run(&[
        "--json",
        "interpolate",
        &f.path("star0.txt"),
        &f.path("u12.txt"),
        "--g",
        &f.path("g.op"),
        "--target",
        "k=3 arity=1 table=0 1 0",
    ]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["sigma_type"], "TypeII");
    // g preserves sigma, so there is nothing to interpolate from.
    let o = run(&[
        "interpolate",
        &f.path("star0.txt"),
        &f.path("u12.txt"),
        "--g",
        "0,1,2",
        "--target",
        "0,0,0",
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn derive_prints_relation_and_transcript() {
    let f = Files::new();
    let o = run(&[
        "derive",
        &f.path("star0.txt"),
        &f.path("u12.txt"),
        "--kind",
        "gamma_binary",
    ]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.starts_with("k=3\narity=2\n"));
    assert!(out
        .trim_end()
        .ends_with("# gamma_binary(rho, sigma; mode=repeats; witness=ascending)"));
    let o = run(&[
        "derive",
        &f.path("star0.txt"),
        &f.path("u12.txt"),
        "--kind",
        "nonsense",
    ]);
    assert_eq!(code(&o), 1);
}

#[test]
fn enumerate_counts() {
    let count = |args: &[&str]| -> usize {
        let o = run(args);
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        v.as_array().unwrap().len()
    };
    assert_eq!(
        count(&[
            "--json",
            "enumerate",
            "--k",
            "3",
            "--arity",
            "2",
            "--central"
        ]),
        3
    );
    assert_eq!(
        count(&[
            "--json",
            "enumerate",
            "--k",
            "4",
            "--arity",
            "3",
            "--central"
        ]),
        4
    );
    assert_eq!(
        count(&[
            "--json",
            "enumerate",
            "--k",
            "3",
            "--arity",
            "3",
            "--central"
        ]),
        0
    );
    assert_eq!(
        count(&[
            "--json",
            "enumerate",
            "--k",
            "3",
            "--arity",
            "2",
            "--central",
            "--dedup-iso"
        ]),
        1
    );
    assert_eq!(
        count(&[
            "--json",
            "enumerate",
            "--k",
            "3",
            "--arity",
            "1",
            "--central"
        ]),
        6
    );
    assert_eq!(code(&run(&["enumerate", "--k", "5", "--arity", "2"])), 1);
}

#[test]
fn closure_stats_and_probe() {
    let f = Files::new();
    f.put("gens.txt", "# constant zero\nk=3 arity=1 table=0 0 0\n");
    let o = run(&[
        "closure",
        "--gens",
        &f.path("gens.txt"),
        "--max-arity",
        "1",
        "--stats",
    ]);
    assert_eq!(stdout(&o), "arity 1: 2\nfixpoint: true\ncompositions: 2\n");
    f.put("empty.txt", "");
    let o = run(&[
        "--json",
        "closure",
        "--gens",
        &f.path("empty.txt"),
        "--k",
        "3",
        "--stats",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["counts"], serde_json::json!([1, 2]));
    let o = run(&[
        "closure",
        "--rho",
        &f.path("star0.txt"),
        "--sigma",
        &f.path("u0.txt"),
        "--max-arity",
        "1",
    ]);
    assert!(stdout(&o).contains("consistency evidence only"));
}

#[test]
fn survey_writes_certificates() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let o = run(&["survey", "--k", "3", "--out-dir", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let json = fs::read_to_string(out.join("survey.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["schema"], 1);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 24);
    for r in rows.iter().filter(|r| r["verdict"] == "NotSubmaximal") {
        let file = out.join(r["certificate_file"].as_str().unwrap());
        assert_eq!(code(&run(&["verify", file.to_str().unwrap()])), 0);
    }
    let again = run(&["--json", "survey", "--k", "3"]);
    let first = run(&["--json", "survey", "--k", "3"]);
    assert_eq!(again.stdout, first.stdout);
    assert_eq!(code(&run(&["survey", "--k", "5"])), 2);
    assert_eq!(code(&run(&["survey", "--k", "3", "--max-arity", "1"])), 0);
}
