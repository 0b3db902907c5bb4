//! The `ktgerm` binary end to end: files in, JSON/CSV out, exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const FAST: &str = "m = [1, 2]\nr = [1, 2]\n[scan]\ngrid_per_angle = 180\nmultistart = 4\n[relative]\nsamples_per_band = 500\n";

struct Dir(tempfile::TempDir);

impl Dir {
    fn new() -> Self {
        Dir(tempfile::tempdir().unwrap())
    }

    fn file(&self, name: &str, body: &str) -> PathBuf {
        let p = self.0.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    }

    fn path(&self) -> &Path {
        self.0.path()
    }
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ktgerm")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success() || !out.stdout.is_empty(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn example_is_deterministic_and_writes_files() {
    let a = run(&["example"]);
    let b = run(&["example"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["symbolic"]["K2_matches_reference"], true);
    assert_eq!(v["arc_probe"]["equal"], 50);

    let d = Dir::new();
    let out = d.path().join("out");
    assert_eq!(run(&["example", "--out", s(&out)]).status.code(), Some(0));
    let written = std::fs::read(out.join("report.json")).unwrap();
    assert_eq!(written, a.stdout);
    assert!(std::fs::read_to_string(out.join("arcs.csv")).unwrap().starts_with("arc_id,ord_K,ord_T,equal\n"));

    let other = run(&["example", "--seed", "8"]);
    assert_ne!(other.stdout, a.stdout);
}

#[test]
fn analyze_worked_example() {
    let d = Dir::new();
    let germ = d.file("g.txt", "# worked example\nn: 2\nf: x - y^2\nf: x^2\n");
    let cfg = d.file("c.toml", FAST);
    let out = d.path().join("out");
    let o = run(&["analyze", "--germ", s(&germ), "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(v["symbolic"]["T2"], "x^2 - 2*x*y^2 + x^4 + y^4");
    assert_eq!(v["minors"]["p_minors"][0]["minor"], "4*x*y");
    assert!(out.join("scan_K2.csv").exists());
    assert!(v["caveats"].as_array().unwrap().iter().any(|c| c.as_str().unwrap().contains("n = p")));
    for row in v["kt_agreement"].as_array().unwrap() {
        assert_eq!(row["agree"], true);
    }
}

#[test]
fn analyze_scalar_and_zero_maps() {
    let d = Dir::new();
    let cfg = d.file("c.toml", FAST);
    let germ = d.file("g.txt", "n: 2\nf: x^2 + y^2\n");
    let v = json(&run(&["analyze", "--germ", s(&germ), "--config", s(&cfg)]));
    assert_eq!(v["sufficiency_degree_estimate"]["degree"], 2);

    let zero = d.file("z.txt", "n: 2\nf: 0\n");
    let v = json(&run(&["analyze", "--germ", s(&zero), "--config", s(&cfg)]));
    assert!(v["diagnostic"].as_str().unwrap().contains("zero map"));
    for (_, rows) in v["verdicts"].as_object().unwrap() {
        for row in rows.as_array().unwrap() {
            assert_eq!(row["holds"], false, "{row}");
        }
    }
}

#[test]
fn analyze_in_four_variables_needs_a_seed() {
    let d = Dir::new();
    let germ = d.file("g.txt", "n: 4\nf: x*y + z*w\n");
    let o = run(&["analyze", "--germ", s(&germ)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed"));
}

#[test]
fn arcs_from_file_and_empty_list() {
    let d = Dir::new();
    let germ = d.file("g.txt", "n: 2\nf: x - y^2\n");
    let arcs = d.file("arcs.txt", "t^2; t\n");
    let cfg = d.file("c.toml", &format!("[arcs]\nfile = {:?}\n", s(&arcs)));
    let v = json(&run(&["arcs", "--germ", s(&germ), "--config", s(&cfg)]));
    assert_eq!(v["rows"][0]["ord_K"], 1);
    assert_eq!(v["rows"][0]["ord_T"], 1);

    let empty = d.file("none.txt", "# nothing\n");
    let cfg = d.file("c2.toml", &format!("[arcs]\nfile = {:?}\n", s(&empty)));
    let o = run(&["arcs", "--germ", s(&germ), "--config", s(&cfg)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["summary"]["total"], 0);

    // generated arcs are randomized
    assert_eq!(run(&["arcs", "--germ", s(&germ)]).status.code(), Some(1));
    let v = json(&run(&["arcs", "--germ", s(&germ), "--seed", "7"]));
    assert_eq!(v["summary"]["equal"], 50);
}

#[test]
fn relative_conditions_and_compatibility() {
    let d = Dir::new();
    let cfg = d.file("c.toml", "m = [1]\nr = [2]\n[relative]\nsamples_per_band = 800\n");
    let germ = d.file("g.txt", "n: 2\nf: y^2\ng: y^2 + x*y^3\n");
    let sigma = d.file("s.txt", "subspaces: [x]\n");
    let o = run(&["relative", "--germ", s(&germ), "--sigma", s(&sigma), "--config", s(&cfg), "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    let verdicts = v["verdicts"].as_array().unwrap();
    assert!(verdicts.iter().all(|x| x["holds"] == true));
    assert_eq!(v["compatibility"]["status"], "ok");
    assert_eq!(v["compatibility"]["result"]["constant"], true);

    let bad = d.file("b.txt", "n: 2\nf: y^2\ng: y^2 + x^3\n");
    let o = run(&["relative", "--germ", s(&bad), "--sigma", s(&sigma), "--config", s(&cfg), "--seed", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&o)["compatibility"]["status"], "precondition-violation");

    let origin = d.file("o.txt", "subspaces: []\n");
    let v = json(&run(&["relative", "--germ", s(&germ), "--sigma", s(&origin), "--config", s(&cfg), "--seed", "3"]));
    assert!(v["sigma"]["reduction"].as_str().unwrap().contains("non-relative"));

    let alg = d.file("a.txt", "zeros: y\n");
    let small = d.file("c3.toml", "m = [1]\nr = [2]\n[relative]\nsamples_per_band = 150\n");
    let v = json(&run(&["relative", "--germ", s(&germ), "--sigma", s(&alg), "--config", s(&small), "--seed", "3"]));
    assert_eq!(v["compatibility"]["status"], "unsupported");

    assert_eq!(run(&["relative", "--germ", s(&germ), "--sigma", s(&sigma)]).status.code(), Some(1));
}

#[test]
fn parse_errors_report_positions() {
    let d = Dir::new();
    let germ = d.file("g.txt", "n: 2\nf: x + * y\n");
    let o = run(&["analyze", "--germ", s(&germ)]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("g.txt:2:"), "{err}");

    let cfg = d.file("c.toml", "seed = 1\nbogus = 2\n");
    let o = run(&["example", "--config", s(&cfg)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("c.toml:2:"));

    let o = run(&["analyze", "--germ", s(&d.path().join("missing.txt"))]);
    assert_eq!(o.status.code(), Some(1));
}
