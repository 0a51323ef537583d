use std::process::{Command, Output};

use serde_json::Value;
use toroidal_core::census::{parse_report, Verdict};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_toroidal-census"));
    c.env_remove("TOROIDAL_CENSUS_OUT");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn zero_timings(v: &mut Value) {
    match v {
        Value::Object(m) => {
            for (k, x) in m.iter_mut() {
                if k == "timing_us" {
                    *x = Value::from(0);
                } else {
                    zero_timings(x);
                }
            }
        }
        Value::Array(xs) => xs.iter_mut().for_each(zero_timings),
        _ => {}
    }
}

#[test]
fn passing_section_exits_zero() {
    let o = run(&["verify", "--section", "abelian"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("abelian.noether"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn injected_fault_exits_one() {
    let o = run(&["verify", "--section", "abelian", "--format", "json", "--inject-fault", "abelian.noether"]);
    assert_eq!(code(&o), 1);
    let r = parse_report(&o.stdout).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    assert_eq!(r.check("abelian.noether").unwrap().verdict, Verdict::Fail);
    assert_eq!(r.check("abelian.profiles").unwrap().verdict, Verdict::Pass);
}

#[test]
fn exhausted_coset_bound_exits_two() {
    let o = run(&["cosets", "--subgroup", "delta54", "--max-cosets", "10"]);
    assert_eq!(code(&o), 2);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "INCONCLUSIVE");
    assert_eq!(v["bound"], 10);

    let o = run(&["verify", "--section", "parabolic", "--max-cosets", "10"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn coset_indices() {
    for (s, idx) in [("delta6", 6), ("delta18a", 18), ("delta18b", 18), ("delta54", 54)] {
        let o = run(&["cosets", "--subgroup", s]);
        assert_eq!(code(&o), 0, "{s}");
        let v: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["index"], idx, "{s}");
        assert_eq!(v["verdict"], "PASS");
    }
}

#[test]
fn usage_errors_exit_three() {
    for args in [
        &["cosets", "--subgroup", "delta7"][..],
        &["verify", "--section", "nowhere"],
        &["verify", "--max-cosets", "0"],
        &["search", "good-config", "--lattice", "hexagonal"],
        &["frobnicate"],
    ] {
        let o = run(args);
        assert_eq!(code(&o), 3, "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn unwritable_output_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, b"x").unwrap();
    let target = blocker.join("report.json");
    let o = run(&["cosets", "--subgroup", "delta6", "-o", target.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
}

#[test]
fn report_round_trips_and_is_deterministic() {
    let a = run(&["report", "--format", "json"]);
    let b = run(&["report", "--format", "json"]);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(code(&b), 0);

    let ra = parse_report(&a.stdout).unwrap();
    let rb = parse_report(&b.stdout).unwrap();
    assert_eq!(ra.verdict, Verdict::Pass);
    assert!(ra.unresolved_citations().is_empty(), "{:?}", ra.unresolved_citations());
    assert_eq!(ra.digest, ra.compute_digest());
    assert_eq!(ra.digest, rb.digest);

    let (mut va, mut vb): (Value, Value) = (serde_json::from_slice(&a.stdout).unwrap(), serde_json::from_slice(&b.stdout).unwrap());
    zero_timings(&mut va);
    zero_timings(&mut vb);
    assert_eq!(serde_json::to_vec(&va).unwrap(), serde_json::to_vec(&vb).unwrap());

    // Round trip through the typed report.
    let again = serde_json::to_value(&ra).unwrap();
    let mut orig: Value = serde_json::from_slice(&a.stdout).unwrap();
    let mut again = again;
    zero_timings(&mut orig);
    zero_timings(&mut again);
    assert_eq!(orig, again);
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin().env("TOROIDAL_CENSUS_OUT", dir.path()).args(["cosets", "--subgroup", "delta18a"]).output().unwrap();
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_slice(&std::fs::read(dir.path().join("cosets-delta18a.json")).unwrap()).unwrap();
    assert_eq!(v["index"], 18);

    // An explicit --output wins over the environment.
    let explicit = dir.path().join("nested").join("verify.txt");
    let o = bin()
        .env("TOROIDAL_CENSUS_OUT", dir.path())
        .args(["verify", "--section", "examples", "-o", explicit.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(std::fs::read_to_string(&explicit).unwrap().contains("examples.distinctness"));
}

#[test]
fn good_config_search() {
    let o = run(&["search", "good-config", "--lattice", "eisenstein"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["classes"].as_array().unwrap().len(), 1);
    for lattice in ["gaussian", "generic"] {
        let o = run(&["search", "good-config", "--lattice", lattice]);
        let v: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert!(v["classes"].as_array().unwrap().is_empty(), "{lattice}");
    }
}

#[test]
fn verbose_timings_go_to_stderr() {
    let o = run(&["-v", "verify", "--section", "abelian", "--format", "json"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("abelian.singularities"));
    parse_report(&o.stdout).unwrap();
}
