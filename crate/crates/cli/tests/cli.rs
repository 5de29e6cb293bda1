use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cleaved")).args(args).output().expect("spawn")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn algebra_census() {
    let o = run(&["algebra", "2"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("vertices 12\n"), "{s}");
    assert!(s.contains("edges 44 "), "{s}");
    let o = run(&["algebra", "1", "--edges"]);
    let s = stdout(&o);
    assert_eq!(s.lines().filter(|l| l.starts_with("edge ")).count(), 2);
}

#[test]
fn reduce_trefoil_table() {
    let o = run(&["reduce", "--certify", &fixture("trefoil.tangle")]);
    assert!(o.status.success());
    let s = stdout(&o);
    let gens: Vec<&str> = s.lines().filter(|l| l.starts_with("gen ")).collect();
    assert_eq!(gens.len(), 6, "{s}");
    for g in ["(-3,-15/2)", "(-3,-17/2)", "(-2,-11/2)", "(-2,-13/2)", "(0,-3/2)", "(0,-5/2)"] {
        assert!(gens.iter().any(|l| l.contains(g)), "{g} missing in {s}");
    }
    assert!(s.contains("2*R.dec(1)"), "{s}");
    assert_eq!(s.lines().filter(|l| l.ends_with(": certified")).count(), 12);
}

#[test]
fn reidemeister_pairs_compare_equal() {
    for (a, b) in [("ri_before", "ri_after"), ("rii_before", "rii_after"), ("riii_before", "riii_after")] {
        let o = run(&["compare", &fixture(&format!("{a}.tangle")), &fixture(&format!("{b}.tangle"))]);
        assert!(o.status.success(), "{a}/{b}: {}", stdout(&o));
        assert!(stdout(&o).lines().all(|l| l.starts_with('#')), "{}", stdout(&o));
    }
}

#[test]
fn different_tangles_compare_unequal() {
    let o = run(&["compare", &fixture("t1.tangle"), &fixture("trefoil.tangle")]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn serialized_structures_are_accepted() {
    let dir = std::env::temp_dir().join(format!("cleaved-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let d = stdout(&run(&["delta", &fixture("t2.tangle")]));
    let good = dir.join("t2.d");
    std::fs::write(&good, &d).unwrap();
    assert!(run(&["verify", good.to_str().unwrap()]).status.success());
    let o = run(&["compare", good.to_str().unwrap(), &fixture("t2.tangle")]);
    assert!(o.status.success());
    // doubling one sign-change coefficient breaks the identity
    let broken = d.replacen("-> 1*L.dec(2)", "-> 2*L.dec(2)", 1);
    assert_ne!(broken, d);
    let bad = dir.join("t2-broken.d");
    std::fs::write(&bad, broken).unwrap();
    let o = run(&["verify", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn output_is_deterministic_across_runs_and_threads() {
    let f = fixture("riii_after.tangle");
    let a = run(&["reduce", &f]);
    let b = run(&["--threads", "4", "reduce", &f]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(run(&["delta", &f]).stdout, run(&["--threads", "3", "delta", &f]).stdout);
}

#[test]
fn json_output_parses() {
    let o = run(&["--json", "reduce", &fixture("trefoil.tangle")]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["generators"].as_array().unwrap().len(), 6);
    assert_eq!(v["generators"][0]["grading"]["q"], "-15/2");
    let o = run(&["--json", "algebra", "2"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["edges"], 44);
}

#[test]
fn errors_exit_with_two() {
    let o = run(&["--bogus", "selftest"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["verify", "/definitely/not/here.tangle"]);
    assert_eq!(o.status.code(), Some(2));
    let dir = std::env::temp_dir().join(format!("cleaved-cli-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("odd.tangle");
    std::fs::write(&bad, "boundary 2\ncrossing c1 a b c\n").unwrap();
    let o = run(&["verify", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("odd.tangle") && err.contains("line 2"), "{err}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn length_guard_fails_fast() {
    let o = run(&["--max-len-guard", "verify-algebra", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("undecided length"));
    assert!(run(&["verify-algebra", "2"]).status.success());
}

#[test]
fn selftest_passes_with_a_seed() {
    let o = Command::new(env!("CARGO_BIN_EXE_cleaved")).arg("selftest").env("CLEAVED_SEED", "11").output().unwrap();
    assert!(o.status.success(), "{}", stdout(&o));
    let s = stdout(&o);
    assert!(s.starts_with("selftest (seed 11)"));
    assert_eq!(s.lines().filter(|l| l.starts_with("[PASS]") || l.starts_with("[FAIL]")).count(), 9);
}
