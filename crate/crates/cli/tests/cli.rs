use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_toric-morse")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned(), String::from_utf8_lossy(&out.stderr).into_owned())
}

#[test]
fn homs_bl2_one_generator_two_rejected() {
    let (code, out, _) = run(&["homs", "--surface", "bl2", "--from", "0,0,0", "--to", "0,-1,1", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["generators"].as_array().unwrap().len(), 1);
    assert_eq!(v["generators"][0]["carrier"], serde_json::json!(["E1", "E5"]));
    let rej = v["rejected"].as_array().unwrap();
    assert_eq!(rej.len(), 2);
    assert!(rej.iter().all(|r| r["reason"].as_str().unwrap().starts_with("M2")));
}

#[test]
fn homs_bl3_three_edges() {
    let (code, out, _) = run(&["homs", "--surface", "bl3", "--from", "0,0,0,0", "--to", "0,0,0,1"]);
    assert_eq!(code, 0);
    for e in ["E2", "E6", "E4"] {
        assert!(out.lines().any(|l| l.contains("generator") && l.contains(&format!("  {e}  "))), "{out}");
    }
}

#[test]
fn identity_hom() {
    let (code, out, _) = run(&["homs", "--surface", "bl2", "--from", "0,0,0", "--to", "0,0,0"]);
    assert_eq!(code, 0);
    assert!(out.contains("generator  I=(0,0)  P  degree 0"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["homs", "--surface", "bl2", "--from", "0,0", "--to", "0,0,0"]).0, 2);
    assert_eq!(run(&["homs", "--surface", "nowhere", "--from", "0,0,0", "--to", "0,0,0"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
}

#[test]
fn compose_prints_exact_weight() {
    let (code, out, _) = run(&["compose", "--surface", "bl2"]);
    assert_eq!(code, 0);
    let line = out.lines().skip_while(|l| !l.starts_with("(0,0,0) → (0,0,1) → (0,0,2)")).find(|l| l.contains("Z(1,0) ⊗ W(0,1)")).unwrap();
    assert!(line.contains("V(1,1)") && line.contains("1/2 (kappa = log 2)") && line.contains("0.500000000000"), "{line}");
}

#[test]
fn compose_json_is_deterministic_and_svgs_are_written() {
    let dir = std::env::temp_dir().join(format!("toric-morse-svg-{}", std::process::id()));
    let a = run(&["compose", "--surface", "bl3", "--format", "json", "--svg-dir", dir.to_str().unwrap()]);
    let b = run(&["compose", "--surface", "bl3", "--format", "json", "--sequential"]);
    assert_eq!(a.0, 0);
    assert_eq!(a.1, b.1);
    let v: serde_json::Value = serde_json::from_str(&a.1).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 10);
    let svgs: Vec<_> = std::fs::read_dir(&dir).unwrap().collect();
    assert_eq!(svgs.len(), 10);
    let body = std::fs::read_to_string(dir.join("compose_0_4_5.svg")).unwrap();
    assert!(body.starts_with("<svg") && body.contains("marker-end"));
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn verify_presets_pass() {
    for s in ["bl2", "bl3", "cp2"] {
        let (code, out, err) = run(&["verify", "--surface", s]);
        assert_eq!(code, 0, "{s}: {out}{err}");
        assert_eq!(out.matches("PASS").count(), 4);
    }
}

#[test]
fn verify_reports_failure_with_exit_one() {
    let path = std::env::temp_dir().join(format!("toric-morse-coll-{}.json", std::process::id()));
    std::fs::write(&path, "[[0,0,1],[0,0,0]]").unwrap();
    let (code, _, err) = run(&["verify", "--surface", "bl2", "--collection", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code, 1, "{err}");
    assert!(err.contains("exceptionality"));
}
