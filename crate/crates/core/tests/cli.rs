use std::path::PathBuf;
use std::process::{Command, Output};

fn shid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shid"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("shid-{}-{name}", std::process::id()))
}

#[test]
fn bernoulli_prints_the_polynomial() {
    let o = shid(&["bernoulli", "--p", "3", "--q", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1/3*x^3 + 2/3*x\n");
    let neg = shid(&["bernoulli", "--p", "-1", "--q", "2"]);
    assert_eq!(neg.status.code(), Some(0));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["verify", "--ell", "1"][..],
        &["bernoulli", "--p", "-1", "--q", "0"],
        &["bernoulli", "--p", "-2", "--q", "0"],
        &["oracle", "charpoly", "--ell", "2", "--q", "3"],
        &["oracle", "charpoly", "--ell", "2", "--q", "9"],
        &["basis"],
        &["frobnicate"],
        &["verify", "--ell", "2", "--format", "yaml"],
    ] {
        assert_eq!(shid(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn checks_exit_zero_when_they_hold() {
    assert_eq!(shid(&["verify", "--ell", "3"]).status.code(), Some(0));
    assert_eq!(shid(&["lemmas", "--ell", "3"]).status.code(), Some(0));
    assert_eq!(
        shid(&["oracle", "dims", "--ell", "2", "--max-degree", "3"])
            .status
            .code(),
        Some(0)
    );
    let det = shid(&["det", "--ell", "2"]);
    assert_eq!(det.status.code(), Some(0));
    assert_eq!(
        stdout(&det),
        "1 * (x1 - x2 - z) * (x1 - x2) * (x1 + x2 - z) * (x1 + x2)\n"
    );
}

#[test]
fn json_output_is_stable() {
    let args = ["verify", "--ell", "3", "--format", "json"];
    let a = shid(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_shid"))
        .args(args)
        .env("RAYON_NUM_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(stdout(&a).starts_with(r#"{"ell":3,"forms":["#));
    assert_eq!(v["full_det_constant"], "-1/3");
    assert_eq!(v["failures"], serde_json::json!([]));
}

#[test]
fn euler_derivation_json() {
    let o = shid(&["basis", "--ell", "2", "--format", "json"]);
    let text = stdout(&o);
    assert!(
        text.starts_with(r#"[{"ell":2,"name":"euler","coeffs":{"x1":[[[1,0,0],"1","1"]],"#),
        "{text}"
    );
}

#[test]
fn exported_basis_reverifies_identically() {
    for ell in ["2", "3", "4"] {
        let file = scratch(&format!("basis-{ell}.json"));
        let f = file.to_str().unwrap();
        assert_eq!(
            shid(&["basis", "--ell", ell, "--format", "json", "--out", f])
                .status
                .code(),
            Some(0)
        );
        let from_file = shid(&["verify", "--basis", f, "--format", "json"]);
        let direct = shid(&["verify", "--ell", ell, "--format", "json"]);
        std::fs::remove_file(&file).ok();
        assert_eq!(from_file.status.code(), Some(0));
        assert_eq!(from_file.stdout, direct.stdout, "l={ell}");
    }
}

#[test]
fn a_tampered_basis_fails_with_status_one() {
    let file = scratch("tampered.json");
    let f = file.to_str().unwrap();
    shid(&["basis", "--ell", "2", "--format", "json", "--out", f]);
    let text = std::fs::read_to_string(&file).unwrap();
    // flip the sign of one x2 * z term
    let bad = text.replacen(r#"[[0,1,1],"-1","1"]]"#, r#"[[0,1,1],"1","1"]]"#, 1);
    assert_ne!(bad, text);
    std::fs::write(&file, bad).unwrap();
    let o = shid(&["verify", "--basis", f]);
    std::fs::remove_file(&file).ok();
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("saito: FAILED"));
}
