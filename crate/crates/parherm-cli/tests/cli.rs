//! End-to-end tests of the `parherm` binary: exit-code contract, JSON
//! round-trips, and the worked 3x3 Laurent example through every subcommand.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use parherm::rmatrix::Pencil;
use parherm::verify::strip_weight;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_parherm"))
}

fn tmp(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process terminated by signal")
}

/// 1/z + 2 + z as interchange JSON.
fn laurent_r_json() -> String {
    [
        r#"{"m":1,"n":1,"#,
        r#""poly":[{"rows":1,"cols":1,"data":[[2.0,0.0]]},"#,
        r#"{"rows":1,"cols":1,"data":[[1.0,0.0]]}],"#,
        r#""poles":[{"lambda":[0.0,0.0],"#,
        r#""coeffs":[{"rows":1,"cols":1,"data":[[1.0,0.0]]}]}]}"#,
    ]
    .concat()
}

fn linearized_laurent(name: &str) -> PathBuf {
    let rpath = tmp(&format!("{name}_r.json"));
    write(&rpath, &laurent_r_json());
    let out = run(&["linearize", rpath.to_str().unwrap(), "--method", "laurent"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let ppath = tmp(&format!("{name}_p.json"));
    std::fs::write(&ppath, &out.stdout).unwrap();
    ppath
}

#[test]
fn linearize_matches_worked_pencil_and_reparses() {
    let ppath = linearized_laurent("worked");
    let text = std::fs::read_to_string(&ppath).unwrap();
    let p: Pencil = serde_json::from_str(&text).unwrap();
    assert_eq!(p.state_dim, 2);
    let m1: Vec<f64> = (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .map(|(i, j)| p.m1[(i, j)].re)
        .collect();
    assert_eq!(m1, vec![0.0, -1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 2.0]);
    // Bit-exact round trip of the printed form.
    let v1: Value = serde_json::from_str(&text).unwrap();
    let v2: Value = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
    assert_eq!(v1, v2);
}

#[test]
fn verify_passes_and_is_pure() {
    let ppath = linearized_laurent("verify");
    let rpath = tmp("verify_r.json");
    let a = run(&["verify", ppath.to_str().unwrap(), rpath.to_str().unwrap()]);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stdout));
    let report = stdout_json(&a);
    assert_eq!(report["structure"]["deviation"].as_f64(), Some(0.0));
    assert_eq!(report["transfer"]["points_tested"].as_i64(), Some(20));
    assert!(report["symmetry"]["unpaired"].as_array().unwrap().is_empty());
    let b = run(&["verify", ppath.to_str().unwrap(), rpath.to_str().unwrap()]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_rejects_weight_stripped_pencil() {
    let ppath = linearized_laurent("strip");
    let p: Pencil = serde_json::from_str(&std::fs::read_to_string(&ppath).unwrap()).unwrap();
    let bad = strip_weight(&p).unwrap();
    let bpath = tmp("strip_bad.json");
    write(&bpath, &serde_json::to_string(&bad).unwrap());
    let rpath = tmp("strip_r.json");
    let out = run(&["verify", bpath.to_str().unwrap(), rpath.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let report = stdout_json(&out);
    assert_eq!(report["transfer"]["passed"].as_bool(), Some(false));
}

#[test]
fn generate_is_deterministic_and_verifies() {
    let args = [
        "generate", "--n", "2", "--m", "2", "--kind", "skew", "--seed", "11", "--alpha", "0.6,0.8",
    ];
    let a = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, run(&args).stdout);
    let v = stdout_json(&a);
    let rpath = tmp("gen_r.json");
    let ppath = tmp("gen_p.json");
    write(&rpath, &v["r"].to_string());
    write(&ppath, &v["pencil"].to_string());
    let out = run(&[
        "verify",
        ppath.to_str().unwrap(),
        rpath.to_str().unwrap(),
        "--alpha",
        "0.6,0.8",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let report = stdout_json(&out);
    assert_eq!(report["kind"].as_str(), Some("skew"));
    assert_eq!(report["structure"]["deviation"].as_f64(), Some(0.0));
}

#[test]
fn orders_reproduce_worked_recoveries() {
    let ppath = linearized_laurent("orders");
    let p = ppath.to_str().unwrap();
    let cases = [
        ("-1", "of-weighted", vec![3i64]),
        ("-1", "of-r", vec![2]),
        ("inf", "of-weighted", vec![-2]),
        ("inf", "of-r", vec![-1]),
    ];
    for (at, target, want) in cases {
        let out = run(&["orders", p, "--at", at, "--recover", target]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let v = stdout_json(&out);
        let got: Vec<i64> = v["recovered"]["orders"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_i64().unwrap())
            .collect();
        assert_eq!(got, want, "at {at} target {target}");
    }
}

#[test]
fn eigs_cluster_triple_eigenvalue() {
    let ppath = linearized_laurent("eigs");
    let out = run(&["eigs", ppath.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    let clusters = v["clusters"].as_array().unwrap();
    assert_eq!(clusters.len(), 1);
    assert_eq!(clusters[0]["multiplicity"].as_i64(), Some(3));
    let val = clusters[0]["value"].as_array().unwrap();
    assert!((val[0].as_f64().unwrap() + 1.0).abs() < 1e-10);
    assert_eq!(v["infinite_count"].as_i64(), Some(0));
}

#[test]
fn decompose_and_realize_chain() {
    let rpath = tmp("chain_r.json");
    // 1/(z - 1/4) - 4z/(z - 4) - 3: off-circle pole pair plus constant.
    write(
        &rpath,
        r#"{"m":1,"n":1,"poly":[{"rows":1,"cols":1,"data":[[-3.0,0.0]]}],
            "poles":[{"lambda":[0.25,0.0],"coeffs":[{"rows":1,"cols":1,"data":[[1.0,0.0]]}]},
                     {"lambda":[4.0,0.0],"coeffs":[{"rows":1,"cols":1,"data":[[-16.0,0.0]]}]}]}"#,
    );
    let out = run(&["decompose", rpath.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    let stable = v["r_in"].clone();
    assert_eq!(stable["poles"].as_array().unwrap().len(), 1);
    let spath = tmp("chain_stable.json");
    write(&spath, &stable.to_string());
    let out = run(&["realize", spath.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let v = stdout_json(&out);
    assert_eq!(v["realization"]["A1"]["rows"].as_i64(), Some(1));
}

#[test]
fn exit_two_on_malformed_json_and_missing_file() {
    let bad = tmp("bad.json");
    write(&bad, "{not json");
    let out = run(&["linearize", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("malformed JSON"));
    let out = run(&["linearize", tmp("does_not_exist.json").to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let out = run(&["frobnicate"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn exit_one_with_serialized_error_on_unstructured_input() {
    let rpath = tmp("unstructured.json");
    write(
        &rpath,
        r#"{"m":1,"n":1,"poly":[],
            "poles":[{"lambda":[0.5,0.0],"coeffs":[{"rows":1,"cols":1,"data":[[1.0,0.0]]}]}]}"#,
    );
    let out = run(&["linearize", rpath.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let v = stdout_json(&out);
    assert_eq!(v["kind"].as_str(), Some("StructureMismatch"));
}

#[test]
fn env_var_overrides_default_tolerance() {
    let ppath = linearized_laurent("envtol");
    let rpath = tmp("envtol_r.json");
    let default_run = run(&["verify", ppath.to_str().unwrap(), rpath.to_str().unwrap()]);
    assert_eq!(code(&default_run), 0);
    // An absurdly tight default makes the same verification fail on the
    // floating-point transfer residual; the flag has priority over the env.
    let tight = bin()
        .args(["verify", ppath.to_str().unwrap(), rpath.to_str().unwrap()])
        .env("PARHERM_TOL", "1e-18")
        .output()
        .unwrap();
    assert_eq!(code(&tight), 1);
    let flagged = bin()
        .args([
            "verify",
            ppath.to_str().unwrap(),
            rpath.to_str().unwrap(),
            "--tol",
            "1e-9",
        ])
        .env("PARHERM_TOL", "1e-18")
        .output()
        .unwrap();
    assert_eq!(code(&flagged), 0);
}

#[test]
fn sweep_subcommand_batches() {
    let out = run(&[
        "sweep",
        "--instances",
        "4",
        "--max-state",
        "2",
        "--max-io",
        "2",
        "--seed",
        "5",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let v = stdout_json(&out);
    assert_eq!(v["passed"].as_i64(), Some(4));
    assert_eq!(v["failed"].as_i64(), Some(0));
}
