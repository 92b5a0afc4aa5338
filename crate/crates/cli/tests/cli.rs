use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn mixdisc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mixdisc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn gen(dir: &Path, name: &str, args: &[&str]) -> PathBuf {
    let path = dir.join(name);
    let mut all = vec!["gen"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--output", path.to_str().unwrap()]);
    let out = mixdisc(&all);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    path
}

fn write(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(v).unwrap()).unwrap();
    path
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn trace_map_fixture_has_identity_blocks() {
    let out = mixdisc(&["gen", "trace", "--rank", "3"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["r"], 3);
    assert_eq!(v["w"], 3);
    for i in 0..3 {
        for j in 0..3 {
            for a in 0..3 {
                for b in 0..3 {
                    let want = if i == j && a == b { 1.0 } else { 0.0 };
                    assert_eq!(f(&v["blocks"][i][j][a][b][0]), want);
                    assert_eq!(f(&v["blocks"][i][j][a][b][1]), 0.0);
                }
            }
        }
    }
}

#[test]
fn gen_is_deterministic() {
    let a = mixdisc(&["gen", "kraus", "--rank", "3", "--seed", "11"]);
    let b = mixdisc(&["gen", "kraus", "--rank", "3", "--seed", "11"]);
    let c = mixdisc(&["gen", "kraus", "--rank", "3", "--seed", "12"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn curvature_fixture_is_hermitian_symmetric() {
    let out = mixdisc(&[
        "gen",
        "curvature",
        "--rank",
        "3",
        "--dim",
        "3",
        "--terms",
        "4",
        "--eps",
        "0.1",
        "--seed",
        "7",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let rt: mixdisc::CurvatureTensor = serde_json::from_value(v).unwrap();
    assert!(rt.symmetry_drift() < 1e-12);
}

#[test]
fn choi_fixture_passes_certificate() {
    let out = mixdisc(&["gen", "choi"]);
    assert_eq!(code(&out), 0);
    let h: mixdisc::BlockMap = serde_json::from_slice(&out.stdout).unwrap();
    let cert = mixdisc::posmap::positivity_certificate(&h, 2000, 1);
    assert!(cert.min_eig > -1e-12, "{}", cert.min_eig);

    let out = mixdisc(&["gen", "choi", "--eps", "0.2"]);
    let h: mixdisc::BlockMap = serde_json::from_slice(&out.stdout).unwrap();
    assert!(mixdisc::posmap::positivity_certificate(&h, 2000, 1).min_eig > 0.1);
}

#[test]
fn bad_gen_parameters_are_rejected() {
    assert_eq!(
        code(&mixdisc(&["gen", "kraus", "--rank", "3", "--dim", "2"])),
        2
    );
    assert_eq!(code(&mixdisc(&["gen", "choi", "--rank", "4"])), 2);
    assert_eq!(code(&mixdisc(&["gen", "curvature", "--eps", "-1"])), 2);
    assert_eq!(code(&mixdisc(&["gen", "nonsense"])), 2);
    assert_eq!(code(&mixdisc(&["gen", "trace", "--tol", "0"])), 2);
}

#[test]
fn scaling_trace_map_is_immediate() {
    let dir = TempDir::new().unwrap();
    let t = gen(dir.path(), "t.json", &["trace", "--rank", "3"]);
    let out = mixdisc(&["scale", "--input", t.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!(f(&v["residual"]) < 1e-14);
    assert!(v["iterations"].as_u64().unwrap() <= 1);
    assert_eq!(v["converged"], true);
}

#[test]
fn scaling_random_kraus_map_converges() {
    let dir = TempDir::new().unwrap();
    let k = gen(
        dir.path(),
        "k.json",
        &["kraus", "--rank", "3", "--seed", "5"],
    );
    let out = mixdisc(&["scale", "--input", k.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!(f(&v["residual"]) < 1e-10);
    for key in ["scaled", "c1", "c2", "iterations"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn scaling_identity_map_fails_certificate() {
    let dir = TempDir::new().unwrap();
    let i = gen(dir.path(), "i.json", &["identity", "--rank", "3"]);
    let out = mixdisc(&["scale", "--input", i.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not strictly positive"));
}

#[test]
fn scaling_out_of_iterations_reports_and_exits_3() {
    let dir = TempDir::new().unwrap();
    let k = gen(
        dir.path(),
        "k.json",
        &["kraus", "--rank", "3", "--seed", "5"],
    );
    let out = mixdisc(&[
        "scale",
        "--input",
        k.to_str().unwrap(),
        "--max-iter",
        "1",
        "--tol",
        "1e-14",
    ]);
    assert_eq!(code(&out), 3);
    let v = json(&out);
    assert_eq!(v["converged"], false);
    assert_eq!(v["iterations"], 1);
}

#[test]
fn phi_all_on_trace_map_is_one() {
    let dir = TempDir::new().unwrap();
    let t = gen(dir.path(), "t.json", &["trace", "--rank", "3"]);
    let out = mixdisc(&["phi", "--input", t.to_str().unwrap(), "--method", "all"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let reports = v["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 3);
    for r in reports {
        assert!((f(&r["value"]) - 1.0).abs() < 1e-12, "{r}");
    }
}

#[test]
fn phi_methods_agree_on_normalized_maps() {
    let dir = TempDir::new().unwrap();
    for (rank, expected_methods) in [("2", 3), ("3", 3), ("4", 3)] {
        let k = gen(
            dir.path(),
            "k.json",
            &["kraus", "--rank", rank, "--seed", "3"],
        );
        let out = mixdisc(&["scale", "--input", k.to_str().unwrap()]);
        assert_eq!(code(&out), 0);
        let scaled = write(dir.path(), "n.json", &json(&out)["scaled"]);
        let out = mixdisc(&["phi", "--input", scaled.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let v = json(&out);
        assert_eq!(v["reports"].as_array().unwrap().len(), expected_methods);
        assert!(f(&v["max_diff"]) < 1e-9);
        assert!(f(&v["reports"][0]["value"]) > 0.0);
    }
}

#[test]
fn r4_report_carries_decomposition() {
    let dir = TempDir::new().unwrap();
    let t = gen(dir.path(), "t.json", &["trace", "--rank", "4"]);
    let out = mixdisc(&["phi", "--input", t.to_str().unwrap(), "--method", "r4"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["method"], "r4_decomposition");
    assert!((f(&v["value"]) - 1.0).abs() < 1e-12);
    assert!((f(&v["integral_part"]) + f(&v["q_part"]) - f(&v["value"])).abs() < 1e-12);
}

#[test]
fn integral_on_unnormalized_map_explains_residual() {
    let dir = TempDir::new().unwrap();
    let k = gen(
        dir.path(),
        "k.json",
        &["kraus", "--rank", "3", "--seed", "5"],
    );
    let out = mixdisc(&[
        "phi",
        "--input",
        k.to_str().unwrap(),
        "--method",
        "integral",
    ]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("integral") && err.contains("not normalized"),
        "{err}"
    );

    let out = mixdisc(&["phi", "--input", k.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["skipped"].as_array().unwrap().len(), 1);
}

#[test]
fn phi_accepts_curvature_input() {
    let dir = TempDir::new().unwrap();
    let c = gen(
        dir.path(),
        "c.json",
        &["curvature", "--rank", "3", "--seed", "2"],
    );
    let out = mixdisc(&["phi", "--input", c.to_str().unwrap(), "--method", "direct"]);
    assert_eq!(code(&out), 0);
    assert!(f(&json(&out)["value"]) > 0.0);
}

#[test]
fn schur_reports_form_and_certificate() {
    let dir = TempDir::new().unwrap();
    let c = gen(
        dir.path(),
        "c.json",
        &[
            "curvature",
            "--rank",
            "3",
            "--dim",
            "3",
            "--terms",
            "4",
            "--eps",
            "0.1",
            "--seed",
            "7",
        ],
    );
    let cp = c.to_str().unwrap();
    let out = mixdisc(&["schur", "--input", cp, "--partition", "3,0,0"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["partition"], serde_json::json!([3, 0, 0]));
    assert!(f(&v["weak_positivity"]["min_coeff"]) > 0.0);

    let rt: mixdisc::CurvatureTensor =
        serde_json::from_str(&std::fs::read_to_string(&c).unwrap()).unwrap();
    let cs = mixdisc::forms::chern_forms(&rt).unwrap();

    let out = mixdisc(&[
        "schur",
        "--input",
        cp,
        "--partition",
        "1,0,0",
        "--samples",
        "500",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let form: mixdisc::Form = serde_json::from_value(v["form"].clone()).unwrap();
    assert_eq!(&form, cs.get(1).unwrap());
    assert!(f(&v["weak_positivity"]["min_coeff"]) > 0.0);

    let out = mixdisc(&["schur", "--input", cp, "--partition", "2,1,0"]);
    let form: mixdisc::Form = serde_json::from_value(json(&out)["form"].clone()).unwrap();
    let c1 = cs.get(1).unwrap();
    let expected = c1
        .wedge(cs.get(2).unwrap())
        .unwrap()
        .sub(cs.get(3).unwrap())
        .unwrap();
    assert_eq!(form.max_abs_diff(&expected).unwrap(), 0.0);
}

#[test]
fn schur_rejects_bad_partitions() {
    let dir = TempDir::new().unwrap();
    let c = gen(
        dir.path(),
        "c.json",
        &["curvature", "--rank", "2", "--dim", "2"],
    );
    let cp = c.to_str().unwrap();
    for bad in ["1,2", "2,2", "x", "3"] {
        let out = mixdisc(&["schur", "--input", cp, "--partition", bad]);
        assert_eq!(code(&out), 2, "partition {bad}");
    }
}

#[test]
fn moment_matches_closed_form() {
    let dir = TempDir::new().unwrap();
    let e = |k: usize| {
        let mut m = vec![vec![serde_json::json!([0.0, 0.0]); 3]; 3];
        m[k][k] = serde_json::json!([1.0, 0.0]);
        m
    };
    let word = write(dir.path(), "w.json", &serde_json::json!([e(0), e(1)]));
    let out = mixdisc(&[
        "moment",
        "--input",
        word.to_str().unwrap(),
        "--samples",
        "200000",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!((f(&v["exact"][0]) - 1.0 / 12.0).abs() < 1e-15);
    assert!(f(&v["z_score"]) < 5.0);
}

#[test]
fn moment_rejects_mixed_dimensions() {
    let dir = TempDir::new().unwrap();
    let word = write(
        dir.path(),
        "w.json",
        &serde_json::json!([
            [[[1.0, 0.0]]],
            [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]
        ]),
    );
    assert_eq!(
        code(&mixdisc(&["moment", "--input", word.to_str().unwrap()])),
        2
    );
    assert_eq!(code(&mixdisc(&["moment"])), 2);
}

#[test]
fn verify_smoke_run_passes_quickly() {
    let start = std::time::Instant::now();
    let out = mixdisc(&["verify", "--trials", "1"]);
    assert!(start.elapsed().as_secs_f64() < 10.0);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["criteria"].as_array().unwrap().len(), 11);
    assert_eq!(mixdisc(&["verify", "--trials", "1"]).stdout, out.stdout);
}

#[test]
fn verify_names_corrupt_fixture() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"r\": 2, \"w\": 2, \"blocks\": [[").unwrap();
    let out = mixdisc(&["verify", "--trials", "1", "--input", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 4);
    let v = json(&out);
    assert_eq!(v["criteria"][0]["name"], "input fixture");
    assert_eq!(v["criteria"][0]["passed"], false);
    assert!(String::from_utf8_lossy(&out.stderr).contains("input fixture"));
}

#[test]
fn verify_checks_good_and_semidefinite_fixtures() {
    let dir = TempDir::new().unwrap();
    let k = gen(
        dir.path(),
        "k.json",
        &["kraus", "--rank", "3", "--seed", "9"],
    );
    let out = mixdisc(&["verify", "--trials", "1", "--input", k.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["criteria"][0]["passed"], true);

    let i = gen(dir.path(), "i.json", &["identity", "--rank", "3"]);
    let out = mixdisc(&["verify", "--trials", "1", "--input", i.to_str().unwrap()]);
    assert_eq!(code(&out), 4);
}

#[test]
fn verify_rejects_zero_trials() {
    assert_eq!(code(&mixdisc(&["verify", "--trials", "0"])), 2);
}

#[test]
fn output_flag_writes_file() {
    let dir = TempDir::new().unwrap();
    let path = gen(dir.path(), "t.json", &["trace", "--rank", "2"]);
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(
        text,
        String::from_utf8(mixdisc(&["gen", "trace", "--rank", "2"]).stdout).unwrap()
    );
    let out = mixdisc(&["gen", "trace", "--output", "/nonexistent-dir/x.json"]);
    assert_eq!(code(&out), 2);
}
