use std::process::{Command, Output};

use serde_json::Value;

fn levyfield(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_levyfield"))
        .args(args)
        .env("LEVYFIELD_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn indices_for_white_noise_and_brownian_motion() {
    let out = levyfield(&["indices", "--process", "brownian", "--noise", "white"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    for k in ["iota_u", "iota_m", "iota_l"] {
        assert!((r["result"][k].as_f64().unwrap() - 0.5).abs() < 1e-12, "{k}");
    }
    assert_eq!(r["result"]["dalang"]["finite"], true);
    assert_eq!(r["result"]["lemma31"]["positivity_agree"], true);
}

#[test]
fn divergent_dalang_is_a_violation() {
    let out = levyfield(&["indices", "--process", "brownian", "--dim", "2", "--noise", "white"]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["passed"], false);
    assert_eq!(r["violations"][0], "dalang");
}

#[test]
fn unknown_key_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("model.json");
    std::fs::write(&file, r#"{"process": {"kind": "brownian"}, "sigm": {"kind": "zero"}}"#).unwrap();
    let out = levyfield(&["simulate", "--model-config", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sigm"));
}

#[test]
fn bad_flags_exit_with_two() {
    assert_eq!(levyfield(&["density", "--process", "stable:3"]).status.code(), Some(2));
    assert_eq!(levyfield(&["indices", "--noise", "pink"]).status.code(), Some(2));
    assert_eq!(levyfield(&["verify-lemma", "9.9"]).status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_levyfield"))
        .args(["dalang", "--noise", "white"])
        .env("LEVYFIELD_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lemma25_on_brownian_motion() {
    let out = levyfield(&["verify-lemma", "2.5", "--process", "brownian"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    let entries = r["result"]["entries"].as_array().unwrap();
    let names: Vec<&str> = entries.iter().map(|e| e["process"].as_str().unwrap()).collect();
    for p in ["cauchy", "stable:1.5", "tempered_stable:1.5:1", "brownian"] {
        assert!(names.contains(&p), "{p}");
    }
    for e in entries {
        assert!(e["fitted_C"].as_f64().unwrap() >= 1.0);
    }
}

#[test]
fn density_csv_and_json() {
    let out = levyfield(&["density", "--process", "cauchy", "--t", "1", "--emit", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("x,p\n"));
    let out = levyfield(&["density", "--process", "cauchy", "--t", "1", "--h", "0.1"]);
    let r = json(&out);
    let p0 = r["result"]["value_at_origin"].as_f64().unwrap();
    assert!((p0 - std::f64::consts::FRAC_1_PI).abs() < 1e-6);
    assert!(r["result"]["l1_increment_space"]["value"].as_f64().unwrap() < 2.0);
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let out_dir = dir.path().join(sub);
        let args = [
            "moments",
            "--process",
            "stable:1.5",
            "--kappa0",
            "0.5",
            "--t-grid",
            "0.5,1",
            "--replicas",
            "20000",
            "--seed",
            "7",
            "--out",
            out_dir.to_str().unwrap(),
        ];
        let out = levyfield(&args);
        assert_eq!(out.status.code(), Some(0));
        (out.stdout, std::fs::read(out_dir.join("moments.json")).unwrap())
    };
    let (a, fa) = run("a");
    let (b, fb) = run("b");
    assert_eq!(a, b);
    assert_eq!(fa, fb);
    assert_eq!(a, fa);
    assert!(dir.path().join("a/moments.meta.json").exists());
    let r: Value = serde_json::from_slice(&a).unwrap();
    let row = &r["result"]["estimates"][0];
    for k in ["t", "kappa0", "mc_value", "mc_stderr", "integral_bound", "fitted_C"] {
        assert!(row.get(k).is_some(), "{k}");
    }
}

#[test]
fn simulate_then_holder() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let sim = levyfield(&[
        "simulate", "--T", "0.2", "--dt", "1e-3", "--N", "1024", "--L", "8", "--replicas", "24", "--seed", "3",
        "--record-every", "10", "--out", out_dir,
    ]);
    assert_eq!(sim.status.code(), Some(0), "{}", String::from_utf8_lossy(&sim.stderr));
    let r = json(&sim);
    assert_eq!(r["result"]["replicas"], 24);
    assert_eq!(r["result"]["zero_mode"], "limit");
    let paths = dir.path().join("paths");
    assert_eq!(std::fs::read_dir(&paths).unwrap().count(), 24);

    let paths = paths.to_str().unwrap();
    let too_few = levyfield(&["holder", "--paths-dir", paths, "--direction", "space"]);
    assert_eq!(too_few.status.code(), Some(1));
    let ok = levyfield(&[
        "holder", "--paths-dir", paths, "--direction", "space", "--orders", "2", "--min-replicas", "20",
    ]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    let h = json(&ok);
    let e = h["result"]["fits"][0]["exponent"].as_f64().unwrap();
    assert!(e > 0.3 && e < 0.7, "{e}");
}
