use serde_json::Value;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_singular-heat"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn read_csv(path: &Path) -> Vec<[f64; 3]> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,beta,err"));
    lines
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            [v[0], v[1], v[2]]
        })
        .collect()
}

const CLASSICAL: &str = r#"{"problem":"interval","bc":"dirichlet","alpha1":0,"alpha2":0,"profile":{"kind":"power"},"tmin":1e-6,"tmax":1e-2,"num":40}"#;

const ROBIN: &str = r#"{"problem":"interval","bc":"robin","alpha1":0.3,"alpha2":0.4,"c":0.5,
  "profile":{"kind":"tapered","order":6,"right_amplitude":0.5},"tmin":1e-6,"tmax":1e-2,"num":40}"#;

#[test]
fn coeffs_real_pair() {
    let o = run(&["coeffs", "--alpha1", "0.3", "--alpha2", "0.4", "--bc", "robin"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    for nu in 0..20 {
        assert!(v[format!("eps{nu}")].is_array(), "eps{nu}");
    }
    assert_eq!(v["eps13"], serde_json::json!([0.0, 0.0]));
    assert!((v["eps0"][0].as_f64().unwrap() + 1.2177607218320594706).abs() < 1e-14);
}

#[test]
fn coeffs_complex_pair() {
    let o = run(&["coeffs", "--alpha1", "0.3,0.2", "--alpha2", "0.4,-0.1", "--bc", "robin"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    for nu in 0..20 {
        let e = v[format!("eps{nu}")].as_array().unwrap();
        assert!(e.iter().all(|x| x.as_f64().unwrap().is_finite()));
    }
}

#[test]
fn coeffs_inadmissible_and_malformed() {
    let o = run(&["coeffs", "--alpha1", "0.5", "--alpha2", "0.5", "--bc", "dirichlet"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("admissible"));
    assert_eq!(
        code(&run(&[
            "coeffs",
            "--alpha1",
            "x",
            "--alpha2",
            "0.5",
            "--bc",
            "dirichlet"
        ])),
        2
    );
    assert_eq!(
        code(&run(&[
            "coeffs",
            "--alpha1",
            "-0.5",
            "--alpha2",
            "0.2",
            "--bc",
            "dirichlet"
        ])),
        0
    );
}

#[test]
fn json_numbers_have_seventeen_digits() {
    let o = run(&["coeffs", "--alpha1", "0.3", "--alpha2", "0.4", "--bc", "dirichlet"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("[2.9999999999999999e-1,0.0000000000000000e0]"), "{text}");
}

#[test]
fn simulate_classical_interval() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"problem":"interval","bc":"dirichlet","alpha1":0,"alpha2":0,"profile":{"kind":"power"},"times":[0.001,0.01,0.05]}"#,
    );
    let out = dir.path().join("c.csv");
    let o = run(&["simulate", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_csv(&out);
    assert_eq!(rows.len(), 3);
    for [t, b, e] in rows {
        assert!((b - (PI - 4.0 / PI.sqrt() * t.sqrt())).abs() <= 1e-9);
        assert!(e >= 0.0);
    }
}

#[test]
fn simulate_halfline_is_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "h.json",
        r#"{"problem":"halfline","bc":"dirichlet","alpha1":0.3,"alpha2":0.4,"profile":{"kind":"cutoff","cutoff_radius":1.0},"tmin":1e-5,"tmax":1e-1,"num":8}"#,
    );
    let out = dir.path().join("h.csv");
    assert_eq!(
        code(&run(&[
            "simulate",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap()
        ])),
        0
    );
    let rows = read_csv(&out);
    assert_eq!(rows.len(), 8);
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0] && w[1][1] < w[0][1]));
}

#[test]
fn simulate_warped_and_circle_product_scale_interval() {
    let dir = tempfile::tempdir().unwrap();
    let base = r#""bc":"robin","alpha1":0.3,"alpha2":0.4,"profile":{"kind":"tapered"},"times":[0.001,0.01]"#;
    let cases = [
        ("i", format!(r#"{{"problem":"interval","c":0.5,{base}}}"#)),
        (
            "w",
            format!(r#"{{"problem":"warped","warp":{{"fprime":[0.25,0.75],"fsecond":[0,0]}},{base}}}"#),
        ),
        (
            "p",
            format!(
                r#"{{"problem":"circle-product","c":0.5,"circle":{{"phi":{{"cos":[1,0.5]}},"rho":{{"cos":[2,1]}}}},{base}}}"#
            ),
        ),
    ];
    let mut results = Vec::new();
    for (name, text) in &cases {
        let cfg = write(dir.path(), &format!("{name}.json"), text);
        let out = dir.path().join(format!("{name}.csv"));
        let o = run(&["simulate", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{name}: {}", String::from_utf8_lossy(&o.stderr));
        results.push(read_csv(&out));
    }
    for k in 0..2 {
        let (t, b) = (results[0][k][0], results[0][k][1]);
        let w = results[1][k][1] / (2.0 * PI).powi(2);
        assert!((w - b).abs() <= 1e-13 * b.abs());
        let circle = 2.0 * PI * 2.0 + PI * (-t).exp() * 0.5;
        assert!((results[2][k][1] - circle * b).abs() <= 1e-13 * (circle * b).abs());
    }
}

#[test]
fn simulate_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let missing = dir.path().join("missing.json");
    assert_eq!(
        code(&run(&[
            "simulate",
            missing.to_str().unwrap(),
            "--out",
            out.to_str().unwrap()
        ])),
        2
    );
    for (i, text) in [
        "{not json",
        r#"{"problem":"interval","bc":"dirichlet","alpha1":1.2,"alpha2":0,"times":[0.1]}"#,
        r#"{"problem":"interval","bc":"dirichlet","alpha1":0,"alpha2":0,"times":[0.1,0.01]}"#,
        r#"{"problem":"interval","bc":"dirichlet","alpha1":0,"alpha2":0}"#,
        r#"{"problem":"warped","bc":"robin","alpha1":0,"alpha2":0,"times":[0.1]}"#,
        r#"{"problem":"interval","bc":"robin","alpha1":0,"alpha2":0,"times":[0.1],"extra":1}"#,
    ]
    .iter()
    .enumerate()
    {
        let cfg = write(dir.path(), &format!("bad{i}.json"), text);
        let o = run(&["simulate", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 2, "case {i}: {}", String::from_utf8_lossy(&o.stderr));
    }
    assert!(!out.exists());
}

#[test]
fn simulate_truncation_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "t.json",
        r#"{"problem":"interval","bc":"dirichlet","alpha1":0,"alpha2":0,"profile":{"kind":"power"},"times":[1e-10]}"#,
    );
    let out = dir.path().join("t.csv");
    assert_eq!(
        code(&run(&[
            "simulate",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap()
        ])),
        3
    );
}

#[test]
fn simulate_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "r.json", ROBIN);
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let out = dir.path().join(format!("r{threads}.csv"));
        let o = bin()
            .env("SINGULAR_HEAT_THREADS", threads)
            .args(["simulate", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
            .output()
            .unwrap();
        assert_eq!(code(&o), 0);
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

fn simulate_to(dir: &Path, name: &str, cfg_text: &str) -> (PathBuf, PathBuf) {
    let cfg = write(dir, &format!("{name}.json"), cfg_text);
    let out = dir.join(format!("{name}.csv"));
    let o = run(&["simulate", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    (cfg, out)
}

#[test]
fn fit_classical_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let (_, csv) = simulate_to(dir.path(), "c", CLASSICAL);
    let o = run(&[
        "fit",
        csv.to_str().unwrap(),
        "--alpha1",
        "0",
        "--alpha2",
        "0",
        "--boundary-terms",
        "1",
        "--interior-terms",
        "1",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    let exps: Vec<f64> = v["exponents"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    let k = exps.iter().position(|g| (g - 0.5).abs() < 1e-12).unwrap();
    let coef = v["coefficients"][k].as_f64().unwrap();
    assert!((coef + 4.0 / PI.sqrt()).abs() <= 1e-6, "{coef}");
    assert!(v["residual"].is_number() && v["condition"].is_number());
}

#[test]
fn fit_robin_with_interior_subtraction() {
    let dir = tempfile::tempdir().unwrap();
    let (cfg, csv) = simulate_to(dir.path(), "r", ROBIN);
    let args = [
        "fit",
        csv.to_str().unwrap(),
        "--alpha1",
        "0.3",
        "--alpha2",
        "0.4",
        "--boundary-terms",
        "3",
        "--interior-terms",
        "2",
        "--subtract-interior",
        cfg.to_str().unwrap(),
    ];
    let o = run(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["beta_interior"].as_array().unwrap().len(), 2);
    // Two-endpoint prediction for the t^0.15 coefficient, from `coeffs` output
    // combined with the profile jets at 0 (amplitude 1) and π (amplitude 1/2).
    let c = run(&["coeffs", "--alpha1", "0.3", "--alpha2", "0.4", "--bc", "robin"]);
    let t = json(&c);
    let e = |nu: usize| t[format!("eps{nu}")][0].as_f64().unwrap();
    let predicted = e(0) * (1.0 + 0.25);
    let coef = v["coefficients"][0].as_f64().unwrap();
    assert!(
        (coef - predicted).abs() <= 1e-2 * predicted.abs(),
        "{coef} vs {predicted}"
    );
    let again = run(&args);
    assert_eq!(o.stdout, again.stdout);
}

#[test]
fn fit_error_paths() {
    let dir = tempfile::tempdir().unwrap();
    let (_, csv) = simulate_to(dir.path(), "c", CLASSICAL);
    let p = csv.to_str().unwrap();
    let none = run(&[
        "fit",
        p,
        "--alpha1",
        "0",
        "--alpha2",
        "0",
        "--boundary-terms",
        "0",
        "--interior-terms",
        "0",
    ]);
    assert_eq!(code(&none), 2);
    let ill = run(&[
        "fit",
        p,
        "--alpha1",
        "0.499999999",
        "--alpha2",
        "0.5",
        "--boundary-terms",
        "3",
        "--interior-terms",
        "3",
        "--gap-min",
        "0",
    ]);
    assert_eq!(code(&ill), 3, "{}", String::from_utf8_lossy(&ill.stderr));
    assert!(String::from_utf8_lossy(&ill.stderr).contains("condition"));
    let missing = dir.path().join("nope.csv");
    assert_eq!(
        code(&run(&[
            "fit",
            missing.to_str().unwrap(),
            "--alpha1",
            "0",
            "--alpha2",
            "0"
        ])),
        2
    );
}

#[test]
fn verify_exit_codes() {
    let o = run(&["verify", "recursions"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["passed"], Value::Bool(true));
    let worst = v["suites"][0]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["residual"].as_f64().unwrap())
        .fold(0.0f64, f64::max);
    assert!(worst <= 1e-10);
    assert_eq!(code(&run(&["verify", "warped"])), 0);
    assert_eq!(code(&run(&["verify", "nonsense"])), 2);
    assert_eq!(code(&run(&["verify", "crosscheck"])), 4);
}

#[test]
fn verify_is_deterministic_and_seedable() {
    let a = run(&["verify", "scaling"]);
    let b = run(&["verify", "scaling"]);
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["verify", "scaling", "--seed", "7"]);
    assert_eq!(code(&c), 0);
    assert_ne!(a.stdout, c.stdout);
    assert_eq!(json(&a)["seed"].as_u64(), Some(3_141_592_653));
}
