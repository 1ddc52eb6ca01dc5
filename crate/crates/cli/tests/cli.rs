use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rtgrowth::{solve_lambda, Discretization, FluidConfig};

const BIN: &str = env!("CARGO_BIN_EXE_rtgrowth");

fn write_config(dir: &Path, name: &str, cfg: &FluidConfig) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string(cfg).unwrap()).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn reference(dir: &Path) -> String {
    write_config(dir, "ref.json", &FluidConfig::reference())
        .to_string_lossy()
        .into_owned()
}

#[test]
fn growth_json_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = reference(dir.path());
    let o = run(&["growth", "--config", &cfg, "--resolution", "16"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for key in [
        "lambda",
        "argmax_k",
        "fixed_point_residual",
        "bound_m",
        "theta",
        "resolution",
        "bracket_steps",
        "branch",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let lambda = v["lambda"].as_f64().unwrap();
    let m = v["bound_m"].as_f64().unwrap();
    assert!((m - 12.4336).abs() / 12.4336 < 1e-3);
    assert!(lambda <= m);
    let lib = solve_lambda(&FluidConfig::reference(), Discretization::new(16).unwrap(), 1e-8).unwrap();
    assert!((lambda - lib.lambda).abs() <= 1e-12 * lib.lambda);
    assert_eq!(v["branch"], "longitudinal");
}

#[test]
fn growth_csv_has_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = reference(dir.path());
    let o = run(&["growth", "--config", &cfg, "--resolution", "8", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("lambda,argmax_k,"));
}

#[test]
fn stable_regime_exits_three_and_quotes_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "st.json", &FluidConfig::reference().with_theta(19.6));
    let o = run(&["growth", "--config", cfg.to_str().unwrap(), "--resolution", "8"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("theta_c = 9.8"), "{}", stderr(&o));
}

#[test]
fn bad_configs_exit_two_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("{\"rho_plus\": 2,", "malformed"),
        (
            r#"{"rho_plus":2,"rho_minus":1,"mu_plus":0,"mu_minus":0.1,"g":9.8,"theta":0,"L1":1,"L2":1,"h_plus":1,"h_minus":1}"#,
            "mu_plus",
        ),
        (
            r#"{"rho_plus":1,"rho_minus":2,"mu_plus":0.1,"mu_minus":0.1,"g":9.8,"theta":0,"L1":1,"L2":1,"h_plus":1,"h_minus":1}"#,
            "rho_plus",
        ),
        (
            r#"{"rho_plus":2,"rho_minus":1,"mu_plus":0.1,"mu_minus":0.1,"g":9.8,"theta":0,"L1":1,"L2":1,"h_plus":1}"#,
            "h_minus",
        ),
        (
            r#"{"rho_plus":2,"rho_minus":1,"mu_plus":0.1,"mu_minus":0.1,"g":9.8,"theta":0,"L1":1,"L2":1,"h_plus":1,"h_minus":1,"extra":3}"#,
            "extra",
        ),
    ];
    for (i, (text, needle)) in cases.iter().enumerate() {
        let p = dir.path().join(format!("bad{i}.json"));
        std::fs::write(&p, text).unwrap();
        let o = run(&["growth", "--config", p.to_str().unwrap(), "--resolution", "8"]);
        assert_eq!(o.status.code(), Some(2), "case {i}");
        assert!(stderr(&o).contains(needle), "case {i}: {}", stderr(&o));
    }
    let o = run(&["growth", "--config", "/nonexistent/cfg.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn argument_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = reference(dir.path());
    for args in [
        vec!["growth", "--config", &cfg, "--resolution", "4"],
        vec!["growth", "--config", &cfg, "--jobs", "0"],
        vec!["growth", "--config", &cfg, "--tol", "-1"],
        vec!["growth", "--config", &cfg, "--kmax", "0"],
        vec!["growth"],
        vec!["sweep-theta", "--config", &cfg, "--resolution", "8", "--theta-grid", "0,1"],
        vec!["alpha-curve", "--config", &cfg, "--resolution", "8", "--s-grid", "2,1"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn alpha_curve_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = reference(dir.path());
    let o = run(&["alpha-curve", "--config", &cfg, "--resolution", "8", "--s-grid", "0.5,1,2,4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        ["s", "alpha", "argmax_k", "branch"]
    );
    let alphas: Vec<f64> = rdr
        .records()
        .map(|r| r.unwrap()[1].parse().unwrap())
        .collect();
    assert_eq!(alphas.len(), 4);
    assert!(alphas.windows(2).all(|w| w[1] < w[0]));

    let o = run(&[
        "alpha-curve", "--config", &cfg, "--resolution", "8", "--s-grid", "0.5,1", "--format", "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["samples"].as_array().unwrap().len(), 2);
    assert!((v["samples"][0]["alpha"].as_f64().unwrap() - alphas[0]).abs() <= 1e-12 * alphas[0]);
}

#[test]
fn fixed_cutoff_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = reference(dir.path());
    let o = run(&["alpha-curve", "--config", &cfg, "--resolution", "8", "--s-grid", "1", "--kmax", "3", "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["k_max"].as_f64().unwrap(), 3.0);
    assert!(v["samples"][0]["argmax_k"].as_f64().unwrap() <= 3.0);
}

#[test]
fn dispersion_and_oracle_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = reference(dir.path());
    let o = run(&["dispersion-curve", "--config", &cfg, "--resolution", "16", "--k-grid", "1,2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        ["k", "lambda_oracle", "lambda_variational", "rel_diff"]
    );
    for r in rdr.records() {
        let r = r.unwrap();
        assert!(r[3].parse::<f64>().unwrap() < 1e-4);
    }

    let o = run(&["oracle-compare", "--config", &cfg, "--resolution", "16", "--k-grid", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let last = text.lines().nth(1).unwrap();
    assert!(last.ends_with(",false"), "{last}");
}

#[test]
fn default_k_grid_lists_lattice_magnitudes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = reference(dir.path());
    let o = run(&["dispersion-curve", "--config", &cfg, "--resolution", "8"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let ks: Vec<f64> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(ks[0], 1.0);
    assert!(ks.windows(2).all(|w| w[1] > w[0]));
    assert!(*ks.last().unwrap() <= 5.0);
}

#[test]
fn sweep_writes_csv_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = reference(dir.path());
    let out = dir.path().join("sweep.csv");
    let o = run(&[
        "sweep-theta", "--config", &cfg, "--resolution", "8", "--theta-grid", "0,0.5,0.9",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv_text = std::fs::read_to_string(&out).unwrap();
    assert!(csv_text.starts_with("theta,theta_over_theta_c,lambda,bound_m,argmax_k,residual\n"));
    assert_eq!(csv_text.lines().count(), 4);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("sweep.csv.report.json")).unwrap())
            .unwrap();
    assert_eq!(report["pass"], true);
    assert!(report["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn sweep_output_independent_of_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = reference(dir.path());
    let mut outputs = Vec::new();
    for jobs in ["1", "3"] {
        let out = dir.path().join(format!("s{jobs}.csv"));
        let o = run(&[
            "sweep-theta", "--config", &cfg, "--resolution", "8", "--theta-grid", "0,0.25,0.75",
            "--jobs", jobs, "--out", out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        let mut report = out.clone().into_os_string();
        report.push(".report.json");
        outputs.push((std::fs::read(&out).unwrap(), std::fs::read(report).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn verify_passes_on_reference() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = reference(dir.path());
    let o = run(&["verify", "--config", &cfg, "--resolution", "8", "--format", "csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("check,pass\n"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")), "{text}");
    assert!(stderr(&o).lines().all(|l| l.starts_with("PASS ")));
}
