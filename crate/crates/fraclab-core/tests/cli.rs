//! End-to-end flows through the command-line front end.

use std::path::PathBuf;

use fraclab_core::cli::run_captured;
use fraclab_core::io::read_field;

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fraclab_cli_{tag}_{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn cli(args: &[&str]) -> fraclab_core::Result<String> {
    let mut full = vec!["fraclab"];
    full.extend_from_slice(args);
    run_captured(full)
}

#[test]
fn kernel_writes_a_readable_field_with_unit_mass() {
    let dir = tmp_dir("kernel");
    let out = dir.join("kernel.csv");
    let stdout = cli(&[
        "kernel", "--beta", "1.0", "--t", "1.0", "--n", "1", "--L", "200", "--N", "16384", "--out",
        out.to_str().unwrap(),
    ])
    .unwrap();
    assert!(stdout.contains("\"mass\""));
    let field = read_field(&out).unwrap();
    assert_eq!(field.spec().points_per_axis(), 16384);
    let mass = field.spec().node_measure() * field.values().iter().sum::<f64>();
    assert!((mass - 1.0).abs() < 1e-12);
}

#[test]
fn norm_reports_the_indicator_closed_form() {
    let dir = tmp_dir("norm");
    let field_path = dir.join("field.csv");
    let g = fraclab_core::make_grid(1, 8.0, 1024).unwrap();
    let u = fraclab_core::GridFunction::indicator(g, 1.0, 1.0).unwrap();
    fraclab_core::io::write_field(&field_path, &u).unwrap();

    let stdout = cli(&[
        "norm", "--gauge", "expLp", "--p", "2", "--input", field_path.to_str().unwrap(), "--tol",
        "1e-10",
    ])
    .unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(parsed["gauge"], "expLp");
    assert_eq!(parsed["p"], 2.0);
    let norm = parsed["norm"].as_f64().unwrap();
    assert!((norm - 1.2011224087864498).abs() < 1e-8, "{norm}");
    assert!(parsed["iterations"].as_u64().unwrap() > 0);
}

#[test]
fn evolve_is_deterministic_and_finalizes_the_manifest() {
    let dir_a = tmp_dir("evolve_a");
    let dir_b = tmp_dir("evolve_b");
    let args = |out: &str| {
        vec![
            "evolve".to_string(),
            "--beta".into(), "2".into(),
            "--m".into(), "1".into(),
            "--p".into(), "2".into(),
            "--lambda".into(), "1".into(),
            "--sign".into(), "-1".into(),
            "--ic".into(), "bump:amp=0.2,width=1".into(),
            "--T".into(), "0.5".into(),
            "--scheme".into(), "etd".into(),
            "--dt".into(), "0.01".into(),
            "--n".into(), "1".into(),
            "--L".into(), "20".into(),
            "--N".into(), "512".into(),
            "--q".into(), "4".into(),
            "--out".into(), out.into(),
        ]
    };
    for dir in [&dir_a, &dir_b] {
        let mut full = vec!["fraclab".to_string()];
        full.extend(args(dir.to_str().unwrap()));
        run_captured(full).unwrap();
    }
    let series_a = std::fs::read(dir_a.join("series.csv")).unwrap();
    let series_b = std::fs::read(dir_b.join("series.csv")).unwrap();
    assert!(!series_a.is_empty());
    assert_eq!(series_a, series_b, "series must be byte-identical");

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir_a.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["command"], "evolve");
    assert_eq!(manifest["parameters"]["beta"], 2.0);
    assert_eq!(manifest["grid"]["N"], 512);
    assert!(manifest["wall_time"].as_f64().unwrap() > 0.0);
    assert_eq!(manifest["statuses"][0]["outcome"], "Converged");

    let header = std::fs::read_to_string(dir_a.join("series.csv")).unwrap();
    assert!(header.starts_with("t,l1,l2,lq,linf,expLp\n"));
}

#[test]
fn config_file_is_read_and_flags_win() {
    let dir = tmp_dir("config");
    let config = dir.join("run.conf");
    std::fs::write(
        &config,
        "beta = 1.0\nm = 1\np = 2\nic = bump:amp=0.1,width=1\nT = 0.2\ndt = 0.02\nN = 256\nL = 10\n",
    )
    .unwrap();
    let out = dir.join("run");
    cli(&[
        "evolve", "--config", config.to_str().unwrap(), "--beta", "2.0", "--out",
        out.to_str().unwrap(),
    ])
    .unwrap();
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    // The flag overrides the file's beta = 1.0.
    assert_eq!(manifest["parameters"]["beta"], 2.0);

    let bad = dir.join("bad.conf");
    std::fs::write(&bad, "betta = 1.0\n").unwrap();
    let err = cli(&["evolve", "--config", bad.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .unwrap_err();
    assert!(err.to_string().contains("unknown key"), "{err}");
}

#[test]
fn validation_errors_name_the_failed_inequality() {
    let dir = tmp_dir("validation");
    let out = dir.join("x");
    let err = cli(&[
        "evolve", "--beta", "2.5", "--p", "2", "--ic", "bump:amp=1", "--T", "1", "--out",
        out.to_str().unwrap(),
    ])
    .unwrap_err();
    assert!(err.to_string().contains("(0, 2]"), "{err}");

    let err = cli(&[
        "evolve", "--beta", "2", "--m", "2", "--p", "2", "--n", "1", "--ic", "bump:amp=1", "--T",
        "1", "--out", out.to_str().unwrap(),
    ])
    .unwrap_err();
    assert!(err.to_string().contains("n(m-1)/beta"), "{err}");
}

#[test]
fn verify_regime_emits_json() {
    let stdout =
        cli(&["verify", "regime", "--n", "1", "--beta", "2", "--p", "1.2", "--m", "4"]).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(parsed["regime"], "above");
    assert!((parsed["q_interval"][0].as_f64().unwrap() - 18.0).abs() < 1e-9);
    assert_eq!(parsed["q_interval"][1], "inf");

    let err = cli(&["verify", "regime", "--n", "1", "--beta", "2", "--p", "2", "--m", "2"])
        .unwrap_err();
    assert!(err.to_string().contains("m > p"), "{err}");
}

#[test]
fn verify_params_emits_csv_rows() {
    let stdout = cli(&[
        "verify", "params", "--n", "3", "--beta", "1", "--p", "2", "--m", "2", "--q", "6", "--k",
        "0..20",
    ])
    .unwrap();
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "k,theta,rho,a,r,identity_residual");
    assert_eq!(lines.len(), 22);
    // k = 0 row carries the hand-checked selection.
    let first: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(first[0], "0");
    assert!((first[1].parse::<f64>().unwrap() - 0.5).abs() < 1e-12);
    assert!((first[2].parse::<f64>().unwrap() - 3.0).abs() < 1e-12);
}

#[test]
fn verify_smoothing_emits_the_ratio_table() {
    let stdout = cli(&[
        "verify", "smoothing", "--beta", "2", "--r", "1", "--q", "inf", "--tmin", "0.01", "--tmax",
        "1", "--points", "8", "--N", "4096", "--L", "50",
    ])
    .unwrap();
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "t,lhs,bound_shape,ratio");
    assert_eq!(lines.len(), 9);
    for line in &lines[1..] {
        let ratio: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert!(ratio.is_finite() && ratio > 0.0);
    }
}

#[test]
fn verify_orlicz_reports_zero_violations() {
    let stdout = cli(&[
        "verify", "orlicz", "--fields", "25", "--seed", "7", "--p", "2", "--N", "128",
    ])
    .unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    for suite in ["embedding_exp", "embedding_lq", "exp_moment", "nonexpansive"] {
        assert_eq!(parsed[suite]["violations"], 0, "{suite}: {stdout}");
    }
    assert!(parsed["equivalence_ratio"]["min"].as_f64().unwrap() > 0.0);
}

#[test]
fn verify_kappa_reports_a_convergent_integral() {
    let stdout = cli(&[
        "verify", "kappa", "--regime", "subcritical", "--n", "3", "--beta", "1", "--p", "2", "--r",
        "4",
    ])
    .unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert!(parsed["integral"].as_f64().unwrap() > 0.0);
    assert!(parsed["increment_to_10x_tmax"].as_f64().unwrap().abs() < 1e-6);

    let err = cli(&[
        "verify", "kappa", "--regime", "subcritical", "--n", "3", "--beta", "1.6", "--p", "2",
        "--r", "4",
    ])
    .unwrap_err();
    assert!(err.to_string().contains("beta < n(p-1)/p"), "{err}");
}

#[test]
fn sweep_builds_run_directories_and_a_summary() {
    let dir = tmp_dir("sweep");
    cli(&[
        "sweep", "--beta", "0.5,1.0", "--p", "2", "--m", "3", "--lambda", "1", "--amp",
        "0.05,20.0", "--T", "0.2", "--dt", "0.01", "--N", "256", "--L", "10", "--q", "4", "--out",
        dir.to_str().unwrap(),
    ])
    .unwrap();
    let summary = std::fs::read_to_string(dir.join("summary.csv")).unwrap();
    let lines: Vec<&str> = summary.lines().collect();
    assert_eq!(lines[0], "beta,p,m,lambda,amp,outcome,slope,sigma_target");
    assert_eq!(lines.len(), 5, "{summary}");
    // The amp = 20 tuples blow up; the small-amplitude ones survive.
    let diverged = lines[1..].iter().filter(|l| l.contains("Diverged")).count();
    let converged = lines[1..].iter().filter(|l| l.contains("Converged")).count();
    assert_eq!(diverged, 2, "{summary}");
    assert_eq!(converged, 2, "{summary}");
    for i in 0..4 {
        let run_dir = dir.join(format!("run_{i:03}"));
        assert!(run_dir.join("manifest.json").exists());
        assert!(run_dir.join("series.csv").exists());
    }
}

#[test]
fn sweep_with_an_empty_axis_writes_only_the_header() {
    let dir = tmp_dir("sweep_empty");
    cli(&[
        "sweep", "--beta", "", "--p", "2", "--m", "2", "--lambda", "1", "--amp", "0.1", "--T",
        "0.1", "--out", dir.to_str().unwrap(),
    ])
    .unwrap();
    let summary = std::fs::read_to_string(dir.join("summary.csv")).unwrap();
    assert_eq!(summary, "beta,p,m,lambda,amp,outcome,slope,sigma_target\n");
}

#[test]
fn decay_command_validates_and_reports() {
    let dir = tmp_dir("decay");
    let stdout = cli(&[
        "decay", "--beta", "2", "--m", "4", "--p", "1.2", "--lambda", "1", "--sign", "+1", "--ic",
        "bump:amp=1,width=1", "--amp-norm", "0.01", "--T", "20", "--dt", "0.05", "--n", "1",
        "--L", "200", "--N", "4096", "--q", "24", "--window", "2,20", "--out",
        dir.to_str().unwrap(),
    ])
    .unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(parsed["sigma_target"], 0.3125);
    assert_eq!(parsed["envelope_ok"], true);
    assert!(parsed["slope"].as_f64().unwrap() < -0.2625);
    assert!(dir.join("decay.json").exists());

    // q outside the admissible interval is rejected up front.
    let err = cli(&[
        "decay", "--beta", "2", "--m", "4", "--p", "1.2", "--ic", "bump:amp=0.01", "--T", "10",
        "--n", "1", "--q", "10", "--out", dir.to_str().unwrap(),
    ])
    .unwrap_err();
    assert!(err.to_string().contains("admissible"), "{err}");
}
