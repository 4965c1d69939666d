//! End-to-end tests of the command-line binary: output shapes, determinism,
//! exit codes, and the file-format round trips between subcommands.

use std::path::Path;
use std::process::{Command, Output};

fn softplex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_softplex"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf8 stdout")
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("utf8 stderr")
}

fn write_file(path: &Path, text: &str) {
    std::fs::write(path, text).expect("write test file");
}

#[test]
fn betti_of_a_hollow_triangle_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hollow.txt");
    // Declaring k_max = 2 asserts the complex genuinely has no triangles,
    // which makes beta_1 well-defined.
    write_file(&path, "3 2\n0 1\n0 2\n1 2\n");
    let out = softplex(&["betti", "--load", path.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    assert_eq!(stdout_of(&out), "beta = (1, 1)\n");

    let census = softplex(&["census", "--load", path.to_str().unwrap(), "--k", "1"]);
    assert!(census.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&census)).unwrap();
    assert_eq!(value["empty_simplex"]["1"], 1);
    assert_eq!(value["cross_polytope"]["1"], 0);
}

#[test]
fn sample_is_deterministic_in_the_seed() {
    let args = ["sample", "--n", "12", "--d", "3", "--seed", "9", "--quiet"];
    let first = softplex(&args);
    let second = softplex(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);

    let other = softplex(&["sample", "--n", "12", "--d", "3", "--seed", "10", "--quiet"]);
    assert_ne!(first.stdout, other.stdout);

    let cloud: serde_json::Value = serde_json::from_str(&stdout_of(&first)).unwrap();
    assert_eq!(cloud["d"], 3);
    assert_eq!(cloud["points"].as_array().unwrap().len(), 12);
}

#[test]
fn estimate_emits_valid_json_and_reruns_identically() {
    let args = [
        "estimate", "--statistic", "beta1", "--n", "50", "--r", "0.2", "--trials", "25",
        "--seed", "4", "--quiet",
    ];
    let first = softplex(&args);
    assert!(first.status.success(), "stderr: {}", stderr_of(&first));
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&first)).unwrap();
    assert_eq!(value["statistic"], "beta1");
    assert_eq!(value["trials"], 25);
    assert_eq!(value["seed"], 4);
    assert!(value["mean"].as_f64().unwrap() >= 0.0);
    assert!(value["ci_halfwidth"].as_f64().unwrap() >= 0.0);

    let second = softplex(&args);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn pattern_estimate_uses_the_density_path() {
    let out = softplex(&[
        "estimate", "--pattern", "K2", "--scaling", "critical", "--n", "60", "--r", "0.15",
        "--trials", "20", "--seed", "11", "--quiet",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let name = value["statistic"].as_str().unwrap();
    assert!(name.contains("K2"), "statistic name was {name:?}");
}

#[test]
fn config_file_is_overridden_by_flags_and_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    write_file(
        &path,
        r#"{"n": 40, "r": 0.2, "seed": 5, "trials": 10, "statistic": "beta1"}"#,
    );
    let out = softplex(&[
        "estimate", "--config", path.to_str().unwrap(), "--n", "30",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    let echo_line = stderr_of(&out);
    let echo: serde_json::Value = serde_json::from_str(echo_line.trim()).unwrap();
    // The flag wins over the file; everything else resolves from the file or
    // its default.
    assert_eq!(echo["n"], 30);
    assert_eq!(echo["seed"], 5);
    assert_eq!(echo["r"], 0.2);
    assert_eq!(echo["model"], "rips");
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(value["trials"], 10);
}

#[test]
fn exit_codes_separate_config_precondition_and_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad_cfg = dir.path().join("bad.json");
    write_file(&bad_cfg, r#"{"n": 5, "bogus": 1}"#);

    // Unknown config key: malformed input, code 2.
    let out = softplex(&["sample", "--config", bad_cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("bogus"));

    // Unknown statistic name: code 2.
    let out = softplex(&["estimate", "--statistic", "zeta9", "--n", "10", "--r", "0.1"]);
    assert_eq!(out.status.code(), Some(2));

    // Legal invocation the library refuses (negative radius): code 3.
    let out = softplex(&["estimate", "--statistic", "beta1", "--n", "10", "--r=-0.5"]);
    assert_eq!(out.status.code(), Some(3));

    // Too few trials for a variance: code 3.
    let out = softplex(&[
        "estimate", "--statistic", "beta1", "--n", "10", "--r", "0.1", "--trials", "1",
    ]);
    assert_eq!(out.status.code(), Some(3));

    // Clap usage error: code 2; help: code 0.
    let out = softplex(&["definitely-not-a-command"]);
    assert_eq!(out.status.code(), Some(2));
    let out = softplex(&["--help"]);
    assert_eq!(out.status.code(), Some(0));

    // Mutually exclusive statistic and pattern: code 2.
    let out = softplex(&[
        "estimate", "--statistic", "beta1", "--pattern", "K2", "--n", "10", "--r", "0.1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mu_accepts_scientific_sample_counts() {
    let out = softplex(&[
        "mu", "--pattern", "K2", "--d", "2", "--samples", "2e4", "--seed", "3", "--quiet",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(value["trials"], 20000);
    let mean = value["mean"].as_f64().unwrap();
    let ci = value["ci_halfwidth"].as_f64().unwrap();
    let target = std::f64::consts::FRAC_PI_2;
    assert!(
        (mean - target).abs() <= ci.max(0.05),
        "mu(K2, d=2) = {mean} not near {target}"
    );
}

#[test]
fn dump_census_and_morse_compose_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let complex_path = dir.path().join("complex.txt");
    let cloud_path = dir.path().join("cloud.json");
    let shared = [
        "--n", "40", "--d", "2", "--seed", "21", "--quiet",
    ];

    let mut dump_args = vec![
        "dump", "--r", "0.25", "--k-max", "2", "--rho", "0.9,0.7",
        "--out", complex_path.to_str().unwrap(),
    ];
    dump_args.extend_from_slice(&shared);
    let out = softplex(&dump_args);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));

    let mut sample_args = vec!["sample", "--out", cloud_path.to_str().unwrap()];
    sample_args.extend_from_slice(&shared);
    let out = softplex(&sample_args);
    assert!(out.status.success());

    // The dumped complex parses and reduces.
    let out = softplex(&["betti", "--load", complex_path.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.starts_with("beta = ("), "got {text:?}");

    // The cloud drawn with the same seed matches the dumped complex's
    // vertices, so gradient construction accepts the pair.
    let out = softplex(&[
        "morse", "--load", complex_path.to_str().unwrap(),
        "--cloud", cloud_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(value["verified"], true);
    assert!(value["critical"][0].as_u64().unwrap() >= 1);
}

#[test]
fn sweep_csv_is_identical_across_thread_counts() {
    let base = [
        "sweep", "--regime", "subcritical", "--c", "1.2", "--eps", "0.3", "--model", "rips",
        "--k", "1", "--n", "60,90", "--trials", "8", "--seed", "13", "--quiet",
    ];
    let mut one = base.to_vec();
    one.extend_from_slice(&["--threads", "1"]);
    let mut four = base.to_vec();
    four.extend_from_slice(&["--threads", "4"]);

    let first = softplex(&one);
    assert!(first.status.success(), "stderr: {}", stderr_of(&first));
    let second = softplex(&four);
    assert!(second.status.success());
    assert_eq!(first.stdout, second.stdout);

    let text = stdout_of(&first);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,r,W,model,k,mean_beta,ci_beta,mean_pattern,ci_pattern,mean_flarge,mean_crit,p_nonzero,trials,seed"
    );
    assert_eq!(lines.count(), 2);
}
