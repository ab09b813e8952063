//! End-to-end CLI behavior: byte-deterministic output across worker counts,
//! config-file handling with flag override, and the exit-code contract.

use std::process::Command;

fn qi() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qi"))
}

fn tempdir(tag: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("qi-cli-io-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn roc_output_byte_identical_across_jobs() {
    let dir = tempdir("det");
    let a = dir.join("a.csv");
    let b = dir.join("b.csv");
    for (path, jobs) in [(&a, "1"), (&b, "4")] {
        let status = qi()
            .args([
                "roc",
                "--preset",
                "fig2b",
                "--points",
                "120",
                "--jobs",
                jobs,
                "--out",
                path.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success());
    }
    let bytes_a = std::fs::read(&a).unwrap();
    let bytes_b = std::fs::read(&b).unwrap();
    assert_eq!(bytes_a, bytes_b, "output depends on worker count");
    assert!(!bytes_a.is_empty());
}

#[test]
fn fig1_repeat_runs_identical() {
    let out1 = qi().args(["fig1", "--points", "41"]).output().unwrap();
    let out2 = qi().args(["fig1", "--points", "41"]).output().unwrap();
    assert!(out1.status.success());
    assert_eq!(out1.stdout, out2.stdout);
    let text = String::from_utf8(out1.stdout).unwrap();
    assert!(text.starts_with("# qi fig1"));
    assert!(text.contains("n_s,a_tmsv,a_separable"));
    // Row at n_s = 1 carries the two exact anchors.
    assert!(text.contains("1.386294361120e+00"));
    assert!(text.contains("6.931471805599e-01"));
}

#[test]
fn config_file_flags_override() {
    let dir = tempdir("conf");
    let conf = dir.join("run.conf");
    std::fs::write(&conf, "# scenario\nn_s = 0.25\nn_b = 12.0\nkappa = 1e-3\n").unwrap();
    let from_file = qi()
        .args(["bounds", "--config", conf.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(from_file.status.success());
    let text = String::from_utf8(from_file.stdout).unwrap();
    assert!(text.contains("\"n_s\": 2.500000000000e-01"));

    let overridden = qi()
        .args(["bounds", "--config", conf.to_str().unwrap(), "--n-s", "0.5"])
        .output()
        .unwrap();
    let text2 = String::from_utf8(overridden.stdout).unwrap();
    assert!(text2.contains("\"n_s\": 5.000000000000e-01"));
}

#[test]
fn exit_codes() {
    // 0: success.
    assert_eq!(qi().args(["link"]).status().unwrap().code(), Some(0));

    // 1: validation (missing required option).
    let missing = qi().args(["bounds"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("missing required"));

    // 1: validation (unknown command).
    assert_eq!(qi().args(["frobnicate"]).status().unwrap().code(), Some(1));

    // 2: forced-tiny cutoff surfaces as an oracle failure.
    let tiny = qi().args(["oracle-check", "--cutoff", "6"]).output().unwrap();
    assert_eq!(tiny.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&tiny.stderr).contains("cutoff"));

    // 3: unwritable output path.
    let io = qi()
        .args(["link", "--out", "/nonexistent-dir/x.json"])
        .output()
        .unwrap();
    assert_eq!(io.status.code(), Some(3));
}

#[test]
fn plot_script_emission() {
    let dir = tempdir("plot");
    let csv = dir.join("fig1.csv");
    let gp = dir.join("fig1.gp");
    let status = qi()
        .args([
            "fig1",
            "--points",
            "10",
            "--out",
            csv.to_str().unwrap(),
            "--plot-script",
            gp.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let script = std::fs::read_to_string(&gp).unwrap();
    assert!(script.contains("set logscale x"));
    assert!(script.contains("a_tmsv"));
    assert!(script.contains(csv.to_str().unwrap()));
}

#[test]
fn appendix_fit_preset_runs() {
    let out = qi()
        .args(["appendix-fit", "--preset", "fig3a", "--c-points", "5"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    // c = 0 row fits g ~ 0; c = C_q row fits g = 1 exactly by normalization.
    let last = text.lines().last().unwrap();
    assert!(last.contains("1.000000000000e+00,1.000000000000e+00"), "{last}");
}

#[test]
fn bounds_csv_rejected_gracefully() {
    let out = qi()
        .args(["bounds", "--n-s", "1", "--n-b", "2", "--kappa", "0.1", "--format", "csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
