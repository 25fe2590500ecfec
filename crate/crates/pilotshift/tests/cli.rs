//! Smoke tests for the command-line interface.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pilotshift"))
}

#[test]
fn ccdf_run_writes_reproducible_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    for out in [&out_a, &out_b] {
        let status = bin()
            .args([
                "ccdf",
                "--ns",
                "16",
                "--np",
                "4",
                "--oversample",
                "4",
                "--frames",
                "40",
                "--seed",
                "3",
                "--out",
            ])
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = std::fs::read_to_string(&out_a).unwrap();
    let b = std::fs::read_to_string(&out_b).unwrap();
    assert_eq!(a, b);
    let mut lines = a.lines();
    let manifest = lines.next().unwrap();
    assert!(manifest.starts_with("# experiment=ccdf"));
    assert!(manifest.contains("ns=16"));
    assert!(manifest.contains("seed=3"));
    assert_eq!(lines.next().unwrap(), "threshold_db,ccdf_baseline,ccdf_proposed");
    assert_eq!(lines.count(), 81); // 4.0..=12.0 dB in 0.1 dB steps
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(&config, "ns = 16\nnp = 4\noversample = 4\nframes = 25\nseed = 9\n").unwrap();
    let out = dir.path().join("out.csv");
    let status = bin()
        .args(["ccdf", "--config"])
        .arg(&config)
        .args(["--frames", "30", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let manifest = text.lines().next().unwrap();
    assert!(manifest.contains("frames=30"), "{manifest}"); // flag wins
    assert!(manifest.contains("ns=16"), "{manifest}"); // file survives
}

#[test]
fn detect_error_requires_an_snr_point() {
    let output = bin()
        .args(["detect-error", "--ns", "64", "--np", "4", "--frames", "10"])
        .output()
        .unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("snr"), "{stderr}");
}

#[test]
fn gamma_list_switches_detect_error_into_sweep_mode() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let status = bin()
        .args([
            "detect-error",
            "--ns",
            "64",
            "--np",
            "4",
            "--oversample",
            "1",
            "--frames",
            "30",
            "--seed",
            "5",
            "--snr",
            "0",
            "--gamma",
            "0.7,0.9",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# experiment=detect-error-sweep"));
    assert_eq!(
        lines.next().unwrap(),
        "pilot_power,gamma,snr_db,n_s,r_spacing,error_pct,frames"
    );
    assert_eq!(lines.count(), 2); // one row per gamma
}

#[test]
fn ber_run_emits_one_row_per_snr() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ber.csv");
    let status = bin()
        .args([
            "ber",
            "--ns",
            "64",
            "--np",
            "4",
            "--oversample",
            "1",
            "--frames",
            "25",
            "--snr",
            "3",
            "--snr",
            "9",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# experiment=ber"));
    assert_eq!(lines.next().unwrap(), "snr_db,ber_known,ber_detected,bits");
    assert_eq!(lines.count(), 2);
}
