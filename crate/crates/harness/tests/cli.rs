use std::fs;
use std::path::PathBuf;
use std::process::Command;

fn rdft() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rdft"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rdft-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn freq_response_rows_match_grid() {
    let out = scratch("freq");
    let status = rdft()
        .args([
            "freq-response",
            "--methods",
            "3,9",
            "--points",
            "41",
            "--out",
        ])
        .arg(&out)
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    for m in ["3", "9"] {
        let text = fs::read_to_string(out.join(format!("freq_response_{m}_double.csv"))).unwrap();
        assert_eq!(text.lines().count(), 42);
        assert_eq!(text.lines().next().unwrap(), "f,mag_db,phase_rad");
    }
}

#[test]
fn impulse_response_defaults_to_five_blocks() {
    let out = scratch("impulse");
    let status = rdft()
        .args(["impulse-response", "--methods", "9", "--out"])
        .arg(&out)
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    let text = fs::read_to_string(out.join("impulse_response_9_double.csv")).unwrap();
    assert_eq!(text.lines().count(), 5 * 129 + 1);
}

#[test]
fn invalid_config_exits_nonzero_with_diagnostic() {
    let out = scratch("bad");
    let res = rdft()
        .args([
            "table1",
            "--quick",
            "--methods",
            "7",
            "--K",
            "8",
            "--B",
            "9",
            "--out",
        ])
        .arg(&out)
        .output()
        .unwrap();
    assert!(!res.status.success());
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("error"), "{err}");
}

#[test]
fn config_file_supplies_flags_and_cli_overrides() {
    let out = scratch("config");
    let cfg = out.join("run.cfg");
    fs::write(
        &cfg,
        "# table1 settings\nK=8\nB=4\nk_probe=2\nmethods=3\nsegments=2\nsegment_length=500\nnoise=none\nprecision=double\n",
    )
    .unwrap();
    let status = rdft()
        .args(["table1", "--config"])
        .arg(&cfg)
        .args(["--methods", "5", "--out"])
        .arg(&out)
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    assert!(out.join("table1_none_5_double.csv").exists());
    assert!(!out.join("table1_none_3_double.csv").exists());
}

#[test]
fn design_commands_write_files() {
    let out = scratch("design");
    assert!(rdft()
        .args(["design-mixing", "--K", "8", "--B", "4", "--out"])
        .arg(&out)
        .output()
        .unwrap()
        .status
        .success());
    assert!(out.join("design_mixing_12_double.csv").exists());
    assert!(rdft()
        .args([
            "design-window",
            "--kind",
            "slepian-time",
            "--K",
            "8",
            "--out"
        ])
        .arg(&out)
        .output()
        .unwrap()
        .status
        .success());
    assert!(out.join("design_window_slepian_time_double.csv").exists());
    assert!(!rdft()
        .args(["design-window", "--kind", "kaiser", "--out"])
        .arg(&out)
        .output()
        .unwrap()
        .status
        .success());
}
