use std::path::Path;
use std::process::{Command, Output};

use scpaq::synth::{generate_clip, ClipKind};
use scpaq::{io, BitDepth};

fn scpaq(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scpaq")).args(args).current_dir(dir).output().expect("spawn scpaq")
}

fn write_clip(dir: &Path, name: &str, kind: ClipKind, w: usize, h: usize, frames: usize) {
    let clip = generate_clip(kind, w, h, frames, BitDepth::EIGHT, 1).unwrap();
    io::write_yuv(&clip, dir.join(name)).unwrap();
}

#[test]
fn curves_export() {
    let dir = tempfile::tempdir().unwrap();
    let out = scpaq(&["curves", "--bit-depth", "8", "--component", "y", "--out", "c"], dir.path());
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("c/curve_y_b8.csv")).unwrap();
    assert_eq!(csv.lines().count(), 257);
    assert!(csv.lines().any(|l| l == "128.0,1.0"));
    assert!(!dir.path().join("c/curve_cb_b8.csv").exists());

    let out = scpaq(&["curves", "--bit-depth", "10", "--out", "c"], dir.path());
    assert!(out.status.success());
    for ch in ["y", "cb", "cr"] {
        let csv = std::fs::read_to_string(dir.path().join(format!("c/curve_{ch}_b10.csv"))).unwrap();
        assert_eq!(csv.lines().count(), 1025);
    }
}

#[test]
fn psnr_of_identical_clips_is_infinite() {
    let dir = tempfile::tempdir().unwrap();
    write_clip(dir.path(), "a.yuv", ClipKind::Gradient, 32, 16, 2);
    let out = scpaq(
        &["psnr", "--reference", "a.yuv", "--test", "a.yuv", "--width", "32", "--height", "16"],
        dir.path(),
    );
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout, "Y: inf dB\nCb: inf dB\nCr: inf dB\n");
}

#[test]
fn psnr_of_unit_error() {
    let dir = tempfile::tempdir().unwrap();
    write_clip(dir.path(), "a.yuv", ClipKind::Flat { y: 10, cb: 20, cr: 30 }, 8, 8, 1);
    write_clip(dir.path(), "b.yuv", ClipKind::Flat { y: 11, cb: 20, cr: 29 }, 8, 8, 1);
    let out = scpaq(&["psnr", "--reference", "a.yuv", "--test", "b.yuv", "--width", "8", "--height", "8"], dir.path());
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout, "Y: 48.1308 dB\nCb: inf dB\nCr: 48.1308 dB\n");
}

#[test]
fn simulate_on_dark_clip_reduces_every_channel() {
    let dir = tempfile::tempdir().unwrap();
    write_clip(dir.path(), "dark.yuv", ClipKind::Flat { y: 16, cb: 16, cr: 16 }, 64, 64, 2);
    let out = scpaq(
        &["simulate", "--input", "dark.yuv", "--width", "64", "--height", "64", "--qp", "22", "--model", "scpaq", "--out", "o"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = std::fs::read_to_string(dir.path().join("o/summary_scpaq.csv")).unwrap();
    let header: Vec<&str> = summary.lines().next().unwrap().split(',').collect();
    let row: Vec<&str> = summary.lines().nth(1).unwrap().split(',').collect();
    for col in ["delta_y_pct", "delta_cb_pct", "delta_cr_pct", "delta_total_pct"] {
        let i = header.iter().position(|h| *h == col).unwrap();
        let v: f64 = row[i].parse().unwrap();
        assert!(v < 0.0, "{col} = {v}");
    }
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("o/report_scpaq_qp22.json")).unwrap()).unwrap();
    assert_eq!(report["qp_maps"][0]["cells"][0]["pqp_y"], 28);
    assert_eq!(report["qp_maps"][0]["cells"][0]["pqp_cb"], 32);
    assert_eq!(report["channels"].as_array().unwrap().len(), 3);
}

#[test]
fn uniform_model_reports_zero_delta() {
    let dir = tempfile::tempdir().unwrap();
    write_clip(dir.path(), "c.yuv", ClipKind::DarkBright, 64, 32, 2);
    let out = scpaq(
        &["simulate", "--input", "c.yuv", "--width", "64", "--height", "32", "--model", "none", "--out", "o"],
        dir.path(),
    );
    assert!(out.status.success());
    let summary = std::fs::read_to_string(dir.path().join("o/summary_none.csv")).unwrap();
    assert_eq!(summary.lines().count(), 5);
    for line in summary.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(&cols[10..14], &["0.0", "0.0", "0.0", "0.0"]);
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    write_clip(dir.path(), "c.yuv", ClipKind::DarkBright, 48, 48, 3);
    let args = |out: &'static str| {
        vec!["analyze", "--input", "c.yuv", "--width", "48", "--height", "48", "--qp", "27", "--out", out]
    };
    assert!(scpaq(&args("a"), dir.path()).status.success());
    assert!(scpaq(&args("b"), dir.path()).status.success());
    for f in 0..3 {
        let name = format!("qpmap_qp27_f{f:04}.json");
        let a = std::fs::read(dir.path().join("a").join(&name)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(&name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn analyze_constant_dark_frame() {
    let dir = tempfile::tempdir().unwrap();
    write_clip(dir.path(), "d.yuv", ClipKind::Flat { y: 16, cb: 16, cr: 16 }, 32, 32, 1);
    let out = scpaq(&["analyze", "--input", "d.yuv", "--width", "32", "--height", "32", "--qp", "22", "--out", "m"], dir.path());
    assert!(out.status.success());
    let map: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("m/qpmap_qp22_f0000.json")).unwrap()).unwrap();
    assert_eq!((map["grid_w"].as_u64(), map["grid_h"].as_u64()), (Some(2), Some(2)));
    for cell in map["cells"].as_array().unwrap() {
        assert_eq!(cell["pqp_y"], 28);
        assert_eq!(cell["pqp_cb"], 32);
        assert_eq!(cell["pqp_cr"], 32);
    }
}

#[test]
fn error_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(scpaq(&["curves", "--bit-depth", "7"], dir.path()).status.code(), Some(2));
    assert_eq!(scpaq(&["simulate"], dir.path()).status.code(), Some(2));

    std::fs::write(dir.path().join("short.yuv"), vec![0u8; 100]).unwrap();
    let out = scpaq(&["analyze", "--input", "short.yuv", "--width", "8", "--height", "8"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("short.yuv") && stderr.contains("frame 0"), "{stderr}");

    std::fs::write(dir.path().join("env.yuv"), vec![0u8; 192]).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_scpaq"))
        .env("SCPAQ_THREADS", "many")
        .args(["analyze", "--input", "env.yuv", "--width", "8", "--height", "8"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn generate_writes_expected_size() {
    let dir = tempfile::tempdir().unwrap();
    let out = scpaq(
        &["generate", "--kind", "gradient", "--width", "16", "--height", "8", "--bit-depth", "10", "--frames", "3", "--out", "g/clip.yuv"],
        dir.path(),
    );
    assert!(out.status.success());
    assert_eq!(std::fs::metadata(dir.path().join("g/clip.yuv")).unwrap().len(), 3 * 3 * 16 * 8 * 2);
}
