//! CLI contract tests: exit codes, dry-run echo, determinism of emitted
//! JSON, and re-parseability of every emitted file.

use std::path::Path;
use std::process::{Command, Output};

fn nlsgi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlsgi"))
        .args(args)
        .output()
        .expect("spawn nlsgi")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.conf");
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

const SMALL: &str = "L = 20\nN = 256\nZ = 10\nM = 256\npreset = sech(0.2)\n";

#[test]
fn dry_run_echoes_normalized_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "N = 512\n# comment\nrh_tol = 1e-9\n");
    let out = nlsgi(&["scatter", "--config", &cfg, "--dry-run"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("N = 512"));
    assert!(text.contains("rh_tol = 1e-9"));
    assert!(text.contains("preset = sech(0.3,0,0)"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let outdir = dir.path().join("out");
    let outdir_s = outdir.display().to_string();

    // 1: missing config file
    let out = nlsgi(&["scatter", "--config", "/nonexistent.conf", "--out", &outdir_s]);
    assert_eq!(out.status.code(), Some(1));

    // 1: bad config (negative tolerance)
    let cfg_bad = write_config(dir.path(), "rh_tol = -1\n");
    let out = nlsgi(&["scatter", "--config", &cfg_bad, "--out", &outdir_s]);
    assert_eq!(out.status.code(), Some(1));

    // 1: unknown suite
    let cfg_suite = write_config(dir.path(), "suite = nonsense\n");
    let out = nlsgi(&["verify", "--config", &cfg_suite, "--out", &outdir_s]);
    assert_eq!(out.status.code(), Some(1));

    // 2: soliton gate on a deliberately large preset
    let cfg_big = write_config(dir.path(), "L = 20\nN = 512\nZ = 10\nM = 256\npreset = sech(5)\n");
    let out = nlsgi(&["scatter", "--config", &cfg_big, "--out", &outdir_s]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    // 3: unstable reference step
    let cfg_dt = write_config(
        dir.path(),
        "L = 20\nN = 256\nZ = 10\nM = 128\npreset = sech(0.1)\ndt = 1.0\nt_final = 0.01\n",
    );
    let out = nlsgi(&["reference", "--config", &cfg_dt, "--out", &outdir_s]);
    assert_eq!(out.status.code(), Some(3), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    // 1: invert without an archive present
    let cfg_small = write_config(dir.path(), SMALL);
    let empty = dir.path().join("empty");
    let out = nlsgi(&["invert", "--config", &cfg_small, "--out", &empty.display().to_string()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn scatter_invert_pipeline_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out1 = dir.path().join("a");
    let out2 = dir.path().join("b");
    for out in [&out1, &out2] {
        let o = nlsgi(&["scatter", "--config", &cfg, "--out", &out.display().to_string()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let o = nlsgi(&["invert", "--config", &cfg, "--out", &out.display().to_string()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    // identical config => bit-identical summaries and archives
    for name in [
        "scattering.json",
        "scattering.csv",
        "scatter_summary.json",
        "reconstruction.csv",
        "invert_summary.json",
        "potential.csv",
    ] {
        let a = std::fs::read(out1.join(name)).unwrap();
        let b = std::fs::read(out2.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }

    // emitted files re-parse with the tool's own readers
    let data = nlsgi_core::scattering::read_archive_json(&out1.join("scattering.json")).unwrap();
    let (a, _, _) =
        nlsgi_core::scattering::read_archive_csv(&out1.join("scattering.csv"), data.zgrid).unwrap();
    assert_eq!(a.len(), data.zgrid.point_count);
    let grid = nlsgi_core::SpatialGrid::new(20.0, 256).unwrap();
    let back = nlsgi_core::potential::read_potential_csv(&out1.join("potential.csv"), grid, 1.0)
        .unwrap();
    assert_eq!(back.u.len(), 256);

    // summary fields exist and make sense
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out1.join("invert_summary.json")).unwrap())
            .unwrap();
    assert!(summary["roundtrip_rel_linf"].as_f64().unwrap() < 1e-3);
    assert!(summary["provenance"]["config_hash"].as_str().is_some());
}

#[test]
fn corrupted_archive_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    let o = nlsgi(&["scatter", "--config", &cfg, "--out", &out.display().to_string()]);
    assert!(o.status.success());
    // truncate the archive
    let archive = out.join("scattering.json");
    let text = std::fs::read_to_string(&archive).unwrap();
    std::fs::write(&archive, &text[..text.len() / 2]).unwrap();
    let o = nlsgi(&["invert", "--config", &cfg, "--out", &out.display().to_string()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn evolve_emits_snapshots_and_comparison() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "L = 20\nN = 256\nZ = 10\nM = 256\npreset = sech(0.1)\nt_final = 0.02\nsnapshots = 0.01\n",
    );
    let out = dir.path().join("out");
    let o = nlsgi(&["evolve", "--config", &cfg, "--out", &out.display().to_string()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("ist_snapshot_0.csv").exists());
    assert!(out.join("ist_snapshot_1.csv").exists());
    assert!(out.join("ref_snapshot_1.csv").exists());
    let cmp: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("comparison.json")).unwrap())
            .unwrap();
    let records = cmp["records"].as_array().unwrap();
    assert_eq!(records.len(), 2);
    for r in records {
        assert!(r["linf_gap"].as_f64().unwrap() < 1e-2);
        assert!(r["mass_drift_ist"].as_f64().is_some());
        assert!(r["mass_drift_ref"].as_f64().is_some());
    }
}

#[test]
fn verify_report_roundtrips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "L = 20\nN = 256\nZ = 10\nM = 256\npreset = sech(0.1)\nsuite = identities\n",
    );
    let out = dir.path().join("out");
    let o = nlsgi(&["verify", "--config", &cfg, "--out", &out.display().to_string()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("verify_identities.json")).unwrap())
            .unwrap();
    assert_eq!(report["overall_pass"], serde_json::Value::Bool(true));
    assert!(report["records"].as_array().unwrap().len() >= 6);
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("[PASS]"));
}
