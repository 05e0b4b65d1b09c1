//! End-to-end checks of the command-line interface: exit codes, artifact
//! formats, and error diagnostics.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_softmax-gan"))
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("softmax-gan-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn small_config(seed: u64) -> serde_json::Value {
    serde_json::json!({
        "loss_variant": "softmax",
        "d_steps": 1,
        "g_steps": 1,
        "batch_real": 16,
        "batch_fake": 16,
        "total_cycles": 120,
        "seed": seed,
        "hidden_activation": "leaky_relu",
        "data_scaling": "centered",
        "d_lr": 1e-3,
        "g_lr": 1e-3,
        "latent_dim": 2,
        "mixture_preset": "ring"
    })
}

fn write_config(dir: &Path, value: &serde_json::Value) -> PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path
}

#[test]
fn no_arguments_is_usage_error() {
    let out = bin().output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_exits_zero() {
    let out = bin().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn train_writes_all_artifacts_then_sample_reads_them_back() {
    let dir = scratch("train");
    let config = write_config(&dir, &small_config(5));
    let run_dir = dir.join("run");

    let out = bin()
        .args(["train", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&run_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));

    let log = std::fs::read_to_string(run_dir.join("log.csv")).unwrap();
    let mut lines = log.lines();
    assert_eq!(
        lines.next().unwrap(),
        "cycle,d_loss,g_loss,ln_zb,coverage,hq_fraction,hist_js,ms"
    );
    // 120 cycles with cadence 100 → rows at cycle 100 and 120.
    assert_eq!(lines.count(), 2);
    assert!(run_dir.join("summary.json").exists());
    assert!(run_dir.join("samples.csv").exists());
    let svg = std::fs::read_to_string(run_dir.join("scatter.svg")).unwrap();
    assert!(svg.starts_with("<svg"));

    let ckpt: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(run_dir.join("checkpoint.json")).unwrap())
            .unwrap();
    assert_eq!(ckpt["config"]["seed"], 5);
    assert!(ckpt["discriminator"]["w0"]["shape"].is_array());
    assert!(ckpt["generator"]["b2"]["values"].is_array());

    // The checkpoint round-trips through the sample subcommand.
    let out = bin()
        .args(["sample", "--checkpoint"])
        .arg(&run_dir)
        .args(["--n", "2048"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    let csv = std::fs::read_to_string(run_dir.join("sample.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "x,y");
    assert_eq!(csv.lines().count(), 2049, "header plus one row per sample");
    assert!(run_dir.join("sample.svg").exists());

    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn config_missing_seed_names_the_field() {
    let dir = scratch("noseed");
    let mut value = small_config(1);
    value.as_object_mut().unwrap().remove("seed");
    let config = write_config(&dir, &value);

    let out = bin()
        .args(["train", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.join("run"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let msg = stderr_of(&out);
    assert!(msg.contains("seed"), "diagnostic was: {msg}");

    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn config_unknown_field_is_rejected_with_location() {
    let dir = scratch("unknown");
    let mut value = small_config(1);
    value
        .as_object_mut()
        .unwrap()
        .insert("learning_rate".into(), serde_json::json!(0.1));
    let config = write_config(&dir, &value);

    let out = bin()
        .args(["train", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.join("run"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let msg = stderr_of(&out);
    assert!(msg.contains("learning_rate"), "diagnostic was: {msg}");
    assert!(msg.contains("line"), "diagnostic was: {msg}");

    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn theory_check_passes_and_writes_report() {
    let dir = scratch("theory");
    let report = dir.join("report.json");
    let out = bin()
        .args(["theory-check", "--out"])
        .arg(&report)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));

    let checks: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let checks = checks.as_array().unwrap();
    assert!(!checks.is_empty());
    for c in checks {
        assert!(c["pass"].as_bool().unwrap(), "failed check: {c}");
        assert!(c["name"].is_string());
        assert!(c["value"].is_number());
        assert!(c["tolerance"].is_number());
    }

    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn gradcheck_passes() {
    let out = bin().arg("gradcheck").output().unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("checks passed"));
}

#[test]
fn ablation_unknown_preset_lists_available_ones() {
    let out = bin()
        .args(["ablation", "--preset", "nope", "--cycles", "1", "--seeds", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let msg = stderr_of(&out);
    for name in ["defaults", "relu-positive", "ratio-5-1", "ratio-1-5"] {
        assert!(msg.contains(name), "diagnostic was: {msg}");
    }
}

#[test]
fn ablation_runs_both_variants_per_seed() {
    let dir = scratch("ablation");
    let report_path = dir.join("ablation.json");
    let out = bin()
        .args(["ablation", "--preset", "ratio-5-1", "--seeds", "1,2", "--cycles", "60", "--out"])
        .arg(&report_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("softmax"));
    assert!(stdout.contains("baseline"));

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["runs"].as_array().unwrap().len(), 4);

    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn sample_with_missing_checkpoint_is_usage_error() {
    let out = bin()
        .args(["sample", "--checkpoint", "/nonexistent/run", "--n", "8"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
