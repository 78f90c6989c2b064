use std::path::Path;
use std::process::Command;

use nlslab::runner::{parse_config, read_records, run_preset, verify_records, RunConfig};

fn small_decay(output: &Path) -> String {
    format!(
        r#"
preset = "decay"
output = "{}"

[grid]
l = 40.0
nx = 256
ny = 8

[control]
t_end = 0.5
sample_every = 50
"#,
        output.display()
    )
}

fn nlslab(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_nlslab"))
        .args(args)
        .env("NLSLAB_THREADS", "1")
        .output()
        .expect("spawn nlslab")
}

#[test]
fn row_count_follows_the_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = parse_config(&small_decay(dir.path())).unwrap();
    let out = run_preset(&cfg).unwrap();
    let (header, rows) = read_records(&dir.path().join("records.csv")).unwrap();
    let c = &cfg.control;
    let expected = 1 + (c.t_end / (c.dt * c.sample_every as f64)).floor() as usize;
    assert_eq!(rows.len(), expected);
    assert_eq!(out.records.len(), expected);
    assert_eq!(header[0], "t");
    assert_eq!(header.last().unwrap(), "boundary_guard_flag");
    for name in ["exponents.json", "manifest.json", "final.bin"] {
        assert!(dir.path().join(name).exists(), "{name} missing");
    }
    assert!(!dir.path().join("records.csv.partial").exists());
    let v = verify_records(&dir.path().join("records.csv"), 1e-8, 1e-10).unwrap();
    assert!(v.passed());
}

#[test]
fn records_are_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_preset(&parse_config(&small_decay(a.path())).unwrap()).unwrap();
    run_preset(&parse_config(&small_decay(b.path())).unwrap()).unwrap();
    let ra = std::fs::read(a.path().join("records.csv")).unwrap();
    let rb = std::fs::read(b.path().join("records.csv")).unwrap();
    assert_eq!(ra, rb);
}

#[test]
fn config_round_trips_through_toml() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = parse_config(&small_decay(dir.path())).unwrap();
    let back = parse_config(&cfg.to_toml().unwrap()).unwrap();
    assert_eq!(back, cfg);
    assert_eq!(cfg.grid.d, RunConfig::preset_defaults(cfg.preset).grid.d);
}

#[test]
fn exponents_preset_writes_the_worked_tuple() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        "preset = \"exponents\"\noutput = \"{}\"\n[grid]\nd = 1\n[physics]\nalpha = \"5\"\n[exponents]\nr = \"8\"\n",
        dir.path().display()
    );
    let out = run_preset(&parse_config(&text).unwrap()).unwrap();
    assert!(out.passed());
    let json: serde_json::Value =
        serde_json::from_reader(std::fs::File::open(dir.path().join("exponents.json")).unwrap())
            .unwrap();
    assert_eq!(json["critical"]["value"]["inv_q"], "11/80");
    assert_eq!(json["critical"]["value"]["inv_r_tilde"], "1/4");
    assert_eq!(json["auxiliary"]["value"]["inv_l"], "5/32");
    assert_eq!(json["all_feasible"], true);
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();

    // a 0.5 time-unit decay run cannot reach the decay factor: check failure
    let cfg = dir.path().join("decay.toml");
    std::fs::write(&cfg, small_decay(&dir.path().join("decay"))).unwrap();
    let out = nlslab(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("FAIL decay_lq_4"));
    assert!(stdout.contains("PASS morawetz_inequality"));

    let out = nlslab(&[
        "exponents",
        "--d",
        "1",
        "--alpha",
        "5",
        "--r",
        "8",
        "--mode",
        "critical",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let constraints = json["report"]["constraints"].as_array().unwrap();
    for key in ["constraint", "lhs", "cmp", "rhs", "ok"] {
        assert!(
            constraints.iter().all(|c| c.get(key).is_some()),
            "missing {key}"
        );
    }

    let out = nlslab(&[
        "exponents",
        "--d",
        "1",
        "--alpha",
        "5",
        "--r",
        "6",
        "--mode",
        "critical",
    ]);
    assert_eq!(out.status.code(), Some(1));

    let bad = dir.path().join("bad.toml");
    std::fs::write(
        &bad,
        format!(
            "preset = \"scattering\"\noutput = \"{}\"\n[physics]\nalpha = \"1/2\"\n",
            dir.path().join("bad").display()
        ),
    )
    .unwrap();
    let out = nlslab(&["run", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("physics.alpha"), "{stderr}");
}

#[test]
fn scattering_range_validation() {
    let text = |alpha: &str| {
        format!("preset = \"scattering\"\noutput = \"x\"\n[physics]\nalpha = \"{alpha}\"\n")
    };
    assert!(parse_config(&text("5")).is_ok());
    assert!(parse_config(&text("1/2")).is_err());
    assert!(parse_config(&text("3")).is_err());
}
