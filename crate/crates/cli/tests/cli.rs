use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_thermoent"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(bytes: &[u8]) -> serde_json::Value {
    serde_json::from_slice(bytes).expect("valid JSON")
}

#[test]
fn steady_without_interaction_prints_product_populations() {
    let cfg = configs().join("uncoupled.toml");
    let out = run(&["steady", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out.stdout);
    let pops: Vec<f64> = v["populations"].as_array().unwrap().iter().map(|p| p.as_f64().unwrap()).collect();
    for (k, p) in pops.iter().enumerate() {
        let expected = if k % 3 == 0 { 1.0 / 3.0 } else { 0.0 };
        assert!((p - expected).abs() < 1e-10);
    }
}

#[test]
fn domain_errors_exit_one_with_a_record() {
    let cfg = configs().join("uncoupled.toml");
    let out = run(&["filter", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out.stderr);
    assert_eq!(v["error"], "vanishing_success");
    assert_eq!(v["verb"], "filter");
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[figure4b]\nt_a = { min = 1.0, max = 0.5, points = 3, spacing = \"log\" }\n").unwrap();
    let out =
        run(&["figure4b", "--config", bad.to_str().unwrap(), "--out", dir.path().join("x.csv").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out.stderr)["error"], "config");

    let missing = run(&["steady", "--config", "/nonexistent/config.toml"]);
    assert_eq!(missing.status.code(), Some(2));

    let typo = dir.path().join("typo.toml");
    std::fs::write(&typo, "sed = 1\n").unwrap();
    assert_eq!(run(&["steady", "--config", typo.to_str().unwrap()]).status.code(), Some(2));

    assert_eq!(run(&["figure5"]).status.code(), Some(2));
}

#[test]
fn filter_reports_the_entangled_qutrit_state() {
    let cfg = configs().join("qutrit.toml");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("filter.json");
    let out = run(&["filter", "-q", "--config", cfg.to_str().unwrap(), "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&std::fs::read(&path).unwrap());
    let n = v["report"]["negativity"].as_f64().unwrap();
    assert!(n > 0.499 && n <= 0.5, "{n}");
    assert!(v["report"]["chsh"].as_f64().unwrap() > 2.8);
}

#[test]
fn heatmap_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("grid.toml");
    std::fs::write(
        &cfg,
        "seed = 3\n[figure4b]\nt_a = { min = 0.1, max = 10.0, points = 5, spacing = \"log\" }\n\
         t_b = { min = 0.01, max = 1.0, points = 4, spacing = \"log\" }\n",
    )
    .unwrap();
    let csv = dir.path().join("heat.csv");
    let out = run(&["figure4b", "--config", cfg.to_str().unwrap(), "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(!text.contains('\r'));
    assert_eq!(text.lines().count(), 1 + 20);
    assert!(text.lines().next().unwrap().starts_with("experiment,index,objective,status,model"));
    let side = json(&std::fs::read(csv.with_extension("json")).unwrap());
    assert_eq!(side["experiment"], "figure4b");
    assert_eq!(side["config"]["seed"], 3);
    assert_eq!(side["config"]["figure4b"]["params"]["g"], 1.6e-3);
    assert!(side["version"].is_string());
}

#[test]
fn reruns_are_reproducible_and_leave_the_config_untouched() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    let text = "[conjecture]\ndims = [3]\ntrials = 3\n";
    std::fs::write(&cfg, text).unwrap();
    let mut outputs = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let p = dir.path().join(name);
        let out = run(&["conjecture", "--seed", "12", "--config", cfg.to_str().unwrap(), "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        outputs.push(std::fs::read(p).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(std::fs::read_to_string(&cfg).unwrap(), text);
}

#[test]
fn verify_prints_counts() {
    let out = run(&["verify", "-q"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("passed "), "{text}");
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 20);
}

#[test]
fn map_check_reports_agreement() {
    let out = run(&["map-check", "--seed", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out.stdout);
    assert_eq!(v["draws"].as_array().unwrap().len(), 20);
    assert!(v["max_discrepancy"].as_f64().unwrap() < 1e-12);
}
