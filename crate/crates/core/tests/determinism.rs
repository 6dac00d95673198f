use thermoent::experiments::{
    conjecture_batch, lindblad_heatmap, tradeoff_frontier, write_csv, Config, ConjectureConfig, Figure2Config,
    Figure4bConfig, FigureRecord, OptimizerSettings, SweepAxis,
};

fn csv_bytes(records: &[FigureRecord]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_csv(records, &mut buf).unwrap();
    buf
}

#[test]
fn frontier_is_bit_identical_for_a_fixed_seed() {
    let cfg = Figure2Config {
        psuc_values: Some(vec![2e-3, 0.2]),
        optimizer: OptimizerSettings { restarts: 2, budget: 500, tolerance: 1e-13 },
        ..Default::default()
    };
    let a = tradeoff_frontier(&cfg, 17).unwrap();
    let b = tradeoff_frontier(&cfg, 17).unwrap();
    assert_eq!(csv_bytes(&a.records), csv_bytes(&b.records));
}

#[test]
fn heatmap_and_conjecture_are_reproducible() {
    let grid =
        Figure4bConfig { t_a: SweepAxis::log(0.2, 20.0, 4), t_b: SweepAxis::log(0.02, 2.0, 3), ..Default::default() };
    let a = lindblad_heatmap(&grid).unwrap();
    let b = lindblad_heatmap(&grid).unwrap();
    assert_eq!(csv_bytes(&a.records), csv_bytes(&b.records));
    assert!(a.records.iter().enumerate().all(|(i, r)| r.index == i));

    let c = ConjectureConfig { trials: 4, ..Default::default() };
    let x = conjecture_batch(3, &c, 5).unwrap();
    let y = conjecture_batch(3, &c, 5).unwrap();
    let z = conjecture_batch(3, &c, 6).unwrap();
    assert_eq!(csv_bytes(&x.records), csv_bytes(&y.records));
    assert_ne!(x.records[0].schmidt, z.records[0].schmidt);
}

#[test]
fn config_file_drives_a_sweep() {
    let text = r#"
seed = 9

[figure4b]
t_a = { min = 0.3, max = 30.0, points = 3, spacing = "log" }
t_b = { min = 0.03, max = 3.0, points = 2, spacing = "linear" }

[figure4b.params]
gamma_b12_factor = 1.0
"#;
    let dir = std::env::temp_dir().join(format!("thermoent-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sweep.toml");
    std::fs::write(&path, text).unwrap();
    let cfg = Config::load(&path).unwrap();
    let f = cfg.figure4b_or_default();
    let rep = lindblad_heatmap(&f).unwrap();
    assert_eq!(rep.records.len(), 6);
    assert_eq!(rep.t_b, vec![0.03, 3.0]);
    assert!(rep.records.iter().all(|r| r.rate_b12 == Some(f.params.gamma_b)));
    std::fs::remove_dir_all(dir).ok();
}
