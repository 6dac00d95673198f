use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgAction, Parser, Subcommand};
use serde_json::{json, Value};
use thermoent::experiments::{
    conjecture_batch, filter_machine, finite_temperature_sweep, lindblad_heatmap, map_check, solve_machine,
    tradeoff_frontier, verify, write_outputs, Config, FigureRecord,
};
use thermoent::{Error, Result};

/// Steady states, filtering and figure sweeps for two-qudit thermal machines.
#[derive(Debug, Parser)]
#[command(name = "thermoent", version)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,

    /// Experiment configuration (TOML). Defaults apply to missing sections.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output path. Figures write CSV plus a .json sidecar; one-shot verbs write JSON.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed overriding the one in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// More logging (repeatable).
    #[arg(short, long, global = true, action = ArgAction::Count)]
    verbose: u8,

    /// Errors only.
    #[arg(short, long, global = true)]
    quiet: bool,
}

#[derive(Debug, Subcommand)]
enum Verb {
    /// Steady state of the [steady] machine.
    Steady,
    /// Steady state followed by the local filter.
    Filter,
    /// Reset versus mapped-Lindblad generator comparison.
    MapCheck,
    /// Entanglement and CHSH versus success probability.
    Figure2,
    /// Optimized negativity versus hot-bath temperature.
    Figure3,
    /// Lindblad negativity over a (T_A, T_B) grid.
    Figure4b,
    /// Fidelity with random Schmidt targets.
    Conjecture,
    /// Oracle-versus-solver and mapping suites.
    Verify,
}

impl Verb {
    fn name(&self) -> &'static str {
        match self {
            Verb::Steady => "steady",
            Verb::Filter => "filter",
            Verb::MapCheck => "map-check",
            Verb::Figure2 => "figure2",
            Verb::Figure3 => "figure3",
            Verb::Figure4b => "figure4b",
            Verb::Conjecture => "conjecture",
            Verb::Verify => "verify",
        }
    }
}

fn load(cli: &Cli) -> Result<Config> {
    let mut cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON values always serialize"));
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(v).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Io(e.to_string()))
}

fn figure_out(cli: &Cli, cfg: &Config, verb: &Verb) -> PathBuf {
    cli.out.clone().or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from(format!("{}.csv", verb.name())))
}

fn emit_figure(cli: &Cli, cfg: &Config, records: &[FigureRecord], summary: Value) -> Result<()> {
    let path = figure_out(cli, cfg, &cli.verb);
    write_outputs(&path, cli.verb.name(), records, cfg, summary.clone())?;
    print_json(&json!({ "output": path, "rows": records.len(), "summary": summary }));
    Ok(())
}

fn emit_oneshot(cli: &Cli, v: Value) -> Result<()> {
    if let Some(p) = &cli.out {
        write_json(p, &v)?;
    }
    print_json(&v);
    Ok(())
}

/// Runs the verb; `Ok(false)` means it completed but some check failed.
fn run(cli: &Cli) -> Result<bool> {
    let mut cfg = load(cli)?;
    let seed = cfg.seed;
    match cli.verb {
        Verb::Steady => {
            let s = cfg.steady_or_default();
            s.filter_spec()?;
            emit_oneshot(cli, to_value(&solve_machine(&s)?)?)?;
        }
        Verb::Filter => {
            let s = cfg.steady_or_default();
            emit_oneshot(cli, to_value(&filter_machine(&s)?)?)?;
        }
        Verb::MapCheck => {
            let m = cfg.map_check_or_default();
            let rep = map_check(&m, seed)?;
            let ok = rep.max_discrepancy <= 1e-12 && rep.max_detailed_balance <= 1e-12;
            emit_oneshot(cli, to_value(&rep)?)?;
            return Ok(ok);
        }
        Verb::Figure2 => {
            let f = cfg.figure2_or_default();
            f.validate()?;
            cfg.figure2 = Some(f.clone());
            let rep = tradeoff_frontier(&f, seed)?;
            emit_figure(cli, &cfg, &rep.records, to_value(&rep)?)?;
        }
        Verb::Figure3 => {
            let f = cfg.figure3_or_default();
            f.validate()?;
            cfg.figure3 = Some(f.clone());
            let curves = finite_temperature_sweep(&f, seed)?;
            let records: Vec<FigureRecord> = curves.iter().flat_map(|c| c.records.iter().cloned()).collect();
            let summary: Vec<Value> = curves
                .iter()
                .map(|c| json!({ "curve": c.curve, "negativities": c.negativities, "worst_drop": c.worst_drop() }))
                .collect();
            emit_figure(cli, &cfg, &records, json!({ "curves": summary }))?;
        }
        Verb::Figure4b => {
            let f = cfg.figure4b_or_default();
            f.validate()?;
            cfg.figure4b = Some(f.clone());
            let rep = lindblad_heatmap(&f)?;
            let mut summary = to_value(&rep)?;
            if let Some(obj) = summary.as_object_mut() {
                obj.remove("negativity");
            }
            emit_figure(cli, &cfg, &rep.records, summary)?;
        }
        Verb::Conjecture => {
            let c = cfg.conjecture_or_default();
            c.validate()?;
            cfg.conjecture = Some(c.clone());
            let mut records = Vec::new();
            let mut summary = Vec::new();
            for &d in &c.dims {
                let rep = conjecture_batch(d, &c, seed.wrapping_add(d as u64))?;
                records.extend(rep.records.iter().cloned());
                summary.push(to_value(&rep)?);
            }
            emit_figure(cli, &cfg, &records, json!({ "dims": summary }))?;
        }
        Verb::Verify => {
            let rep = verify::run_all(seed);
            for c in &rep.checks {
                println!(
                    "{} {} value={:.3e} tolerance={:e}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.value,
                    c.tolerance
                );
            }
            println!("passed {} failed {}", rep.passed, rep.failed);
            if let Some(p) = &cli.out {
                write_json(p, &to_value(&rep)?)?;
            }
            return Ok(rep.failed == 0);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet {
        log::LevelFilter::Error
    } else {
        match cli.verbose {
            0 => log::LevelFilter::Warn,
            1 => log::LevelFilter::Info,
            _ => log::LevelFilter::Debug,
        }
    };
    env_logger::Builder::new().filter_level(level).init();

    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let record = json!({ "error": e.kind(), "message": e.to_string(), "verb": cli.verb.name() });
            eprintln!("{record}");
            ExitCode::from(if e.is_config() { 2 } else { 1 })
        }
    }
}
