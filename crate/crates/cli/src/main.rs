use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use srlab::{data_paths, render, run_sweep, sidecar, Mode, SweepConfig};

/// Phase-diagram sweeps for a squeezed-light-driven atom-cavity system.
#[derive(Debug, Parser)]
#[command(name = "srlab", version)]
struct Cli {
    /// meanfield-map, fluctuation-map, stability-map, switching-curve,
    /// quantum-curve, lambda-sweep or wigner
    mode: Mode,
    /// Sweep configuration file
    #[arg(long)]
    config: PathBuf,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads (default: all cores)
    #[arg(long, env = "SRLAB_WORKERS")]
    workers: Option<usize>,
    /// Write data files only
    #[arg(long)]
    no_render: bool,
}

const EXIT_CONFIG: u8 = 1;
const EXIT_PARTIAL: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("srlab: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    let cfg = SweepConfig::from_file(&cli.config, Some(cli.mode))
        .map_err(|e| format!("{}: {e}", cli.config.display()))?;
    let workers = cli
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let out = run_sweep(&cfg, workers).map_err(|e| e.to_string())?;

    std::fs::create_dir_all(&cli.out)
        .map_err(|e| format!("cannot create {}: {e}", cli.out.display()))?;
    let (csv, json) = data_paths(&cfg, &cli.out);
    std::fs::write(&csv, out.table.to_csv())
        .map_err(|e| format!("cannot write {}: {e}", csv.display()))?;
    let mut files = vec![csv.clone()];
    println!(
        "{}: {} points, {} rows, {} failed -> {}",
        cfg.mode,
        out.points,
        out.table.rows.len(),
        out.failures,
        csv.display()
    );

    if !cli.no_render {
        let summaries =
            render(&out.table, cfg.mode, &cli.out, &cfg.name).map_err(|e| e.to_string())?;
        for s in summaries {
            let at: Vec<String> = s.argmax.iter().map(|v| format!("{v:.4}")).collect();
            println!(
                "  {} [{}] min {:.6e} max {:.6e} at ({})",
                s.file.display(),
                s.column,
                s.vmin,
                s.vmax,
                at.join(", ")
            );
            files.push(s.file);
        }
    }
    if cfg.json {
        let body = serde_json::to_string_pretty(&sidecar(&cfg, &out, &files))
            .map_err(|e| e.to_string())?;
        std::fs::write(&json, body + "\n")
            .map_err(|e| format!("cannot write {}: {e}", json.display()))?;
    }
    Ok(if out.failures > 0 {
        ExitCode::from(EXIT_PARTIAL)
    } else {
        ExitCode::SUCCESS
    })
}
