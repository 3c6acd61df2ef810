//! Sweep driver for `srlab-core`: configuration, parallel grid evaluation,
//! CSV/JSON export and PNG rendering.

// `!(a < b)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod render;
pub mod sweep;
pub mod table;

use std::path::{Path, PathBuf};

pub use config::{ConfigError, Mode, SweepConfig};
pub use render::{render, RenderSummary};
pub use sweep::{run_sweep, SweepOutput};
pub use table::ResultTable;

/// Provenance record written next to the CSV.
pub fn sidecar(cfg: &SweepConfig, out: &SweepOutput, files: &[PathBuf]) -> serde_json::Value {
    let names: Vec<String> = files
        .iter()
        .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .collect();
    serde_json::json!({
        "mode": cfg.mode.as_str(),
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg.echo,
        "points": out.points,
        "rows": out.table.rows.len(),
        "failures": out.failures,
        "columns": out.table.columns,
        "files": names,
    })
}

/// Paths of the CSV and JSON outputs for `cfg` under `dir`.
pub fn data_paths(cfg: &SweepConfig, dir: &Path) -> (PathBuf, PathBuf) {
    (
        dir.join(format!("{}.csv", cfg.name)),
        dir.join(format!("{}.json", cfg.name)),
    )
}
