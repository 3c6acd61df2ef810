//! Grid evaluation for every mode.
//!
//! Points are independent; they run on a private rayon pool and are
//! collected by grid index, so the table does not depend on the worker
//! count.

use rayon::prelude::*;
use srlab_core::fluctuations::stable_fluctuations;
use srlab_core::meanfield::{fixed_points, label_from_points, BranchLabel, FixedPoint};
use srlab_core::quantum::{
    build_liouvillian, collective_spin, mean_photon, steady_state, wigner, DensityMatrix,
    HilbertSpec,
};
use srlab_core::{ModelParams, PhaseLabel};

use crate::config::{Mode, SweepConfig};
use crate::table::{Cell, ResultTable};

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("worker count must be at least 1")]
    NoWorkers,
    #[error("cannot start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub table: ResultTable,
    /// Grid points whose `error` cell is non-empty.
    pub failures: usize,
    pub points: usize,
}

/// Columns after the axis columns, `error` excluded.
pub fn payload_columns(mode: Mode) -> &'static [&'static str] {
    match mode {
        Mode::MeanfieldMap => &[
            "phase",
            "stable_count",
            "np_stable",
            "sp_plus_alpha_re",
            "sp_plus_alpha_im",
            "sp_plus_z",
            "sp_plus_stable",
            "sp_minus_alpha_re",
            "sp_minus_alpha_im",
            "sp_minus_z",
            "sp_minus_stable",
            "alpha_re",
            "alpha_im",
        ],
        Mode::StabilityMap => &[
            "stable_count",
            "np_stable",
            "np_max_re",
            "sp_plus_stable",
            "sp_plus_max_re",
            "sp_minus_stable",
            "sp_minus_max_re",
        ],
        Mode::FluctuationMap => &[
            "phase",
            "stable_count",
            "np_fluctuation",
            "sp_fluctuation",
            "log_np",
            "log_sp",
            "lyapunov_residual",
        ],
        Mode::SwitchingCurve => &[
            "phase",
            "stable_count",
            "np_stable",
            "alpha_re_abs",
            "alpha_im_abs",
            "alpha_abs",
        ],
        Mode::QuantumCurve => &[
            "mean_photon",
            "photon_per_atom",
            "s_x",
            "s_y",
            "s_z",
            "trace_error",
            "hermiticity_error",
            "min_eigenvalue",
            "top_band_population",
        ],
        Mode::LambdaSweep => &[
            "mean_photon",
            "photon_per_atom",
            "mf_phase",
            "mf_alpha_sq",
            "mf_fluctuation",
        ],
        Mode::Wigner => &["mean_photon", "x", "p", "w"],
    }
}

/// Full header: axis names, payload, `error`.
pub fn columns(cfg: &SweepConfig) -> Vec<String> {
    cfg.axes
        .iter()
        .map(|a| a.name.as_str().to_string())
        .chain(payload_columns(cfg.mode).iter().map(|c| c.to_string()))
        .chain(std::iter::once("error".to_string()))
        .collect()
}

/// Evaluates every grid point on `workers` threads.
pub fn run_sweep(cfg: &SweepConfig, workers: usize) -> Result<SweepOutput, SweepError> {
    if workers == 0 {
        return Err(SweepError::NoWorkers);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()?;
    let n = cfg.point_count();
    let results: Vec<(Vec<Vec<Cell>>, bool)> = pool.install(|| {
        (0..n)
            .into_par_iter()
            .map(|idx| evaluate(cfg, idx))
            .collect()
    });
    let mut table = ResultTable::new(columns(cfg));
    let mut failures = 0;
    for (rows, failed) in results {
        failures += failed as usize;
        for row in rows {
            table.push(row);
        }
    }
    Ok(SweepOutput {
        table,
        failures,
        points: n,
    })
}

fn evaluate(cfg: &SweepConfig, idx: usize) -> (Vec<Vec<Cell>>, bool) {
    let coords: Vec<Cell> = cfg.coordinates(idx).into_iter().map(Cell::Num).collect();
    let params = cfg.params_at(idx);
    let width = payload_columns(cfg.mode).len();
    let rows = match cfg.mode {
        Mode::MeanfieldMap => vec![meanfield_row(&params)],
        Mode::StabilityMap => vec![stability_row(&params)],
        Mode::FluctuationMap => vec![fluctuation_row(&params)],
        Mode::SwitchingCurve => vec![switching_row(&params)],
        Mode::QuantumCurve => vec![quantum_row(&params, cfg.fock_cutoff)],
        Mode::LambdaSweep => vec![lambda_row(&params, cfg.fock_cutoff)],
        Mode::Wigner => wigner_rows(&params, cfg),
    };
    let mut failed = false;
    let rows = rows
        .into_iter()
        .map(|(payload, error)| {
            debug_assert_eq!(payload.len(), width);
            failed |= error.is_some();
            coords
                .iter()
                .cloned()
                .chain(payload)
                .chain(std::iter::once(Cell::Text(error.unwrap_or_default())))
                .collect()
        })
        .collect();
    (rows, failed)
}

type Row = (Vec<Cell>, Option<String>);

fn nan_row(width: usize, text_cols: &[usize], error: String) -> Row {
    let cells = (0..width)
        .map(|i| {
            if text_cols.contains(&i) {
                Cell::Text(String::new())
            } else {
                Cell::Num(f64::NAN)
            }
        })
        .collect();
    (cells, Some(error))
}

fn find(points: &[FixedPoint], branch: BranchLabel) -> Option<&FixedPoint> {
    points.iter().find(|p| p.branch == branch)
}

fn phase_text(label: &srlab_core::Result<PhaseLabel>) -> String {
    match label {
        Ok(l) => l.phase.as_str().to_string(),
        Err(_) => "none".to_string(),
    }
}

/// Stable superradiant point of the positive-α_Re family, if any.
fn stable_superradiant(points: &[FixedPoint]) -> Option<&FixedPoint> {
    [BranchLabel::SpPlusPos, BranchLabel::SpMinusPos]
        .into_iter()
        .filter_map(|b| find(points, b))
        .find(|p| p.stable)
}

fn branch_cells(p: Option<&FixedPoint>) -> [Cell; 4] {
    match p {
        Some(p) => [
            p.state.alpha_re.into(),
            p.state.alpha_im.into(),
            p.state.z.into(),
            p.stable.into(),
        ],
        None => [
            f64::NAN.into(),
            f64::NAN.into(),
            f64::NAN.into(),
            false.into(),
        ],
    }
}

fn meanfield_row(params: &ModelParams) -> Row {
    let points = match fixed_points(params) {
        Ok(p) => p,
        Err(e) => return nan_row(13, &[0], e.to_string()),
    };
    let label = label_from_points(&points);
    let np_stable = find(&points, BranchLabel::NpDown).is_some_and(|p| p.stable);
    let (are, aim) = stable_superradiant(&points)
        .map(|p| (p.state.alpha_re, p.state.alpha_im))
        .unwrap_or((0.0, 0.0));
    let mut cells: Vec<Cell> = vec![
        phase_text(&label).into(),
        label.as_ref().map(|l| l.stable_count).unwrap_or(0).into(),
        np_stable.into(),
    ];
    cells.extend(branch_cells(find(&points, BranchLabel::SpPlusPos)));
    cells.extend(branch_cells(find(&points, BranchLabel::SpMinusPos)));
    cells.push(are.into());
    cells.push(aim.into());
    (cells, label.err().map(|e| e.to_string()))
}

fn stability_row(params: &ModelParams) -> Row {
    let points = match fixed_points(params) {
        Ok(p) => p,
        Err(e) => return nan_row(7, &[], e.to_string()),
    };
    let count = points.iter().filter(|p| p.stable).count();
    let pair = |b: BranchLabel| -> [Cell; 2] {
        match find(&points, b) {
            Some(p) => [p.stable.into(), p.verdict.max_real_part.into()],
            None => [false.into(), f64::NAN.into()],
        }
    };
    let mut cells: Vec<Cell> = vec![count.into()];
    cells.extend(pair(BranchLabel::NpDown));
    cells.extend(pair(BranchLabel::SpPlusPos));
    cells.extend(pair(BranchLabel::SpMinusPos));
    (cells, None)
}

fn fluctuation_row(params: &ModelParams) -> Row {
    let cell = match stable_fluctuations(params) {
        Ok(c) => c,
        Err(e) => return nan_row(7, &[0], e.to_string()),
    };
    let np = cell
        .normal()
        .map(|b| b.photon_fluctuation)
        .unwrap_or(f64::NAN);
    let sp = cell
        .superradiant()
        .map(|b| b.photon_fluctuation)
        .unwrap_or(f64::NAN);
    let residual = cell
        .branches
        .iter()
        .map(|b| b.lyapunov_residual)
        .fold(0.0, f64::max);
    let cells = vec![
        cell.phase.phase.as_str().into(),
        cell.phase.stable_count.into(),
        np.into(),
        sp.into(),
        np.ln_1p().into(),
        sp.ln_1p().into(),
        residual.into(),
    ];
    (cells, None)
}

fn switching_row(params: &ModelParams) -> Row {
    let points = match fixed_points(params) {
        Ok(p) => p,
        Err(e) => return nan_row(6, &[0], e.to_string()),
    };
    let label = label_from_points(&points);
    let np_stable = find(&points, BranchLabel::NpDown).is_some_and(|p| p.stable);
    let (re, im) = stable_superradiant(&points)
        .map(|p| (p.state.alpha_re.abs(), p.state.alpha_im.abs()))
        .unwrap_or((0.0, 0.0));
    let cells = vec![
        phase_text(&label).into(),
        label.as_ref().map(|l| l.stable_count).unwrap_or(0).into(),
        np_stable.into(),
        re.into(),
        im.into(),
        re.hypot(im).into(),
    ];
    (cells, label.err().map(|e| e.to_string()))
}

fn solve(params: &ModelParams, cutoff: usize) -> Result<DensityMatrix, String> {
    let spec = HilbertSpec::new(params.n_atoms, cutoff).map_err(|e| e.to_string())?;
    let l = build_liouvillian(params, &spec).map_err(|e| e.to_string())?;
    steady_state(&l).map_err(|e| e.to_string())
}

/// Population of the top tenth of the Fock ladder.
fn top_band(rho: &DensityMatrix) -> f64 {
    let cutoff = rho.layout().fock_cutoff();
    rho.photon_tail(cutoff + 1 - (cutoff / 10).max(1))
}

fn quantum_row(params: &ModelParams, cutoff: usize) -> Row {
    let rho = match solve(params, cutoff) {
        Ok(r) => r,
        Err(e) => return nan_row(9, &[], e),
    };
    let n = mean_photon(&rho);
    let s = collective_spin(&rho).unwrap_or([f64::NAN; 3]);
    let report = rho.report();
    let cells = vec![
        n.into(),
        (n / params.n_atoms as f64).into(),
        s[0].into(),
        s[1].into(),
        s[2].into(),
        report.trace_error.into(),
        report.hermiticity_error.into(),
        report.min_eigenvalue.into(),
        top_band(&rho).into(),
    ];
    (cells, None)
}

fn lambda_row(params: &ModelParams, cutoff: usize) -> Row {
    let rho = match solve(params, cutoff) {
        Ok(r) => r,
        Err(e) => return nan_row(5, &[2], e),
    };
    let n = mean_photon(&rho);
    // mean-field companion values are informative only; failures leave NaN
    let (phase, alpha_sq, fluct) = match stable_fluctuations(params) {
        Ok(cell) => {
            let best = cell
                .branches
                .iter()
                .max_by(|a, b| a.state.amplitude().total_cmp(&b.state.amplitude()));
            (
                cell.phase.phase.as_str().to_string(),
                best.map(|b| b.state.amplitude().powi(2))
                    .unwrap_or(f64::NAN),
                best.map(|b| b.photon_fluctuation).unwrap_or(f64::NAN),
            )
        }
        Err(_) => (String::new(), f64::NAN, f64::NAN),
    };
    let cells = vec![
        n.into(),
        (n / params.n_atoms as f64).into(),
        phase.into(),
        alpha_sq.into(),
        fluct.into(),
    ];
    (cells, None)
}

fn wigner_rows(params: &ModelParams, cfg: &SweepConfig) -> Vec<Row> {
    let result = solve(params, cfg.fock_cutoff).and_then(|rho| {
        let w = wigner(&rho, &cfg.grid).map_err(|e| e.to_string())?;
        Ok((mean_photon(&rho), w))
    });
    match result {
        Ok((n, w)) => {
            let g = w.grid;
            let mut rows = Vec::with_capacity(g.nx * g.np);
            for i in 0..g.nx {
                for j in 0..g.np {
                    rows.push((
                        vec![n.into(), g.x(i).into(), g.p(j).into(), w.get(i, j).into()],
                        None,
                    ));
                }
            }
            rows
        }
        Err(e) => vec![nan_row(4, &[], e)],
    }
}
