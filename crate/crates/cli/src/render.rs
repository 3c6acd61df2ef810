//! PNG heatmaps and line plots, rasterized in-process.

use std::path::{Path, PathBuf};

use image::{Rgb, RgbImage};

use crate::config::Mode;
use crate::sweep::payload_columns;
use crate::table::ResultTable;

const AXIS_NAMES: [&str; 5] = ["lambda", "g_drive", "delta", "kappa", "n_atoms"];
const WHITE: Rgb<u8> = Rgb([255, 255, 255]);
const BLACK: Rgb<u8> = Rgb([0, 0, 0]);
/// Curve colours, cycled per series.
const PALETTE: [Rgb<u8>; 6] = [
    Rgb([200, 30, 30]),
    Rgb([30, 60, 200]),
    Rgb([20, 140, 60]),
    Rgb([20, 20, 20]),
    Rgb([160, 80, 200]),
    Rgb([230, 140, 20]),
];
/// Viridis anchor colours, evenly spaced on [0, 1].
const COLORMAP: [[u8; 3]; 9] = [
    [68, 1, 84],
    [71, 44, 122],
    [59, 81, 139],
    [44, 113, 142],
    [33, 144, 141],
    [39, 173, 129],
    [92, 200, 99],
    [170, 220, 50],
    [253, 231, 37],
];

#[derive(Debug, thiserror::Error)]
pub enum RenderError {
    #[error("table does not match the `{mode}` schema: {reason}")]
    Schema { mode: Mode, reason: String },
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: image::ImageError,
    },
}

/// What was drawn into one image.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderSummary {
    pub file: PathBuf,
    /// Column shown (colour for heatmaps, y for curves).
    pub column: String,
    pub vmin: f64,
    pub vmax: f64,
    /// Coordinates of the largest finite value.
    pub argmax: Vec<f64>,
}

/// Maps t ∈ [0, 1] onto the colormap; NaN is white.
pub fn colormap(t: f64) -> Rgb<u8> {
    if t.is_nan() {
        return WHITE;
    }
    let t = t.clamp(0.0, 1.0) * (COLORMAP.len() - 1) as f64;
    let k = (t.floor() as usize).min(COLORMAP.len() - 2);
    let f = t - k as f64;
    let (a, b) = (COLORMAP[k], COLORMAP[k + 1]);
    Rgb(std::array::from_fn(|i| {
        (a[i] as f64 + (b[i] as f64 - a[i] as f64) * f).round() as u8
    }))
}

/// Axis columns of `table`, after checking the header against `mode`.
pub fn check_schema(table: &ResultTable, mode: Mode) -> Result<Vec<String>, RenderError> {
    let fail = |reason: String| RenderError::Schema { mode, reason };
    let payload = payload_columns(mode);
    let n = table.columns.len();
    if n < payload.len() + 1 || table.columns[n - 1] != "error" {
        return Err(fail("last column must be `error`".into()));
    }
    let n_axes = n - payload.len() - 1;
    let (lo, hi) = mode.axis_range();
    if n_axes < lo || n_axes > hi {
        return Err(fail(format!(
            "expected {lo}..={hi} axis columns, found {n_axes}"
        )));
    }
    for (got, want) in table.columns[n_axes..n - 1].iter().zip(payload) {
        if got != want {
            return Err(fail(format!("column `{got}` where `{want}` was expected")));
        }
    }
    let axes = table.columns[..n_axes].to_vec();
    if let Some(bad) = axes.iter().find(|a| !AXIS_NAMES.contains(&a.as_str())) {
        return Err(fail(format!("`{bad}` is not an axis name")));
    }
    if !table.rows.iter().all(|r| r.len() == n) {
        return Err(fail("ragged rows".into()));
    }
    Ok(axes)
}

/// Writes the images for `mode` into `dir` as `<stem>_<what>.png`.
pub fn render(
    table: &ResultTable,
    mode: Mode,
    dir: &Path,
    stem: &str,
) -> Result<Vec<RenderSummary>, RenderError> {
    let axes = check_schema(table, mode)?;
    let file = |what: &str| dir.join(format!("{stem}_{what}.png"));
    match mode {
        Mode::MeanfieldMap => {
            // white where the stable state is the normal phase
            let np: Vec<bool> = table
                .texts("phase")
                .expect("checked")
                .iter()
                .map(|p| p == "NP" || p == "none" || p.is_empty())
                .collect();
            let mut out = Vec::new();
            for col in ["alpha_re", "alpha_im"] {
                let v = masked(table.numbers(col).expect("checked"), &np);
                out.push(heatmap(table, &axes, col, &v, &file(col))?);
            }
            Ok(out)
        }
        Mode::StabilityMap => {
            let mut out = Vec::new();
            let count = table.numbers("stable_count").expect("checked");
            out.push(heatmap(
                table,
                &axes,
                "stable_count",
                &count,
                &file("count"),
            )?);
            for (col, what) in [("np_stable", "np"), ("sp_plus_stable", "sp")] {
                let v = table.numbers(col).expect("checked");
                let unstable: Vec<bool> = v.iter().map(|x| *x != 1.0).collect();
                out.push(heatmap(
                    table,
                    &axes,
                    col,
                    &masked(v, &unstable),
                    &file(what),
                )?);
            }
            Ok(out)
        }
        Mode::FluctuationMap => ["log_np", "log_sp"]
            .into_iter()
            .map(|col| {
                let v = table.numbers(col).expect("checked");
                heatmap(table, &axes, col, &v, &file(col))
            })
            .collect(),
        Mode::SwitchingCurve => Ok(vec![curves(
            table,
            &axes,
            &["alpha_re_abs", "alpha_im_abs"],
            &file("alpha"),
        )?]),
        Mode::QuantumCurve | Mode::LambdaSweep => Ok(vec![curves(
            table,
            &axes,
            &["mean_photon"],
            &file("photon"),
        )?]),
        Mode::Wigner => wigner_panels(table, &axes, dir, stem),
    }
}

fn masked(mut v: Vec<f64>, mask: &[bool]) -> Vec<f64> {
    for (x, m) in v.iter_mut().zip(mask) {
        if *m {
            *x = f64::NAN;
        }
    }
    v
}

fn finite_range(v: &[f64]) -> (f64, f64) {
    v.iter()
        .filter(|x| x.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        })
}

fn argmax(v: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, x) in v.iter().enumerate() {
        if x.is_finite() && best.is_none_or(|b| *x > v[b]) {
            best = Some(i);
        }
    }
    best
}

fn save(img: &RgbImage, path: &Path) -> Result<(), RenderError> {
    img.save_with_format(path, image::ImageFormat::Png)
        .map_err(|source| RenderError::Io {
            path: path.to_path_buf(),
            source,
        })
}

/// Distinct values in first-seen order.
fn distinct(v: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for &x in v {
        if !out.iter().any(|y| y.to_bits() == x.to_bits()) {
            out.push(x);
        }
    }
    out
}

/// Colour map of `values` over the two axis columns; axis1 runs left to
/// right, axis2 bottom to top.
fn heatmap(
    table: &ResultTable,
    axes: &[String],
    column: &str,
    values: &[f64],
    path: &Path,
) -> Result<RenderSummary, RenderError> {
    let xs = table.numbers(&axes[0]).expect("axis column");
    let ys = table.numbers(&axes[1]).expect("axis column");
    let (ux, uy) = (distinct(&xs), distinct(&ys));
    let mut cells = vec![f64::NAN; ux.len() * uy.len()];
    for ((x, y), v) in xs.iter().zip(&ys).zip(values) {
        let i = ux
            .iter()
            .position(|u| u.to_bits() == x.to_bits())
            .expect("present");
        let j = uy
            .iter()
            .position(|u| u.to_bits() == y.to_bits())
            .expect("present");
        cells[i * uy.len() + j] = *v;
    }
    let (vmin, vmax) = finite_range(values);
    let img = raster(ux.len(), uy.len(), &cells, vmin, vmax);
    save(&img, path)?;
    let argmax = argmax(values)
        .map(|k| vec![xs[k], ys[k]])
        .unwrap_or_default();
    Ok(RenderSummary {
        file: path.to_path_buf(),
        column: column.to_string(),
        vmin,
        vmax,
        argmax,
    })
}

/// `cells[i * ny + j]` drawn as an image with square blocks per cell.
fn raster(nx: usize, ny: usize, cells: &[f64], vmin: f64, vmax: f64) -> RgbImage {
    let scale = (480 / nx.max(ny)).max(1) as u32;
    let span = vmax - vmin;
    let mut img = RgbImage::from_pixel(nx as u32 * scale, ny as u32 * scale, WHITE);
    for i in 0..nx {
        for j in 0..ny {
            let v = cells[i * ny + j];
            let t = if !v.is_finite() {
                f64::NAN
            } else if span > 0.0 {
                (v - vmin) / span
            } else {
                0.5
            };
            let c = colormap(t);
            let row = (ny - 1 - j) as u32 * scale;
            for dx in 0..scale {
                for dy in 0..scale {
                    img.put_pixel(i as u32 * scale + dx, row + dy, c);
                }
            }
        }
    }
    img
}

const WIDTH: u32 = 640;
const HEIGHT: u32 = 400;
const MARGIN: u32 = 30;

/// Line plot of `columns` against axis1, one line per axis2 value.
fn curves(
    table: &ResultTable,
    axes: &[String],
    columns: &[&str],
    path: &Path,
) -> Result<RenderSummary, RenderError> {
    let xs = table.numbers(&axes[0]).expect("axis column");
    let series: Vec<f64> = match axes.get(1) {
        Some(a) => table.numbers(a).expect("axis column"),
        None => vec![0.0; xs.len()],
    };
    let ys: Vec<Vec<f64>> = columns
        .iter()
        .map(|c| table.numbers(c).expect("checked"))
        .collect();
    let all: Vec<f64> = ys.iter().flatten().copied().collect();
    let (mut ymin, mut ymax) = finite_range(&all);
    let (xmin, xmax) = finite_range(&xs);
    ymin = ymin.min(0.0);
    if !(ymax > ymin) {
        ymax = ymin + 1.0;
    }
    ymax += 0.05 * (ymax - ymin);

    let mut img = RgbImage::from_pixel(WIDTH, HEIGHT, WHITE);
    let (x0, x1) = (MARGIN as f64, (WIDTH - MARGIN) as f64);
    let (y0, y1) = ((HEIGHT - MARGIN) as f64, MARGIN as f64);
    frame(&mut img);
    let to_px = |x: f64, y: f64| {
        let px = x0 + (x - xmin) / (xmax - xmin).max(f64::MIN_POSITIVE) * (x1 - x0);
        let py = y0 + (y - ymin) / (ymax - ymin) * (y1 - y0);
        (px, py)
    };
    for (s_idx, s) in distinct(&series).into_iter().enumerate() {
        let rows: Vec<usize> = (0..xs.len())
            .filter(|&k| series[k].to_bits() == s.to_bits())
            .collect();
        for (c_idx, col) in ys.iter().enumerate() {
            let color = PALETTE[(s_idx * columns.len() + c_idx) % PALETTE.len()];
            let dashed = c_idx % 2 == 1;
            let mut counter = 0u32;
            for w in rows.windows(2) {
                let (a, b) = (w[0], w[1]);
                if !(col[a].is_finite() && col[b].is_finite()) {
                    continue;
                }
                let (pa, pb) = (to_px(xs[a], col[a]), to_px(xs[b], col[b]));
                line(&mut img, pa, pb, color, dashed, &mut counter);
            }
        }
    }
    save(&img, path)?;
    let (vmin, vmax) = finite_range(&ys[0]);
    let argmax = argmax(&ys[0]).map(|k| vec![xs[k]]).unwrap_or_default();
    Ok(RenderSummary {
        file: path.to_path_buf(),
        column: columns[0].to_string(),
        vmin,
        vmax,
        argmax,
    })
}

fn frame(img: &mut RgbImage) {
    for x in MARGIN..=WIDTH - MARGIN {
        img.put_pixel(x, MARGIN, BLACK);
        img.put_pixel(x, HEIGHT - MARGIN, BLACK);
    }
    for y in MARGIN..=HEIGHT - MARGIN {
        img.put_pixel(MARGIN, y, BLACK);
        img.put_pixel(WIDTH - MARGIN, y, BLACK);
    }
}

/// 2-px line by sampling; `counter` carries the dash phase across segments.
fn line(
    img: &mut RgbImage,
    a: (f64, f64),
    b: (f64, f64),
    c: Rgb<u8>,
    dashed: bool,
    counter: &mut u32,
) {
    let steps = ((b.0 - a.0).abs().max((b.1 - a.1).abs()).ceil() as u32).max(1);
    for k in 0..=steps {
        *counter += 1;
        if dashed && (*counter / 6) % 2 == 1 {
            continue;
        }
        let t = k as f64 / steps as f64;
        let x = (a.0 + (b.0 - a.0) * t).round() as i64;
        let y = (a.1 + (b.1 - a.1) * t).round() as i64;
        for (dx, dy) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            let (px, py) = (x + dx, y + dy);
            if px >= 0 && py >= 0 && (px as u32) < img.width() && (py as u32) < img.height() {
                img.put_pixel(px as u32, py as u32, c);
            }
        }
    }
}

fn wigner_panels(
    table: &ResultTable,
    axes: &[String],
    dir: &Path,
    stem: &str,
) -> Result<Vec<RenderSummary>, RenderError> {
    let xs = table.numbers("x").expect("checked");
    let ps = table.numbers("p").expect("checked");
    let ws = table.numbers("w").expect("checked");
    let panel_key: Vec<f64> = match axes.first() {
        Some(a) => table.numbers(a).expect("axis column"),
        None => vec![0.0; xs.len()],
    };
    let mut out = Vec::new();
    for (idx, key) in distinct(&panel_key).into_iter().enumerate() {
        let rows: Vec<usize> = (0..xs.len())
            .filter(|&k| panel_key[k].to_bits() == key.to_bits())
            .collect();
        let px: Vec<f64> = rows.iter().map(|&k| xs[k]).collect();
        let pp: Vec<f64> = rows.iter().map(|&k| ps[k]).collect();
        let pw: Vec<f64> = rows.iter().map(|&k| ws[k]).collect();
        let (ux, up) = (distinct(&px), distinct(&pp));
        let path = dir.join(format!("{stem}_w{idx}.png"));
        let (vmin, vmax) = finite_range(&pw);
        if ux.len() * up.len() == pw.len() && pw.len() > 1 {
            let img = raster(ux.len(), up.len(), &pw, vmin, vmax);
            save(&img, &path)?;
        } else {
            // failed panel: a blank tile keeps file numbering stable
            save(&RgbImage::from_pixel(8, 8, WHITE), &path)?;
        }
        let mut argmax = argmax(&pw).map(|k| vec![px[k], pp[k]]).unwrap_or_default();
        if !axes.is_empty() {
            argmax.insert(0, key);
        }
        out.push(RenderSummary {
            file: path,
            column: "w".into(),
            vmin,
            vmax,
            argmax,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::Cell;

    #[test]
    fn colormap_endpoints_and_nan() {
        assert_eq!(colormap(0.0), Rgb([68, 1, 84]));
        assert_eq!(colormap(1.0), Rgb([253, 231, 37]));
        assert_eq!(colormap(f64::NAN), WHITE);
        assert_eq!(colormap(2.0), colormap(1.0));
    }

    fn curve_table() -> ResultTable {
        let mut cols: Vec<String> = vec!["g_drive".into()];
        cols.extend(
            payload_columns(Mode::QuantumCurve)
                .iter()
                .map(|s| s.to_string()),
        );
        cols.push("error".into());
        let mut t = ResultTable::new(cols);
        for k in 0..5 {
            let g = k as f64 * 0.25;
            let mut row: Vec<Cell> = vec![g.into(), (g * g).into()];
            row.extend((0..8).map(|_| Cell::Num(0.0)));
            row.push("".into());
            t.push(row);
        }
        t
    }

    #[test]
    fn schema_mismatch_is_reported() {
        let t = curve_table();
        assert!(check_schema(&t, Mode::QuantumCurve).is_ok());
        assert!(matches!(
            check_schema(&t, Mode::LambdaSweep),
            Err(RenderError::Schema { .. })
        ));
        assert!(matches!(
            check_schema(&t, Mode::MeanfieldMap),
            Err(RenderError::Schema { .. })
        ));
    }

    #[test]
    fn curve_render_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let t = curve_table();
        let a = render(&t, Mode::QuantumCurve, dir.path(), "a").unwrap();
        let b = render(&t, Mode::QuantumCurve, dir.path(), "b").unwrap();
        assert_eq!(a[0].vmax, 1.0);
        assert_eq!(a[0].argmax, vec![1.0]);
        let bytes = |p: &Path| std::fs::read(p).unwrap();
        assert_eq!(bytes(&a[0].file), bytes(&b[0].file));
    }
}
