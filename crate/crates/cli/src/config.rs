//! Plain-text sweep configuration.
//!
//! ```text
//! # comment
//! mode = meanfield-map
//!
//! [params]
//! delta = 5
//! kappa = 0.5
//!
//! [axis1]
//! name = lambda
//! min = 2
//! max = 9
//! points = 200
//! ```
//!
//! Sections: `params`, `axis1`, `axis2`, `solver`, `wigner`, `output`.
//! Physical values are in MHz.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use srlab_core::quantum::{GridSpec, DEFAULT_FOCK_CUTOFF};
use srlab_core::ModelParams;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}, field `{}`: {}", self.field, self.message),
            None => write!(f, "field `{}`: {}", self.field, self.message),
        }
    }
}

fn err(line: Option<usize>, field: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line,
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    MeanfieldMap,
    FluctuationMap,
    SwitchingCurve,
    QuantumCurve,
    Wigner,
    StabilityMap,
    LambdaSweep,
}

impl Mode {
    pub const ALL: [Mode; 7] = [
        Mode::MeanfieldMap,
        Mode::FluctuationMap,
        Mode::SwitchingCurve,
        Mode::QuantumCurve,
        Mode::Wigner,
        Mode::StabilityMap,
        Mode::LambdaSweep,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::MeanfieldMap => "meanfield-map",
            Mode::FluctuationMap => "fluctuation-map",
            Mode::SwitchingCurve => "switching-curve",
            Mode::QuantumCurve => "quantum-curve",
            Mode::Wigner => "wigner",
            Mode::StabilityMap => "stability-map",
            Mode::LambdaSweep => "lambda-sweep",
        }
    }

    /// Allowed number of axes (inclusive).
    pub fn axis_range(&self) -> (usize, usize) {
        match self {
            Mode::MeanfieldMap | Mode::FluctuationMap | Mode::StabilityMap => (2, 2),
            Mode::SwitchingCurve | Mode::QuantumCurve | Mode::LambdaSweep => (1, 2),
            Mode::Wigner => (0, 1),
        }
    }

    pub fn is_map(&self) -> bool {
        self.axis_range() == (2, 2)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Mode::ALL.iter().map(|m| m.as_str()).collect();
                format!("unknown mode `{s}` (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AxisName {
    Lambda,
    GDrive,
    Delta,
    Kappa,
    NAtoms,
}

impl AxisName {
    pub fn as_str(&self) -> &'static str {
        match self {
            AxisName::Lambda => "lambda",
            AxisName::GDrive => "g_drive",
            AxisName::Delta => "delta",
            AxisName::Kappa => "kappa",
            AxisName::NAtoms => "n_atoms",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [
            AxisName::Lambda,
            AxisName::GDrive,
            AxisName::Delta,
            AxisName::Kappa,
            AxisName::NAtoms,
        ]
        .into_iter()
        .find(|a| a.as_str() == s)
    }

    /// Sets this parameter; `delta` moves both detunings together.
    pub fn apply(&self, params: ModelParams, value: f64) -> ModelParams {
        match self {
            AxisName::Lambda => params.with_lambda(value),
            AxisName::GDrive => params.with_g_drive(value),
            AxisName::Delta => params.with_delta(value),
            AxisName::Kappa => params.with_kappa(value),
            AxisName::NAtoms => params.with_n_atoms(value.round() as usize),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub name: AxisName,
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Axis {
    /// Evenly spaced values, endpoints included.
    pub fn values(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    self.max
                } else {
                    self.min + (self.max - self.min) * i as f64 / last
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub mode: Mode,
    pub params: ModelParams,
    pub axes: Vec<Axis>,
    pub fock_cutoff: usize,
    pub grid: GridSpec,
    /// Stem of every output file.
    pub name: String,
    pub json: bool,
    /// Key/value pairs exactly as read, for the JSON sidecar.
    pub echo: BTreeMap<String, String>,
}

const PARAM_KEYS: [&str; 8] = [
    "delta", "delta_c", "delta_a", "lambda", "g_drive", "kappa", "gamma", "n_atoms",
];

struct Entry {
    value: String,
    line: usize,
}

impl SweepConfig {
    pub fn from_file(path: &Path, mode: Option<Mode>) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            err(
                None,
                "config",
                format!("cannot read {}: {e}", path.display()),
            )
        })?;
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("sweep")
            .to_string();
        Self::parse(&text, mode, &stem)
    }

    /// Parses `text`; `mode` (from the command line) must agree with a
    /// `mode` key if both are given. `default_name` is used when
    /// `[output] name` is absent.
    pub fn parse(text: &str, mode: Option<Mode>, default_name: &str) -> Result<Self, ConfigError> {
        let mut sections: BTreeMap<String, BTreeMap<String, Entry>> = BTreeMap::new();
        let mut section = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| err(Some(line), content, "unterminated section header"))?
                    .trim();
                if !matches!(
                    name,
                    "params" | "axis1" | "axis2" | "solver" | "wigner" | "output"
                ) {
                    return Err(err(Some(line), name, "unknown section"));
                }
                if sections.contains_key(name) {
                    return Err(err(Some(line), name, "section appears twice"));
                }
                section = name.to_string();
                sections.insert(section.clone(), BTreeMap::new());
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| err(Some(line), content, "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                return Err(err(Some(line), content, "empty key"));
            }
            let table = sections.entry(section.clone()).or_default();
            let qualified = qualify(&section, key);
            if table.contains_key(key) {
                return Err(err(Some(line), qualified, "key appears twice"));
            }
            table.insert(
                key.to_string(),
                Entry {
                    value: value.to_string(),
                    line,
                },
            );
        }

        let mut echo = BTreeMap::new();
        for (sec, table) in &sections {
            for (k, e) in table {
                echo.insert(qualify(sec, k), e.value.clone());
            }
        }

        let top = sections.remove("").unwrap_or_default();
        let mut mode_from_file = None;
        for (k, e) in &top {
            match k.as_str() {
                "mode" => {
                    mode_from_file = Some(
                        e.value
                            .parse::<Mode>()
                            .map_err(|m| err(Some(e.line), "mode", m))?,
                    )
                }
                _ => return Err(err(Some(e.line), k.as_str(), "unknown top-level key")),
            }
        }
        let mode = match (mode, mode_from_file) {
            (Some(cli), Some(file)) if cli != file => {
                let line = top.get("mode").map(|e| e.line);
                return Err(err(
                    line,
                    "mode",
                    format!("config is for `{file}` but `{cli}` was requested"),
                ));
            }
            (Some(m), _) | (None, Some(m)) => m,
            (None, None) => return Err(err(None, "mode", "no mode given")),
        };

        let params = parse_params(sections.remove("params").unwrap_or_default())?;

        let mut axes = Vec::new();
        for name in ["axis1", "axis2"] {
            if let Some(table) = sections.remove(name) {
                if name == "axis2" && axes.is_empty() {
                    let line = table.values().map(|e| e.line).min();
                    return Err(err(line, "axis2", "axis2 given without axis1"));
                }
                axes.push(parse_axis(name, table)?);
            }
        }
        let (lo, hi) = mode.axis_range();
        if axes.len() < lo || axes.len() > hi {
            let want = if lo == hi {
                format!("{lo}")
            } else {
                format!("{lo} to {hi}")
            };
            return Err(err(
                None,
                "axis",
                format!("mode `{mode}` takes {want} axes, got {}", axes.len()),
            ));
        }
        if axes.len() == 2 && axes[0].name == axes[1].name {
            return Err(err(
                None,
                "axis2.name",
                "both axes sweep the same parameter",
            ));
        }
        if mode == Mode::LambdaSweep && axes[0].name != AxisName::Lambda {
            return Err(err(None, "axis1.name", "lambda-sweep needs axis1 = lambda"));
        }

        let mut fock_cutoff = DEFAULT_FOCK_CUTOFF;
        if let Some(table) = sections.remove("solver") {
            for (k, e) in &table {
                match k.as_str() {
                    "fock_cutoff" => {
                        fock_cutoff = parse_value::<usize>(e, "solver.fock_cutoff")?;
                        if fock_cutoff == 0 {
                            return Err(err(
                                Some(e.line),
                                "solver.fock_cutoff",
                                "must be at least 1",
                            ));
                        }
                    }
                    _ => return Err(err(Some(e.line), qualify("solver", k), "unknown key")),
                }
            }
        }

        let mut grid = GridSpec::default();
        if let Some(table) = sections.remove("wigner") {
            for (k, e) in &table {
                let field = qualify("wigner", k);
                match k.as_str() {
                    "extent" => {
                        let v = parse_value::<f64>(e, &field)?;
                        if !(v > 0.0) {
                            return Err(err(Some(e.line), field, "must be positive"));
                        }
                        grid = GridSpec::square(v, grid.nx);
                    }
                    "points" => {
                        let v = parse_value::<usize>(e, &field)?;
                        if v < 2 {
                            return Err(err(Some(e.line), field, "need at least 2 points"));
                        }
                        grid.nx = v;
                        grid.np = v;
                    }
                    _ => return Err(err(Some(e.line), field, "unknown key")),
                }
            }
        }

        let mut name = default_name.to_string();
        let mut json = true;
        if let Some(table) = sections.remove("output") {
            for (k, e) in &table {
                let field = qualify("output", k);
                match k.as_str() {
                    "name" => {
                        if e.value.is_empty()
                            || !e
                                .value
                                .chars()
                                .all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c))
                        {
                            return Err(err(
                                Some(e.line),
                                field,
                                "use letters, digits, `-`, `_` or `.`",
                            ));
                        }
                        name = e.value.clone();
                    }
                    "json" => json = parse_value::<bool>(e, &field)?,
                    _ => return Err(err(Some(e.line), field, "unknown key")),
                }
            }
        }

        Ok(Self {
            mode,
            params,
            axes,
            fock_cutoff,
            grid,
            name,
            json,
            echo,
        })
    }

    /// Number of grid points (product of axis lengths, 1 without axes).
    pub fn point_count(&self) -> usize {
        self.axes.iter().map(|a| a.points).product()
    }

    /// Axis values of grid point `index`, axis1-major.
    pub fn coordinates(&self, index: usize) -> Vec<f64> {
        match self.axes.as_slice() {
            [] => vec![],
            [a] => vec![a.values()[index]],
            [a, b] => vec![a.values()[index / b.points], b.values()[index % b.points]],
            _ => unreachable!("at most two axes"),
        }
    }

    /// Parameters at grid point `index`.
    pub fn params_at(&self, index: usize) -> ModelParams {
        self.axes
            .iter()
            .zip(self.coordinates(index))
            .fold(self.params, |p, (axis, v)| axis.name.apply(p, v))
    }
}

fn qualify(section: &str, key: &str) -> String {
    if section.is_empty() {
        key.to_string()
    } else {
        format!("{section}.{key}")
    }
}

fn parse_value<T: FromStr>(e: &Entry, field: &str) -> Result<T, ConfigError> {
    e.value.parse::<T>().map_err(|_| {
        err(
            Some(e.line),
            field,
            format!(
                "cannot parse `{}` as {}",
                e.value,
                std::any::type_name::<T>()
            ),
        )
    })
}

fn parse_params(table: BTreeMap<String, Entry>) -> Result<ModelParams, ConfigError> {
    let mut p = ModelParams::default();
    if table.contains_key("delta")
        && (table.contains_key("delta_c") || table.contains_key("delta_a"))
    {
        let line = table["delta"].line;
        return Err(err(
            Some(line),
            "params.delta",
            "give either delta or delta_c/delta_a, not both",
        ));
    }
    for (k, e) in &table {
        let field = qualify("params", k);
        if !PARAM_KEYS.contains(&k.as_str()) {
            return Err(err(Some(e.line), field, "unknown parameter"));
        }
        if k == "n_atoms" {
            p.n_atoms = parse_value::<usize>(e, &field)?;
            continue;
        }
        let v = parse_value::<f64>(e, &field)?;
        if !v.is_finite() {
            return Err(err(Some(e.line), field, "must be finite"));
        }
        match k.as_str() {
            "delta" => p = p.with_delta(v),
            "delta_c" => p.delta_c = v,
            "delta_a" => p.delta_a = v,
            "lambda" => p.lambda = v,
            "g_drive" => p.g_drive = v,
            "kappa" => p.kappa = v,
            "gamma" => p.gamma = v,
            _ => unreachable!(),
        }
    }
    p.validate().map_err(|e| {
        let (field, line) = match &e {
            srlab_core::Error::InvalidParams { field, .. } => {
                (format!("params.{field}"), table.get(*field).map(|x| x.line))
            }
            _ => ("params".to_string(), None),
        };
        err(line, field, e.to_string())
    })?;
    Ok(p)
}

fn parse_axis(section: &str, table: BTreeMap<String, Entry>) -> Result<Axis, ConfigError> {
    let header_line = table.values().map(|e| e.line).min();
    let mut name = None;
    let (mut min, mut max, mut points) = (None, None, None);
    for (k, e) in &table {
        let field = qualify(section, k);
        match k.as_str() {
            "name" => {
                name = Some(AxisName::parse(&e.value).ok_or_else(|| {
                    err(
                        Some(e.line),
                        field.clone(),
                        format!(
                            "unknown axis `{}` (expected lambda, g_drive, delta, kappa or n_atoms)",
                            e.value
                        ),
                    )
                })?)
            }
            "min" => min = Some(parse_value::<f64>(e, &field)?),
            "max" => max = Some(parse_value::<f64>(e, &field)?),
            "points" => {
                let v = parse_value::<usize>(e, &field)?;
                if v < 2 {
                    return Err(err(Some(e.line), field, "need at least 2 points"));
                }
                points = Some(v);
            }
            _ => return Err(err(Some(e.line), field, "unknown key")),
        }
    }
    let missing = |k: &str| err(header_line, qualify(section, k), "missing");
    let axis = Axis {
        name: name.ok_or_else(|| missing("name"))?,
        min: min.ok_or_else(|| missing("min"))?,
        max: max.ok_or_else(|| missing("max"))?,
        points: points.ok_or_else(|| missing("points"))?,
    };
    if !axis.min.is_finite() || !axis.max.is_finite() || !(axis.max > axis.min) {
        return Err(err(
            table.get("max").map(|e| e.line),
            qualify(section, "max"),
            "need finite min < max",
        ));
    }
    if axis.name == AxisName::NAtoms {
        let step = (axis.max - axis.min) / (axis.points - 1) as f64;
        let integral = |v: f64| (v - v.round()).abs() < 1e-9 && v.round() >= 1.0;
        if !integral(axis.min) || !integral(step) {
            return Err(err(
                table.get("min").map(|e| e.line),
                qualify(section, "min"),
                "n_atoms axis must land on positive integers",
            ));
        }
    }
    Ok(axis)
}
