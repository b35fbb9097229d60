//! Declarative run description read from a TOML file.
//!
//! ```toml
//! [plate.left]
//! type = "phase"          # or "half_space"
//! rp = 1.0
//! rs = -1.0
//!
//! [plate.right]
//! type = "half_space"
//! substrate = { type = "constant", eps_inf = 2.25 }
//! coatings = [{ thickness = 20e-9, material = { type = "vacuum" } }]
//!
//! [[layer]]               # ordered left to right
//! thickness = 1e-6
//! material = { type = "oscillator", terms = [{ wp2 = 1e32, w0 = 1e16, gamma = 0.0 }] }
//!
//! [quadrature]            # optional
//! rel_tol = 1e-8
//!
//! [task]                  # optional
//! kind = "sweep"
//! target = "d1"           # "d1", "dn" or a 1-based layer index
//! values = [0.5e-6, 1e-6]
//!
//! [output]                # optional
//! format = "csv"
//! path = "out.csv"
//! ```
//!
//! Thicknesses are in meters and frequencies in rad/s.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;
use toml::Spanned;

use crate::fresnel::{Layer, PlateModel};
use crate::kernel::SystemConfig;
use crate::materials::{MaterialModel, Oscillator};
use crate::quadrature::QuadratureSpec;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("line {line}: invalid {field}: {reason}")]
    Validation {
        field: String,
        line: usize,
        reason: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Compute,
    Sweep,
    Check,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Table,
    Csv,
}

/// Which thickness a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepTarget {
    FirstGap,
    LastGap,
    /// 1-based layer index.
    Layer(usize),
}

impl SweepTarget {
    pub fn layer_index(&self, n: usize) -> usize {
        match self {
            SweepTarget::FirstGap => 1,
            SweepTarget::LastGap => n,
            SweepTarget::Layer(i) => *i,
        }
    }
}

impl fmt::Display for SweepTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepTarget::FirstGap => write!(f, "d1"),
            SweepTarget::LastGap => write!(f, "dn"),
            SweepTarget::Layer(i) => write!(f, "layer {i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub target: SweepTarget,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Format,
}

/// A fully validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub system: SystemConfig,
    pub quadrature: QuadratureSpec,
    pub task: Task,
    pub sweep: Option<Sweep>,
    pub output: OutputSpec,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    plate: RawPlates,
    #[serde(default)]
    layer: Vec<Spanned<RawLayer>>,
    #[serde(default)]
    quadrature: Option<Spanned<RawQuadrature>>,
    #[serde(default)]
    task: Option<Spanned<RawTask>>,
    #[serde(default)]
    output: Option<RawOutput>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlates {
    left: Spanned<RawPlate>,
    right: Spanned<RawPlate>,
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum RawPlate {
    Phase {
        rp: f64,
        rs: f64,
    },
    HalfSpace {
        substrate: RawMaterial,
        #[serde(default)]
        coatings: Vec<RawLayer>,
    },
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum RawMaterial {
    Vacuum,
    Constant {
        eps_inf: f64,
        #[serde(default = "one")]
        mu_inf: f64,
    },
    Oscillator {
        #[serde(default)]
        terms: Vec<RawTerm>,
        #[serde(default)]
        mu_terms: Vec<RawTerm>,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    wp2: f64,
    w0: f64,
    gamma: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLayer {
    #[serde(alias = "d")]
    thickness: f64,
    material: RawMaterial,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawQuadrature {
    rel_tol: Option<f64>,
    abs_floor: Option<f64>,
    max_levels: Option<usize>,
    xi_scale: Option<f64>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawTarget {
    Name(String),
    Index(i64),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTask {
    kind: Option<Task>,
    target: Option<RawTarget>,
    values: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    path: Option<PathBuf>,
    format: Option<Format>,
}

impl RawMaterial {
    fn build(self) -> MaterialModel {
        let terms = |v: Vec<RawTerm>| {
            v.into_iter()
                .map(|t| Oscillator::new(t.wp2, t.w0, t.gamma))
                .collect()
        };
        match self {
            RawMaterial::Vacuum => MaterialModel::Vacuum,
            RawMaterial::Constant { eps_inf, mu_inf } => MaterialModel::Constant { eps_inf, mu_inf },
            RawMaterial::Oscillator { terms: e, mu_terms } => MaterialModel::OscillatorSum {
                eps_terms: terms(e),
                mu_terms: terms(mu_terms),
            },
        }
    }
}

impl RawLayer {
    fn build(self) -> Layer {
        Layer::new(self.material.build(), self.thickness)
    }
}

impl RawPlate {
    fn build(self) -> PlateModel {
        match self {
            RawPlate::Phase { rp, rs } => PlateModel::PhaseReflector { rp, rs },
            RawPlate::HalfSpace {
                substrate,
                coatings,
            } => PlateModel::CoatedHalfSpace {
                coatings: coatings.into_iter().map(RawLayer::build).collect(),
                substrate: substrate.build(),
            },
        }
    }
}

struct Lines<'a>(&'a str);

impl Lines<'_> {
    fn of(&self, offset: usize) -> usize {
        self.0[..offset.min(self.0.len())].matches('\n').count() + 1
    }
}

fn invalid(field: impl Into<String>, line: usize, err: impl fmt::Display) -> ConfigError {
    ConfigError::Validation {
        field: field.into(),
        line,
        reason: err.to_string(),
    }
}

fn from_core(err: crate::Error, line: usize) -> ConfigError {
    match err {
        crate::Error::Invalid { field, reason } => ConfigError::Validation {
            field,
            line,
            reason,
        },
        other => invalid("config", line, other),
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    let lines = Lines(text);

    let left_line = lines.of(raw.plate.left.span().start);
    let right_line = lines.of(raw.plate.right.span().start);
    let plate_left = raw.plate.left.into_inner().build();
    let plate_right = raw.plate.right.into_inner().build();
    plate_left
        .validate("plate.left")
        .map_err(|e| from_core(e, left_line))?;
    plate_right
        .validate("plate.right")
        .map_err(|e| from_core(e, right_line))?;

    if raw.layer.is_empty() {
        return Err(invalid("layer", 1, "at least one [[layer]] is required"));
    }
    let mut layer_lines = Vec::with_capacity(raw.layer.len());
    let mut medium = Vec::with_capacity(raw.layer.len());
    for (i, spanned) in raw.layer.into_iter().enumerate() {
        let line = lines.of(spanned.span().start);
        let layer = spanned.into_inner().build();
        layer
            .validate(&format!("layer[{}]", i + 1))
            .map_err(|e| from_core(e, line))?;
        layer_lines.push(line);
        medium.push(layer);
    }
    let n = medium.len();
    let system = SystemConfig::new(plate_left, medium, plate_right).map_err(|e| from_core(e, 1))?;
    system.require_open_gaps().map_err(|e| {
        let line = match &e {
            crate::Error::Invalid { field, .. } if field.starts_with(&format!("layer[{n}]")) => layer_lines[n - 1],
            _ => layer_lines[0],
        };
        from_core(e, line)
    })?;

    let mut quadrature = QuadratureSpec::default();
    if let Some(q) = raw.quadrature {
        let line = lines.of(q.span().start);
        let q = q.into_inner();
        if let Some(v) = q.rel_tol {
            quadrature.rel_tol = v;
        }
        if let Some(v) = q.abs_floor {
            quadrature.abs_floor = v;
        }
        if let Some(v) = q.max_levels {
            quadrature.max_levels = v;
        }
        quadrature.xi_scale = q.xi_scale;
        quadrature.validate().map_err(|e| from_core(e, line))?;
    }

    let mut task = Task::Compute;
    let mut sweep = None;
    if let Some(t) = raw.task {
        let line = lines.of(t.span().start);
        let t = t.into_inner();
        task = t.kind.unwrap_or(Task::Compute);
        match (t.target, t.values) {
            (Some(target), Some(values)) => {
                let target = parse_target(target, n).map_err(|r| invalid("task.target", line, r))?;
                check_sweep_values(&values).map_err(|r| invalid("task.values", line, r))?;
                sweep = Some(Sweep { target, values });
            }
            (None, None) => {}
            _ => {
                return Err(invalid(
                    "task",
                    line,
                    "a sweep needs both `target` and `values`",
                ))
            }
        }
        if task == Task::Sweep && sweep.is_none() {
            return Err(invalid("task", line, "kind = \"sweep\" needs `target` and `values`"));
        }
    }

    let output = raw
        .output
        .map(|o| OutputSpec {
            path: o.path,
            format: o.format.unwrap_or_default(),
        })
        .unwrap_or_default();

    Ok(RunConfig {
        system,
        quadrature,
        task,
        sweep,
        output,
    })
}

fn parse_target(target: RawTarget, n: usize) -> Result<SweepTarget, String> {
    match target {
        RawTarget::Name(s) => match s.as_str() {
            "d1" => Ok(SweepTarget::FirstGap),
            "dn" => Ok(SweepTarget::LastGap),
            other => Err(format!("expected \"d1\", \"dn\" or a layer index, got {other:?}")),
        },
        RawTarget::Index(i) if i >= 1 && (i as usize) <= n => Ok(SweepTarget::Layer(i as usize)),
        RawTarget::Index(i) => Err(format!("layer index {i} outside 1..={n}")),
    }
}

fn check_sweep_values(values: &[f64]) -> Result<(), String> {
    if values.is_empty() {
        return Err("at least one value is required".into());
    }
    if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(format!("values must be positive and finite, got {v}"));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err("values must be strictly increasing".into());
    }
    Ok(())
}

/// Reads and validates a configuration file.
pub fn load_config(path: impl AsRef<Path>) -> Result<RunConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}
