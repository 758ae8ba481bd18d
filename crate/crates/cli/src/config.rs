//! Scenario configuration: a JSON document, overridden by command-line flags.

use std::collections::BTreeMap;
use std::path::Path;

use qgbound::models::{FieldVector, LatticeDirac, TiModel, TiParams};
use qgbound::qcrb::Tolerance;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("invalid `{key}`: {message}")]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            message: message.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Geometry,
    Qcrb,
    Uncertainty,
    EstimationDemo,
    Counterexamples,
}

impl Scenario {
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        match s.trim() {
            "geometry" => Ok(Self::Geometry),
            "qcrb" => Ok(Self::Qcrb),
            "uncertainty" => Ok(Self::Uncertainty),
            "estimation-demo" => Ok(Self::EstimationDemo),
            "counterexamples" => Ok(Self::Counterexamples),
            other => Err(ConfigError::new("scenarios", format!("unknown scenario '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    #[serde(default = "default_axes")]
    pub axes: Vec<usize>,
    #[serde(default)]
    pub fixed: [f64; 3],
}

fn default_axes() -> Vec<usize> {
    vec![0, 1, 2]
}

/// Raw configuration as read from JSON; every field is optional.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub model: Option<String>,
    pub params: Option<BTreeMap<String, f64>>,
    pub field: Option<[f64; 3]>,
    pub path: Option<String>,
    pub points: Option<usize>,
    pub grid: Option<GridSpec>,
    pub scenarios: Option<Vec<Scenario>>,
    pub tolerance: Option<Tolerance>,
    pub tol_scale: Option<f64>,
    pub format: Option<Format>,
    pub out: Option<String>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

impl ConfigFile {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| {
            let msg = e.to_string();
            // serde names the offending field in backticks
            let key = msg.split('`').nth(1).unwrap_or("config").to_string();
            ConfigError::new(key, msg)
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("config", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Fields set in `over` replace those in `self`; `params` merge key by key.
    pub fn merge(mut self, over: ConfigFile) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if over.$f.is_some() { self.$f = over.$f; } )* };
        }
        take!(model, field, path, points, grid, scenarios, tolerance, tol_scale, format, out, seed, threads);
        if let Some(p) = over.params {
            let mut base = self.params.take().unwrap_or_default();
            base.extend(p);
            self.params = Some(base);
        }
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModelSpec {
    Ti(TiModel<f64>),
    TwoBand(LatticeDirac<f64>),
}

impl ModelSpec {
    pub fn id(&self) -> &'static str {
        match self {
            Self::Ti(_) => "ti3d",
            Self::TwoBand(_) => "two-band",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Sampling {
    Path { labels: String, points: usize },
    Grid(GridSpec),
}

/// Fully validated configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub model: ModelSpec,
    pub sampling: Sampling,
    pub scenarios: Vec<Scenario>,
    pub tol: Tolerance,
    pub format: Format,
    pub out: String,
    pub seed: u64,
    pub threads: Option<usize>,
}

pub const DEFAULT_FIELD: [f64; 3] = [0.1, 0.2, 0.3];
pub const DEFAULT_POINTS: usize = 100;
pub const DEFAULT_PATH: &str = "GXMRG";
pub const DEFAULT_SEED: u64 = 42;

fn finite(key: &str, x: f64) -> Result<f64, ConfigError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(ConfigError::new(key, format!("{x} is not finite")))
    }
}

impl ScenarioConfig {
    pub fn resolve(raw: ConfigFile) -> Result<Self, ConfigError> {
        let params = raw.params.unwrap_or_default();
        let model = match raw.model.as_deref().unwrap_or("ti3d") {
            "ti3d" => {
                let mut p = TiParams::<f64>::default();
                for (k, &v) in &params {
                    let key = format!("params.{k}");
                    let v = finite(&key, v)?;
                    match k.as_str() {
                        "M" => p.m = v,
                        "A" => p.a = v,
                        "B" => p.b = v,
                        _ => return Err(ConfigError::new(key, "unknown parameter for model ti3d (expected M, A, B)")),
                    }
                }
                let f = raw.field.unwrap_or(DEFAULT_FIELD);
                for (i, &x) in f.iter().enumerate() {
                    finite(&format!("field[{i}]"), x)?;
                }
                ModelSpec::Ti(TiModel::new(p, FieldVector::new(f[0], f[1], f[2])))
            }
            "two-band" => {
                let mut m = LatticeDirac::<f64>::default();
                for (k, &v) in &params {
                    let key = format!("params.{k}");
                    let v = finite(&key, v)?;
                    match k.as_str() {
                        "m" => m.m = v,
                        "tz" => m.tz = v,
                        _ => return Err(ConfigError::new(key, "unknown parameter for model two-band (expected m, tz)")),
                    }
                }
                if raw.field.is_some_and(|f| f != [0.0; 3]) {
                    return Err(ConfigError::new("field", "model two-band has no Zeeman field"));
                }
                ModelSpec::TwoBand(m)
            }
            other => return Err(ConfigError::new("model", format!("unknown model '{other}' (expected ti3d or two-band)"))),
        };

        let sampling = match raw.grid {
            Some(g) => {
                if g.n < 1 {
                    return Err(ConfigError::new("grid.n", "must be at least 1"));
                }
                if g.axes.is_empty() || g.axes.iter().any(|&a| a > 2) {
                    return Err(ConfigError::new("grid.axes", "axes must be a nonempty subset of 0, 1, 2"));
                }
                Sampling::Grid(g)
            }
            None => {
                let labels = raw.path.unwrap_or_else(|| DEFAULT_PATH.to_string());
                if labels.chars().count() < 2 {
                    return Err(ConfigError::new("path", "need at least two high-symmetry points"));
                }
                if let Some(c) = labels.chars().find(|c| !"GXMRΓ".contains(*c)) {
                    return Err(ConfigError::new("path", format!("unknown high-symmetry point '{c}'")));
                }
                let points = raw.points.unwrap_or(DEFAULT_POINTS);
                if points < 2 {
                    return Err(ConfigError::new("points", "must be at least 2"));
                }
                Sampling::Path { labels, points }
            }
        };

        let scenarios = raw
            .scenarios
            .unwrap_or_else(|| vec![Scenario::Geometry, Scenario::Qcrb, Scenario::Uncertainty]);
        if scenarios.is_empty() {
            return Err(ConfigError::new("scenarios", "empty list"));
        }

        let mut tol = raw.tolerance.unwrap_or_default();
        for (key, v) in [("tolerance.rel", tol.rel), ("tolerance.floor", tol.floor), ("tolerance.psd_rel", tol.psd_rel)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(ConfigError::new(key, format!("{v} is not a nonnegative number")));
            }
        }
        if let Some(s) = raw.tol_scale {
            if !(s.is_finite() && s > 0.0) {
                return Err(ConfigError::new("tol-scale", format!("{s} is not a positive number")));
            }
            tol = tol.scaled(s);
        }
        if raw.threads == Some(0) {
            return Err(ConfigError::new("threads", "must be positive"));
        }

        Ok(Self {
            model,
            sampling,
            scenarios,
            tol,
            format: raw.format.unwrap_or(Format::Csv),
            out: raw.out.unwrap_or_else(|| "-".to_string()),
            seed: raw.seed.unwrap_or(DEFAULT_SEED),
            threads: raw.threads,
        })
    }

    pub fn has(&self, s: Scenario) -> bool {
        self.scenarios.contains(&s)
    }
}

/// Parses `x,y,z`.
pub fn parse_field(s: &str) -> Result<[f64; 3], ConfigError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(ConfigError::new("field", format!("expected x,y,z, got '{s}'")));
    }
    let mut out = [0.0; 3];
    for (i, p) in parts.iter().enumerate() {
        out[i] = p
            .trim()
            .parse()
            .map_err(|_| ConfigError::new("field", format!("'{p}' is not a number")))?;
    }
    Ok(out)
}

/// Parses `key=value`.
pub fn parse_param(s: &str) -> Result<(String, f64), ConfigError> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| ConfigError::new("params", format!("expected key=value, got '{s}'")))?;
    let key = k.trim().to_string();
    let v = v
        .trim()
        .parse()
        .map_err(|_| ConfigError::new(format!("params.{key}"), format!("'{v}' is not a number")))?;
    Ok((key, v))
}

pub fn parse_scenarios(s: &str) -> Result<Vec<Scenario>, ConfigError> {
    s.split(',').filter(|x| !x.trim().is_empty()).map(Scenario::parse).collect()
}

pub fn parse_format(s: &str) -> Result<Format, ConfigError> {
    match s {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        other => Err(ConfigError::new("format", format!("unknown format '{other}' (expected csv or json)"))),
    }
}
