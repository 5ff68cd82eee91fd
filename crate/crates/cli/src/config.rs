//! JSON evaluation configs: the indicator system, grade scale, retention
//! threshold, rotation and output format.
//!
//! ```json
//! {
//!   "indicators": [
//!     { "name": "Tax" },
//!     { "name": "Unemployment", "direction": "cost" },
//!     { "name": "Epidemic", "kind": "qualitative-binary", "mapping": { "good": 1, "poor": 0 } }
//!   ],
//!   "grade_scale": "us-4band",
//!   "retention_threshold": 0.85,
//!   "rotation": "varimax",
//!   "output_format": "json"
//! }
//! ```
//!
//! `grade_scale` is a preset name or a list of bands, each either
//! `{"lower": 0, "upper": 20, "label": "V"}` or `[0, 20, "V"]`.

use std::collections::BTreeMap;
use std::path::Path;

use cindex_core::components::DEFAULT_RETENTION_THRESHOLD;
use cindex_core::preprocess::{Direction, IndicatorKind, IndicatorSpec};
use cindex_core::scoring::{GradeBand, GradeScale};
use serde::Deserialize;
use serde_json::Value;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rotation {
    #[default]
    None,
    Varimax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "json" => Some(Self::Json),
            "csv" => Some(Self::Csv),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorConfig {
    pub spec: IndicatorSpec,
    /// Label → 1 (`true`) or 0 (`false`); qualitative indicators only.
    pub mapping: Option<BTreeMap<String, bool>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationConfig {
    pub indicators: Vec<IndicatorConfig>,
    /// Preset name, when the scale came from one.
    pub grade_scale_name: Option<String>,
    pub grade_scale: GradeScale,
    pub retention_threshold: f64,
    pub rotation: Rotation,
    pub output_format: OutputFormat,
}

impl EvaluationConfig {
    /// All-benefit quantitative indicators with every default applied.
    pub fn with_indicators<S: AsRef<str>>(names: &[S]) -> Self {
        Self {
            indicators: names
                .iter()
                .map(|n| IndicatorConfig {
                    spec: IndicatorSpec::benefit(n.as_ref()),
                    mapping: None,
                })
                .collect(),
            grade_scale_name: Some("us-4band".into()),
            grade_scale: GradeScale::us_4band(),
            retention_threshold: DEFAULT_RETENTION_THRESHOLD,
            rotation: Rotation::None,
            output_format: OutputFormat::Json,
        }
    }

    pub fn specs(&self) -> Vec<IndicatorSpec> {
        self.indicators.iter().map(|i| i.spec.clone()).collect()
    }

    /// Canonical JSON form with defaults filled in, echoed into reports.
    pub fn to_json(&self) -> Value {
        let indicators: Vec<Value> = self
            .indicators
            .iter()
            .map(|ind| {
                let mut obj = serde_json::Map::new();
                obj.insert("name".into(), ind.spec.name.clone().into());
                obj.insert(
                    "direction".into(),
                    match ind.spec.direction {
                        Direction::Benefit => "benefit",
                        Direction::Cost => "cost",
                    }
                    .into(),
                );
                obj.insert(
                    "kind".into(),
                    match ind.spec.kind {
                        IndicatorKind::Quantitative => "quantitative",
                        IndicatorKind::QualitativeBinary => "qualitative-binary",
                    }
                    .into(),
                );
                if let Some(mapping) = &ind.mapping {
                    let m: serde_json::Map<String, Value> = mapping
                        .iter()
                        .map(|(k, v)| (k.clone(), Value::from(u8::from(*v))))
                        .collect();
                    obj.insert("mapping".into(), Value::Object(m));
                }
                Value::Object(obj)
            })
            .collect();
        let bands: Vec<Value> = self
            .grade_scale
            .bands()
            .iter()
            .map(|b| serde_json::json!({ "lower": b.lower, "upper": b.upper, "label": b.label }))
            .collect();
        serde_json::json!({
            "indicators": indicators,
            "grade_scale": match &self.grade_scale_name {
                Some(name) => Value::from(name.clone()),
                None => Value::from(bands),
            },
            "retention_threshold": self.retention_threshold,
            "rotation": match self.rotation {
                Rotation::None => "none",
                Rotation::Varimax => "varimax",
            },
            "output_format": match self.output_format {
                OutputFormat::Json => "json",
                OutputFormat::Csv => "csv",
            },
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    indicators: Vec<RawIndicator>,
    grade_scale: Option<RawScale>,
    retention_threshold: Option<f64>,
    rotation: Option<String>,
    output_format: Option<String>,
    /// Free-form commentary; ignored.
    #[serde(default, rename = "notes")]
    _notes: Option<Value>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIndicator {
    name: String,
    direction: Option<String>,
    kind: Option<String>,
    mapping: Option<BTreeMap<String, Value>>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawScale {
    Preset(String),
    Bands(Vec<RawBand>),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawBand {
    Object {
        lower: f64,
        upper: f64,
        label: String,
    },
    Tuple(f64, f64, String),
    Bounds(f64, f64),
}

pub fn load_config(path: &Path) -> Result<EvaluationConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<EvaluationConfig> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| {
        let field = serde_field(&e.to_string()).unwrap_or_else(|| "<root>".into());
        CliError::config(field, e.to_string())
    })?;
    validate(raw)
}

/// Pulls a field name out of serde's "unknown field `x`" / "missing field `x`".
fn serde_field(message: &str) -> Option<String> {
    let start = message.find('`')? + 1;
    let end = start + message[start..].find('`')?;
    Some(message[start..end].to_string())
}

fn validate(raw: RawConfig) -> Result<EvaluationConfig> {
    if raw.indicators.is_empty() {
        return Err(CliError::config(
            "indicators",
            "at least one indicator is required",
        ));
    }
    let mut indicators = Vec::with_capacity(raw.indicators.len());
    for (i, ind) in raw.indicators.into_iter().enumerate() {
        let at = |f: &str| format!("indicators[{i}].{f}");
        if ind.name.trim().is_empty() {
            return Err(CliError::config(at("name"), "indicator name is empty"));
        }
        let direction = match ind.direction.as_deref() {
            None | Some("benefit") => Direction::Benefit,
            Some("cost") => Direction::Cost,
            Some(other) => {
                return Err(CliError::config(
                    at("direction"),
                    format!("unknown direction '{other}', expected 'benefit' or 'cost'"),
                ))
            }
        };
        let kind = match ind.kind.as_deref() {
            None | Some("quantitative") => IndicatorKind::Quantitative,
            Some("qualitative-binary") => IndicatorKind::QualitativeBinary,
            Some(other) => {
                return Err(CliError::config(
                    at("kind"),
                    format!(
                        "unknown kind '{other}', expected 'quantitative' or 'qualitative-binary'"
                    ),
                ))
            }
        };
        let mapping = match (kind, ind.mapping) {
            (IndicatorKind::QualitativeBinary, Some(m)) => {
                if m.is_empty() {
                    return Err(CliError::config(at("mapping"), "mapping is empty"));
                }
                let mut out = BTreeMap::new();
                for (label, v) in m {
                    let bit = match v.as_u64() {
                        Some(0) => false,
                        Some(1) => true,
                        _ => {
                            return Err(CliError::config(
                                at("mapping"),
                                format!("label '{label}' must map to 0 or 1, got {v}"),
                            ))
                        }
                    };
                    out.insert(label, bit);
                }
                Some(out)
            }
            (IndicatorKind::QualitativeBinary, None) => {
                return Err(CliError::config(
                    at("mapping"),
                    "qualitative-binary indicators need a label mapping",
                ))
            }
            (IndicatorKind::Quantitative, Some(_)) => {
                return Err(CliError::config(
                    at("mapping"),
                    "only qualitative-binary indicators take a mapping",
                ))
            }
            (IndicatorKind::Quantitative, None) => None,
        };
        if indicators
            .iter()
            .any(|c: &IndicatorConfig| c.spec.name == ind.name)
        {
            return Err(CliError::config(
                at("name"),
                format!("duplicate indicator '{}'", ind.name),
            ));
        }
        indicators.push(IndicatorConfig {
            spec: IndicatorSpec {
                name: ind.name,
                direction,
                kind,
            },
            mapping,
        });
    }

    let (grade_scale_name, grade_scale) = match raw.grade_scale {
        None => (Some("us-4band".to_string()), GradeScale::us_4band()),
        Some(RawScale::Preset(name)) => match GradeScale::preset(&name) {
            Some(scale) => (Some(name), scale),
            None => {
                return Err(CliError::config(
                    "grade_scale",
                    format!(
                        "unknown preset '{name}', expected one of {}",
                        GradeScale::PRESETS.join(", ")
                    ),
                ))
            }
        },
        Some(RawScale::Bands(bands)) => {
            let bands = bands
                .into_iter()
                .enumerate()
                .map(|(i, b)| match b {
                    RawBand::Object {
                        lower,
                        upper,
                        label,
                    }
                    | RawBand::Tuple(lower, upper, label) => GradeBand::new(lower, upper, label),
                    RawBand::Bounds(lower, upper) => {
                        GradeBand::new(lower, upper, format!("band {}", i + 1))
                    }
                })
                .collect();
            let scale = GradeScale::new(bands)
                .map_err(|e| CliError::config("grade_scale", e.to_string()))?;
            (None, scale)
        }
    };

    let retention_threshold = raw
        .retention_threshold
        .unwrap_or(DEFAULT_RETENTION_THRESHOLD);
    if !(retention_threshold > 0.0 && retention_threshold <= 1.0) {
        return Err(CliError::config(
            "retention_threshold",
            format!("{retention_threshold} is outside (0, 1]"),
        ));
    }
    let rotation = match raw.rotation.as_deref() {
        None | Some("none") => Rotation::None,
        Some("varimax") => Rotation::Varimax,
        Some(other) => {
            return Err(CliError::config(
                "rotation",
                format!("unknown rotation '{other}', expected 'none' or 'varimax'"),
            ))
        }
    };
    let output_format = match raw.output_format.as_deref() {
        None => OutputFormat::Json,
        Some(s) => OutputFormat::parse(s).ok_or_else(|| {
            CliError::config(
                "output_format",
                format!("unknown format '{s}', expected 'json' or 'csv'"),
            )
        })?,
    };

    Ok(EvaluationConfig {
        indicators,
        grade_scale_name,
        grade_scale,
        retention_threshold,
        rotation,
        output_format,
    })
}
