//! Report assembly and byte-deterministic rendering.
//!
//! JSON numbers are rounded to 6 decimal places before serialization and
//! percentages are carried as exact hundredths, so identical inputs always
//! serialize to identical bytes.

use cindex_core::components::{ComponentModel, RotationResult};
use cindex_core::entropy::EntropyAnalysis;
use cindex_core::scoring::ScoreCard;
use cindex_core::Matrix;
use serde::Serialize;
use serde_json::Value;

pub const TOOL_NAME: &str = "cindex";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Rounds to 6 decimal places; negative zero becomes zero.
pub fn fixed6(x: f64) -> f64 {
    let r = (x * 1e6).round() / 1e6;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn fixed6_all(xs: &[f64]) -> Vec<f64> {
    xs.iter().copied().map(fixed6).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

impl Default for ToolInfo {
    fn default() -> Self {
        Self {
            name: TOOL_NAME,
            version: TOOL_VERSION,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub data_sha256: String,
    pub config_sha256: Option<String>,
    /// Effective configuration with defaults applied.
    pub config: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightRow {
    pub indicator: String,
    pub entropy: f64,
    pub weight: f64,
    /// Display percentage; all rows total exactly 100.00.
    pub percentage: f64,
    #[serde(skip)]
    pub percentage_text: String,
}

pub fn weight_rows<S: AsRef<str>>(indicators: &[S], analysis: &EntropyAnalysis) -> Vec<WeightRow> {
    let percentages = analysis.weights.percentages();
    indicators
        .iter()
        .zip(analysis.entropy.as_slice())
        .zip(analysis.weights.as_slice())
        .zip(percentages)
        .map(|(((name, &h), &w), p)| WeightRow {
            indicator: name.as_ref().to_string(),
            entropy: fixed6(h),
            weight: fixed6(w),
            percentage: p.as_percent(),
            percentage_text: p.to_string(),
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ScoreRow {
    pub object: String,
    pub raw_score: f64,
    /// Half-up to 2 decimals.
    pub scaled_score: f64,
    pub grade: String,
    pub rank: usize,
}

pub fn score_rows(cards: &[ScoreCard]) -> Vec<ScoreRow> {
    cards
        .iter()
        .map(|c| ScoreRow {
            object: c.object.clone(),
            raw_score: fixed6(c.raw_score),
            scaled_score: c.display_score(),
            grade: c.grade.clone(),
            rank: c.rank,
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ScreePoint {
    pub component: usize,
    pub eigenvalue: f64,
    pub explained_ratio: f64,
    pub cumulative_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LoadingRow {
    pub indicator: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ObjectScore {
    pub object: String,
    pub score: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RotationSummary {
    pub method: &'static str,
    pub converged: bool,
    pub sweeps: usize,
    pub rotated_loadings: Vec<LoadingRow>,
    pub variance_shares: Vec<f64>,
    pub composite_scores: Vec<ObjectScore>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentSummary {
    pub indicators: Vec<String>,
    /// Constant indicators left out of the analysis.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub excluded_indicators: Vec<String>,
    pub retention: String,
    pub retained: usize,
    pub eigenvalues: Vec<f64>,
    pub explained_ratios: Vec<f64>,
    pub cumulative_ratios: Vec<f64>,
    pub loadings: Vec<LoadingRow>,
    pub eigenvectors: Vec<LoadingRow>,
    pub composite_scores: Vec<ObjectScore>,
    pub scree: Vec<ScreePoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rotation: Option<RotationSummary>,
}

pub struct ComponentInputs<'a> {
    pub indicators: &'a [String],
    pub excluded: Vec<String>,
    pub objects: &'a [String],
    pub retention: String,
    pub model: &'a ComponentModel,
    pub composite: &'a [f64],
    pub rotation: Option<(&'a RotationResult, &'a [f64])>,
}

fn loading_rows(names: &[String], m: &Matrix) -> Vec<LoadingRow> {
    names
        .iter()
        .enumerate()
        .map(|(i, name)| LoadingRow {
            indicator: name.clone(),
            values: fixed6_all(m.row(i)),
        })
        .collect()
}

fn object_scores(objects: &[String], scores: &[f64]) -> Vec<ObjectScore> {
    objects
        .iter()
        .zip(scores)
        .map(|(o, &s)| ObjectScore {
            object: o.clone(),
            score: fixed6(s),
        })
        .collect()
}

pub fn scree_points(model: &ComponentModel) -> Vec<ScreePoint> {
    model
        .eigenvalues
        .iter()
        .zip(&model.explained_ratios)
        .zip(&model.cumulative_ratios)
        .enumerate()
        .map(|(i, ((&l, &r), &c))| ScreePoint {
            component: i + 1,
            eigenvalue: fixed6(l),
            explained_ratio: fixed6(r),
            cumulative_ratio: fixed6(c),
        })
        .collect()
}

pub fn component_summary(input: ComponentInputs<'_>) -> ComponentSummary {
    let model = input.model;
    ComponentSummary {
        indicators: input.indicators.to_vec(),
        excluded_indicators: input.excluded,
        retention: input.retention,
        retained: model.retained,
        eigenvalues: fixed6_all(&model.eigenvalues),
        explained_ratios: fixed6_all(&model.explained_ratios),
        cumulative_ratios: fixed6_all(&model.cumulative_ratios),
        loadings: loading_rows(input.indicators, &model.loadings),
        eigenvectors: loading_rows(input.indicators, &model.eigvec_basis),
        composite_scores: object_scores(input.objects, input.composite),
        scree: scree_points(model),
        rotation: input.rotation.map(|(rot, composite)| RotationSummary {
            method: "varimax",
            converged: rot.converged,
            sweeps: rot.criterion_trace.len() - 1,
            rotated_loadings: loading_rows(input.indicators, &rot.rotated_loadings),
            variance_shares: fixed6_all(&rot.rotated_variance_shares),
            composite_scores: object_scores(input.objects, composite),
        }),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: ToolInfo,
    pub command: &'static str,
    pub provenance: Provenance,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<WeightRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scores: Option<Vec<ScoreRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub components: Option<ComponentSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalized: Option<Vec<LoadingRow>>,
}

impl Report {
    pub fn new(command: &'static str, provenance: Provenance) -> Self {
        Self {
            tool: ToolInfo::default(),
            command,
            provenance,
            weights: None,
            scores: None,
            components: None,
            normalized: None,
        }
    }
}

pub fn render_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("report values are always serializable");
    out.push(b'\n');
    out
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    for row in rows {
        w.write_record(&row).expect("writing to memory");
    }
    w.into_inner().expect("writing to memory")
}

pub fn weights_csv(rows: &[WeightRow]) -> Vec<u8> {
    csv_bytes(
        &["indicator", "entropy", "weight", "percentage"],
        rows.iter().map(|r| {
            vec![
                r.indicator.clone(),
                format!("{:.6}", r.entropy),
                format!("{:.6}", r.weight),
                r.percentage_text.clone(),
            ]
        }),
    )
}

pub fn scores_csv(rows: &[ScoreRow]) -> Vec<u8> {
    csv_bytes(
        &["object", "raw_score", "scaled_score", "grade", "rank"],
        rows.iter().map(|r| {
            vec![
                r.object.clone(),
                format!("{:.6}", r.raw_score),
                format!("{:.2}", r.scaled_score),
                r.grade.clone(),
                r.rank.to_string(),
            ]
        }),
    )
}

/// Scree plot data: one row per component, in descending eigenvalue order.
pub fn scree_csv(points: &[ScreePoint]) -> Vec<u8> {
    csv_bytes(
        &[
            "component_index",
            "eigenvalue",
            "explained_ratio",
            "cumulative_ratio",
        ],
        points.iter().map(|p| {
            vec![
                p.component.to_string(),
                format!("{:.6}", p.eigenvalue),
                format!("{:.6}", p.explained_ratio),
                format!("{:.6}", p.cumulative_ratio),
            ]
        }),
    )
}
