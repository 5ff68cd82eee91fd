//! Weighted total scores, grade bands and dense ranking.

use alloc::borrow::ToOwned;
use alloc::string::String;
use alloc::vec::Vec;

use crate::entropy::{self, EntropyAnalysis, WeightVector};
use crate::preprocess::{minmax_normalize, JudgmentMatrix, NormalizedMatrix};
use crate::{Error, Result};

pub const SCALE_MIN: f64 = 0.0;
pub const SCALE_MAX: f64 = 100.0;

#[derive(Debug, Clone, PartialEq)]
pub struct GradeBand {
    pub lower: f64,
    pub upper: f64,
    pub label: String,
}

impl GradeBand {
    pub fn new(lower: f64, upper: f64, label: impl Into<String>) -> Self {
        Self {
            lower,
            upper,
            label: label.into(),
        }
    }
}

/// Contiguous bands covering `[0, 100]`. A band holds scores in
/// `(lower, upper]`; the lowest band also holds its lower bound 0.
#[derive(Debug, Clone, PartialEq)]
pub struct GradeScale {
    bands: Vec<GradeBand>,
}

impl GradeScale {
    /// Validates the bands. They may be given in any order.
    pub fn new(mut bands: Vec<GradeBand>) -> Result<Self> {
        if bands.is_empty() {
            return Err(Error::Validation("grade scale has no bands".into()));
        }
        for b in &bands {
            if !(b.lower.is_finite() && b.upper.is_finite()) || b.lower >= b.upper {
                return Err(Error::Validation(alloc::format!(
                    "band '{}' has empty range [{}, {}]",
                    b.label,
                    b.lower,
                    b.upper
                )));
            }
            if b.label.is_empty() {
                return Err(Error::Validation("band label is empty".into()));
            }
        }
        bands.sort_by(|a, b| a.lower.total_cmp(&b.lower));
        for pair in bands.windows(2) {
            let (lo, hi) = (&pair[0], &pair[1]);
            if hi.lower < lo.upper {
                return Err(Error::Validation(alloc::format!(
                    "bands '{}' [{}, {}] and '{}' [{}, {}] overlap",
                    lo.label,
                    lo.lower,
                    lo.upper,
                    hi.label,
                    hi.lower,
                    hi.upper
                )));
            }
            if hi.lower > lo.upper {
                return Err(Error::Validation(alloc::format!(
                    "gap between bands '{}' and '{}' ({} to {})",
                    lo.label,
                    hi.label,
                    lo.upper,
                    hi.lower
                )));
            }
        }
        let first = &bands[0];
        let last = &bands[bands.len() - 1];
        if first.lower != SCALE_MIN || last.upper != SCALE_MAX {
            return Err(Error::Validation(alloc::format!(
                "bands cover [{}, {}], expected [0, 100]",
                first.lower,
                last.upper
            )));
        }
        Ok(Self { bands })
    }

    /// 0-20 very bad, 20-50 poor, 50-80 good, 80-100 very good.
    pub fn us_4band() -> Self {
        Self {
            bands: alloc::vec![
                GradeBand::new(0.0, 20.0, "Very bad"),
                GradeBand::new(20.0, 50.0, "Poor"),
                GradeBand::new(50.0, 80.0, "Good"),
                GradeBand::new(80.0, 100.0, "Very good"),
            ],
        }
    }

    /// Five equal bands, V (lowest) to I (highest).
    pub fn impact_5band() -> Self {
        Self {
            bands: alloc::vec![
                GradeBand::new(0.0, 20.0, "V"),
                GradeBand::new(20.0, 40.0, "IV"),
                GradeBand::new(40.0, 60.0, "III"),
                GradeBand::new(60.0, 80.0, "II"),
                GradeBand::new(80.0, 100.0, "I"),
            ],
        }
    }

    pub const PRESETS: [&'static str; 2] = ["us-4band", "impact-5band"];

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "us-4band" => Some(Self::us_4band()),
            "impact-5band" => Some(Self::impact_5band()),
            _ => None,
        }
    }

    /// Bands in ascending order.
    pub fn bands(&self) -> &[GradeBand] {
        &self.bands
    }
}

/// `score_i = Σ_j w_j r_ij`, clamped into `[0, 1]` against rounding.
pub fn weighted_total_score(r: &NormalizedMatrix, w: &WeightVector) -> Result<Vec<f64>> {
    let values = r.values();
    if values.cols() != w.len() {
        return Err(Error::Shape {
            op: "weighted_total_score",
            left: values.shape(),
            right: (w.len(), 1),
        });
    }
    Ok((0..values.rows())
        .map(|i| {
            values
                .row(i)
                .iter()
                .zip(w.as_slice())
                .map(|(r, w)| r * w)
                .sum::<f64>()
                .clamp(0.0, 1.0)
        })
        .collect())
}

/// Label of the band holding `scaled`.
pub fn assign_grade(scaled: f64, scale: &GradeScale) -> Result<&str> {
    if !(SCALE_MIN..=SCALE_MAX).contains(&scaled) {
        return Err(Error::Domain {
            value: scaled,
            lower: SCALE_MIN,
            upper: SCALE_MAX,
        });
    }
    let bands = &scale.bands;
    if scaled == bands[0].lower {
        return Ok(&bands[0].label);
    }
    bands
        .iter()
        .find(|b| scaled > b.lower && scaled <= b.upper)
        .map(|b| b.label.as_str())
        .ok_or(Error::Domain {
            value: scaled,
            lower: SCALE_MIN,
            upper: SCALE_MAX,
        })
}

/// Half-up rounding to `decimals` places (ties away from zero).
///
/// Values within `1e-9` (relative) of a tie round up, so decimal inputs like
/// `1.005` that are stored just below the tie still behave as written.
pub fn round_half_up(value: f64, decimals: u32) -> f64 {
    let factor = libm::pow(10.0, f64::from(decimals));
    let shifted = value * factor;
    let nudge = 1e-9 * libm::fabs(shifted).max(1.0);
    let magnitude = libm::floor(libm::fabs(shifted) + 0.5 + nudge);
    libm::copysign(magnitude, shifted) / factor
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreCard {
    pub object: String,
    /// Weighted total in `[0, 1]`.
    pub raw_score: f64,
    /// `raw_score × 100`, unrounded.
    pub scaled_score: f64,
    pub grade: String,
    /// Dense rank, 1 = best. Zero until [`rank_objects`] runs.
    pub rank: usize,
}

impl ScoreCard {
    /// Scaled score rounded half-up to 2 decimals for presentation.
    pub fn display_score(&self) -> f64 {
        round_half_up(self.scaled_score, 2)
    }
}

/// Sorts by descending scaled score (stable for ties) and assigns dense
/// ranks; exactly equal scores share a rank.
pub fn rank_objects(mut cards: Vec<ScoreCard>) -> Vec<ScoreCard> {
    cards.sort_by(|a, b| b.scaled_score.total_cmp(&a.scaled_score));
    let mut rank = 0;
    let mut previous: Option<f64> = None;
    for card in &mut cards {
        if previous != Some(card.scaled_score) {
            rank += 1;
            previous = Some(card.scaled_score);
        }
        card.rank = rank;
    }
    cards
}

/// Everything the entropy-weighted evaluation produces.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub normalized: NormalizedMatrix,
    pub entropy: EntropyAnalysis,
    /// Ranked, best first.
    pub cards: Vec<ScoreCard>,
}

impl Evaluation {
    pub fn weights(&self) -> &WeightVector {
        &self.entropy.weights
    }
}

/// Min-max scaling, entropy weights, weighted totals, ×100, grading, ranking.
pub fn evaluate(x: &JudgmentMatrix, scale: &GradeScale) -> Result<Evaluation> {
    let normalized = minmax_normalize(x);
    let entropy = entropy::analyze(&normalized)?;
    let raw = weighted_total_score(&normalized, &entropy.weights)?;
    let cards = raw
        .iter()
        .zip(x.objects())
        .map(|(&raw_score, object)| {
            let scaled_score = raw_score * 100.0;
            Ok(ScoreCard {
                object: object.to_owned(),
                raw_score,
                scaled_score,
                grade: assign_grade(scaled_score, scale)?.to_owned(),
                rank: 0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Evaluation {
        normalized,
        entropy,
        cards: rank_objects(cards),
    })
}
