//! Raw indicator data and the two standardized views of it: min-max scaled
//! values in `[0, 1]` for weighting and scoring, and z-scores for component
//! analysis.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::{Error, Matrix, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Direction {
    /// Larger is better.
    #[default]
    Benefit,
    /// Larger is worse.
    Cost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum IndicatorKind {
    #[default]
    Quantitative,
    /// Categorical labels mapped to 0 or 1 before analysis.
    QualitativeBinary,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndicatorSpec {
    pub name: String,
    pub direction: Direction,
    pub kind: IndicatorKind,
}

impl IndicatorSpec {
    /// A quantitative benefit indicator.
    pub fn benefit(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            direction: Direction::Benefit,
            kind: IndicatorKind::Quantitative,
        }
    }

    pub fn cost(name: impl Into<String>) -> Self {
        Self {
            direction: Direction::Cost,
            ..Self::benefit(name)
        }
    }
}

/// Checks that indicator names are unique.
pub fn validate_indicator_names(indicators: &[IndicatorSpec]) -> Result<()> {
    for (j, spec) in indicators.iter().enumerate() {
        if indicators[..j].iter().any(|s| s.name == spec.name) {
            return Err(Error::Validation(alloc::format!(
                "duplicate indicator name '{}'",
                spec.name
            )));
        }
    }
    Ok(())
}

/// The `m × n` matrix of raw indicator values, one row per evaluated object.
#[derive(Debug, Clone, PartialEq)]
pub struct JudgmentMatrix {
    objects: Vec<String>,
    indicators: Vec<IndicatorSpec>,
    values: Matrix,
}

impl JudgmentMatrix {
    pub fn new(
        objects: Vec<String>,
        indicators: Vec<IndicatorSpec>,
        values: Matrix,
    ) -> Result<Self> {
        if values.shape() != (objects.len(), indicators.len()) {
            return Err(Error::Shape {
                op: "JudgmentMatrix::new",
                left: (objects.len(), indicators.len()),
                right: values.shape(),
            });
        }
        if objects.len() < 2 {
            return Err(Error::InsufficientObjects {
                found: objects.len(),
                required: 2,
            });
        }
        if indicators.is_empty() {
            return Err(Error::Validation(
                "at least one indicator is required".to_string(),
            ));
        }
        validate_indicator_names(&indicators)?;
        Ok(Self {
            objects,
            indicators,
            values,
        })
    }

    /// Unlabelled convenience constructor: objects are named `1..=m`, all
    /// indicators are quantitative benefit indicators named `x1..=xn`.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let values = Matrix::from_rows(rows)?;
        let objects = (1..=values.rows()).map(|i| i.to_string()).collect();
        let indicators = (1..=values.cols())
            .map(|j| IndicatorSpec::benefit(alloc::format!("x{j}")))
            .collect();
        Self::new(objects, indicators, values)
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn indicators(&self) -> &[IndicatorSpec] {
        &self.indicators
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn n_objects(&self) -> usize {
        self.values.rows()
    }

    pub fn n_indicators(&self) -> usize {
        self.values.cols()
    }

    /// Keeps only the listed indicator columns, in the given order.
    pub fn select(&self, columns: &[usize]) -> Result<Self> {
        let cols: Vec<Vec<f64>> = columns.iter().map(|&j| self.values.column(j)).collect();
        let specs = columns
            .iter()
            .map(|&j| self.indicators[j].clone())
            .collect();
        Self::new(self.objects.clone(), specs, Matrix::from_columns(&cols)?)
    }

    /// Indices of columns whose values are all identical.
    pub fn constant_columns(&self) -> Vec<usize> {
        (0..self.n_indicators())
            .filter(|&j| {
                let first = self.values.get(0, j);
                (1..self.n_objects()).all(|i| self.values.get(i, j) == first)
            })
            .collect()
    }
}

/// Min-max scaled judgment matrix; every entry lies in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedMatrix {
    objects: Vec<String>,
    indicators: Vec<IndicatorSpec>,
    values: Matrix,
}

impl NormalizedMatrix {
    /// Wraps already-normalized values, checking the `[0, 1]` bound.
    pub fn from_values(
        objects: Vec<String>,
        indicators: Vec<IndicatorSpec>,
        values: Matrix,
    ) -> Result<Self> {
        if values.shape() != (objects.len(), indicators.len()) {
            return Err(Error::Shape {
                op: "NormalizedMatrix::from_values",
                left: (objects.len(), indicators.len()),
                right: values.shape(),
            });
        }
        if let Some(&v) = values.as_slice().iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Domain {
                value: v,
                lower: 0.0,
                upper: 1.0,
            });
        }
        Ok(Self {
            objects,
            indicators,
            values,
        })
    }

    /// Unlabelled wrapper for tests and direct library use.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let values = Matrix::from_rows(rows)?;
        let objects = (1..=values.rows()).map(|i| i.to_string()).collect();
        let indicators = (1..=values.cols())
            .map(|j| IndicatorSpec::benefit(alloc::format!("x{j}")))
            .collect();
        Self::from_values(objects, indicators, values)
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn indicators(&self) -> &[IndicatorSpec] {
        &self.indicators
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }
}

/// Column-wise z-scores (sample standard deviation).
#[derive(Debug, Clone, PartialEq)]
pub struct StandardizedMatrix {
    objects: Vec<String>,
    indicators: Vec<IndicatorSpec>,
    values: Matrix,
}

impl StandardizedMatrix {
    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn indicators(&self) -> &[IndicatorSpec] {
        &self.indicators
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }
}

/// Direction-aware min-max scaling.
///
/// Benefit columns map to `(x - min) / (max - min)`, cost columns to one minus
/// that, and constant columns to 0.5 throughout.
pub fn minmax_normalize(x: &JudgmentMatrix) -> NormalizedMatrix {
    let (m, n) = x.values.shape();
    let mut out = Matrix::zeros(m, n);
    for (j, spec) in x.indicators.iter().enumerate() {
        let col = x.values.column(j);
        let (lo, hi) = col
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        let range = hi - lo;
        for (i, &v) in col.iter().enumerate() {
            let r = if range == 0.0 {
                0.5
            } else {
                let up = (v - lo) / range;
                match spec.direction {
                    Direction::Benefit => up,
                    Direction::Cost => 1.0 - up,
                }
            };
            out.set(i, j, r);
        }
    }
    NormalizedMatrix {
        objects: x.objects.clone(),
        indicators: x.indicators.clone(),
        values: out,
    }
}

/// Column-wise z-scores using the `m - 1` sample standard deviation.
pub fn zscore_standardize(x: &JudgmentMatrix) -> Result<StandardizedMatrix> {
    let (m, n) = x.values.shape();
    let mut out = Matrix::zeros(m, n);
    for j in 0..n {
        let col = x.values.column(j);
        let mean = col.iter().sum::<f64>() / m as f64;
        let ss: f64 = col.iter().map(|v| (v - mean) * (v - mean)).sum();
        let sd = libm::sqrt(ss / (m - 1) as f64);
        if sd == 0.0 || col.iter().all(|&v| v == col[0]) {
            return Err(Error::DegenerateColumn {
                indicator: x.indicators[j].name.clone(),
            });
        }
        for (i, v) in col.iter().enumerate() {
            out.set(i, j, (v - mean) / sd);
        }
    }
    Ok(StandardizedMatrix {
        objects: x.objects.clone(),
        indicators: x.indicators.clone(),
        values: out,
    })
}

/// Replaces categorical labels by 0 or 1 (`true` maps to 1).
pub fn quantize_qualitative<S: AsRef<str>>(
    labels: &[S],
    mapping: &BTreeMap<String, bool>,
) -> Result<Vec<f64>> {
    labels
        .iter()
        .map(|label| {
            let label = label.as_ref();
            match mapping.get(label) {
                Some(true) => Ok(1.0),
                Some(false) => Ok(0.0),
                None => Err(Error::UnmappedLabel {
                    label: label.to_string(),
                }),
            }
        })
        .collect()
}
