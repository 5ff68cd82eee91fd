//! Objective indicator weights from information entropy.
//!
//! Each normalized column is turned into a probability distribution over the
//! evaluated objects using the shifted proportions `(1 + r) / Σ(1 + r)`, which
//! stay strictly positive even where min-max scaling produced zeros. The
//! entropy of that distribution, scaled by `ln m` to lie in `[0, 1]`, says how
//! little the indicator discriminates between objects; weights are
//! proportional to `1 - H`.

use alloc::vec::Vec;

use crate::preprocess::NormalizedMatrix;
use crate::{Error, Matrix, Result};

/// Column-stochastic matrix of strictly positive proportions.
#[derive(Debug, Clone, PartialEq)]
pub struct ProportionMatrix(Matrix);

impl ProportionMatrix {
    pub fn values(&self) -> &Matrix {
        &self.0
    }
}

/// Normalized entropy per indicator, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyVector(Vec<f64>);

impl EntropyVector {
    /// Checks the `[0, 1]` bound (with `1e-12` slack) and clamps into it.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let mut values = values;
        for h in &mut values {
            if !(-1e-12..=1.0 + 1e-12).contains(h) {
                return Err(Error::Domain {
                    value: *h,
                    lower: 0.0,
                    upper: 1.0,
                });
            }
            *h = h.clamp(0.0, 1.0);
        }
        Ok(Self(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Nonnegative indicator weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    /// Accepts any nonnegative vector summing to one within `1e-12`.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(&w) = values.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::Domain {
                value: w,
                lower: 0.0,
                upper: 1.0,
            });
        }
        let total: f64 = values.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Validation(alloc::format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(Self(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Percentages in hundredths of a percent, reconciled so they total
    /// exactly 10000 (100.00%).
    pub fn percentages(&self) -> Vec<Hundredths> {
        largest_remainder_percentages(&self.0)
    }
}

/// A percentage stored as an integer count of 0.01% units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Hundredths(pub u32);

impl Hundredths {
    pub fn as_percent(self) -> f64 {
        f64::from(self.0) / 100.0
    }
}

impl core::fmt::Display for Hundredths {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}.{:02}", self.0 / 100, self.0 % 100)
    }
}

/// Shifted proportions `f_ij = (1 + r_ij) / Σ_i (1 + r_ij)`.
pub fn corrected_proportions(r: &NormalizedMatrix) -> ProportionMatrix {
    let values = r.values();
    let (m, n) = values.shape();
    let mut out = Matrix::zeros(m, n);
    for j in 0..n {
        let total: f64 = (0..m).map(|i| 1.0 + values.get(i, j)).sum();
        for i in 0..m {
            out.set(i, j, (1.0 + values.get(i, j)) / total);
        }
    }
    ProportionMatrix(out)
}

/// `H_j = -(1 / ln m) Σ_i f_ij ln f_ij`.
///
/// A column whose proportions are all bitwise equal gets exactly `H = 1`.
pub fn information_entropy(f: &ProportionMatrix) -> Result<EntropyVector> {
    let values = f.values();
    let (m, n) = values.shape();
    if m < 2 {
        return Err(Error::InsufficientObjects {
            found: m,
            required: 2,
        });
    }
    let scale = libm::log(m as f64);
    let mut h = Vec::with_capacity(n);
    for j in 0..n {
        let first = values.get(0, j);
        if (1..m).all(|i| values.get(i, j) == first) {
            h.push(1.0);
            continue;
        }
        let sum: f64 = (0..m)
            .map(|i| {
                let p = values.get(i, j);
                p * libm::log(p)
            })
            .sum();
        h.push(-sum / scale);
    }
    EntropyVector::new(h)
}

/// `w_j = (1 - H_j) / Σ_k (1 - H_k)`.
pub fn entropy_weights(h: &EntropyVector) -> Result<WeightVector> {
    let divergence: Vec<f64> = h.0.iter().map(|h| 1.0 - h).collect();
    let total: f64 = divergence.iter().sum();
    if total <= 0.0 {
        return Err(Error::DegenerateWeights);
    }
    Ok(WeightVector(
        divergence.into_iter().map(|d| d / total).collect(),
    ))
}

/// Proportions, entropies and weights for one normalized matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyAnalysis {
    pub proportions: ProportionMatrix,
    pub entropy: EntropyVector,
    pub weights: WeightVector,
}

pub fn analyze(r: &NormalizedMatrix) -> Result<EntropyAnalysis> {
    let proportions = corrected_proportions(r);
    let entropy = information_entropy(&proportions)?;
    let weights = entropy_weights(&entropy)?;
    Ok(EntropyAnalysis {
        proportions,
        entropy,
        weights,
    })
}

/// Rounds `weights × 100%` to hundredths so the parts total exactly 100.00.
///
/// Each share is floored, then the missing units go to the largest fractional
/// remainders (lower index first on equal remainders).
pub fn largest_remainder_percentages(weights: &[f64]) -> Vec<Hundredths> {
    const TOTAL: u64 = 10_000;
    let total_weight: f64 = weights.iter().sum();
    if weights.is_empty() || total_weight <= 0.0 {
        return weights.iter().map(|_| Hundredths(0)).collect();
    }
    let exact: Vec<f64> = weights
        .iter()
        .map(|w| w / total_weight * TOTAL as f64)
        .collect();
    let mut units: Vec<u64> = exact.iter().map(|e| libm::floor(*e) as u64).collect();
    let assigned: u64 = units.iter().sum();
    let mut missing = TOTAL.saturating_sub(assigned);
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = exact[a] - libm::floor(exact[a]);
        let rb = exact[b] - libm::floor(exact[b]);
        rb.partial_cmp(&ra).unwrap_or(core::cmp::Ordering::Equal)
    });
    for &j in order.iter().cycle() {
        if missing == 0 {
            break;
        }
        units[j] += 1;
        missing -= 1;
    }
    units.into_iter().map(|u| Hundredths(u as u32)).collect()
}
