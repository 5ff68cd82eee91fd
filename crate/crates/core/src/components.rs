//! Principal-component and factor analysis on standardized indicators.
//!
//! The factor path reuses principal-component extraction and then applies a
//! varimax rotation to the retained loadings. Composite scores weight each
//! component score by its share of total variance: the explained ratios for
//! plain PCA, the post-rotation shares for the rotated solution. Both share
//! vectors sum to the same retained variance fraction.

use alloc::vec;
use alloc::vec::Vec;

use crate::numkit::{jacobi_eigh, matmul};
use crate::preprocess::StandardizedMatrix;
use crate::{Error, Matrix, Result};

/// Default cumulative explained-variance target for retention.
pub const DEFAULT_RETENTION_THRESHOLD: f64 = 0.85;
/// Eigenvalues at or below this are treated as zero when forming loadings.
pub const EIGENVALUE_FLOOR: f64 = 1e-12;
pub const VARIMAX_MAX_SWEEPS: usize = 100;
/// Relative criterion improvement below which varimax stops.
pub const VARIMAX_TOLERANCE: f64 = 1e-6;

/// How many components to keep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Retention {
    /// Smallest count whose cumulative explained ratio reaches the fraction.
    Threshold(f64),
    /// Exactly this many.
    Count(usize),
}

impl Default for Retention {
    fn default() -> Self {
        Retention::Threshold(DEFAULT_RETENTION_THRESHOLD)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentModel {
    /// All eigenvalues of the correlation matrix, descending.
    pub eigenvalues: Vec<f64>,
    /// `λ_i / n`.
    pub explained_ratios: Vec<f64>,
    pub cumulative_ratios: Vec<f64>,
    pub retained: usize,
    /// `n × k` loadings, `a_ij = e_ij √λ_j`.
    pub loadings: Matrix,
    /// `n × k` unit eigenvectors of the retained components.
    pub eigvec_basis: Matrix,
}

impl ComponentModel {
    /// Explained ratios of the retained components.
    pub fn retained_ratios(&self) -> &[f64] {
        &self.explained_ratios[..self.retained]
    }

    pub fn retained_eigenvalues(&self) -> &[f64] {
        &self.eigenvalues[..self.retained]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RotationResult {
    pub rotated_loadings: Matrix,
    /// Orthogonal `k × k` matrix with `rotated = loadings · rotation`.
    pub rotation: Matrix,
    /// Column sums of squared rotated loadings divided by the indicator count.
    pub rotated_variance_shares: Vec<f64>,
    /// Varimax criterion (on Kaiser-normalized loadings) after each sweep,
    /// starting with the unrotated value.
    pub criterion_trace: Vec<f64>,
    pub converged: bool,
}

/// Per-object variance-weighted composite.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeScores(pub Vec<f64>);

impl CompositeScores {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Sample correlation matrix `Zᵀ Z / (m - 1)` of z-scored columns, clamped to
/// `[-1, 1]` with an exact unit diagonal.
pub fn correlation_matrix(zx: &StandardizedMatrix) -> Result<Matrix> {
    correlation_of(zx.values())
}

fn correlation_of(z: &Matrix) -> Result<Matrix> {
    let (m, n) = z.shape();
    if m < 2 {
        return Err(Error::InsufficientObjects {
            found: m,
            required: 2,
        });
    }
    let mut c = Matrix::zeros(n, n);
    let denom = (m - 1) as f64;
    for p in 0..n {
        c.set(p, p, 1.0);
        for q in (p + 1)..n {
            let dot: f64 = (0..m).map(|i| z.get(i, p) * z.get(i, q)).sum();
            let r = (dot / denom).clamp(-1.0, 1.0);
            c.set(p, q, r);
            c.set(q, p, r);
        }
    }
    Ok(c)
}

/// Smallest `k ≥ 1` whose cumulative ratio reaches `threshold`.
pub fn retain_components(explained_ratios: &[f64], threshold: f64) -> Result<usize> {
    if explained_ratios.is_empty() {
        return Err(Error::Validation("no explained-variance ratios".into()));
    }
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::Domain {
            value: threshold,
            lower: 0.0,
            upper: 1.0,
        });
    }
    if let Some(&r) = explained_ratios
        .iter()
        .find(|r| !r.is_finite() || **r < -1e-12)
    {
        return Err(Error::Validation(alloc::format!(
            "explained ratio {r} is negative"
        )));
    }
    let total: f64 = explained_ratios.iter().sum();
    if total > 1.0 + 1e-9 {
        return Err(Error::Validation(alloc::format!(
            "explained ratios sum to {total} > 1"
        )));
    }
    let mut cumulative = 0.0;
    for (i, r) in explained_ratios.iter().enumerate() {
        cumulative += r;
        // slack absorbs rounding when the target is the full variance
        if cumulative >= threshold - 1e-12 {
            return Ok(i + 1);
        }
    }
    Ok(explained_ratios.len())
}

/// Standardizes nothing; expects z-scores. Eigendecomposes their correlation
/// matrix and keeps components per `retention`.
pub fn fit_pca(zx: &StandardizedMatrix, retention: Retention) -> Result<ComponentModel> {
    fit_correlation(&correlation_matrix(zx)?, retention)
}

/// Component model from a correlation matrix given directly.
pub fn fit_correlation(correlation: &Matrix, retention: Retention) -> Result<ComponentModel> {
    let eig = jacobi_eigh(correlation)?;
    let n = correlation.rows();
    let explained_ratios: Vec<f64> = eig.eigenvalues.iter().map(|l| l / n as f64).collect();
    let cumulative_ratios: Vec<f64> = explained_ratios
        .iter()
        .scan(0.0, |acc, r| {
            *acc += r;
            Some(*acc)
        })
        .collect();
    let retained = match retention {
        Retention::Threshold(t) => {
            // tiny negative eigenvalues from rounding are not a precondition failure
            let clipped: Vec<f64> = explained_ratios.iter().map(|r| r.max(0.0)).collect();
            retain_components(&clipped, t)?
        }
        Retention::Count(k) if k >= 1 && k <= n => k,
        Retention::Count(k) => {
            return Err(Error::Validation(alloc::format!(
                "cannot retain {k} of {n} components"
            )))
        }
    };

    let mut basis = Matrix::zeros(n, retained);
    let mut loadings = Matrix::zeros(n, retained);
    for c in 0..retained {
        let lambda = eig.eigenvalues[c];
        let root = if lambda > EIGENVALUE_FLOOR {
            libm::sqrt(lambda)
        } else {
            0.0
        };
        for r in 0..n {
            let e = eig.eigenvectors.get(r, c);
            basis.set(r, c, e);
            loadings.set(r, c, e * root);
        }
    }
    Ok(ComponentModel {
        eigenvalues: eig.eigenvalues,
        explained_ratios,
        cumulative_ratios,
        retained,
        loadings,
        eigvec_basis: basis,
    })
}

/// Recovers unit eigenvectors from loadings, `e_ij = a_ij / √λ_j`. Columns
/// with `λ ≤ 1e-12` come back as zeros.
pub fn normalized_eigenvectors(loadings: &Matrix, eigenvalues: &[f64]) -> Result<Matrix> {
    if eigenvalues.len() < loadings.cols() {
        return Err(Error::Shape {
            op: "normalized_eigenvectors",
            left: loadings.shape(),
            right: (eigenvalues.len(), 1),
        });
    }
    let mut out = Matrix::zeros(loadings.rows(), loadings.cols());
    for (c, &lambda) in eigenvalues.iter().enumerate().take(loadings.cols()) {
        if lambda <= EIGENVALUE_FLOOR {
            continue;
        }
        let root = libm::sqrt(lambda);
        for r in 0..loadings.rows() {
            out.set(r, c, loadings.get(r, c) / root);
        }
    }
    Ok(out)
}

/// Component scores `y = Zx · t`.
pub fn component_scores(zx: &Matrix, basis: &Matrix) -> Result<Matrix> {
    if zx.cols() != basis.rows() {
        return Err(Error::Shape {
            op: "component_scores",
            left: zx.shape(),
            right: basis.shape(),
        });
    }
    matmul(zx, basis)
}

/// Row-wise dot product of component scores with variance shares.
pub fn composite_scores(y: &Matrix, shares: &[f64]) -> Result<CompositeScores> {
    if shares.len() != y.cols() {
        return Err(Error::Shape {
            op: "composite_scores",
            left: y.shape(),
            right: (shares.len(), 1),
        });
    }
    Ok(CompositeScores(
        (0..y.rows())
            .map(|i| y.row(i).iter().zip(shares).map(|(s, w)| s * w).sum())
            .collect(),
    ))
}

/// Raw varimax criterion `Σ_j [ n Σ_i a_ij⁴ − (Σ_i a_ij²)² ] / n²`.
pub fn varimax_criterion(loadings: &Matrix) -> f64 {
    let (n, k) = loadings.shape();
    let nf = n as f64;
    (0..k)
        .map(|j| {
            let (s2, s4) = (0..n).fold((0.0, 0.0), |(s2, s4), i| {
                let sq = loadings.get(i, j) * loadings.get(i, j);
                (s2 + sq, s4 + sq * sq)
            });
            (nf * s4 - s2 * s2) / (nf * nf)
        })
        .sum()
}

/// Orthogonal varimax rotation with Kaiser row normalization.
///
/// Rotates one pair of factors at a time by the angle that maximizes the
/// pair's criterion, sweeping all pairs until a sweep improves the criterion
/// by less than `1e-6` relative. Output columns are ordered by descending
/// variance share and signed to have a nonnegative column sum.
pub fn varimax_rotate(loadings: &Matrix) -> Result<RotationResult> {
    let (n, k) = loadings.shape();
    if n < 2 || k < 1 {
        return Err(Error::Validation(alloc::format!(
            "varimax needs at least 2 indicators and 1 factor, got {n}x{k}"
        )));
    }
    let norms: Vec<f64> = (0..n)
        .map(|i| libm::sqrt(loadings.row(i).iter().map(|a| a * a).sum()))
        .collect();
    let mut x = Matrix::zeros(n, k);
    for (i, &norm) in norms.iter().enumerate() {
        let h = if norm > 0.0 { norm } else { 1.0 };
        for j in 0..k {
            x.set(i, j, loadings.get(i, j) / h);
        }
    }
    let mut rotation = Matrix::identity(k);
    let mut criterion = varimax_criterion(&x);
    let mut trace = vec![criterion];
    let mut converged = k == 1;

    if k > 1 {
        for _ in 0..VARIMAX_MAX_SWEEPS {
            for p in 0..k {
                for q in (p + 1)..k {
                    let angle = pair_angle(&x, p, q);
                    if angle != 0.0 {
                        rotate_pair(&mut x, p, q, angle);
                        rotate_pair(&mut rotation, p, q, angle);
                    }
                }
            }
            let next = varimax_criterion(&x);
            trace.push(next);
            let gain = next - criterion;
            criterion = next;
            if gain <= VARIMAX_TOLERANCE * libm::fabs(criterion) {
                converged = true;
                break;
            }
        }
    }

    let mut rotated = Matrix::zeros(n, k);
    for (i, &norm) in norms.iter().enumerate() {
        let h = if norm > 0.0 { norm } else { 1.0 };
        for j in 0..k {
            rotated.set(i, j, x.get(i, j) * h);
        }
    }

    let shares: Vec<f64> = (0..k)
        .map(|j| {
            (0..n)
                .map(|i| rotated.get(i, j) * rotated.get(i, j))
                .sum::<f64>()
                / n as f64
        })
        .collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        shares[b]
            .partial_cmp(&shares[a])
            .unwrap_or(core::cmp::Ordering::Equal)
    });

    let mut out_loadings = Matrix::zeros(n, k);
    let mut out_rotation = Matrix::zeros(k, k);
    for (dst, &src) in order.iter().enumerate() {
        let sum: f64 = (0..n).map(|i| rotated.get(i, src)).sum();
        let sign = if sum < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            out_loadings.set(i, dst, sign * rotated.get(i, src));
        }
        for r in 0..k {
            out_rotation.set(r, dst, sign * rotation.get(r, src));
        }
    }

    Ok(RotationResult {
        rotated_loadings: out_loadings,
        rotation: out_rotation,
        rotated_variance_shares: order.iter().map(|&j| shares[j]).collect(),
        criterion_trace: trace,
        converged,
    })
}

/// Angle maximizing the varimax criterion of columns `p`, `q` under
/// `(x_p, x_q) ← (c x_p + s x_q, −s x_p + c x_q)`.
fn pair_angle(x: &Matrix, p: usize, q: usize) -> f64 {
    let n = x.rows() as f64;
    let (mut a, mut b, mut c, mut d) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..x.rows() {
        let xp = x.get(i, p);
        let xq = x.get(i, q);
        let u = xp * xp - xq * xq;
        let v = 2.0 * xp * xq;
        a += u;
        b += v;
        c += u * u - v * v;
        d += 2.0 * u * v;
    }
    let num = d - 2.0 * a * b / n;
    let den = c - (a * a - b * b) / n;
    if num == 0.0 && den >= 0.0 {
        return 0.0;
    }
    libm::atan2(num, den) / 4.0
}

fn rotate_pair(x: &mut Matrix, p: usize, q: usize, angle: f64) {
    let (s, c) = (libm::sin(angle), libm::cos(angle));
    for i in 0..x.rows() {
        let xp = x.get(i, p);
        let xq = x.get(i, q);
        x.set(i, p, c * xp + s * xq);
        x.set(i, q, -s * xp + c * xq);
    }
}
