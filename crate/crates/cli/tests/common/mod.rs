#![allow(dead_code)]

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cindex_core::components::varimax_criterion;
use cindex_core::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The four leading explained-variance shares of the published PCA, padded
/// with a descending tail so the eleven ratios sum to one.
pub const PUBLISHED_RATIOS: [f64; 11] = [
    0.57691, 0.20225, 0.06755, 0.05962, 0.03, 0.02, 0.015, 0.012, 0.008, 0.005, 0.00367,
];
pub const PCA_SHARES: [f64; 4] = [0.57691, 0.20225, 0.06755, 0.05962];
pub const FACTOR_SHARES: [f64; 4] = [0.46936, 0.16537, 0.13997, 0.13163];

pub const TABLE_ONE: [f64; 11] = [
    12.34, 11.41, 10.35, 10.01, 8.31, 8.20, 8.35, 8.20, 8.14, 7.41, 7.28,
];
#[allow(clippy::approx_constant)]
pub const TABLE_THREE: [f64; 15] = [
    7.14, 7.12, 6.23, 6.21, 8.35, 6.50, 7.34, 6.20, 6.64, 6.41, 6.33, 6.31, 6.58, 6.28, 6.36,
];

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cindex"))
}

pub fn asset(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn cindex")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gram-Schmidt on random vectors, optionally orthogonal to `avoid` first.
/// Returns the vectors (each of length `dim`).
fn orthonormal(
    rng: &mut ChaCha8Rng,
    dim: usize,
    count: usize,
    avoid: Option<Vec<f64>>,
) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    if let Some(v) = avoid {
        let norm = dot(&v, &v).sqrt();
        basis.push(v.iter().map(|x| x / norm).collect());
    }
    let skip = basis.len();
    while basis.len() < count + skip {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for _ in 0..2 {
            for b in &basis {
                let p = dot(&v, b);
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm > 1e-6 {
            basis.push(v.iter().map(|x| x / norm).collect());
        }
    }
    basis.split_off(skip)
}

/// Orthogonal `W` such that `W diag(λ) Wᵀ` has unit diagonal, i.e. is a
/// correlation matrix with eigenvalues `λ` (summing to `n`). Built by
/// Bendel–Mickey rotations.
fn correlation_eigenvectors(rng: &mut ChaCha8Rng, lambda: &[f64]) -> Vec<Vec<f64>> {
    let n = lambda.len();
    // rows of w are eigenvector coordinates: a = w diag(λ) wᵀ
    let q = orthonormal(rng, n, n, None);
    let mut w: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| q[j][i]).collect()).collect();
    let build = |w: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| w[i][k] * lambda[k] * w[j][k]).sum())
                    .collect()
            })
            .collect()
    };
    for _ in 0..n {
        let a = build(&w);
        let low = (0..n).find(|&i| a[i][i] < 1.0 - 1e-14);
        let high = (0..n).find(|&i| a[i][i] > 1.0 + 1e-14);
        let (Some(i), Some(j)) = (low, high) else {
            break;
        };
        let (aii, ajj, aij) = (a[i][i] - 1.0, a[j][j] - 1.0, a[i][j]);
        let t = (aij + (aij * aij - aii * ajj).sqrt()) / ajj;
        let c = 1.0 / (1.0 + t * t).sqrt();
        let s = c * t;
        // rows i and j of w rotate; new row i = c·w_i − s·w_j
        let (wi, wj) = (w[i].clone(), w[j].clone());
        for k in 0..n {
            w[i][k] = c * wi[k] - s * wj[k];
            w[j][k] = s * wi[k] + c * wj[k];
        }
    }
    w
}

/// An `m × n` dataset whose sample correlation matrix has eigenvalues
/// `n · ratios`.
pub fn dataset_with_ratios(seed: u64, m: usize, ratios: &[f64]) -> Vec<Vec<f64>> {
    let n = ratios.len();
    let lambda: Vec<f64> = ratios.iter().map(|r| r * n as f64).collect();
    let mut rng = rng(seed);
    let w = correlation_eigenvectors(&mut rng, &lambda);
    let u = orthonormal(&mut rng, m, n, Some(vec![1.0; m]));
    let scale = ((m - 1) as f64).sqrt();
    (0..m)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let z: f64 = (0..n)
                        .map(|k| u[k][i] * lambda[k].sqrt() * w[j][k])
                        .sum::<f64>()
                        * scale;
                    50.0 + 10.0 * z
                })
                .collect()
        })
        .collect()
}

pub fn write_csv(path: &Path, header: &[String], objects: &[String], rows: &[Vec<f64>]) {
    let mut text = format!("object,{}\n", header.join(","));
    for (o, row) in objects.iter().zip(rows) {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        text.push_str(&format!("{o},{}\n", cells.join(",")));
    }
    std::fs::write(path, text).unwrap();
}

pub fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    let mut s = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = rng.gen_range(-5.0..5.0);
            s.set(i, j, v);
            s.set(j, i, v);
        }
    }
    s
}

pub fn random_rows(rng: &mut ChaCha8Rng, m: usize, n: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    (0..m)
        .map(|_| (0..n).map(|_| rng.gen_range(lo..hi)).collect())
        .collect()
}

/// Random raw data driven by a few latent factors.
pub fn latent_rows(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Vec<Vec<f64>> {
    let latent = rng.gen_range(1..=3);
    let mix: Vec<Vec<f64>> = (0..latent)
        .map(|_| (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect())
        .collect();
    (0..m)
        .map(|_| {
            let d: Vec<f64> = (0..latent).map(|_| rng.gen_range(-1.0..1.0)).collect();
            (0..n)
                .map(|j| {
                    10.0 * d.iter().zip(&mix).map(|(a, w)| a * w[j]).sum::<f64>()
                        + rng.gen_range(-1.0..1.0)
                })
                .collect()
        })
        .collect()
}

/// Entropy weights written straight from the formulas over nested vectors.
pub fn literal_entropy_weights(r: &[Vec<f64>]) -> Vec<f64> {
    let m = r.len();
    let n = r[0].len();
    let mut h = vec![0.0; n];
    for j in 0..n {
        let mut denom = 0.0;
        for row in r {
            denom += 1.0 + row[j];
        }
        let mut acc = 0.0;
        for row in r {
            let f = (1.0 + row[j]) / denom;
            acc += f * f.ln();
        }
        h[j] = -acc / (m as f64).ln();
    }
    let total: f64 = h.iter().map(|hj| 1.0 - hj).sum();
    h.iter().map(|hj| (1.0 - hj) / total).collect()
}

/// Varimax criterion of two columns after rotating by `phi`.
pub fn pair_criterion(x: &Matrix, phi: f64) -> f64 {
    let (s, c) = phi.sin_cos();
    let rows: Vec<Vec<f64>> = (0..x.rows())
        .map(|i| {
            vec![
                c * x.get(i, 0) + s * x.get(i, 1),
                -s * x.get(i, 0) + c * x.get(i, 1),
            ]
        })
        .collect();
    varimax_criterion(&Matrix::from_rows(&rows).unwrap())
}

/// Optimal two-factor angle from the criterion's `cos 4φ`/`sin 4φ` Fourier
/// coefficients, sampled at eight points over one period.
pub fn fourier_optimal_angle(x: &Matrix) -> f64 {
    let samples = 8;
    let (mut a, mut b) = (0.0, 0.0);
    for k in 0..samples {
        let phi = k as f64 * (PI / 2.0) / samples as f64;
        let v = pair_criterion(x, phi);
        a += v * (4.0 * phi).cos();
        b += v * (4.0 * phi).sin();
    }
    b.atan2(a) / 4.0
}
