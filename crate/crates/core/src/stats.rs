//! Mean and sample covariance of point clouds.

use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::linalg::{symmetric_eigen, LinalgError, Matrix};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("covariance needs at least 2 points, got {0}")]
    InsufficientData(usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceReport {
    pub mean: Vec<f64>,
    /// Rows of the `dim x dim` sample covariance.
    pub covariance: Vec<Vec<f64>>,
    pub n: usize,
}

/// Two-pass sample covariance with the `n - 1` denominator.
///
/// Only the upper triangle is accumulated and mirrored, so the result is
/// exactly symmetric.
pub fn covariance(cloud: &PointCloud) -> Result<CovarianceReport, StatsError> {
    let n = cloud.len();
    if n < 2 {
        return Err(StatsError::InsufficientData(n));
    }
    let dim = cloud.dim();
    let mut mean = vec![0.0; dim];
    for p in cloud.points() {
        for (m, x) in mean.iter_mut().zip(p) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }

    let mut acc = vec![vec![0.0; dim]; dim];
    let mut centered = vec![0.0; dim];
    for p in cloud.points() {
        for ((c, x), m) in centered.iter_mut().zip(p).zip(&mean) {
            *c = x - m;
        }
        for i in 0..dim {
            for j in i..dim {
                acc[i][j] += centered[i] * centered[j];
            }
        }
    }
    let denom = (n - 1) as f64;
    for i in 0..dim {
        for j in i..dim {
            let v = acc[i][j] / denom;
            acc[i][j] = v;
            acc[j][i] = v;
        }
    }
    Ok(CovarianceReport {
        mean,
        covariance: acc,
        n,
    })
}

impl CovarianceReport {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.covariance[i][i]).sum()
    }

    pub fn matrix(&self) -> Matrix {
        let d = self.dim();
        Matrix::from_row_major(d, self.covariance.concat()).expect("square by construction")
    }

    /// Smallest eigenvalue; at least `-1e-10` for any valid report.
    pub fn min_eigenvalue(&self) -> Result<f64, StatsError> {
        let e = symmetric_eigen(&self.matrix(), 1e-14)?;
        Ok(e.values[0])
    }
}
