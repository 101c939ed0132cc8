//! Implicit polynomial fitting: find unit coefficients `c` minimizing the
//! mean squared value of `sum c_j m_j(x)` over a point cloud.

use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::linalg::{symmetric_eigen, LinalgError, Matrix};
use crate::poly::MultiPoly;

pub const DEFAULT_RESIDUAL_THRESHOLD: f64 = 1e-6;
pub const EIGEN_TOLERANCE: f64 = 1e-12;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum FitError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(
        "underdetermined fit: {points} points for a basis of {basis} monomials at degree {degree}"
    )]
    Underdetermined {
        points: usize,
        basis: usize,
        degree: u32,
    },
    #[error("numerical failure: {0}")]
    Numerical(#[from] LinalgError),
}

/// Exponent vectors of total degree `<= degree` in graded-lex order:
/// by total degree, then lexicographically descending, so
/// `[1, x, y, x^2, xy, y^2]` for two variables.
pub fn monomial_basis(nvars: usize, degree: u32) -> Vec<Vec<u32>> {
    let mut basis = Vec::new();
    for total in 0..=degree {
        let mut current = vec![0; nvars];
        push_compositions(&mut current, 0, total, &mut basis);
    }
    basis
}

fn push_compositions(current: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<Vec<u32>>) {
    if pos + 1 >= current.len() {
        if let Some(last) = current.last_mut() {
            *last = remaining;
            out.push(current.to_vec());
        } else if remaining == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for e in (0..=remaining).rev() {
        current[pos] = e;
        push_compositions(current, pos + 1, remaining - e, out);
    }
    current[pos] = 0;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub degree: u32,
    pub nvars: usize,
    pub basis: Vec<Vec<u32>>,
    /// Unit-norm coefficients over `basis`.
    pub coefficients: Vec<f64>,
    pub residual_rms: f64,
    /// `lambda_max / lambda_min` of the column-scaled Gram matrix, with
    /// `lambda_min` floored at `f64::EPSILON * lambda_max`.
    pub gram_condition: f64,
}

impl FitResult {
    pub fn to_poly(&self) -> MultiPoly {
        MultiPoly::from_terms(
            self.nvars,
            self.coefficients
                .iter()
                .copied()
                .zip(self.basis.iter().cloned()),
        )
        .expect("basis vectors have nvars entries")
    }

    /// `|<a, b>| / (|a| |b|)` against another coefficient vector over the same basis.
    pub fn abs_cosine(&self, other: &[f64]) -> f64 {
        let dot: f64 = self
            .coefficients
            .iter()
            .zip(other)
            .map(|(a, b)| a * b)
            .sum();
        let na: f64 = self.coefficients.iter().map(|a| a * a).sum::<f64>().sqrt();
        let nb: f64 = other.iter().map(|b| b * b).sum::<f64>().sqrt();
        (dot / (na * nb)).abs()
    }
}

fn monomial_value(p: &[f64], exps: &[u32]) -> f64 {
    p.iter().zip(exps).map(|(x, &e)| x.powi(e as i32)).product()
}

pub fn fit_implicit(cloud: &PointCloud, degree: u32) -> Result<FitResult, FitError> {
    if degree < 1 {
        return Err(FitError::InvalidParameter(format!(
            "degree must be >= 1, got {degree}"
        )));
    }
    let basis = monomial_basis(cloud.dim(), degree);
    let n = cloud.len();
    let k = basis.len();
    if n < k {
        return Err(FitError::Underdetermined {
            points: n,
            basis: k,
            degree,
        });
    }

    let rows: Vec<Vec<f64>> = cloud
        .points()
        .map(|p| basis.iter().map(|e| monomial_value(p, e)).collect())
        .collect();
    let scale: Vec<f64> = (0..k)
        .map(|j| {
            let ms = rows.iter().map(|r| r[j] * r[j]).sum::<f64>() / n as f64;
            if ms > 0.0 && ms.is_finite() {
                ms.sqrt()
            } else {
                1.0
            }
        })
        .collect();

    let mut gram = Matrix::zeros(k);
    let mut scaled = vec![0.0; k];
    for r in &rows {
        for j in 0..k {
            scaled[j] = r[j] / scale[j];
        }
        for a in 0..k {
            for b in a..k {
                gram[(a, b)] += scaled[a] * scaled[b];
            }
        }
    }
    for a in 0..k {
        for b in a..k {
            let v = gram[(a, b)] / n as f64;
            gram[(a, b)] = v;
            gram[(b, a)] = v;
        }
    }

    let eig = symmetric_eigen(&gram, EIGEN_TOLERANCE)?;
    let lambda_max = eig.values[k - 1];
    let lambda_min = eig.values[0].max(f64::EPSILON * lambda_max);
    let gram_condition = if lambda_max > 0.0 {
        lambda_max / lambda_min
    } else {
        1.0
    };

    let mut coefficients: Vec<f64> = eig.vectors[0]
        .iter()
        .zip(&scale)
        .map(|(u, s)| u / s)
        .collect();
    let norm = coefficients.iter().map(|c| c * c).sum::<f64>().sqrt();
    for c in &mut coefficients {
        *c /= norm;
    }
    let cutoff = 1e-9 * coefficients.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if coefficients
        .iter()
        .find(|c| c.abs() > cutoff)
        .is_some_and(|&c| c < 0.0)
    {
        for c in &mut coefficients {
            *c = -*c;
        }
    }

    let ss: f64 = rows
        .iter()
        .map(|r| {
            let v: f64 = r.iter().zip(&coefficients).map(|(m, c)| m * c).sum();
            v * v
        })
        .sum();
    Ok(FitResult {
        degree,
        nvars: cloud.dim(),
        basis,
        coefficients,
        residual_rms: (ss / n as f64).sqrt(),
        gram_condition,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeSummary {
    pub degree: u32,
    pub residual_rms: f64,
    pub gram_condition: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeSelection {
    pub selected: FitResult,
    /// False when no swept degree met the threshold; `selected` is then
    /// the highest degree fitted.
    pub converged: bool,
    pub residual_threshold: f64,
    /// Every degree fitted, in increasing order.
    pub sweep: Vec<DegreeSummary>,
}

/// Fits degrees `1..=max_degree` and keeps the first whose residual is at
/// most `residual_threshold`. Degrees the cloud is too small for end the sweep.
pub fn select_degree(
    cloud: &PointCloud,
    max_degree: u32,
    residual_threshold: f64,
) -> Result<DegreeSelection, FitError> {
    if max_degree < 1 {
        return Err(FitError::InvalidParameter(format!(
            "max_degree must be >= 1, got {max_degree}"
        )));
    }
    if !(residual_threshold > 0.0 && residual_threshold.is_finite()) {
        return Err(FitError::InvalidParameter(format!(
            "residual_threshold must be > 0, got {residual_threshold}"
        )));
    }
    let mut sweep = Vec::new();
    let mut last = None;
    for d in 1..=max_degree {
        let fit = match fit_implicit(cloud, d) {
            Ok(f) => f,
            Err(e @ FitError::Underdetermined { .. }) if last.is_none() => return Err(e),
            Err(FitError::Underdetermined { .. }) => break,
            Err(e) => return Err(e),
        };
        sweep.push(DegreeSummary {
            degree: d,
            residual_rms: fit.residual_rms,
            gram_condition: fit.gram_condition,
        });
        if fit.residual_rms <= residual_threshold {
            return Ok(DegreeSelection {
                selected: fit,
                converged: true,
                residual_threshold,
                sweep,
            });
        }
        last = Some(fit);
    }
    Ok(DegreeSelection {
        selected: last.expect("degree 1 fitted"),
        converged: false,
        residual_threshold,
        sweep,
    })
}
