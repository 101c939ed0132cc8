//! Truncated power-series polynomials for classical univariate densities.

use serde::{Deserialize, Serialize};

use super::{MultiPoly, PolyError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum SeriesFamily {
    /// `rate * exp(-rate * x)`.
    Exponential { rate: f64 },
    /// Normal density with the given mean and standard deviation.
    Gaussian { mean: f64, sigma: f64 },
    /// `c0 + c1 x + c2 x^2 + ...`, ascending powers.
    ExplicitCoefficients { coefficients: Vec<f64> },
    /// `sum_i (x - shift)^i`.
    ShiftedPower { shift: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesSpec {
    pub family: SeriesFamily,
    /// Highest series index `K` kept in the sum.
    pub truncation_order: u32,
}

impl SeriesSpec {
    pub fn new(family: SeriesFamily, truncation_order: u32) -> Self {
        Self {
            family,
            truncation_order,
        }
    }

    pub fn validate(&self) -> Result<(), PolyError> {
        let bad = |msg: String| Err(PolyError::InvalidSeries(msg));
        match &self.family {
            SeriesFamily::Exponential { rate } if !(rate.is_finite() && *rate > 0.0) => {
                bad(format!("exponential rate must be > 0, got {rate}"))
            }
            SeriesFamily::Gaussian { sigma, .. } if !(sigma.is_finite() && *sigma > 0.0) => {
                bad(format!("gaussian sigma must be > 0, got {sigma}"))
            }
            SeriesFamily::Gaussian { mean, .. } if !mean.is_finite() => {
                bad(format!("gaussian mean must be finite, got {mean}"))
            }
            SeriesFamily::ExplicitCoefficients { coefficients }
                if coefficients.iter().any(|c| !c.is_finite()) =>
            {
                bad("explicit coefficients must be finite".into())
            }
            SeriesFamily::ShiftedPower { shift } if !shift.is_finite() => {
                bad(format!("shift must be finite, got {shift}"))
            }
            _ => Ok(()),
        }
    }
}

/// Sums the family's series through index `K` and returns the result as a
/// univariate polynomial in `x`.
///
/// The gaussian series is the Taylor series of `exp(u)` with
/// `u = -(x - m)^2 / (2 sigma^2)`, expanded about `m` and then re-expressed in
/// powers of `x`. Re-expansion about zero cancels badly when
/// `(|m| / sigma)` and the order are both large; evaluate near `m` with care.
pub fn truncated_series(spec: &SeriesSpec) -> Result<MultiPoly, PolyError> {
    spec.validate()?;
    let order = spec.truncation_order;
    let x = MultiPoly::var(1, 0);
    let poly = match &spec.family {
        SeriesFamily::Exponential { rate } => {
            // lambda * sum (-lambda x)^k / k!
            let mut coeffs = Vec::with_capacity(order as usize + 1);
            let mut term = *rate;
            for k in 0..=order {
                if k > 0 {
                    term *= -rate / k as f64;
                }
                coeffs.push(term);
            }
            MultiPoly::univariate(&coeffs)
        }
        SeriesFamily::Gaussian { mean, sigma } => {
            let norm = 1.0 / (2.0 * std::f64::consts::PI * sigma * sigma).sqrt();
            let u_scale = -1.0 / (2.0 * sigma * sigma);
            let shifted = x.sub(&MultiPoly::constant(1, *mean))?;
            let shifted_sq = shifted.mul(&shifted)?;
            // Horner in u over the shifted square
            let mut acc = MultiPoly::zero(1);
            for k in (0..=order).rev() {
                let ck = norm * u_scale.powi(k as i32) / factorial(k);
                acc = acc.mul(&shifted_sq)?.add(&MultiPoly::constant(1, ck))?;
            }
            acc
        }
        SeriesFamily::ExplicitCoefficients { coefficients } => {
            let keep = coefficients.len().min(order as usize + 1);
            MultiPoly::univariate(&coefficients[..keep])
        }
        SeriesFamily::ShiftedPower { shift } => {
            let base = x.sub(&MultiPoly::constant(1, *shift))?;
            let mut acc = MultiPoly::zero(1);
            for _ in 0..=order {
                acc = acc.mul(&base)?.add(&MultiPoly::one(1))?;
            }
            acc
        }
    };
    Ok(poly)
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}
