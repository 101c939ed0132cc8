//! Normalization of densities over axis-aligned boxes.
//!
//! A density `f` is turned into a probability density by dividing by its
//! integral `omega` over a bounded box. The resulting [`ProbabilisticPair`]
//! remembers the box, `omega`, and the quadrature used to find it.

mod density;
mod gauss_legendre;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use density::{Density, DensityFn, FnDensity};
pub use gauss_legendre::gauss_legendre;

use crate::rng;

/// Monte Carlo samples used by default for non-polynomial densities above three dimensions.
pub const DEFAULT_MC_SAMPLES: usize = 1_000_000;
/// Gauss-Legendre nodes per axis for non-polynomial densities.
pub const DEFAULT_SMOOTH_NODES: usize = 64;
/// Tolerance on `|integral - 1|` used by [`validate_density`].
pub const DEFAULT_NORMALIZATION_TOLERANCE: f64 = 1e-6;
/// Relative slack on the nonnegativity check, scaled by the largest grid value.
const NONNEGATIVITY_SLACK: f64 = 1e-12;
/// `|omega|` below this fraction of `integral |f|` counts as a zero integral.
const ZERO_INTEGRAL_RATIO: f64 = 1e-12;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("invalid box: {0}")]
    InvalidBox(String),
    #[error("invalid quadrature: {0}")]
    InvalidQuadrature(String),
    #[error("dimension mismatch: density has {density} variables, box has {domain}")]
    Dimension { density: usize, domain: usize },
    #[error("integrand is not finite ({value}) at {point:?}")]
    NonFiniteIntegrand { point: Vec<f64>, value: f64 },
    #[error("integral is not finite ({0})")]
    NonFiniteResult(f64),
    #[error("density is not normalizable: integral is zero")]
    ZeroIntegral,
    #[error("density is not normalizable: integral is negative ({0})")]
    NegativeIntegral(f64),
}

/// Axis-aligned box `[lower_0, upper_0] x ... x [lower_n, upper_n]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BoxRecord", into = "BoxRecord")]
pub struct BoundingBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct BoxRecord {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl TryFrom<BoxRecord> for BoundingBox {
    type Error = MeasureError;
    fn try_from(r: BoxRecord) -> Result<Self, Self::Error> {
        BoundingBox::new(r.lower, r.upper)
    }
}

impl From<BoundingBox> for BoxRecord {
    fn from(b: BoundingBox) -> Self {
        BoxRecord {
            lower: b.lower,
            upper: b.upper,
        }
    }
}

impl BoundingBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, MeasureError> {
        if lower.len() != upper.len() {
            return Err(MeasureError::InvalidBox(format!(
                "{} lower bounds but {} upper bounds",
                lower.len(),
                upper.len()
            )));
        }
        if lower.is_empty() {
            return Err(MeasureError::InvalidBox("box has no axes".into()));
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(MeasureError::InvalidBox(format!(
                    "axis {i}: need finite lower < upper, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The cube `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self, MeasureError> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn volume(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| u - l)
            .product()
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| 0.5 * (l + u))
            .collect()
    }

    pub fn diagonal(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| (u - l) * (u - l))
            .sum::<f64>()
            .sqrt()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| *l <= *v && *v <= *u)
    }
}

/// Parses `lo1,hi1;lo2,hi2;...`.
impl FromStr for BoundingBox {
    type Err = MeasureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        for axis in s.split(';').map(str::trim).filter(|a| !a.is_empty()) {
            let parts: Vec<&str> = axis.split(',').map(str::trim).collect();
            if parts.len() != 2 {
                return Err(MeasureError::InvalidBox(format!(
                    "axis `{axis}` must be `lo,hi`"
                )));
            }
            let parse = |t: &str| {
                t.parse::<f64>()
                    .map_err(|e| MeasureError::InvalidBox(format!("bad bound `{t}`: {e}")))
            };
            lower.push(parse(parts[0])?);
            upper.push(parse(parts[1])?);
        }
        Self::new(lower, upper)
    }
}

impl fmt::Display for BoundingBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (l, u)) in self.lower.iter().zip(&self.upper).enumerate() {
            if i > 0 {
                write!(f, ";")?;
            }
            write!(f, "{l},{u}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum QuadratureSpec {
    GaussLegendreTensor { nodes_per_axis: usize },
    MonteCarlo { samples: usize, seed: u64 },
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<(), MeasureError> {
        match *self {
            QuadratureSpec::GaussLegendreTensor { nodes_per_axis: 0 } => Err(
                MeasureError::InvalidQuadrature("nodes_per_axis must be >= 1".into()),
            ),
            QuadratureSpec::MonteCarlo { samples: 0, .. } => Err(MeasureError::InvalidQuadrature(
                "sample_count must be >= 1".into(),
            )),
            _ => Ok(()),
        }
    }

    /// Tensor Gauss-Legendre with `ceil((d + 1) / 2) + 2` nodes per axis for
    /// polynomials of per-axis degree `d`. Other densities get
    /// [`DEFAULT_SMOOTH_NODES`] nodes per axis in up to three dimensions and
    /// Monte Carlo beyond.
    pub fn default_for(density: &DensityFn, seed: u64) -> Self {
        match density.polynomial_axis_degree() {
            Some(d) => QuadratureSpec::GaussLegendreTensor {
                nodes_per_axis: (d + 1).div_ceil(2) + 2,
            },
            None if density.nvars() <= 3 => QuadratureSpec::GaussLegendreTensor {
                nodes_per_axis: DEFAULT_SMOOTH_NODES,
            },
            None => QuadratureSpec::MonteCarlo {
                samples: DEFAULT_MC_SAMPLES,
                seed,
            },
        }
    }

    /// Parses `gl:<m>` or `mc:<N>`; the seed applies to Monte Carlo only.
    pub fn parse_with_seed(s: &str, seed: u64) -> Result<Self, MeasureError> {
        let bad =
            || MeasureError::InvalidQuadrature(format!("expected gl:<m> or mc:<N>, got `{s}`"));
        let (kind, count) = s.split_once(':').ok_or_else(bad)?;
        let count: usize = count.trim().parse().map_err(|_| bad())?;
        let spec = match kind.trim() {
            "gl" => QuadratureSpec::GaussLegendreTensor {
                nodes_per_axis: count,
            },
            "mc" => QuadratureSpec::MonteCarlo {
                samples: count,
                seed,
            },
            _ => return Err(bad()),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// A quadrature result. `std_error` is zero for the tensor rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    /// Same quadrature applied to `|f|`.
    pub abs_mass: f64,
}

/// Compensated (Neumaier) running sum.
#[derive(Default, Clone, Copy)]
struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(self) -> f64 {
        self.sum + self.comp
    }
}

pub fn integrate<D: Density + ?Sized>(
    f: &D,
    domain: &BoundingBox,
    spec: &QuadratureSpec,
) -> Result<f64, MeasureError> {
    integrate_estimate(f, domain, spec).map(|e| e.value)
}

/// Quadrature of `f` over `domain`, with a standard error for Monte Carlo.
pub fn integrate_estimate<D: Density + ?Sized>(
    f: &D,
    domain: &BoundingBox,
    spec: &QuadratureSpec,
) -> Result<Estimate, MeasureError> {
    spec.validate()?;
    if f.nvars() != domain.dim() {
        return Err(MeasureError::Dimension {
            density: f.nvars(),
            domain: domain.dim(),
        });
    }
    let est = match *spec {
        QuadratureSpec::GaussLegendreTensor { nodes_per_axis } => {
            gauss_legendre_tensor(f, domain, nodes_per_axis)?
        }
        QuadratureSpec::MonteCarlo { samples, seed } => monte_carlo(f, domain, samples, seed)?,
    };
    if !est.value.is_finite() {
        return Err(MeasureError::NonFiniteResult(est.value));
    }
    Ok(est)
}

fn check_finite(point: &[f64], value: f64) -> Result<f64, MeasureError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(MeasureError::NonFiniteIntegrand {
            point: point.to_vec(),
            value,
        })
    }
}

fn gauss_legendre_tensor<D: Density + ?Sized>(
    f: &D,
    domain: &BoundingBox,
    m: usize,
) -> Result<Estimate, MeasureError> {
    let (ref_nodes, ref_weights) = gauss_legendre(m);
    let dim = domain.dim();
    // map [-1, 1] onto each axis
    let axes: Vec<(Vec<f64>, Vec<f64>)> = (0..dim)
        .map(|a| {
            let half = 0.5 * (domain.upper[a] - domain.lower[a]);
            let mid = 0.5 * (domain.upper[a] + domain.lower[a]);
            let nodes = ref_nodes.iter().map(|t| mid + half * t).collect();
            let weights = ref_weights.iter().map(|w| w * half).collect();
            (nodes, weights)
        })
        .collect();

    let mut index = vec![0usize; dim];
    let mut point: Vec<f64> = axes.iter().map(|(n, _)| n[0]).collect();
    let mut total = KahanSum::default();
    let mut abs_total = KahanSum::default();
    loop {
        let w: f64 = index.iter().zip(&axes).map(|(&i, (_, ws))| ws[i]).product();
        let v = check_finite(&point, f.value_at(&point))?;
        total.add(w * v);
        abs_total.add(w * v.abs());

        // odometer, last axis fastest
        let mut axis = dim;
        loop {
            if axis == 0 {
                return Ok(Estimate {
                    value: total.total(),
                    std_error: 0.0,
                    abs_mass: abs_total.total(),
                });
            }
            axis -= 1;
            index[axis] += 1;
            if index[axis] < m {
                point[axis] = axes[axis].0[index[axis]];
                break;
            }
            index[axis] = 0;
            point[axis] = axes[axis].0[0];
        }
    }
}

fn monte_carlo<D: Density + ?Sized>(
    f: &D,
    domain: &BoundingBox,
    samples: usize,
    seed: u64,
) -> Result<Estimate, MeasureError> {
    let mut rng = rng::seeded(seed);
    let dim = domain.dim();
    let mut point = vec![0.0; dim];
    let mut sum = KahanSum::default();
    let mut sum_sq = KahanSum::default();
    let mut abs_sum = KahanSum::default();
    for _ in 0..samples {
        for (a, x) in point.iter_mut().enumerate() {
            *x = rng::uniform_in(&mut rng, domain.lower[a], domain.upper[a]);
        }
        let v = check_finite(&point, f.value_at(&point))?;
        sum.add(v);
        sum_sq.add(v * v);
        abs_sum.add(v.abs());
    }
    let n = samples as f64;
    let mean = sum.total() / n;
    let var = if samples > 1 {
        ((sum_sq.total() - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    let vol = domain.volume();
    Ok(Estimate {
        value: vol * mean,
        std_error: vol * (var / n).sqrt(),
        abs_mass: vol * abs_sum.total() / n,
    })
}

/// A density together with its box and normalization constant:
/// `normalizer * integral_box density = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilisticPair {
    pub density: DensityFn,
    #[serde(rename = "box")]
    pub domain: BoundingBox,
    pub omega: f64,
    pub normalizer: f64,
    pub quadrature: QuadratureSpec,
}

impl ProbabilisticPair {
    /// Builds a pair with a given `omega`, skipping integration. Useful for
    /// checking [`validate_density`] against deliberately wrong constants.
    pub fn with_omega(
        density: DensityFn,
        domain: BoundingBox,
        omega: f64,
        quadrature: QuadratureSpec,
    ) -> Result<Self, MeasureError> {
        check_omega(omega, omega.abs())?;
        if density.nvars() != domain.dim() {
            return Err(MeasureError::Dimension {
                density: density.nvars(),
                domain: domain.dim(),
            });
        }
        Ok(Self {
            density,
            domain,
            omega,
            normalizer: 1.0 / omega,
            quadrature,
        })
    }

    /// Value of the normalized density at `x`.
    pub fn normalized_at(&self, x: &[f64]) -> f64 {
        self.normalizer * self.density.value_at(x)
    }
}

impl Density for ProbabilisticPair {
    fn nvars(&self) -> usize {
        self.domain.dim()
    }

    fn value_at(&self, x: &[f64]) -> f64 {
        self.normalized_at(x)
    }
}

fn check_omega(omega: f64, abs_mass: f64) -> Result<(), MeasureError> {
    if !omega.is_finite() {
        return Err(MeasureError::NonFiniteResult(omega));
    }
    if omega == 0.0 || omega.abs() <= ZERO_INTEGRAL_RATIO * abs_mass {
        return Err(MeasureError::ZeroIntegral);
    }
    if omega < 0.0 {
        return Err(MeasureError::NegativeIntegral(omega));
    }
    Ok(())
}

/// Integrates `density` over `domain` and attaches `1 / omega`.
pub fn normalize(
    density: DensityFn,
    domain: BoundingBox,
    spec: QuadratureSpec,
) -> Result<ProbabilisticPair, MeasureError> {
    let est = integrate_estimate(&density, &domain, &spec)?;
    check_omega(est.value, est.abs_mass)?;
    Ok(ProbabilisticPair {
        density,
        domain,
        omega: est.value,
        normalizer: 1.0 / est.value,
        quadrature: spec,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityCheck {
    /// `f(x) >= 0` everywhere on the box.
    Nonnegativity,
    /// The normalized density integrates to one.
    Normalization,
}

impl fmt::Display for DensityCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DensityCheck::Nonnegativity => write!(f, "nonnegativity (f(x) >= 0)"),
            DensityCheck::Normalization => write!(f, "normalization (integral of f = 1)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// Smallest normalized density value seen on the grid.
    pub min_value: f64,
    pub argmin: Vec<f64>,
    /// Integral of the normalized density.
    pub integral: f64,
    pub tolerance: f64,
    pub failed: Vec<DensityCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failed.is_empty()
    }
}

/// Checks nonnegativity on a `grid_per_axis^n` tensor grid (box corners
/// included) and that the normalized density re-integrates to one within
/// [`DEFAULT_NORMALIZATION_TOLERANCE`].
pub fn validate_density(
    pair: &ProbabilisticPair,
    spec: &QuadratureSpec,
    grid_per_axis: usize,
) -> ValidationReport {
    validate_density_with_tolerance(pair, spec, grid_per_axis, DEFAULT_NORMALIZATION_TOLERANCE)
}

pub fn validate_density_with_tolerance(
    pair: &ProbabilisticPair,
    spec: &QuadratureSpec,
    grid_per_axis: usize,
    tolerance: f64,
) -> ValidationReport {
    let grid = grid_per_axis.max(2);
    let dim = pair.domain.dim();
    let mut failed = Vec::new();

    let mut min_value = f64::INFINITY;
    let mut max_abs: f64 = 0.0;
    let mut argmin = pair.domain.lower.clone();
    let mut index = vec![0usize; dim];
    let mut point = vec![0.0; dim];
    let mut non_finite = false;
    'grid: loop {
        for a in 0..dim {
            let t = index[a] as f64 / (grid - 1) as f64;
            point[a] = pair.domain.lower[a] + t * (pair.domain.upper[a] - pair.domain.lower[a]);
        }
        let v = pair.normalized_at(&point);
        if !v.is_finite() {
            non_finite = true;
        }
        if v < min_value || v.is_nan() {
            min_value = v;
            argmin.clone_from(&point);
        }
        max_abs = max_abs.max(v.abs());
        let mut axis = dim;
        loop {
            if axis == 0 {
                break 'grid;
            }
            axis -= 1;
            index[axis] += 1;
            if index[axis] < grid {
                break;
            }
            index[axis] = 0;
        }
    }
    if non_finite || min_value < -NONNEGATIVITY_SLACK * max_abs {
        failed.push(DensityCheck::Nonnegativity);
    }

    let integral = integrate(pair, &pair.domain, spec).unwrap_or(f64::NAN);
    if !((integral - 1.0).abs() <= tolerance) {
        failed.push(DensityCheck::Normalization);
    }
    ValidationReport {
        min_value,
        argmin,
        integral,
        tolerance,
        failed,
    }
}
