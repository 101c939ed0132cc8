//! Implicit algebraic varieties and samplers for point clouds on them.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cloud::{PointCloud, Provenance};
use crate::measure::{BoundingBox, DensityFn};
use crate::poly::MultiPoly;
use crate::rng::{self, SampleRng};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum VarietyError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("sample count must be >= 1")]
    EmptySample,
    #[error(
        "sampling budget exhausted: {accepted} of {requested} points accepted after {proposals} proposals (acceptance rate {rate:.3e})"
    )]
    SamplingBudget {
        requested: usize,
        accepted: usize,
        proposals: usize,
        rate: f64,
    },
}

/// The three varieties drawn in the reference figures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum BuiltinVariety {
    /// `(x^2 + y^2 + z^2 + R^2 - r^2)^2 - 4 R^2 (x^2 + y^2)`.
    Torus { major: f64, minor: f64 },
    /// `x^3 - x - y^2`.
    Elliptic,
    /// `x^2 + y^2 + z^2 - r^2`.
    Sphere { radius: f64 },
}

impl BuiltinVariety {
    pub fn validate(&self) -> Result<(), VarietyError> {
        match *self {
            BuiltinVariety::Torus { major, minor } => {
                if !(minor.is_finite() && major.is_finite() && minor > 0.0 && major > minor) {
                    return Err(VarietyError::InvalidParameter(format!(
                        "torus needs R > r > 0, got R = {major}, r = {minor}"
                    )));
                }
            }
            BuiltinVariety::Sphere { radius } => {
                if !(radius.is_finite() && radius > 0.0) {
                    return Err(VarietyError::InvalidParameter(format!(
                        "sphere needs r > 0, got r = {radius}"
                    )));
                }
            }
            BuiltinVariety::Elliptic => {}
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            BuiltinVariety::Torus { .. } => "torus",
            BuiltinVariety::Elliptic => "elliptic",
            BuiltinVariety::Sphere { .. } => "sphere",
        }
    }

    pub fn parameters(&self) -> BTreeMap<String, f64> {
        match *self {
            BuiltinVariety::Torus { major, minor } => {
                BTreeMap::from([("R".to_string(), major), ("r".to_string(), minor)])
            }
            BuiltinVariety::Sphere { radius } => BTreeMap::from([("r".to_string(), radius)]),
            BuiltinVariety::Elliptic => BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            BuiltinVariety::Elliptic => 2,
            _ => 3,
        }
    }
}

impl fmt::Display for BuiltinVariety {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            BuiltinVariety::Torus { major, minor } => write!(f, "torus(R={major}, r={minor})"),
            BuiltinVariety::Elliptic => write!(f, "elliptic"),
            BuiltinVariety::Sphere { radius } => write!(f, "sphere(r={radius})"),
        }
    }
}

/// Zero set of a nonzero polynomial, restricted to a box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImplicitVariety {
    pub name: String,
    pub poly: MultiPoly,
    pub bounding_box: BoundingBox,
}

impl ImplicitVariety {
    pub fn new(
        name: impl Into<String>,
        poly: MultiPoly,
        bounding_box: BoundingBox,
    ) -> Result<Self, VarietyError> {
        if poly.is_zero() {
            return Err(VarietyError::InvalidParameter(
                "defining polynomial is zero".into(),
            ));
        }
        if bounding_box.dim() != poly.nvars() {
            return Err(VarietyError::InvalidParameter(format!(
                "box has {} axes but polynomial has {} variables",
                bounding_box.dim(),
                poly.nvars()
            )));
        }
        Ok(Self {
            name: name.into(),
            poly,
            bounding_box,
        })
    }

    /// `|f(p)|`.
    pub fn residual(&self, p: &[f64]) -> f64 {
        self.poly.eval_unchecked(p).abs()
    }
}

fn sum_of_squares(nvars: usize, count: usize) -> MultiPoly {
    (0..count).fold(MultiPoly::zero(nvars), |acc, i| {
        let v = MultiPoly::var(nvars, i);
        acc.add(&v.mul(&v).expect("same nvars"))
            .expect("same nvars")
    })
}

/// Defining polynomial and default bounding box of a built-in variety.
pub fn builtin_variety(which: BuiltinVariety) -> Result<ImplicitVariety, VarietyError> {
    which.validate()?;
    let (poly, bbox) = match which {
        BuiltinVariety::Torus { major, minor } => {
            let r2 = sum_of_squares(3, 3);
            let inner = r2
                .add(&MultiPoly::constant(3, major * major - minor * minor))
                .expect("same nvars");
            let planar = sum_of_squares(3, 2).scale(4.0 * major * major);
            let poly = inner.pow(2).sub(&planar).expect("same nvars");
            let h = major + minor + 0.5;
            (poly, BoundingBox::cube(3, -h, h))
        }
        BuiltinVariety::Sphere { radius } => {
            let poly = sum_of_squares(3, 3)
                .sub(&MultiPoly::constant(3, radius * radius))
                .expect("same nvars");
            let h = radius + 0.5;
            (poly, BoundingBox::cube(3, -h, h))
        }
        BuiltinVariety::Elliptic => {
            let poly = MultiPoly::from_terms(
                2,
                [(1.0, vec![3, 0]), (-1.0, vec![1, 0]), (-1.0, vec![0, 2])],
            )
            .expect("two exponents");
            (poly, BoundingBox::new(vec![-1.5, -2.5], vec![2.0, 2.5]))
        }
    };
    let bbox = bbox.map_err(|e| VarietyError::InvalidParameter(e.to_string()))?;
    ImplicitVariety::new(which.name(), poly, bbox)
}

/// Points exactly on a built-in variety.
///
/// * torus: `phi` uniform, `theta` by rejection against the area element
///   `(R + r cos theta) / (R + r)`, which gives the uniform surface measure;
/// * sphere: normalized 3-d standard normal draws scaled by `r`;
/// * elliptic: `x` uniform on `[-1, 0] ∪ [1, x_max]` (length-weighted, with
///   `x_max` the box's upper x bound), `y = ±sqrt(x^3 - x)` with a fair sign.
pub fn sample_parametric(
    which: BuiltinVariety,
    n: usize,
    seed: u64,
) -> Result<PointCloud, VarietyError> {
    which.validate()?;
    if n == 0 {
        return Err(VarietyError::EmptySample);
    }
    let mut rng = rng::seeded(seed);
    let mut cloud = PointCloud::new(which.dim()).expect("dim >= 2");
    match which {
        BuiltinVariety::Torus { major, minor } => {
            for _ in 0..n {
                let theta = loop {
                    let t = TAU * rng::uniform(&mut rng);
                    let accept = (major + minor * t.cos()) / (major + minor);
                    if rng::uniform(&mut rng) < accept {
                        break t;
                    }
                };
                let phi = TAU * rng::uniform(&mut rng);
                let ring = major + minor * theta.cos();
                cloud.push(&[ring * phi.cos(), ring * phi.sin(), minor * theta.sin()]);
            }
        }
        BuiltinVariety::Sphere { radius } => {
            let mut g = [0.0; 3];
            for _ in 0..n {
                let norm = loop {
                    rng::fill_normal(&mut rng, &mut g);
                    let norm = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
                    if norm > 0.0 {
                        break norm;
                    }
                };
                cloud.push(&[
                    radius * g[0] / norm,
                    radius * g[1] / norm,
                    radius * g[2] / norm,
                ]);
            }
        }
        BuiltinVariety::Elliptic => {
            let x_max = builtin_variety(which)?.bounding_box.upper()[0];
            let oval = 1.0;
            let branch = (x_max - 1.0).max(0.0);
            for _ in 0..n {
                let u = (oval + branch) * rng::uniform(&mut rng);
                let x = if u < oval { -1.0 + u } else { 1.0 + (u - oval) };
                // x (x^2 - 1) is >= 0 on both branches, also after rounding
                let y = (x * (x * x - 1.0)).max(0.0).sqrt();
                let y = if rng::uniform(&mut rng) < 0.5 { y } else { -y };
                cloud.push(&[x, y]);
            }
        }
    }
    Ok(cloud.with_provenance(Provenance {
        source: which.name().to_string(),
        sampler: "parametric".to_string(),
        seed: Some(seed),
        parameters: which.parameters(),
    }))
}

/// The density `exp(-f(x)^2 / (2 sigma^2))` on the variety's box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThickenedDensity {
    pub variety: ImplicitVariety,
    pub sigma: f64,
}

impl ThickenedDensity {
    pub fn new(variety: ImplicitVariety, sigma: f64) -> Result<Self, VarietyError> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(VarietyError::InvalidParameter(format!(
                "sigma must be > 0, got {sigma}"
            )));
        }
        Ok(Self { variety, sigma })
    }

    /// `sigma = 0.05 * diagonal(box)`.
    pub fn with_default_sigma(variety: ImplicitVariety) -> Self {
        let sigma = default_sigma(&variety);
        Self { variety, sigma }
    }

    /// Acceptance probability at `x`, in `(0, 1]`.
    pub fn acceptance(&self, x: &[f64]) -> f64 {
        let f = self.variety.poly.eval_unchecked(x);
        (-f * f / (2.0 * self.sigma * self.sigma)).exp()
    }

    pub fn density_fn(&self) -> DensityFn {
        DensityFn::Thickened {
            poly: self.variety.poly.clone(),
            sigma: self.sigma,
        }
    }
}

pub fn default_sigma(variety: &ImplicitVariety) -> f64 {
    0.05 * variety.bounding_box.diagonal()
}

/// Default proposal cap for [`sample_thickened`].
pub fn default_proposal_cap(n: usize) -> usize {
    n.saturating_mul(1000)
}

/// Rejection sampling of the thickened density: uniform proposals in the
/// box, each accepted with probability `exp(-f^2 / (2 sigma^2))`.
pub fn sample_thickened(
    td: &ThickenedDensity,
    n: usize,
    seed: u64,
    proposal_cap: usize,
) -> Result<PointCloud, VarietyError> {
    if n == 0 {
        return Err(VarietyError::EmptySample);
    }
    let bbox = &td.variety.bounding_box;
    let dim = bbox.dim();
    let mut rng: SampleRng = rng::seeded(seed);
    let mut cloud = PointCloud::new(dim).expect("dim >= 1");
    let mut proposal = vec![0.0; dim];
    let mut proposals = 0usize;
    while cloud.len() < n {
        if proposals >= proposal_cap {
            return Err(VarietyError::SamplingBudget {
                requested: n,
                accepted: cloud.len(),
                proposals,
                rate: if proposals == 0 {
                    0.0
                } else {
                    cloud.len() as f64 / proposals as f64
                },
            });
        }
        proposals += 1;
        for (a, x) in proposal.iter_mut().enumerate() {
            *x = rng::uniform_in(&mut rng, bbox.lower()[a], bbox.upper()[a]);
        }
        if rng::uniform(&mut rng) < td.acceptance(&proposal) {
            cloud.push(&proposal);
        }
    }
    let mut parameters = BTreeMap::new();
    parameters.insert("sigma".to_string(), td.sigma);
    parameters.insert("proposals".to_string(), proposals as f64);
    Ok(cloud.with_provenance(Provenance {
        source: td.variety.name.clone(),
        sampler: "thickened".to_string(),
        seed: Some(seed),
        parameters,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

    const TORUS: BuiltinVariety = BuiltinVariety::Torus {
        major: 2.0,
        minor: 0.5,
    };
    const SPHERE: BuiltinVariety = BuiltinVariety::Sphere { radius: 1.0 };

    #[test]
    fn builtin_polynomials_vanish_on_known_points() {
        let s = builtin_variety(SPHERE).unwrap();
        assert_eq!(s.poly.evaluate(&[0.0, 0.0, 1.0]).unwrap(), 0.0);
        let t = builtin_variety(BuiltinVariety::Torus {
            major: 2.0,
            minor: 1.0,
        })
        .unwrap();
        assert_eq!(t.poly.evaluate(&[3.0, 0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(t.poly.evaluate(&[1.0, 0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(t.poly.evaluate(&[0.0, 2.0, 1.0]).unwrap(), 0.0);
        assert_eq!(t.poly.total_degree(), 4);
        let e = builtin_variety(BuiltinVariety::Elliptic).unwrap();
        for x in [-1.0, 0.0, 1.0] {
            assert_eq!(e.poly.evaluate(&[x, 0.0]).unwrap(), 0.0);
        }
    }

    #[test]
    fn torus_polynomial_matches_closed_form() {
        let t = builtin_variety(TORUS).unwrap();
        for p in [[0.3, -1.2, 0.7], [2.0, 2.0, -0.1], [-0.5, 0.0, 0.0]] {
            let s = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
            let expect = (s + 4.0 - 0.25f64).powi(2) - 16.0 * (p[0] * p[0] + p[1] * p[1]);
            assert!((t.poly.evaluate(&p).unwrap() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn default_boxes() {
        let t = builtin_variety(TORUS).unwrap();
        assert_eq!(t.bounding_box.lower(), &[-3.0, -3.0, -3.0]);
        let s = builtin_variety(BuiltinVariety::Sphere { radius: 2.0 }).unwrap();
        assert_eq!(s.bounding_box.upper(), &[2.5, 2.5, 2.5]);
        let e = builtin_variety(BuiltinVariety::Elliptic).unwrap();
        assert_eq!(e.bounding_box.lower(), &[-1.5, -2.5]);
        assert_eq!(e.bounding_box.upper(), &[2.0, 2.5]);
    }

    #[test]
    fn invalid_radii() {
        for bad in [
            BuiltinVariety::Torus {
                major: 0.5,
                minor: 2.0,
            },
            BuiltinVariety::Torus {
                major: 1.0,
                minor: 1.0,
            },
            BuiltinVariety::Torus {
                major: 1.0,
                minor: 0.0,
            },
            BuiltinVariety::Sphere { radius: 0.0 },
            BuiltinVariety::Sphere { radius: f64::NAN },
        ] {
            assert!(matches!(
                builtin_variety(bad),
                Err(VarietyError::InvalidParameter(_))
            ));
            assert!(sample_parametric(bad, 10, 0).is_err());
        }
        let msg = builtin_variety(BuiltinVariety::Torus {
            major: 0.5,
            minor: 2.0,
        })
        .unwrap_err()
        .to_string();
        assert!(msg.contains("R > r"));
    }

    #[test]
    fn parametric_samples_lie_on_variety() {
        for which in [
            TORUS,
            SPHERE,
            BuiltinVariety::Elliptic,
            BuiltinVariety::Sphere { radius: 2.0 },
        ] {
            let v = builtin_variety(which).unwrap();
            let cloud = sample_parametric(which, 1000, 3).unwrap();
            assert_eq!(cloud.len(), 1000);
            let worst = cloud.points().map(|p| v.residual(p)).fold(0.0, f64::max);
            assert!(worst < 1e-9, "{which}: {worst}");
            assert!(cloud.points().all(|p| v.bounding_box.contains(p)));
        }
        let cloud = sample_parametric(BuiltinVariety::Sphere { radius: 2.0 }, 1000, 5).unwrap();
        for p in cloud.points() {
            let norm = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            assert!((norm - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn elliptic_uses_both_components() {
        let cloud = sample_parametric(BuiltinVariety::Elliptic, 2000, 1).unwrap();
        let oval = cloud.points().filter(|p| p[0] <= 0.0).count();
        // oval gets length 1 of 2 in x
        assert!((800..1200).contains(&oval), "{oval}");
        assert!(cloud.points().all(|p| p[0] <= 0.0 || p[0] >= 1.0));
    }

    #[test]
    fn sphere_mean_concentrates() {
        let cloud = sample_parametric(SPHERE, 100_000, 11).unwrap();
        let n = cloud.len() as f64;
        for axis in 0..3 {
            let mean = cloud.points().map(|p| p[axis]).sum::<f64>() / n;
            assert!(mean.abs() < 0.02);
        }
    }

    #[test]
    fn torus_angle_density_is_area_weighted() {
        // outer half (cos theta > 0) carries (pi R + 2 r) / (2 pi R) of the area
        let cloud = sample_parametric(TORUS, 50_000, 2).unwrap();
        let outer = cloud
            .points()
            .filter(|p| (p[0] * p[0] + p[1] * p[1]).sqrt() > 2.0)
            .count() as f64
            / cloud.len() as f64;
        let expect = (std::f64::consts::PI * 2.0 + 1.0) / (2.0 * std::f64::consts::PI * 2.0);
        assert!((outer - expect).abs() < 0.01, "{outer} vs {expect}");
    }

    #[test]
    fn samplers_are_deterministic() {
        let a = sample_parametric(TORUS, 300, 42).unwrap();
        let b = sample_parametric(TORUS, 300, 42).unwrap();
        assert_eq!(a, b);
        let td = ThickenedDensity::new(builtin_variety(BuiltinVariety::Elliptic).unwrap(), 0.05)
            .unwrap();
        let a = sample_thickened(&td, 500, 9, default_proposal_cap(500)).unwrap();
        let b = sample_thickened(&td, 500, 9, default_proposal_cap(500)).unwrap();
        for (p, q) in a.points().zip(b.points()) {
            assert_eq!(p[0].to_bits(), q[0].to_bits());
            assert_eq!(p[1].to_bits(), q[1].to_bits());
        }
    }

    #[test]
    fn thickened_sphere_stays_near_surface() {
        let td = ThickenedDensity::new(builtin_variety(SPHERE).unwrap(), 0.05).unwrap();
        let cloud = sample_thickened(&td, 500, 4, default_proposal_cap(500)).unwrap();
        assert_eq!(cloud.len(), 500);
        for p in cloud.points() {
            let norm = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            assert!((norm - 1.0).abs() < 0.25, "{norm}");
            assert!(td.variety.bounding_box.contains(p));
        }
    }

    #[test]
    fn huge_sigma_is_uniform() {
        let td = ThickenedDensity::new(builtin_variety(TORUS).unwrap(), 1e6).unwrap();
        let n = 20_000;
        let cloud = sample_thickened(&td, n, 8, n + 10).unwrap();
        // box side 6, uniform sd = 6 / sqrt(12)
        let bound = 4.0 * (6.0 / 12f64.sqrt()) / (n as f64).sqrt();
        for axis in 0..3 {
            let mean = cloud.points().map(|p| p[axis]).sum::<f64>() / n as f64;
            assert!(mean.abs() < bound);
        }
        assert!(cloud.provenance.parameters["proposals"] < (n + 10) as f64);
    }

    #[test]
    fn budget_exhaustion_reports_rate() {
        let td = ThickenedDensity::new(builtin_variety(TORUS).unwrap(), 1e-6).unwrap();
        match sample_thickened(&td, 100, 0, 5000) {
            Err(VarietyError::SamplingBudget {
                proposals,
                rate,
                accepted,
                ..
            }) => {
                assert_eq!(proposals, 5000);
                assert!(accepted < 100);
                assert!(rate < 0.02);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
        assert!(ThickenedDensity::new(builtin_variety(TORUS).unwrap(), 0.0).is_err());
    }

    #[test]
    fn default_sigma_is_five_percent_of_diagonal() {
        let v = builtin_variety(SPHERE).unwrap();
        let td = ThickenedDensity::with_default_sigma(v);
        assert!((td.sigma - 0.05 * 3.0 * 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn thickened_line_matches_truncated_normal() {
        // f(x) = x on [-1, 1]: accepted density is N(0, sigma) truncated to the box
        let sigma = 0.4;
        let line = ImplicitVariety::new(
            "line",
            MultiPoly::var(1, 0),
            BoundingBox::new(vec![-1.0], vec![1.0]).unwrap(),
        )
        .unwrap();
        let td = ThickenedDensity::new(line, sigma).unwrap();
        let n = 10_000;
        let cloud = sample_thickened(&td, n, 2024, default_proposal_cap(n)).unwrap();

        let normal = Normal::new(0.0, sigma).unwrap();
        let mass = normal.cdf(1.0) - normal.cdf(-1.0);
        let bins = 20;
        let mut counts = vec![0usize; bins];
        for p in cloud.points() {
            let b = (((p[0] + 1.0) / 2.0) * bins as f64).floor() as usize;
            counts[b.min(bins - 1)] += 1;
        }
        let mut chi2 = 0.0;
        for (b, &c) in counts.iter().enumerate() {
            let lo = -1.0 + 2.0 * b as f64 / bins as f64;
            let hi = lo + 2.0 / bins as f64;
            let expected = n as f64 * (normal.cdf(hi) - normal.cdf(lo)) / mass;
            chi2 += (c as f64 - expected).powi(2) / expected;
        }
        let critical = ChiSquared::new((bins - 1) as f64)
            .unwrap()
            .inverse_cdf(0.99);
        assert!(chi2 < critical, "chi2 {chi2} >= {critical}");
    }
}
