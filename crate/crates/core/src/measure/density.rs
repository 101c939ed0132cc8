use serde::{Deserialize, Serialize};

use crate::poly::MultiPoly;

/// A real-valued function on `R^n` that can be integrated.
///
/// Implementations must be pure: the quadrature routines may evaluate nodes
/// in any order.
pub trait Density: Sync {
    fn nvars(&self) -> usize;

    /// Value at `x`; `x.len() == self.nvars()`.
    fn value_at(&self, x: &[f64]) -> f64;
}

impl Density for MultiPoly {
    fn nvars(&self) -> usize {
        MultiPoly::nvars(self)
    }

    fn value_at(&self, x: &[f64]) -> f64 {
        self.eval_unchecked(x)
    }
}

impl<D: Density + ?Sized> Density for &D {
    fn nvars(&self) -> usize {
        (**self).nvars()
    }

    fn value_at(&self, x: &[f64]) -> f64 {
        (**self).value_at(x)
    }
}

/// Closure-backed density.
pub struct FnDensity<F> {
    nvars: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> f64 + Sync> FnDensity<F> {
    pub fn new(nvars: usize, f: F) -> Self {
        Self { nvars, f }
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> Density for FnDensity<F> {
    fn nvars(&self) -> usize {
        self.nvars
    }

    fn value_at(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

/// Densities that can be written to and read back from disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DensityFn {
    Polynomial {
        poly: MultiPoly,
    },
    Constant {
        nvars: usize,
        value: f64,
    },
    /// `rate * exp(-rate * x)`, one variable.
    Exponential {
        rate: f64,
    },
    /// Univariate normal density.
    Gaussian {
        mean: f64,
        sigma: f64,
    },
    /// `exp(-f(x)^2 / (2 sigma^2))` around the zero set of `poly`.
    Thickened {
        poly: MultiPoly,
        sigma: f64,
    },
}

impl Density for DensityFn {
    fn nvars(&self) -> usize {
        match self {
            DensityFn::Polynomial { poly } | DensityFn::Thickened { poly, .. } => poly.nvars(),
            DensityFn::Constant { nvars, .. } => *nvars,
            DensityFn::Exponential { .. } | DensityFn::Gaussian { .. } => 1,
        }
    }

    fn value_at(&self, x: &[f64]) -> f64 {
        match self {
            DensityFn::Polynomial { poly } => poly.eval_unchecked(x),
            DensityFn::Constant { value, .. } => *value,
            DensityFn::Exponential { rate } => rate * (-rate * x[0]).exp(),
            DensityFn::Gaussian { mean, sigma } => {
                let z = (x[0] - mean) / sigma;
                (-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
            }
            DensityFn::Thickened { poly, sigma } => {
                let f = poly.eval_unchecked(x);
                (-f * f / (2.0 * sigma * sigma)).exp()
            }
        }
    }
}

impl DensityFn {
    /// Highest per-variable degree if the density is a polynomial.
    pub fn polynomial_axis_degree(&self) -> Option<usize> {
        match self {
            DensityFn::Polynomial { poly } => Some(poly.max_axis_degree().max(0) as usize),
            DensityFn::Constant { .. } => Some(0),
            _ => None,
        }
    }
}
