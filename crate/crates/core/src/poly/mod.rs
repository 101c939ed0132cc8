//! Sparse multivariate polynomials with real coefficients.
//!
//! A [`MultiPoly`] stores one coefficient per exponent vector. Zero
//! coefficients are never stored, so the empty term map is the zero
//! polynomial.

mod bernstein;
mod series;
mod text;

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

pub use bernstein::{bernstein_approx, BernsteinPoly};
pub use series::{truncated_series, SeriesFamily, SeriesSpec};
pub use text::ParsePolyError;

/// Exponent vector of a single monomial, one entry per variable.
pub type Exponents = Vec<u32>;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("dimension mismatch: expected {expected} variables, got {found}")]
    Dimension { expected: usize, found: usize },
    #[error("invalid series parameter: {0}")]
    InvalidSeries(String),
    #[error("bernstein approximation needs at least one variable and degree >= 1")]
    InvalidBernstein,
    #[error("function value at node {node:?} is not finite ({value})")]
    NonFiniteNode { node: Vec<f64>, value: f64 },
}

#[derive(Clone, PartialEq, Default)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Exponents, f64>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, 1.0)
    }

    /// The coordinate function `x_index`.
    pub fn var(nvars: usize, index: usize) -> Self {
        assert!(
            index < nvars,
            "variable index {index} out of range for {nvars} variables"
        );
        let mut e = vec![0; nvars];
        e[index] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, 1.0);
        p
    }

    /// Builds a polynomial from `(coefficient, exponents)` pairs. Repeated
    /// exponent vectors are summed.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (f64, Exponents)>,
    {
        let mut p = Self::zero(nvars);
        for (c, e) in terms {
            if e.len() != nvars {
                return Err(PolyError::Dimension {
                    expected: nvars,
                    found: e.len(),
                });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    /// Univariate polynomial from ascending coefficients `c0 + c1 x + ...`.
    pub fn univariate(coeffs: &[f64]) -> Self {
        let mut p = Self::zero(1);
        for (k, &c) in coeffs.iter().enumerate() {
            p.add_term(vec![k as u32], c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending lexicographic exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, f64)> + '_ {
        self.terms.iter().map(|(e, &c)| (e, c))
    }

    pub fn coeff(&self, exponents: &[u32]) -> f64 {
        self.terms.get(exponents).copied().unwrap_or(0.0)
    }

    /// Maximum total degree over all terms, `-1` for the zero polynomial.
    pub fn total_degree(&self) -> i64 {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&k| k as i64).sum::<i64>())
            .max()
            .unwrap_or(-1)
    }

    /// Largest exponent of any single variable, `-1` for the zero polynomial.
    pub fn max_axis_degree(&self) -> i64 {
        self.terms
            .keys()
            .flat_map(|e| e.iter().map(|&k| k as i64))
            .max()
            .unwrap_or(-1)
    }

    fn add_term(&mut self, e: Exponents, c: f64) {
        if c == 0.0 {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == 0.0 {
                    o.remove();
                }
            }
        }
    }

    /// Drops every exactly-zero coefficient. Results of the public
    /// operations are already canonical, so this is a no-op on them.
    pub fn canonicalize(&mut self) {
        self.terms.retain(|_, c| *c != 0.0);
    }

    pub fn is_canonical(&self) -> bool {
        self.terms.values().all(|&c| c != 0.0) && self.terms.keys().all(|e| e.len() == self.nvars)
    }

    fn check_same(&self, other: &Self) -> Result<(), PolyError> {
        if self.nvars != other.nvars {
            return Err(PolyError::Dimension {
                expected: self.nvars,
                found: other.nvars,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_same(other)?;
        let mut acc: BTreeMap<Exponents, f64> = BTreeMap::new();
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &other.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                *acc.entry(e).or_insert(0.0) += ca * cb;
            }
        }
        acc.retain(|_, c| *c != 0.0);
        Ok(Self {
            nvars: self.nvars,
            terms: acc,
        })
    }

    pub fn scale(&self, a: f64) -> Self {
        let mut terms = BTreeMap::new();
        for (e, &c) in &self.terms {
            let v = a * c;
            if v != 0.0 {
                terms.insert(e.clone(), v);
            }
        }
        Self {
            nvars: self.nvars,
            terms,
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::one(self.nvars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base).expect("same nvars");
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base).expect("same nvars");
            }
        }
        result
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64, PolyError> {
        if x.len() != self.nvars {
            return Err(PolyError::Dimension {
                expected: self.nvars,
                found: x.len(),
            });
        }
        Ok(self.eval_unchecked(x))
    }

    /// Evaluation without the length check; panics on short input.
    pub fn eval_unchecked(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, &c)| {
                e.iter()
                    .zip(x)
                    .fold(c, |acc, (&k, &xi)| acc * powi_by_squaring(xi, k))
            })
            .sum()
    }

    /// Partial derivative with respect to variable `index`.
    pub fn derivative(&self, index: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, &c) in &self.terms {
            if e[index] > 0 {
                let mut d = e.clone();
                d[index] -= 1;
                out.add_term(d, c * e[index] as f64);
            }
        }
        out
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, PolyError> {
        (0..self.nvars)
            .map(|i| self.derivative(i).evaluate(x))
            .collect()
    }
}

/// `x^k` by repeated squaring.
pub fn powi_by_squaring(x: f64, k: u32) -> f64 {
    let mut result = 1.0;
    let mut base = x;
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            result *= base;
        }
        k >>= 1;
        if k > 0 {
            base *= base;
        }
    }
    result
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly[{}]({})", self.nvars, self)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = ["x", "y", "z", "w"];
        let mut first = true;
        // highest degree first reads more naturally
        for (e, &c) in self.terms.iter().rev() {
            if !first {
                write!(f, " {} ", if c < 0.0 { '-' } else { '+' })?;
            } else if c < 0.0 {
                write!(f, "-")?;
            }
            first = false;
            let mag = c.abs();
            let is_const = e.iter().all(|&k| k == 0);
            if is_const || mag != 1.0 {
                write!(f, "{mag}")?;
            }
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if self.nvars <= names.len() {
                    write!(f, "{}", names[i])?;
                } else {
                    write!(f, "x{}", i + 1)?;
                }
                if k > 1 {
                    write!(f, "^{k}")?;
                }
            }
        }
        Ok(())
    }
}
