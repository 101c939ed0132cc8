//! Tensor-product Bernstein approximation on the unit cube.
//!
//! `B_N[f](x) = sum_i f(i / N) prod_j C(N, i_j) x_j^{i_j} (1 - x_j)^{N - i_j}`
//!
//! The approximant is kept in Bernstein form, which evaluates stably for
//! large `N`. Conversion to the monomial basis goes through forward
//! differences, `B_N[f](x) = sum_p prod_j C(N, p_j) * (Delta^p f)(0) * x^p`, and
//! loses accuracy quickly once `N` exceeds a few dozen.

use super::{MultiPoly, PolyError};

#[derive(Debug, Clone, PartialEq)]
pub struct BernsteinPoly {
    nvars: usize,
    degree: usize,
    /// `f` at grid nodes, row-major with the last axis fastest.
    node_values: Vec<f64>,
}

/// Samples `f` on the tensor grid `{0, 1/N, ..., 1}^n` and returns `B_N[f]`.
pub fn bernstein_approx<F>(f: F, nvars: usize, degree: usize) -> Result<BernsteinPoly, PolyError>
where
    F: Fn(&[f64]) -> f64,
{
    if nvars == 0 || degree == 0 {
        return Err(PolyError::InvalidBernstein);
    }
    let side = degree + 1;
    let count = side
        .checked_pow(nvars as u32)
        .ok_or(PolyError::InvalidBernstein)?;
    let mut node_values = Vec::with_capacity(count);
    let mut node = vec![0.0; nvars];
    for flat in 0..count {
        let mut rem = flat;
        for axis in (0..nvars).rev() {
            node[axis] = (rem % side) as f64 / degree as f64;
            rem /= side;
        }
        let v = f(&node);
        if !v.is_finite() {
            return Err(PolyError::NonFiniteNode {
                node: node.clone(),
                value: v,
            });
        }
        node_values.push(v);
    }
    Ok(BernsteinPoly {
        nvars,
        degree,
        node_values,
    })
}

impl BernsteinPoly {
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn node_values(&self) -> &[f64] {
        &self.node_values
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64, PolyError> {
        if x.len() != self.nvars {
            return Err(PolyError::Dimension {
                expected: self.nvars,
                found: x.len(),
            });
        }
        // contract one axis at a time, last axis first
        let side = self.degree + 1;
        let mut values = self.node_values.clone();
        for axis in (0..self.nvars).rev() {
            let basis = basis_values(self.degree, x[axis]);
            let outer = values.len() / side;
            values = (0..outer)
                .map(|o| {
                    values[o * side..(o + 1) * side]
                        .iter()
                        .zip(&basis)
                        .map(|(v, b)| v * b)
                        .sum()
                })
                .collect();
        }
        Ok(values[0])
    }

    /// Monomial-basis expansion via forward differences.
    pub fn to_multipoly(&self) -> MultiPoly {
        let side = self.degree + 1;
        let mut diffs = self.node_values.clone();
        // forward-difference table along each axis: slot i holds Delta^i
        let stride_of = |axis: usize| side.pow((self.nvars - 1 - axis) as u32);
        for axis in 0..self.nvars {
            let stride = stride_of(axis);
            let block = stride * side;
            for start in (0..diffs.len()).step_by(block) {
                for offset in 0..stride {
                    let base = start + offset;
                    let mut fiber: Vec<f64> = (0..side).map(|i| diffs[base + i * stride]).collect();
                    for order in 1..side {
                        for i in (order..side).rev() {
                            fiber[i] -= fiber[i - 1];
                        }
                    }
                    for (i, v) in fiber.into_iter().enumerate() {
                        diffs[base + i * stride] = v;
                    }
                }
            }
        }
        let binom = binomial_row(self.degree);
        let mut terms = Vec::with_capacity(diffs.len());
        for (flat, &d) in diffs.iter().enumerate() {
            let mut rem = flat;
            let mut e = vec![0u32; self.nvars];
            let mut c = d;
            for axis in (0..self.nvars).rev() {
                let p = rem % side;
                rem /= side;
                e[axis] = p as u32;
                c *= binom[p];
            }
            terms.push((c, e));
        }
        MultiPoly::from_terms(self.nvars, terms).expect("exponent length matches")
    }
}

/// All `N + 1` Bernstein basis values at `t`, by the triangular recurrence.
fn basis_values(degree: usize, t: f64) -> Vec<f64> {
    let mut b = vec![0.0; degree + 1];
    b[0] = 1.0;
    let s = 1.0 - t;
    for n in 1..=degree {
        for i in (1..=n).rev() {
            b[i] = s * b[i] + t * b[i - 1];
        }
        b[0] *= s;
    }
    b
}

fn binomial_row(n: usize) -> Vec<f64> {
    let mut row = vec![1.0; n + 1];
    for k in 1..=n {
        row[k] = row[k - 1] * (n + 1 - k) as f64 / k as f64;
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sup_error_1d<F: Fn(f64) -> f64>(b: &BernsteinPoly, f: F, points: usize) -> f64 {
        (0..points)
            .map(|i| {
                let x = i as f64 / (points - 1) as f64;
                (b.evaluate(&[x]).unwrap() - f(x)).abs()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn reproduces_identity_coefficients() {
        // dyadic N keeps every node and difference exact
        for n in (1..=10).chain([16, 32, 64, 256]) {
            let b = bernstein_approx(|x| x[0], 1, n).unwrap();
            let p = b.to_multipoly();
            let expect = MultiPoly::var(1, 0);
            let diff = p.sub(&expect).unwrap();
            for (_, c) in diff.terms() {
                assert!(c.abs() < 1e-12, "N = {n}: stray coefficient {c}");
            }
        }
    }

    #[test]
    fn reproduces_affine_by_evaluation_at_high_degree() {
        for n in [1, 3, 10, 64, 256] {
            let b = bernstein_approx(|x| 0.3 - 2.0 * x[0], 1, n).unwrap();
            assert!(sup_error_1d(&b, |x| 0.3 - 2.0 * x, 201) < 1e-12);
        }
    }

    #[test]
    fn square_error_closed_form() {
        // B_N[x^2] = x^2 + x (1 - x) / N
        let b = bernstein_approx(|x| x[0] * x[0], 1, 10).unwrap();
        let err = sup_error_1d(&b, |x| x * x, 1001);
        assert!((err - 0.025).abs() < 1e-9);

        let p = b.to_multipoly();
        assert!((p.coeff(&[2]) - 0.9).abs() < 1e-12);
        assert!((p.coeff(&[1]) - 0.1).abs() < 1e-12);
        assert!(p.coeff(&[0]).abs() < 1e-12);
    }

    #[test]
    fn bilinear_is_reproduced_and_square_product_improves() {
        let grid_err = |b: &BernsteinPoly, f: &dyn Fn(f64, f64) -> f64| {
            let mut sup: f64 = 0.0;
            for i in 0..=50 {
                for j in 0..=50 {
                    let (x, y) = (i as f64 / 50.0, j as f64 / 50.0);
                    sup = sup.max((b.evaluate(&[x, y]).unwrap() - f(x, y)).abs());
                }
            }
            sup
        };
        let xy = |x: f64, y: f64| x * y;
        for n in [2, 4] {
            let b = bernstein_approx(|p| p[0] * p[1], 2, n).unwrap();
            assert!(grid_err(&b, &xy) < 1e-12);
        }
        let sq = |x: f64, y: f64| x * x * y * y;
        let e2 = grid_err(&bernstein_approx(|p| sq(p[0], p[1]), 2, 2).unwrap(), &sq);
        let e4 = grid_err(&bernstein_approx(|p| sq(p[0], p[1]), 2, 4).unwrap(), &sq);
        assert!(e4 < e2, "{e4} !< {e2}");
    }

    #[test]
    fn monomial_form_agrees_with_bernstein_form() {
        let f = |p: &[f64]| (p[0] * 3.0).sin() + p[1] * p[1] - p[0] * p[1];
        let b = bernstein_approx(f, 2, 6).unwrap();
        let m = b.to_multipoly();
        assert!(m.total_degree() <= 12);
        for &(x, y) in &[(0.1, 0.9), (0.5, 0.5), (0.77, 0.2)] {
            let a = b.evaluate(&[x, y]).unwrap();
            let c = m.evaluate(&[x, y]).unwrap();
            assert!((a - c).abs() < 1e-10);
        }
    }

    #[test]
    fn interpolates_corners() {
        let f = |p: &[f64]| 1.0 + p[0] * p[0] * p[0] + 2.0 * p[1];
        let b = bernstein_approx(f, 2, 5).unwrap();
        for &(x, y) in &[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
            assert!((b.evaluate(&[x, y]).unwrap() - f(&[x, y])).abs() < 1e-12);
        }
    }

    #[test]
    fn errors() {
        assert_eq!(
            bernstein_approx(|_| 0.0, 0, 3),
            Err(PolyError::InvalidBernstein)
        );
        assert_eq!(
            bernstein_approx(|_| 0.0, 1, 0),
            Err(PolyError::InvalidBernstein)
        );
        let r = bernstein_approx(|x| 1.0 / x[0], 1, 4);
        assert!(matches!(r, Err(PolyError::NonFiniteNode { .. })));
        let b = bernstein_approx(|x| x[0], 1, 2).unwrap();
        assert!(b.evaluate(&[0.1, 0.2]).is_err());
    }

    proptest! {
        #[test]
        fn stays_within_node_value_range(
            a in -3.0f64..3.0, b in -3.0f64..3.0, c in 0.5f64..8.0,
            n in 1usize..20, x in 0.0f64..=1.0, y in 0.0f64..=1.0,
        ) {
            let f = |p: &[f64]| (a * p[0] + c * p[1] * p[1]).cos() + b * p[0] * p[1];
            let bp = bernstein_approx(f, 2, n).unwrap();
            let lo = bp.node_values().iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = bp.node_values().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let v = bp.evaluate(&[x, y]).unwrap();
            prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
        }
    }
}
