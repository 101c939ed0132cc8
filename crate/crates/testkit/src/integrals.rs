//! Closed-form integrals of monomials over boxes.

/// `int_a^b x^k dx`.
pub fn power_integral(k: u32, a: f64, b: f64) -> f64 {
    let p = k as i32 + 1;
    (b.powi(p) - a.powi(p)) / p as f64
}

/// Integral of `prod x_i^{e_i}` over the box `prod [lo_i, hi_i]`.
pub fn monomial_integral(exponents: &[u32], lower: &[f64], upper: &[f64]) -> f64 {
    exponents
        .iter()
        .zip(lower.iter().zip(upper))
        .map(|(&k, (&a, &b))| power_integral(k, a, b))
        .product()
}

/// Integral of `sum c * x^e` over a box.
pub fn polynomial_integral(terms: &[(f64, Vec<u32>)], lower: &[f64], upper: &[f64]) -> f64 {
    terms
        .iter()
        .map(|(c, e)| c * monomial_integral(e, lower, upper))
        .sum()
}
