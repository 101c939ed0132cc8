use provar_core::cloud::PointCloud;
use provar_core::fit::{fit_implicit, monomial_basis, select_degree};
use provar_core::variety::{sample_parametric, BuiltinVariety};

const SPHERE: BuiltinVariety = BuiltinVariety::Sphere { radius: 1.0 };
const TORUS: BuiltinVariety = BuiltinVariety::Torus {
    major: 2.0,
    minor: 0.5,
};

/// Coefficient vector over `monomial_basis(nvars, degree)` from sparse terms.
fn known_answer(nvars: usize, degree: u32, terms: &[(f64, &[u32])]) -> Vec<f64> {
    let basis = monomial_basis(nvars, degree);
    let mut v = vec![0.0; basis.len()];
    for (c, e) in terms {
        let i = basis.iter().position(|b| b == e).unwrap();
        v[i] += c;
    }
    v
}

fn sphere_answer() -> Vec<f64> {
    known_answer(
        3,
        2,
        &[
            (-1.0, &[0, 0, 0]),
            (1.0, &[2, 0, 0]),
            (1.0, &[0, 2, 0]),
            (1.0, &[0, 0, 2]),
        ],
    )
}

fn elliptic_answer() -> Vec<f64> {
    known_answer(2, 3, &[(1.0, &[3, 0]), (-1.0, &[1, 0]), (-1.0, &[0, 2])])
}

// (x^2 + y^2 + z^2 + R^2 - r^2)^2 - 4 R^2 (x^2 + y^2), expanded by hand
fn torus_answer(big: f64, small: f64) -> Vec<f64> {
    let a = big * big - small * small;
    let q = 4.0 * big * big;
    known_answer(
        3,
        4,
        &[
            (1.0, &[4, 0, 0]),
            (1.0, &[0, 4, 0]),
            (1.0, &[0, 0, 4]),
            (2.0, &[2, 2, 0]),
            (2.0, &[2, 0, 2]),
            (2.0, &[0, 2, 2]),
            (2.0 * a - q, &[2, 0, 0]),
            (2.0 * a - q, &[0, 2, 0]),
            (2.0 * a, &[0, 0, 2]),
            (a * a, &[0, 0, 0]),
        ],
    )
}

#[test]
fn sphere_recovered_at_degree_two() {
    let cloud = sample_parametric(SPHERE, 200, 3).unwrap();
    let fit = fit_implicit(&cloud, 2).unwrap();
    assert!(fit.residual_rms < 1e-8, "{}", fit.residual_rms);
    assert!(fit.abs_cosine(&sphere_answer()) > 0.9999);
}

#[test]
fn known_answers_at_true_degree() {
    let cases = [
        (SPHERE, 2, sphere_answer()),
        (BuiltinVariety::Elliptic, 3, elliptic_answer()),
        (TORUS, 4, torus_answer(2.0, 0.5)),
    ];
    for (which, degree, answer) in cases {
        let cloud = sample_parametric(which, 500, 11).unwrap();
        let fit = fit_implicit(&cloud, degree).unwrap();
        assert!(fit.residual_rms < 1e-7, "{which:?}: {}", fit.residual_rms);
        assert!(
            fit.abs_cosine(&answer) > 0.999,
            "{which:?}: {}",
            fit.abs_cosine(&answer)
        );
        let norm: f64 = fit.coefficients.iter().map(|c| c * c).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }
}

#[test]
fn selects_true_degree() {
    for (which, max_degree, expect) in [
        (SPHERE, 4, 2),
        (TORUS, 5, 4),
        (BuiltinVariety::Elliptic, 4, 3),
    ] {
        let cloud = sample_parametric(which, 500, 5).unwrap();
        let sel = select_degree(&cloud, max_degree, 1e-6).unwrap();
        assert!(sel.converged);
        assert_eq!(sel.selected.degree, expect, "{which:?}: {:?}", sel.sweep);
        assert_eq!(sel.sweep.len(), expect as usize);
        for s in &sel.sweep[..expect as usize - 1] {
            assert!(s.residual_rms > 1e-6);
        }
    }
}

#[test]
fn not_converged_returns_highest_degree() {
    let cloud = sample_parametric(TORUS, 300, 2).unwrap();
    let sel = select_degree(&cloud, 3, 1e-6).unwrap();
    assert!(!sel.converged);
    assert_eq!(sel.selected.degree, 3);
    assert_eq!(sel.sweep.len(), 3);
}

fn rotate(p: &[f64]) -> Vec<f64> {
    let (s, c) = (0.6, 0.8);
    let (x, y, z) = (c * p[0] - s * p[1], s * p[0] + c * p[1], p[2]);
    vec![x, c * y - s * z, s * y + c * z]
}

#[test]
fn rigid_motion_keeps_selection() {
    for (which, max_degree) in [(SPHERE, 4), (TORUS, 5)] {
        let cloud = sample_parametric(which, 500, 9).unwrap();
        let base = select_degree(&cloud, max_degree, 1e-6).unwrap();
        let moved = cloud.map_points(|p| {
            let r = rotate(p);
            vec![r[0] + 0.3, r[1] - 0.2, r[2] + 0.1]
        });
        let sel = select_degree(&moved, max_degree, 1e-6).unwrap();
        assert_eq!(sel.selected.degree, base.selected.degree);
        assert!(sel.selected.residual_rms < 1e-6);
    }
}

#[test]
fn scaling_keeps_selection() {
    for (which, max_degree) in [(SPHERE, 4), (BuiltinVariety::Elliptic, 4), (TORUS, 5)] {
        let cloud = sample_parametric(which, 500, 13).unwrap();
        let base = select_degree(&cloud, max_degree, 1e-6).unwrap();
        let scaled = cloud.map_points(|p| p.iter().map(|x| 10.0 * x).collect());
        let sel = select_degree(&scaled, max_degree, 1e-6).unwrap();
        assert_eq!(sel.selected.degree, base.selected.degree);
    }
}

#[test]
fn noise_increases_residual() {
    let cloud = sample_parametric(SPHERE, 500, 17).unwrap();
    let mut rng = provar_core::rng::seeded(99);
    let mut noise = vec![0.0; 3 * cloud.len()];
    provar_core::rng::fill_normal(&mut rng, &mut noise);
    let mut previous = -1.0;
    for sigma in [0.0, 0.01, 0.05] {
        let pts: Vec<Vec<f64>> = cloud
            .points()
            .enumerate()
            .map(|(i, p)| {
                p.iter()
                    .enumerate()
                    .map(|(k, x)| x + sigma * noise[3 * i + k])
                    .collect()
            })
            .collect();
        let noisy = PointCloud::from_points(3, &pts).unwrap();
        let r = fit_implicit(&noisy, 2).unwrap().residual_rms;
        assert!(r >= previous, "sigma {sigma}: {r} < {previous}");
        previous = r;
    }
}
