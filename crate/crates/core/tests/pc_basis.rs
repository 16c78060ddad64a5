mod common;

use common::{hermite_orthonormal, integrate, jacobi_integral, laguerre_integral, normal_density};
use pcburgers::pc_basis::{
    build_tensor, gauss_hermite, hermite_eval, hermite_triple, triple_quadrature_oracle,
    weighted_eval, OrthogonalFamily,
};
use proptest::prelude::*;

#[test]
fn hermite_matches_recurrence_oracle() {
    for n in 0..=12 {
        for k in 0..=40 {
            let x = -6.0 + 0.3 * k as f64;
            let want = hermite_orthonormal(n, x);
            assert!(
                (hermite_eval(n, x) - want).abs() <= 1e-12 * want.abs().max(1.0),
                "n={n} x={x}"
            );
        }
    }
}

#[test]
fn orthonormal_under_gaussian_weight() {
    for i in 0..=9 {
        for j in 0..=9 {
            let v = integrate(
                |x| hermite_eval(i, x) * hermite_eval(j, x) * normal_density(x),
                -14.0,
                14.0,
                2.0,
            );
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((v - want).abs() <= 1e-10, "({i},{j}) -> {v}");
        }
    }
}

#[test]
fn triple_products_match_two_quadratures() {
    let mut worst: f64 = 0.0;
    for i in 0..=9 {
        for j in 0..=9 {
            for k in 0..=9 {
                let exact = hermite_triple(i, j, k);
                let gh = triple_quadrature_oracle(i, j, k, 20).unwrap();
                worst = worst.max((exact - gh).abs());
                if (i + j + k) % 3 == 0 {
                    let de = integrate(
                        |x| {
                            hermite_orthonormal(i, x)
                                * hermite_orthonormal(j, x)
                                * hermite_orthonormal(k, x)
                                * normal_density(x)
                        },
                        -16.0,
                        16.0,
                        2.0,
                    );
                    assert!((exact - de).abs() <= 1e-9, "({i},{j},{k}): {exact} vs {de}");
                }
            }
        }
    }
    assert!(worst <= 1e-10, "worst {worst}");
}

#[test]
fn triple_product_examples() {
    assert!((hermite_triple(0, 0, 0) - 1.0).abs() < 1e-15);
    assert!((hermite_triple(1, 1, 2) - 2f64.sqrt()).abs() < 1e-14);
    assert!((hermite_triple(2, 2, 2) - 2.0 * 2f64.sqrt()).abs() < 1e-14);
    assert!((hermite_triple(1, 2, 3) - 3f64.sqrt()).abs() < 1e-14);
    assert!((hermite_triple(2, 3, 3) - 3.0 * 2f64.sqrt()).abs() < 1e-14);
    // parity and triangle inequality
    assert_eq!(hermite_triple(1, 1, 1), 0.0);
    assert_eq!(hermite_triple(0, 1, 3), 0.0);
}

#[test]
fn tensor_lookup_is_symmetric_and_complete() {
    let t = build_tensor(9);
    assert_eq!(t.modes(), 10);
    for i in 0..10 {
        for j in 0..10 {
            for k in 0..10 {
                let v = t.get(i, j, k);
                assert_eq!(v, t.get(j, i, k));
                assert_eq!(v, t.get(k, j, i));
                assert!((v - hermite_triple(i, j, k)).abs() <= 1e-12 * v.abs().max(1.0));
            }
        }
    }
}

#[test]
fn weighted_derivative_recursion_is_second_order() {
    // d/dx (phi_{i-1} omega) = -sqrt(i) phi_i omega, checked by central differences
    let points: Vec<f64> = (0..20).map(|k| -3.8 + 0.4 * k as f64).collect();
    for i in 1..=9 {
        let err = |h: f64| {
            points
                .iter()
                .map(|&x| {
                    let fd =
                        (weighted_eval(i - 1, x + h) - weighted_eval(i - 1, x - h)) / (2.0 * h);
                    (fd + (i as f64).sqrt() * weighted_eval(i, x)).abs()
                })
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(1e-2), err(5e-3));
        let order = (e1 / e2).log2();
        assert!(order >= 1.9, "i={i}: errors {e1:e} {e2:e}, order {order}");
    }
}

#[test]
fn gauss_hermite_integrates_polynomials() {
    let (x, w) = gauss_hermite(10);
    let moment = |p: i32| x.iter().zip(&w).map(|(x, w)| w * x.powi(p)).sum::<f64>();
    // E[xi^2k] = (2k-1)!!
    let double_fact = [
        1.0, 1.0, 3.0, 15.0, 105.0, 945.0, 10395.0, 135135.0, 2027025.0, 34459425.0,
    ];
    for k in 0..10 {
        let want = double_fact[k];
        assert!((moment(2 * k as i32) - want).abs() <= 1e-10 * want, "k={k}");
        assert!(moment(2 * k as i32 + 1).abs() <= 1e-9 * want);
    }
}

fn family_inner(f: &OrthogonalFamily, m: usize, n: usize) -> f64 {
    let p = |x: f64| f.eval(m, x) * f.eval(n, x);
    match *f {
        OrthogonalFamily::Jacobi { alpha, beta } => jacobi_integral(p, alpha, beta, &[]),
        OrthogonalFamily::Laguerre { alpha } => laguerre_integral(p, alpha, &[]),
        OrthogonalFamily::HermiteNormalized => {
            integrate(|x| p(x) * normal_density(x), -16.0, 16.0, 2.0)
        }
    }
}

#[test]
fn jacobi_orthogonality_constants() {
    for (alpha, beta) in [
        (0.0, 0.0),
        (0.5, -0.3),
        (2.0, 1.0),
        (-0.5, -0.5),
        (1.5, 3.0),
    ] {
        let f = OrthogonalFamily::jacobi(alpha, beta).unwrap();
        for m in 0..=6 {
            for n in 0..=6 {
                let q = family_inner(&f, m, n);
                let want = if m == n { f.norm_sq(n) } else { 0.0 };
                assert!(
                    (q - want).abs() <= 1e-10 * want.abs().max(1.0),
                    "alpha={alpha} beta={beta} ({m},{n}): {q} vs {want}"
                );
            }
        }
    }
}

#[test]
fn jacobi_legendre_special_case() {
    // alpha = beta = 0 gives Legendre polynomials with norm 2/(2n+1)
    let f = OrthogonalFamily::jacobi(0.0, 0.0).unwrap();
    for n in 0..=8 {
        assert!((f.norm_sq(n) - 2.0 / (2 * n + 1) as f64).abs() < 1e-13);
        assert!((f.eval(n, 1.0) - 1.0).abs() < 1e-13);
    }
    assert!((f.eval(2, 0.5) + 0.125).abs() < 1e-14);
}

#[test]
fn laguerre_orthogonality_constants() {
    for alpha in [0.0, 0.5, 1.0, 2.5, -0.5] {
        let f = OrthogonalFamily::laguerre(alpha).unwrap();
        for m in 0..=6 {
            for n in 0..=6 {
                let q = family_inner(&f, m, n);
                let want = if m == n { f.norm_sq(n) } else { 0.0 };
                assert!(
                    (q - want).abs() <= 1e-10 * want.abs().max(1.0),
                    "alpha={alpha} ({m},{n}): {q} vs {want}"
                );
            }
        }
    }
}

#[test]
fn family_gauss_rules_are_exact() {
    let fams = [
        OrthogonalFamily::jacobi(0.7, -0.2).unwrap(),
        OrthogonalFamily::laguerre(1.3).unwrap(),
        OrthogonalFamily::HermiteNormalized,
    ];
    for f in fams {
        let (x, w) = f.gauss_rule(8);
        for n in 0..8 {
            let s: f64 = x
                .iter()
                .zip(&w)
                .map(|(x, w)| w * f.eval(n, *x) * f.eval(n, *x))
                .sum();
            assert!(
                (s - f.norm_sq(n)).abs() <= 1e-10 * f.norm_sq(n).max(1.0),
                "{f:?} n={n}"
            );
        }
    }
}

#[test]
fn invalid_parameters_are_rejected() {
    assert!(OrthogonalFamily::jacobi(-1.0, 0.0).is_err());
    assert!(OrthogonalFamily::jacobi(0.0, -1.5).is_err());
    assert!(OrthogonalFamily::laguerre(-1.0).is_err());
    assert!(OrthogonalFamily::laguerre(f64::NAN).is_err());
}

proptest! {
    #[test]
    fn tensor_entries_vanish_off_the_triangle(i in 0usize..10, j in 0usize..10, k in 0usize..10) {
        let v = hermite_triple(i, j, k);
        let s = i + j + k;
        if s % 2 == 1 || i > j + k || j > i + k || k > i + j {
            prop_assert_eq!(v, 0.0);
        } else {
            prop_assert!(v > 0.0);
        }
    }

    #[test]
    fn weighted_eval_is_product(i in 0usize..10, x in -8.0f64..8.0) {
        let want = hermite_orthonormal(i, x) * normal_density(x);
        prop_assert!((weighted_eval(i, x) - want).abs() <= 1e-13 * want.abs().max(1e-3));
    }
}
