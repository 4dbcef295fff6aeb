use std::sync::OnceLock;

use finsler_blowup::norms::{identity_suite, polar_by_sweep, sym_eigenvalues, Norm, NormSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn spd() -> impl Strategy<Value = NormSpec> {
    (0.3f64..3.0, 0.3f64..3.0, -0.8f64..0.8).prop_map(|(a11, a22, c)| {
        let off = c * (a11 * a22).sqrt();
        NormSpec::Ellipse {
            a: [[a11, off], [off, a22]],
        }
    })
}

/// Smoothed ℓ^p norms build a polar lookup table, so a fixed parameter
/// grid is constructed once and shared by every case.
fn smoothed() -> &'static [Norm] {
    static CELL: OnceLock<Vec<Norm>> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut out = Vec::new();
        for p in [1.5, 2.5, 4.0, 6.0] {
            for eps_smooth in [0.02, 0.1, 0.4] {
                out.push(Norm::new(NormSpec::SmoothedLp { p, eps_smooth }).unwrap());
            }
        }
        out
    })
}

fn any_norm() -> impl Strategy<Value = Norm> {
    prop_oneof![
        Just(Norm::euclidean()),
        spd().prop_map(|s| Norm::new(s).unwrap()),
        (0..12usize).prop_map(|i| smoothed()[i].clone()),
    ]
}

fn nonzero() -> impl Strategy<Value = [f64; 2]> {
    (0.05f64..20.0, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| [r * t.cos(), r * t.sin()])
}

fn fixed_norms() -> Vec<Norm> {
    [
        NormSpec::Euclidean,
        NormSpec::Ellipse {
            a: [[2.0, 0.5], [0.5, 1.0]],
        },
        NormSpec::SmoothedLp { p: 4.0, eps_smooth: 0.05 },
    ]
    .into_iter()
    .map(|s| Norm::new(s).unwrap())
    .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn one_homogeneous(n in any_norm(), xi in nonzero(), t in -10.0f64..10.0) {
        let lhs = n.eval([t * xi[0], t * xi[1]]);
        let rhs = t.abs() * n.eval(xi);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1e-300));
    }

    #[test]
    fn euler_identity(n in any_norm(), xi in nonzero()) {
        let g = n.grad(xi).unwrap();
        let h = n.eval(xi);
        prop_assert!((g[0] * xi[0] + g[1] * xi[1] - h).abs() <= 1e-8 * h);
    }

    #[test]
    fn gradient_matches_differences(n in any_norm(), xi in nonzero()) {
        let g = n.grad(xi).unwrap();
        let s = 1e-6 * xi[0].hypot(xi[1]);
        let fd = [
            (n.eval([xi[0] + s, xi[1]]) - n.eval([xi[0] - s, xi[1]])) / (2.0 * s),
            (n.eval([xi[0], xi[1] + s]) - n.eval([xi[0], xi[1] - s])) / (2.0 * s),
        ];
        for c in 0..2 {
            prop_assert!((g[c] - fd[c]).abs() <= 1e-6, "{:?} vs {:?}", g, fd);
        }
    }

    #[test]
    fn bounded_by_euclidean_multiples(n in any_norm(), xi in nonzero()) {
        let rep = n.estimate_constants(1024).unwrap();
        let r = xi[0].hypot(xi[1]);
        let h = n.eval(xi);
        // Sampled constants, so allow the sampling gap.
        prop_assert!(h >= rep.a_lower * r * (1.0 - 1e-3) && h <= rep.b_upper * r * (1.0 + 1e-3));
        prop_assert!(rep.a_lower > 0.0);
    }

    #[test]
    fn hessian_is_positive_definite(n in any_norm(), xi in nonzero()) {
        let m = n.hess_h2(xi).unwrap();
        prop_assert!((m[0][1] - m[1][0]).abs() <= 1e-12 * (m[0][0].abs() + m[1][1].abs()));
        let (lo, _) = sym_eigenvalues(m);
        prop_assert!(lo > 0.0);
        // Zero-homogeneous.
        let m2 = n.hess_h2([3.0 * xi[0], 3.0 * xi[1]]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!((m[i][j] - m2[i][j]).abs() <= 1e-9 * (1.0 + m[i][j].abs()));
            }
        }
    }

    #[test]
    fn gradient_lands_on_the_dual_unit_sphere(n in any_norm(), xi in nonzero()) {
        let g = n.grad(xi).unwrap();
        prop_assert!((n.eval_polar(g) - 1.0).abs() <= 1e-6);
        // H°(x)·∇H(∇H°(x)) = x.
        let gp = n.grad_polar(xi).unwrap();
        prop_assert!((n.eval(gp) - 1.0).abs() <= 1e-5);
        let back = n.grad(gp).unwrap();
        let hp = n.eval_polar(xi);
        for c in 0..2 {
            prop_assert!((hp * back[c] - xi[c]).abs() <= 1e-5 * (1.0 + xi[c].abs()), "{:?}", back);
        }
    }

    #[test]
    fn origin_derivatives_are_rejected(n in any_norm()) {
        prop_assert!(n.grad([0.0, 0.0]).is_err());
        prop_assert!(n.hess_h2([0.0, 0.0]).is_err());
        prop_assert!(n.grad_polar([0.0, 0.0]).is_err());
        prop_assert_eq!(n.eval([0.0, 0.0]), 0.0);
    }
}

#[test]
fn polar_matches_the_sweep_on_a_thousand_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in fixed_norms() {
        for _ in 0..1000 {
            let x = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
            let (sweep, _) = polar_by_sweep(|e| n.eval(e), x);
            let direct = n.eval_polar(x);
            assert!((sweep - direct).abs() <= 1e-6 * (1.0 + direct), "{}: {x:?}", n.spec());
        }
    }
}

#[test]
fn polar_of_the_polar_is_the_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in fixed_norms() {
        for _ in 0..200 {
            let xi = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            let (twice, _) = polar_by_sweep(|e| n.eval_polar(e), xi);
            assert!((twice - n.eval(xi)).abs() <= 1e-6 * (1.0 + n.eval(xi)), "{}: {xi:?}", n.spec());
        }
    }
}

#[test]
fn invalid_specs_are_rejected() {
    assert!(Norm::new(NormSpec::Ellipse { a: [[1.0, 2.0], [2.0, 1.0]] }).is_err());
    assert!(Norm::new(NormSpec::SmoothedLp { p: 0.5, eps_smooth: 0.1 }).is_err());
    assert!(Norm::new(NormSpec::SmoothedLp { p: 4.0, eps_smooth: 0.0 }).is_err());
    let raw: Result<NormSpec, _> = serde_json::from_str(r#"{"family":"hexagon","params":[]}"#);
    assert!(raw.is_err());
    let ok: NormSpec = serde_json::from_str(r#"{"family":"smoothed_lp","params":[4,0.05]}"#).unwrap();
    assert_eq!(ok, NormSpec::SmoothedLp { p: 4.0, eps_smooth: 0.05 });
}

#[test]
fn identity_suite_passes_on_every_family() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in fixed_norms() {
        let rep = identity_suite(&n, 1000, &mut rng).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.max_violation.len(), 7);
        if matches!(n.spec(), NormSpec::Euclidean) {
            assert!(rep.max_violation.values().all(|&v| v <= 1e-10), "{rep:?}");
        }
    }
    assert!(identity_suite(&Norm::euclidean(), 0, &mut rng).is_err());
}
