use std::sync::Arc;

use finsler_blowup::asymptotics::{
    alpha, barrier_field, calibrate_c_eps, default_band, fit_blowup_rate, fit_blowup_rate_with_mode,
    fit_power_with_constant, q_prime, sandwich_check, solve_c0, solve_c0_fast, BarrierKind, BarrierParams, FitMode,
};
use finsler_blowup::geometry::{distance_fast_march, extended_distance, DistanceField, Domain, DomainSpec, Grid, ScalarField};
use finsler_blowup::norms::{Norm, NormSpec};
use finsler_blowup::pde::{solve_truncated, ProblemSpec, SourceSpec};
use finsler_blowup::Error;

fn disk(res: usize) -> DistanceField {
    let grid = Arc::new(Grid::build(&Domain::new(DomainSpec::disk(1.0)).unwrap(), res).unwrap());
    distance_fast_march(grid, &Norm::euclidean()).unwrap()
}

fn planted(dist: &DistanceField, f: impl Fn(f64) -> f64) -> ScalarField {
    let grid = dist.grid().clone();
    ScalarField::from_partial(grid.clone(), |k| grid.is_interior(k).then(|| f(dist.signed(k))))
}

fn barrier(eps: f64, q: f64) -> BarrierParams {
    BarrierParams {
        eps,
        delta: 0.0,
        c_eps: 0.0,
        delta0: 0.2,
        c0: solve_c0(q, 0.0).unwrap(),
        alpha: alpha(q),
    }
}

#[test]
fn planted_power_laws_are_recovered_exactly() {
    let dist = disk(64);
    let band = default_band(&dist, 0.2);
    for a in [0.5, 1.0, 2.0] {
        let u = planted(&dist, |d| 3.0 * d.powf(-a));
        let fit = fit_blowup_rate_with_mode(&u, &dist, FitMode::PowerLaw, band).unwrap();
        assert!((fit.alpha_fit - a).abs() < 1e-6, "{fit:?}");
        assert!((fit.c0_fit - 3.0).abs() < 1e-6 && fit.r_squared >= 0.999);
    }
    let u = planted(&dist, |d| 4.0 / d);
    let fit = fit_blowup_rate(&u, &dist, 1.5, band).unwrap();
    assert_eq!(fit.mode, FitMode::PowerLaw);
    assert!((fit.alpha_fit - 1.0).abs() < 1e-9 && (fit.c0_fit - 4.0).abs() < 1e-9);
}

#[test]
fn planted_log_law_is_recovered() {
    let dist = disk(64);
    let u = planted(&dist, |d| (1.0 / d).ln() + 7.0);
    let fit = fit_blowup_rate(&u, &dist, 2.0, default_band(&dist, 0.2)).unwrap();
    assert_eq!(fit.mode, FitMode::Logarithmic);
    assert_eq!(fit.alpha_fit, 0.0);
    assert!((fit.c0_fit - 1.0).abs() < 1e-9 && fit.r_squared > 0.999);
}

#[test]
fn affine_fit_separates_the_bounded_part() {
    let dist = disk(64);
    let u = planted(&dist, |d| 4.0 / d + 35.0);
    let band = default_band(&dist, 0.2);
    let plain = fit_blowup_rate(&u, &dist, 1.5, band).unwrap();
    assert!(plain.alpha_fit < 0.8, "an additive constant flattens the log-log slope");
    let affine = fit_power_with_constant(&u, &dist, band).unwrap();
    assert!((affine.alpha_fit - 1.0).abs() < 1e-4, "{affine:?}");
    assert!((affine.constant - 35.0).abs() < 1e-2);
}

#[test]
fn band_validation() {
    let dist = disk(32);
    let h = dist.grid().h;
    let u = planted(&dist, |d| 1.0 / d);
    assert!(matches!(
        fit_blowup_rate(&u, &dist, 1.5, (2.0 * h, 0.2)),
        Err(Error::InvalidArgument(_))
    ));
    assert!(matches!(
        fit_blowup_rate(&u, &dist, 1.5, (3.0 * h, 3.0 * h + 1e-3)),
        Err(Error::InsufficientBand { .. })
    ));
}

#[test]
fn regime_boundary_exponents_agree() {
    for q in [1.2, 1.5, 1.8, 2.0] {
        let qp = q_prime(q);
        let (_, e) = solve_c0_fast(q, 1.0, qp * (1.0 + 1e-9)).unwrap();
        assert!((e - alpha(q)).abs() < 1e-8, "q={q}");
    }
}

#[test]
fn barrier_fields_respect_their_domains() {
    let dist = disk(32);
    let d_ext = extended_distance(&dist, 0.2).unwrap();
    let p = BarrierParams { delta: 0.05, ..barrier(0.5, 1.5) };
    let sup = barrier_field(&p, &d_ext, BarrierKind::Super).unwrap();
    let sub = barrier_field(&p, &d_ext, BarrierKind::Sub).unwrap();
    for k in 0..dist.grid().len() {
        let d = d_ext.get(k).unwrap();
        assert_eq!(sup.get(k).is_some(), d > 0.05);
        assert_eq!(sub.get(k).is_some(), d > -0.05);
        if let (Some(a), Some(b)) = (sub.get(k), sup.get(k)) {
            assert!(a <= b);
        }
    }
}

#[test]
fn large_lambda_needs_a_small_constant() {
    let dist = disk(48);
    let p = ProblemSpec::new(NormSpec::Euclidean, DomainSpec::disk(1.0), 1.5, 10.0, SourceSpec::constant(1.0)).unwrap();
    let cal = calibrate_c_eps(&p, &dist, barrier(0.5, 1.5)).unwrap();
    let weak = calibrate_c_eps(&p.with_lambda(1.0), &dist, barrier(0.5, 1.5)).unwrap();
    assert!(!cal.capped);
    assert!(cal.params.c_eps < weak.params.c_eps, "{} vs {}", cal.params.c_eps, weak.params.c_eps);
}

#[test]
fn shrinking_eps_demands_a_larger_sub_constant() {
    let dist = disk(48);
    for q in [1.5, 2.0] {
        let p = ProblemSpec::new(NormSpec::Euclidean, DomainSpec::disk(1.0), q, 1.0, SourceSpec::constant(0.0)).unwrap();
        let needs: Vec<f64> = [0.8, 0.4, 0.2, 0.1]
            .iter()
            .map(|&eps| calibrate_c_eps(&p, &dist, barrier(eps, q)).unwrap().c_sub)
            .collect();
        assert!(needs.windows(2).all(|w| w[1] >= w[0]), "q={q}: {needs:?}");
    }
}

#[test]
fn calibrated_barriers_sandwich_the_limit() {
    let dist = disk(64);
    let h = dist.grid().h;
    for q in [1.5, 2.0] {
        let p = ProblemSpec::new(NormSpec::Euclidean, DomainSpec::disk(1.0), q, 1.0, SourceSpec::constant(0.0)).unwrap();
        let (u, _) = solve_truncated(&p, &dist, f64::INFINITY, None).unwrap();
        let cal = calibrate_c_eps(&p, &dist, barrier(0.5, q)).unwrap();
        assert!(!cal.capped);
        let d_ext = extended_distance(&dist, 0.2).unwrap();
        let sub = barrier_field(&cal.params, &d_ext, BarrierKind::Sub).unwrap();
        let sup = barrier_field(&cal.params, &d_ext, BarrierKind::Super).unwrap();
        let rep = sandwich_check(&u, &sub, &sup, &dist, (3.0 * h, 0.2));
        assert!(rep.holds(), "q={q}: {rep:?}");
    }
}

/// Least squares on three basis functions via the normal equations.
fn lsq3(rows: &[[f64; 3]], ys: &[f64]) -> [f64; 3] {
    let mut a = [[0.0; 3]; 3];
    let mut b = [0.0; 3];
    for (r, y) in rows.iter().zip(ys) {
        for i in 0..3 {
            b[i] += r[i] * y;
            for j in 0..3 {
                a[i][j] += r[i] * r[j];
            }
        }
    }
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(a);
    std::array::from_fn(|c| {
        let mut m = a;
        for i in 0..3 {
            m[i][c] = b[i];
        }
        det(m) / d
    })
}

#[test]
fn fast_regime_leading_term_matches_dominant_balance() {
    // q = 2, β = 4, C₁ = 1: u = C₀/d + a·log(1/d) + b with C₀ = 1 and a = 1
    // from matching the d^{−4} and d^{−3} terms.
    let dist = disk(96);
    let p = ProblemSpec::new(NormSpec::Euclidean, DomainSpec::disk(1.0), 2.0, 1.0, SourceSpec::singular(0.0, 1.0, 4.0)).unwrap();
    let (u, _) = solve_truncated(&p, &dist, f64::INFINITY, None).unwrap();
    let (c0, e) = solve_c0_fast(2.0, 1.0, 4.0).unwrap();
    assert_eq!((c0, e), (1.0, 1.0));
    let (rows, ys): (Vec<[f64; 3]>, Vec<f64>) = u
        .iter_defined()
        .filter(|&(k, _)| dist.grid().is_interior(k) && (0.05..=0.3).contains(&dist.signed(k)))
        .map(|(k, v)| {
            let d = dist.signed(k);
            ([1.0 / d, (1.0 / d).ln(), 1.0], v)
        })
        .unzip();
    let [c, a, _] = lsq3(&rows, &ys);
    assert!((c - c0).abs() < 0.1, "C0 fit {c}");
    assert!((a - 1.0).abs() < 0.5, "log coefficient {a}");
}
