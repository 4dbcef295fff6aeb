use std::f64::consts::PI;
use std::sync::Arc;

use finsler_blowup::geometry::{distance_fast_march, Domain, DomainSpec, Grid, ScalarField};
use finsler_blowup::norms::{Norm, NormSpec};
use finsler_blowup::oracles::{
    dense_dirichlet_eigen, radial_to_field, scaling_check, shooting_center_value, solve_radial,
};
use finsler_blowup::pde::{solve_truncated, ProblemSpec, SourceSpec};

/// `U(0)` for `n = 2, q = 2, K = 1`, frozen from a 10⁵-step shooting run.
/// With `v = e^{−U}` the problem is `Δv = v`, so this is `log I₀(1)`.
const CENTER_N2_Q2_K1: f64 = 0.235914358507;

/// First zero of `J₀`, squared.
const J01_SQ: f64 = 5.783185962946784;

fn smoothed_lp() -> NormSpec {
    NormSpec::SmoothedLp { p: 4.0, eps_smooth: 0.05 }
}

#[test]
fn radial_profile_shape() {
    for (n, q, k) in [(2, 2.0, 1.0), (2, 1.5, 3.0), (3, 1.2, 0.5)] {
        let sol = solve_radial(n, q, k, 800).unwrap();
        assert_eq!(*sol.u.last().unwrap(), 0.0);
        assert!(sol.center_value() > 0.0);
        assert!(sol.u.windows(2).all(|w| w[1] <= w[0]));
        assert!(sol.residual <= 1e-6 * k);
        // |U′(r)| ≤ C·r near the center.
        let slope = sol.r_nodes[1..40].iter().zip(&sol.u_prime[1..40]).map(|(r, p)| p.abs() / r).fold(0.0, f64::max);
        assert!(slope < 2.0 * k, "{slope}");
    }
}

#[test]
fn radial_matches_frozen_shooting_value() {
    let sol = solve_radial(2, 2.0, 1.0, 4001).unwrap();
    assert!((sol.center_value() - CENTER_N2_Q2_K1).abs() < 1e-5 * CENTER_N2_Q2_K1);
    assert!((shooting_center_value(2, 2.0, 1.0, 100_000) - CENTER_N2_Q2_K1).abs() < 1e-11);
}

#[test]
fn two_independent_radial_methods_agree() {
    for (n, q, k) in [(2, 1.5, 1.0), (3, 1.5, 2.0), (2, 1.2, 0.7)] {
        let fd = solve_radial(n, q, k, 4001).unwrap().center_value();
        let shoot = shooting_center_value(n, q, k, 100_000);
        assert!((fd - shoot).abs() < 1e-5 * shoot, "n={n} q={q}: {fd} vs {shoot}");
    }
}

#[test]
fn larger_source_raises_the_center() {
    let a = solve_radial(2, 2.0, 1.0, 400).unwrap().center_value();
    let b = solve_radial(2, 2.0, 2.0, 400).unwrap().center_value();
    assert!(b > a);
}

#[test]
fn radial_oracle_rejects_bad_input() {
    assert!(solve_radial(2, 1.5, 0.0, 400).is_err());
    assert!(solve_radial(2, 1.5, 1.0, 100).is_err());
    assert!(solve_radial(1, 1.5, 1.0, 400).is_err());
}

#[test]
fn radial_field_is_radial_and_vanishes_outside() {
    let sol = solve_radial(2, 1.5, 1.0, 400).unwrap();
    let grid = Arc::new(Grid::build(&Domain::new(DomainSpec::disk(1.0)).unwrap(), 40).unwrap());
    let field = radial_to_field(&sol, &Norm::euclidean(), grid.clone(), [0.0, 0.0]);
    for k in 0..grid.len() {
        let x = grid.point(k);
        let r = x[0].hypot(x[1]);
        let v = field.get(k).unwrap();
        if r >= 1.0 {
            assert_eq!(v, 0.0);
        }
        let mirrored = grid.nearest([-x[1], x[0]]);
        assert!((field.get(mirrored).unwrap() - v).abs() < 1e-12);
    }
}

/// 2-D solves on the unit Wulff shape with `f = K`, small `λ` and `M = 0`
/// against the radial profile in `H°`.
#[test]
fn solver_matches_radial_oracle_on_wulff_shapes() {
    let lambda = 1e-3;
    for norm in [NormSpec::Euclidean, smoothed_lp()] {
        for q in [1.5, 2.0] {
            let domain = DomainSpec::wulff(norm.clone(), 1.0);
            let grid = Arc::new(Grid::build(&Domain::new(domain.clone()).unwrap(), 64).unwrap());
            let n = Norm::new(norm.clone()).unwrap();
            let dist = distance_fast_march(grid.clone(), &n).unwrap();
            let p = ProblemSpec::new(norm.clone(), domain, q, lambda, SourceSpec::constant(1.0)).unwrap();
            let (u, _) = solve_truncated(&p, &dist, 0.0, None).unwrap();
            let sol = solve_radial(2, q, 1.0, 2001).unwrap();
            let oracle = radial_to_field(&sol, &n, grid.clone(), [0.0, 0.0]);
            let peak = sol.center_value();
            let mismatch = (0..grid.len())
                .filter(|&k| grid.is_interior(k))
                .map(|k| (u.get(k).unwrap() - oracle.get(k).unwrap()).abs())
                .fold(0.0, f64::max);
            let tol = 0.05 * peak + lambda * peak;
            assert!(mismatch <= tol, "{norm} q={q}: {mismatch} > {tol}");
        }
    }
}

#[test]
fn disk_eigenvalue_matches_bessel_zero() {
    let grid = Grid::build(&Domain::new(DomainSpec::disk(1.0)).unwrap(), 128).unwrap();
    let zero = ScalarField::from_fn(Arc::new(grid.clone()), |_| 0.0);
    let pair = dense_dirichlet_eigen(&grid, &zero).unwrap();
    assert!(pair.cut_cell);
    assert!((pair.value - J01_SQ).abs() < 0.01 * J01_SQ, "{}", pair.value);
    assert!(pair.vector.iter().all(|&v| v >= 0.0));
}

fn unit_square(cells: usize) -> Grid {
    let h = 1.0 / cells as f64;
    let pad = 2;
    let origin = [-(pad as f64) * h, -(pad as f64) * h];
    let n = cells + 1 + 2 * pad;
    let eps = 1e-9 * h;
    Grid::from_classifier(origin, h, n, n, |x| x[0] > eps && x[0] < 1.0 - eps && x[1] > eps && x[1] < 1.0 - eps)
}

#[test]
fn square_eigenvalue_converges_to_two_pi_squared() {
    let exact = 2.0 * PI * PI;
    let err = |cells: usize| {
        let grid = unit_square(cells);
        let f = ScalarField::from_fn(Arc::new(grid.clone()), |_| 0.0);
        let pair = dense_dirichlet_eigen(&grid, &f).unwrap();
        assert!(!pair.cut_cell);
        (pair.value - exact).abs()
    };
    let (coarse, fine) = (err(16), err(32));
    assert!(fine < 0.3 * coarse && fine < 0.01 * exact, "{coarse} -> {fine}");
}

#[test]
fn constant_potential_shifts_the_eigenvalue() {
    let grid = unit_square(20);
    let g = Arc::new(grid.clone());
    let a = dense_dirichlet_eigen(&grid, &ScalarField::from_fn(g.clone(), |_| 0.0)).unwrap();
    let b = dense_dirichlet_eigen(&grid, &ScalarField::from_fn(g, |_| 3.5)).unwrap();
    assert!((b.value - a.value - 3.5).abs() < 1e-9);
}

#[test]
fn unit_scale_is_the_identity() {
    let p = ProblemSpec::new(NormSpec::Euclidean, DomainSpec::disk(1.0), 1.5, 1.0, SourceSpec::constant(1.0)).unwrap();
    let rep = scaling_check(&p, 1.0, [0.0, 0.0], 40).unwrap();
    assert!(rep.sup_mismatch < 1e-9, "{rep:?}");
}

#[test]
fn half_scale_matches_after_rescaling() {
    for norm in [NormSpec::Euclidean, smoothed_lp()] {
        let p = ProblemSpec::new(norm.clone(), DomainSpec::wulff(norm.clone(), 1.0), 1.5, 1.0, SourceSpec::constant(1.0))
            .unwrap();
        let rep = scaling_check(&p, 0.5, [0.3, -0.2], 48).unwrap();
        assert!(rep.relative_mismatch < 0.05, "{norm}: {rep:?}");
    }
}
