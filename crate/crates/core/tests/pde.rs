use std::sync::Arc;

use finsler_blowup::geometry::{distance_fast_march, DistanceField, Domain, DomainSpec, Grid, ScalarField};
use finsler_blowup::norms::{Norm, NormSpec};
use finsler_blowup::pde::{
    assemble_residual, comparison_check, gradient_diagnostic, solve_blowup, solve_truncated, Discretization, Form,
    Formulation, Profile, ProblemSpec, SourceSpec, Solver,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn setup(norm: NormSpec, domain: DomainSpec, res: usize) -> DistanceField {
    let grid = Arc::new(Grid::build(&Domain::new(domain).unwrap(), res).unwrap());
    distance_fast_march(grid, &Norm::new(norm).unwrap()).unwrap()
}

fn disk_problem(q: f64, lambda: f64, source: SourceSpec) -> ProblemSpec {
    ProblemSpec::new(NormSpec::Euclidean, DomainSpec::disk(1.0), q, lambda, source).unwrap()
}

fn ellipse_norm() -> NormSpec {
    NormSpec::ellipse_diag(2.0, 0.5)
}

fn smoothed_lp() -> NormSpec {
    NormSpec::SmoothedLp { p: 4.0, eps_smooth: 0.05 }
}

/// Interior nodes whose whole 3×3 stencil is interior.
fn deep_nodes(grid: &Grid) -> Vec<usize> {
    (0..grid.len())
        .filter(|&k| grid.is_interior(k))
        .filter(|&k| {
            (-1..=1).all(|di| (-1..=1).all(|dj| grid.offset(k, di, dj).is_some_and(|n| grid.is_interior(n))))
        })
        .collect()
}

#[test]
fn constant_state_residual_is_lambda_c_minus_f0() {
    let dist = setup(NormSpec::Euclidean, DomainSpec::disk(1.0), 32);
    let p = disk_problem(1.5, 2.0, SourceSpec::constant(0.75));
    let u = ScalarField::from_fn(dist.grid().clone(), |_| 3.0);
    let r = assemble_residual(&p, &u, &dist, 3.0).unwrap();
    for (_, v) in r.iter_defined() {
        assert!((v - (2.0 * 3.0 - 0.75)).abs() < 1e-12, "{v}");
    }
}

#[test]
fn linear_state_residual_is_local_term() {
    for norm in [NormSpec::Euclidean, ellipse_norm(), smoothed_lp()] {
        let dist = setup(norm.clone(), DomainSpec::disk(1.0), 32);
        let grid = dist.grid().clone();
        let a = [0.7, -1.3];
        let p = ProblemSpec::new(norm.clone(), DomainSpec::disk(1.0), 1.5, 1.0, SourceSpec::constant(0.2)).unwrap();
        let u = ScalarField::from_fn(grid.clone(), |k| {
            let x = grid.point(k);
            a[0] * x[0] + a[1] * x[1]
        });
        let r = assemble_residual(&p, &u, &dist, 0.0).unwrap();
        let h = Norm::new(norm).unwrap().eval(a);
        for k in deep_nodes(&grid) {
            let expect = h.powf(1.5) + u.get(k).unwrap() - 0.2;
            let got = r.get(k).unwrap();
            assert!((got - expect).abs() < 1e-9 * (1.0 + expect.abs()), "{got} vs {expect}");
        }
    }
}

#[test]
fn quadratic_state_matches_hand_value() {
    let dist = setup(NormSpec::Euclidean, DomainSpec::disk(1.0), 32);
    let grid = dist.grid().clone();
    let p = disk_problem(1.5, 1.0, SourceSpec::constant(0.0));
    let u = ScalarField::from_fn(grid.clone(), |k| {
        let x = grid.point(k);
        0.5 * (x[0] * x[0] + x[1] * x[1])
    });
    let r = assemble_residual(&p, &u, &dist, 0.0).unwrap();
    let k = grid.nearest([0.25, -0.1]);
    let x = grid.point(k);
    let rho = x[0].hypot(x[1]);
    let expect = -2.0 + rho.powf(1.5) + 0.5 * rho * rho;
    assert!((r.get(k).unwrap() - expect).abs() < 1e-10);
}

#[test]
fn euclidean_flux_collapses_to_five_point_laplacian() {
    let dist = setup(NormSpec::Euclidean, DomainSpec::disk(1.0), 24);
    let grid = dist.grid().clone();
    let p = disk_problem(1.5, 0.5, SourceSpec::constant(0.3));
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let noise: Vec<f64> = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let u = ScalarField::from_fn(grid.clone(), |k| noise[k]);
    let r = assemble_residual(&p, &u, &dist, 0.0).unwrap();
    let h = grid.h;
    let at = |k: usize, di, dj| u.get(grid.offset(k, di, dj).unwrap()).unwrap();
    for k in deep_nodes(&grid) {
        let c = u.get(k).unwrap();
        let lap = (at(k, 1, 0) + at(k, -1, 0) + at(k, 0, 1) + at(k, 0, -1) - 4.0 * c) / (h * h);
        let g = ((at(k, 1, 0) - at(k, -1, 0)) / (2.0 * h)).hypot((at(k, 0, 1) - at(k, 0, -1)) / (2.0 * h));
        let expect = -lap + g.powf(1.5) + 0.5 * c - 0.3;
        assert!((r.get(k).unwrap() - expect).abs() < 1e-9 * (1.0 + lap.abs()));
    }
}

fn jacobian_fd_error(disc: &Discretization, form: Form, vals: &[f64], rng: &mut ChaCha8Rng) -> f64 {
    let rows = disc.rows();
    let dir: Vec<f64> = rows.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
    let (trip, hits) = disc.jacobian(form, vals);
    assert_eq!(hits, 0, "state must avoid the regularized branch");
    let mut jv = vec![0.0; rows.len()];
    for &(r, c, v) in &trip {
        jv[r] += v * dir[c];
    }
    let scale = vals.iter().filter(|v| v.is_finite()).fold(0.0f64, |m, v| m.max(v.abs()));
    let t = 1e-6 * (1.0 + scale);
    let shifted = |s: f64| {
        let mut v = vals.to_vec();
        for (r, &k) in rows.iter().enumerate() {
            v[k] += s * dir[r];
        }
        disc.residual(form, &v)
    };
    let (plus, minus) = (shifted(t), shifted(-t));
    let fd: Vec<f64> = plus.iter().zip(&minus).map(|(a, b)| (a - b) / (2.0 * t)).collect();
    let num = fd.iter().zip(&jv).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let den = jv.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    num / den
}

#[test]
fn jacobian_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for norm in [NormSpec::Euclidean, ellipse_norm(), smoothed_lp()] {
        let dist = setup(norm.clone(), DomainSpec::disk(1.0), 24);
        let grid = dist.grid().clone();
        for q in [1.5, 2.0] {
            let p = ProblemSpec::new(norm.clone(), DomainSpec::disk(1.0), q, 1.0, SourceSpec::singular(0.5, 1.0, 1.0)).unwrap();
            let disc = Discretization::new(&p, &dist).unwrap();
            // A steep ramp keeps |∇u| far above the regularization threshold.
            let vals: Vec<f64> = (0..grid.len())
                .map(|k| {
                    let x = grid.point(k);
                    2.0 + 3.0 * x[0] + 2.0 * x[1] + 0.02 * rng.gen_range(-1.0..1.0)
                })
                .collect();
            let err = jacobian_fd_error(&disc, Form::Direct, &vals, &mut rng);
            assert!(err < 1e-5, "direct q={q} {norm}: {err}");
            let profile = Profile::for_problem(&p).unwrap();
            let form = Form::Profile { profile, offset: -1.0 };
            let w: Vec<f64> = vals.iter().map(|v| 0.5 + 0.1 * v).collect();
            let err = jacobian_fd_error(&disc, form, &w, &mut rng);
            assert!(err < 1e-5, "profile q={q} {norm}: {err}");
        }
    }
}

#[test]
fn zero_datum_solution_stays_between_constant_barriers() {
    let dist = setup(NormSpec::Euclidean, DomainSpec::disk(1.0), 48);
    let p = disk_problem(2.0, 1.0, SourceSpec::constant(1.0));
    let (u, report) = solve_truncated(&p, &dist, 0.0, None).unwrap();
    assert!(report.converged);
    for (k, v) in u.iter_defined() {
        if dist.grid().is_interior(k) {
            assert!((-1e-9..=1.0 + 1e-9).contains(&v), "{v}");
        }
    }
}

/// The two unknowns give different discrete schemes with the same limit.
#[test]
fn direct_and_profile_formulations_converge_together() {
    for q in [1.5, 2.0] {
        let gap = |res: usize| {
            let dist = setup(NormSpec::Euclidean, DomainSpec::disk(1.0), res);
            let p = disk_problem(q, 1.0, SourceSpec::constant(0.5));
            let a = Solver::new(&p, &dist).unwrap().solve(5.0, None).unwrap();
            let b = Solver::new(&p, &dist).unwrap().with_formulation(Formulation::Direct).solve(5.0, None).unwrap();
            (0..dist.grid().len())
                .filter(|&k| dist.grid().is_interior(k))
                .map(|k| (a.u.get(k).unwrap() - b.u.get(k).unwrap()).abs())
                .fold(0.0, f64::max)
        };
        let (coarse, fine) = (gap(24), gap(48));
        assert!(coarse < 1e-2 && fine < 0.5 * coarse, "q={q}: {coarse} -> {fine}");
    }
}

#[test]
fn solutions_increase_with_the_datum() {
    let dist = setup(NormSpec::Euclidean, DomainSpec::disk(1.0), 40);
    let p = disk_problem(1.5, 1.0, SourceSpec::constant(0.0));
    let (u10, _) = solve_truncated(&p, &dist, 10.0, None).unwrap();
    let (u20, _) = solve_truncated(&p, &dist, 20.0, Some(&u10)).unwrap();
    let tol = p.newton_tol();
    for k in 0..dist.grid().len() {
        if dist.grid().is_interior(k) {
            assert!(u10.get(k).unwrap() <= u20.get(k).unwrap() + tol);
        }
    }
}

#[test]
fn blowup_chain_is_monotone_for_both_exponents() {
    let dist = setup(NormSpec::Euclidean, DomainSpec::disk(1.0), 40);
    for q in [1.5, 2.0] {
        let p = disk_problem(q, 1.0, SourceSpec::constant(0.0));
        let run = solve_blowup(&p, &dist, &[10.0, 20.0, 40.0, f64::INFINITY], 0.0, 0.1).unwrap();
        assert_eq!(run.solutions.len(), 4);
        assert!(run.worst_violation() <= p.newton_tol(), "q={q}");
        assert!(run.limit().get(dist.deepest_node()).unwrap().is_finite());
    }
}

#[test]
fn comparison_orders_solutions_by_source() {
    let dist = setup(NormSpec::Euclidean, DomainSpec::disk(1.0), 40);
    let a = disk_problem(2.0, 1.0, SourceSpec::constant(0.0));
    let b = disk_problem(2.0, 1.0, SourceSpec::constant(1.0));
    let rep = comparison_check(&a, &b, &dist, 5.0).unwrap();
    assert!(rep.ordered, "{rep:?}");

    let same = comparison_check(&b, &b, &dist, 5.0).unwrap();
    assert!(same.sup_difference <= 2.0 * b.newton_tol());

    let smooth = disk_problem(1.5, 1.0, SourceSpec::constant(0.0));
    let critical = disk_problem(1.5, 1.0, SourceSpec::singular(0.0, 1.0, 3.0));
    // A small datum leaves the boundary layer of the critical source unresolved.
    let rep = comparison_check(&smooth, &critical, &dist, 50.0).unwrap();
    assert!(rep.ordered, "{rep:?}");
}

#[test]
fn different_initializations_reach_the_same_state() {
    let dist = setup(ellipse_norm(), DomainSpec::ellipse(1.0, 0.6), 40);
    let p = ProblemSpec::new(ellipse_norm(), DomainSpec::ellipse(1.0, 0.6), 1.5, 1.0, SourceSpec::constant(1.0)).unwrap();
    let solver = Solver::new(&p, &dist).unwrap();
    let a = solver.solve(8.0, None).unwrap();
    let high = ScalarField::from_fn(dist.grid().clone(), |_| 30.0);
    let b = solver.solve(8.0, Some(&high)).unwrap();
    let diff = a
        .u
        .iter_defined()
        .map(|(k, v)| (v - b.u.get(k).unwrap()).abs())
        .fold(0.0, f64::max);
    assert!(diff <= 10.0 * p.newton_tol(), "{diff}");
}

#[test]
fn guesses_above_the_constant_barrier_do_not_reach_spurious_roots() {
    // Unprojected, the constant 40 led the profile scheme to a root with u ≈ 74.
    let dist = setup(NormSpec::Euclidean, DomainSpec::disk(1.0), 40);
    let p = disk_problem(1.5, 1.0, SourceSpec::constant(1.0));
    let solver = Solver::new(&p, &dist).unwrap();
    let a = solver.solve(10.0, None).unwrap().u;
    let b = solver.solve(10.0, Some(&ScalarField::from_fn(dist.grid().clone(), |_| 40.0))).unwrap().u;
    for (k, v) in a.iter_defined() {
        assert!((v - b.get(k).unwrap()).abs() <= 10.0 * p.newton_tol());
        assert!(v <= 10.0 + p.newton_tol());
    }
}

#[test]
fn anisotropic_flat_start_converges_on_fine_grids() {
    let domain = DomainSpec::wulff(ellipse_norm(), 1.0);
    let dist = setup(ellipse_norm(), domain.clone(), 96);
    let p = ProblemSpec::new(ellipse_norm(), domain, 1.5, 1e-3, SourceSpec::constant(1.0)).unwrap();
    let (_, report) = solve_truncated(&p, &dist, 0.0, None).unwrap();
    assert!(report.converged && report.newton_iters <= 6, "{report:?}");
    let direct = Solver::new(&p, &dist).unwrap().with_formulation(Formulation::Direct);
    assert!(direct.solve(0.0, None).unwrap().report.newton_iters <= 6);
}

#[test]
fn solves_are_independent_of_worker_count() {
    let dist = setup(smoothed_lp(), DomainSpec::disk(1.0), 32);
    let p = ProblemSpec::new(smoothed_lp(), DomainSpec::disk(1.0), 1.5, 1.0, SourceSpec::constant(0.0)).unwrap();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| solve_truncated(&p, &dist, f64::INFINITY, None).unwrap().0)
    };
    let (a, b) = (run(1), run(4));
    assert_eq!(a.values.len(), b.values.len());
    for (x, y) in a.values.iter().zip(&b.values) {
        assert!(x.to_bits() == y.to_bits() || (x.is_nan() && y.is_nan()));
    }
}

#[test]
fn gradient_diagnostic_basics() {
    let dist = setup(NormSpec::Euclidean, DomainSpec::disk(1.0), 48);
    let p = disk_problem(1.5, 1.0, SourceSpec::constant(0.0));
    let flat = ScalarField::from_fn(dist.grid().clone(), |_| 2.0);
    let stats = gradient_diagnostic(&flat, &dist, &p);
    assert!(stats.count > 0);
    assert_eq!(stats.sup_scaled, 0.0);

    let (u, _) = solve_truncated(&p, &dist, f64::INFINITY, None).unwrap();
    let stats = gradient_diagnostic(&u, &dist, &p);
    assert!(stats.sup_scaled.is_finite() && stats.p95_scaled <= stats.sup_scaled);
    for w in stats.local_bounds.windows(2) {
        assert!(w[1].1 <= w[0].1 && w[1].1.is_finite());
    }
}

#[test]
fn wulff_domain_with_smoothed_norm_converges() {
    let domain = DomainSpec::wulff(smoothed_lp(), 1.0);
    let dist = setup(smoothed_lp(), domain.clone(), 40);
    let p = ProblemSpec::new(smoothed_lp(), domain, 2.0, 1.0, SourceSpec::singular(0.0, 0.5, 2.0)).unwrap();
    let (u, report) = solve_truncated(&p, &dist, f64::INFINITY, None).unwrap();
    assert!(report.converged && u.is_finite());
    let hist = &report.residual_history;
    assert!(hist.windows(2).all(|w| w[1] < w[0]));
}
