use std::f64::consts::PI;
use std::time::Instant;

use proptest::prelude::*;
use supertrace_core::spectral::*;
use supertrace_core::Error;

const N: usize = 4000;

fn dct_eigenvalue(n: usize, k: usize) -> f64 {
    let s = (k as f64 * PI / (2.0 * n as f64)).sin();
    4.0 * (n * n) as f64 * s * s
}

/// `Σ_{k≥0} e^{-π²k²t}` through the Poisson-summed Jacobi theta function.
fn neumann_theta(t: f64) -> f64 {
    let s: f64 = (1..20).map(|k| (-((k * k) as f64) / t).exp()).sum();
    0.5 / (PI * t).sqrt() * (1.0 + 2.0 * s) + 0.5
}

fn dilatons() -> Vec<DilatonProfile> {
    vec![DilatonProfile::zero(), "c1=1".parse().unwrap(), "c2=0.3".parse().unwrap()]
}

#[test]
fn free_spectra_are_discrete_cosines() {
    let n = 64;
    let p = SturmLiouvilleProblem::free(n, BoundaryCondition::Neumann).unwrap();
    let d = SturmLiouvilleProblem::free(n, BoundaryCondition::Dirichlet).unwrap();
    assert_eq!((p.dimension(), d.dimension()), (n + 1, n - 1));
    for (k, l) in eigenvalues(&p, n / 4).unwrap().iter().enumerate() {
        assert!((l - dct_eigenvalue(n, k)).abs() < 1e-9 * dct_eigenvalue(n, k).max(1.0), "k={k}");
    }
    for (k, l) in eigenvalues(&d, n / 4).unwrap().iter().enumerate() {
        assert!((l - dct_eigenvalue(n, k + 1)).abs() < 1e-9 * dct_eigenvalue(n, k + 1), "k={k}");
    }
}

#[test]
fn first_eigenvalues_approach_pi_squared() {
    let p = SturmLiouvilleProblem::free(N, BoundaryCondition::Neumann).unwrap();
    let d = SturmLiouvilleProblem::free(N, BoundaryCondition::Dirichlet).unwrap();
    let ln = eigenvalues(&p, 50).unwrap();
    let ld = eigenvalues(&d, 50).unwrap();
    assert!(ln[0].abs() < 1e-8);
    assert!((ln[1] - PI * PI).abs() < 1e-5);
    assert!((ld[0] - PI * PI).abs() < 1e-5);
    for l in [&ln, &ld] {
        assert!(l.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn neumann_heat_trace_matches_theta_function() {
    let p = SturmLiouvilleProblem::free(N, BoundaryCondition::Neumann).unwrap();
    let t = 0.1;
    let s = spectrum(&p, eigenvalue_budget(&p, t).unwrap(), None).unwrap();
    let tr = heat_trace(&s, t).unwrap();
    let discrete: f64 = (0..=N).map(|k| (-t * dct_eigenvalue(N, k)).exp()).sum();
    assert!((tr.value - discrete).abs() < 1e-8);
    assert!(tr.tail_bound < 1e-12);
    assert!((tr.value - neumann_theta(t)).abs() < 1e-7, "{} vs {}", tr.value, neumann_theta(t));
    let late = heat_trace(&s, 50.0).unwrap();
    assert!((late.value - 1.0).abs() < 1e-6);
}

#[test]
fn witten_supertrace_is_the_euler_number() {
    let times = geometric_grid(0.05, 0.5, 10).unwrap();
    for phi in dilatons() {
        let e = euler_supertrace(&phi, N, &times).unwrap();
        assert!(e.max_deviation < 1e-6, "{e:?}");
        assert!(e.ground_state.abs() < 1e-8, "{e:?}");
        assert!(e.tail_bound < 1e-10);
    }
}

#[test]
fn witten_pair_shares_nonzero_spectrum() {
    let (p0, p1) = build_problems(&"c1=1,c2=0.3".parse().unwrap(), 256).unwrap();
    let l0 = eigenvalues(&p0, 40).unwrap();
    let l1 = eigenvalues(&p1, 39).unwrap();
    assert!(l0[0].abs() < 1e-9);
    for (a, b) in l0[1..].iter().zip(&l1) {
        assert!((a - b).abs() < 1e-9 * b, "{a} {b}");
    }
}

#[test]
fn unsmeared_supertrace_fit() {
    for phi in dilatons() {
        let (p0, p1) = build_problems(&phi, N).unwrap();
        let grid = FREE_GRID;
        let s0 = spectrum(&p0, eigenvalue_budget(&p0, grid.t_min).unwrap(), None).unwrap();
        let s1 = spectrum(&p1, eigenvalue_budget(&p1, grid.t_min).unwrap(), None).unwrap();
        let series = HeatTraceSeries::sample(grid.times().unwrap(), |t| super_heat_trace(&s0, &s1, t)).unwrap();
        let fit = fit_asymptotics(&series, 1, grid.terms).unwrap();
        assert!(fit.coefficients[0].abs() < 1e-4, "{fit:?}");
        assert!((fit.coefficients[1] - 1.0).abs() < 1e-3, "{fit:?}");
    }
}

#[test]
fn free_neumann_coefficients() {
    let f = free_neumann_fit(N, FREE_GRID).unwrap();
    assert!((f.a0.expected - interval_volume_coefficient()).abs() < 1e-15);
    assert_eq!(f.a1.expected, 0.5);
    assert!(f.a0.abs_err() < 1e-4, "{:?}", f.a0);
    assert!(f.a1.abs_err() < 1e-3, "{:?}", f.a1);
    assert!(!f.fit.ill_conditioned);
    assert!(f.fit.max_residual < 1e-5);
}

#[test]
fn smeared_witten_half_coefficient() {
    let f = Polynomial(vec![1.0, 1.0, 0.5]);
    for phi in ["c1=1", "c2=0.3"] {
        let w = witten_fit(&phi.parse().unwrap(), &f, N, WITTEN_GRID).unwrap();
        assert!(w.half.rel_err() < 0.01, "{w:?}");
        assert!(w.zeroth.abs_err() < 1e-4, "{w:?}");
        assert!(!w.fit.ill_conditioned);
    }
}

#[test]
fn smeared_targets_from_local_formulas() {
    // With φ = 0 the pair is Neumann minus Dirichlet: the interior cancels and
    // each end contributes f/2 at order one.
    let f = Polynomial(vec![1.0, 1.0, 0.5]);
    let zero = DilatonProfile::zero();
    assert!(witten_supertrace_coefficient(0, &zero, &f).unwrap().abs() < 1e-14);
    let a1 = witten_supertrace_coefficient(1, &zero, &f).unwrap();
    assert!((a1 - 0.5 * (f.eval(0.0) + f.eval(1.0))).abs() < 1e-12);
}

#[test]
fn conformal_variation() {
    let f = Polynomial(vec![0.0, 1.0, -4.0, 6.0, -4.0, 1.0]);
    let c = conformal_variation_check(&f, 2, N, &CONFORMAL_STEPS, CONFORMAL_GRID).unwrap();
    assert!((c.expected + 0.25 / PI.sqrt()).abs() < 1e-10, "{c:?}");
    assert!(c.rel_err() < 0.01, "{c:?}");
    assert!(c.step_spread < 0.01, "{c:?}");
    assert!(c.residual < 1e-3, "{c:?}");
}

#[test]
fn constant_conformal_factor_rescales_time() {
    let one = Polynomial(vec![1.0]);
    let c = conformal_variation_check(&one, 0, N, &[1e-3], CONFORMAL_GRID).unwrap();
    assert!(c.rel_err() < 1e-4, "{c:?}");
    let c = conformal_variation_check(&one, 1, N, &[1e-3], CONFORMAL_GRID).unwrap();
    assert_eq!(c.expected, 0.0);
    assert!(c.actual().abs() < 1e-3, "{c:?}");
}

#[test]
fn potential_variation() {
    let g = Polynomial(vec![1.0, 0.0, 1.0]);
    let s = potential_variation_check(&g, 4, N, SCALAR_STEP, SCALAR_GRID).unwrap();
    assert!((s.expected + 0.5 / PI.sqrt()).abs() < 1e-10, "{s:?}");
    assert!(s.rel_err() < 0.01, "{s:?}");
    assert!(s.residual < 1e-6, "{s:?}");
}

#[test]
fn rejects_bad_requests() {
    let p = SturmLiouvilleProblem::free(64, BoundaryCondition::Neumann).unwrap();
    assert!(matches!(eigenvalues(&p, 17), Err(Error::Argument(_))));
    let s = spectrum(&p, 16, None).unwrap();
    assert!(heat_trace(&s, 0.0).is_err());
    assert!(heat_trace(&s, -1.0).is_err());
    assert!(eigenvalue_budget(&p, 0.0).is_err());
    let series = HeatTraceSeries::new(vec![0.1, 0.2, 0.3], vec![1.0, 1.0, 1.0]).unwrap();
    assert!(fit_asymptotics(&series, 1, 2).is_err());
    assert!(HeatTraceSeries::new(vec![0.2, 0.1], vec![1.0, 1.0]).is_err());
    assert!(SturmLiouvilleProblem::free(8, BoundaryCondition::Neumann).is_err());
    assert!(geometric_grid(0.1, 0.05, 4).is_err());
    let f = Polynomial(vec![1.0]);
    assert!(potential_variation_check(&f, 1, 64, 1e-3, SCALAR_GRID).is_err());
    assert!(conformal_variation_check(&f, 6, 64, &[1e-3], CONFORMAL_GRID).is_err());
}

#[test]
fn robin_condition_shifts_the_ground_state() {
    // -u'' with (∂_n + s) u = 0 at both ends: the ground state solves
    // k tan(k/2) = -s, so for small s > 0 the eigenvalue is negative ≈ -2s.
    let s = 1e-3;
    let p = SturmLiouvilleProblem::new(N, &|_| 0.0, BoundaryCondition::Robin(s), BoundaryCondition::Robin(s), None).unwrap();
    let l = eigenvalues(&p, 1).unwrap()[0];
    assert!((l + 2.0 * s).abs() < 1e-5, "{l}");
}

#[test]
fn spectral_checks_fit_the_time_budget() {
    let start = Instant::now();
    free_neumann_fit(N, FREE_GRID).unwrap();
    euler_supertrace(&"c1=1".parse().unwrap(), N, &geometric_grid(0.05, 0.5, 10).unwrap()).unwrap();
    witten_fit(&"c1=1".parse().unwrap(), &Polynomial(vec![1.0, 1.0, 0.5]), N, WITTEN_GRID).unwrap();
    conformal_variation_check(&Polynomial(vec![0.0, 1.0, -4.0, 6.0, -4.0, 1.0]), 2, N, &CONFORMAL_STEPS, CONFORMAL_GRID).unwrap();
    potential_variation_check(&Polynomial(vec![1.0, 0.0, 1.0]), 4, N, SCALAR_STEP, SCALAR_GRID).unwrap();
    assert!(start.elapsed().as_secs_f64() < 30.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn heat_traces_decrease_in_time(c1 in -1.0f64..1.0, c3 in -0.5f64..0.5, t in 0.01f64..1.0) {
        let phi = DilatonProfile::new(&[(1, c1), (3, c3)]).unwrap();
        let (p0, _) = build_problems(&phi, 128).unwrap();
        let s = spectrum(&p0, 32, None).unwrap();
        let a = heat_trace(&s, t).unwrap().value;
        let b = heat_trace(&s, 1.5 * t).unwrap().value;
        prop_assert!(a > b && b > 0.0);
    }

    #[test]
    fn sturm_count_brackets_eigenvalues(c1 in -2.0f64..2.0, k in 0usize..16) {
        let phi = DilatonProfile::new(&[(1, c1)]).unwrap();
        let (_, p1) = build_problems(&phi, 64).unwrap();
        let l = p1.matrix.eigenvalue(k).unwrap();
        prop_assert!(p1.matrix.count_below(l * (1.0 - 1e-9) - 1e-12) <= k);
        prop_assert!(p1.matrix.count_below(l * (1.0 + 1e-9) + 1e-12) > k);
    }

    #[test]
    fn profile_display_round_trips(c1 in -3.0f64..3.0, c2 in -3.0f64..3.0) {
        let p = DilatonProfile::new(&[(2, c2), (1, c1)]).unwrap();
        let q: DilatonProfile = p.to_string().parse().unwrap();
        prop_assert_eq!(p, q);
    }
}
