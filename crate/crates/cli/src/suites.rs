//! The suite table and the suites themselves.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use supertrace_core::contraction::{epsilon_contract, f_expression, interior_expression, BoundaryJet, CurvatureTensor, Tensor, TensorAssignment};
use supertrace_core::geometry::{disk_boundary, gauss_bonnet, gauss_bonnet_suite, signed_product, sphere_curvature, warped_product_jets};
use supertrace_core::heat::{crosscheck_closed_form, tangential_shape_operator, weitzenbock_term};
use supertrace_core::invariance::{
    enumerate_pairings, enumerate_theta, kernel_dimension, orthogonal_invariance_residual, span_rank, Functional, KernelCertificate,
};
use supertrace_core::special::{factorial, random_orthogonal};
use supertrace_core::spectral::{
    conformal_variation_check, euler_supertrace, free_neumann_fit, geometric_grid, potential_variation_check, witten_fit, DilatonProfile,
    Polynomial, CONFORMAL_GRID, CONFORMAL_STEPS, SCALAR_GRID, SCALAR_STEP, WITTEN_GRID,
};
use supertrace_core::{clifford_op, graded_tensor_product, interior_op, wedge_op, ExteriorOperator};

use crate::report::{canonical_order, Expected, Policy, VerificationReport};
use crate::{Config, LabError};

/// Reports of one or more suites plus free-form tables for text output.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SuiteOutput {
    pub reports: Vec<VerificationReport>,
    pub tables: Vec<String>,
}

pub struct Suite {
    pub name: &'static str,
    pub description: &'static str,
    pub run: fn(&Config) -> Result<SuiteOutput, LabError>,
}

pub const SUITES: &[Suite] = &[
    Suite {
        name: "algebra",
        description: "exterior and Clifford algebra relations",
        run: algebra,
    },
    Suite {
        name: "contraction",
        description: "epsilon contractions on spheres and disks",
        run: contraction,
    },
    Suite {
        name: "gauss-bonnet",
        description: "Euler characteristics from index densities",
        run: gauss_bonnet_cases,
    },
    Suite {
        name: "heat-crosscheck",
        description: "heat-coefficient engine against closed-form densities",
        run: heat_crosscheck,
    },
    Suite {
        name: "invariance",
        description: "pairing ranks and restriction kernels",
        run: invariance,
    },
    Suite {
        name: "spectral",
        description: "heat traces on the interval",
        run: spectral,
    },
];

/// Runs one suite, or every suite concurrently for `all`.
pub fn run_suite(name: &str, cfg: &Config) -> Result<SuiteOutput, LabError> {
    let selected: Vec<&Suite> = if name == "all" {
        SUITES.iter().collect()
    } else {
        let s = SUITES.iter().find(|s| s.name == name).ok_or_else(|| {
            let names: Vec<&str> = SUITES.iter().map(|s| s.name).collect();
            LabError::Usage(format!("unknown suite '{name}', expected one of {} or all", names.join(", ")))
        })?;
        vec![s]
    };
    if !(cfg.tolerance_scale.is_finite() && cfg.tolerance_scale >= 0.0) {
        return Err(LabError::Usage("tolerance scale must be finite and non-negative".into()));
    }
    let outputs: Vec<SuiteOutput> = selected.par_iter().map(|s| (s.run)(cfg)).collect::<Result<_, _>>()?;
    let mut out = SuiteOutput::default();
    for o in outputs {
        out.reports.extend(o.reports);
        out.tables.extend(o.tables);
    }
    canonical_order(&mut out.reports);
    Ok(out)
}

/// Builds reports for one suite, stamping runtimes when requested.
struct Recorder<'a> {
    suite: &'static str,
    cfg: &'a Config,
    reports: Vec<VerificationReport>,
    started: Instant,
}

impl<'a> Recorder<'a> {
    fn new(suite: &'static str, cfg: &'a Config) -> Self {
        Self {
            suite,
            cfg,
            reports: Vec::new(),
            started: Instant::now(),
        }
    }

    /// Restarts the clock for the next group of cases.
    fn lap(&mut self) {
        self.started = Instant::now();
    }

    fn push(&mut self, case: impl Into<String>, expected: impl Into<Expected>, actual: f64, tolerance: f64, policy: Policy) {
        let ms = if self.cfg.timings { self.started.elapsed().as_millis() as u64 } else { 0 };
        let r = VerificationReport::new(self.suite, case, expected, actual, self.cfg.tolerance(tolerance), policy, self.cfg.seed);
        self.reports.push(r.with_runtime(ms));
    }

    fn finish(self, tables: Vec<String>) -> SuiteOutput {
        SuiteOutput {
            reports: self.reports,
            tables,
        }
    }
}

fn algebra(cfg: &Config) -> Result<SuiteOutput, LabError> {
    let mut rec = Recorder::new("algebra", cfg);
    for m in 1..=6 {
        rec.lap();
        let id = ExteriorOperator::identity(m)?;
        let zero = ExteriorOperator::zeros(m)?;
        let (mut anti, mut nil, mut cliff) = (0.0f64, 0.0f64, 0.0f64);
        for i in 0..m {
            let (ei, ii, gi) = (wedge_op(i, m)?, interior_op(i, m)?, clifford_op(i, m)?);
            for j in 0..m {
                let (ej, ij, gj) = (wedge_op(j, m)?, interior_op(j, m)?, clifford_op(j, m)?);
                let delta = if i == j { &id } else { &zero };
                anti = anti.max(ei.anticommutator(&ij).max_abs_diff(delta));
                nil = nil.max(ei.anticommutator(&ej).max_abs_diff(&zero));
                nil = nil.max(ii.anticommutator(&ij).max_abs_diff(&zero));
                cliff = cliff.max(gi.anticommutator(&gj).max_abs_diff(&delta.scale(-2.0)));
            }
        }
        rec.push(format!("anticommutation/m={m}"), 0, anti, 0.0, Policy::Absolute);
        rec.push(format!("nilpotency/m={m}"), 0, nil, 0.0, Policy::Absolute);
        rec.push(format!("clifford/m={m}"), 0, cliff, 0.0, Policy::Absolute);
        rec.push(format!("supertrace-identity/m={m}"), 0, id.supertrace(), 0.0, Policy::Absolute);
        if m > 1 {
            let mut graded = 0.0f64;
            for split in 1..m {
                let left = ExteriorOperator::identity(split)?;
                for j in 0..m - split {
                    let lifted = graded_tensor_product(&left, &wedge_op(j, m - split)?)?;
                    graded = graded.max(lifted.max_abs_diff(&wedge_op(split + j, m)?));
                }
            }
            rec.push(format!("graded-product/m={m}"), 0, graded, 0.0, Policy::Absolute);
        }
    }
    Ok(rec.finish(Vec::new()))
}

fn contraction(cfg: &Config) -> Result<SuiteOutput, LabError> {
    let mut rec = Recorder::new("contraction", cfg);
    for mbar in 1..=3usize {
        rec.lap();
        let m = 2 * mbar;
        let data = TensorAssignment::new().with_curvature(&sphere_curvature(m, 1.0)?);
        let got = epsilon_contract(&interior_expression(m)?, &data)?;
        let want = (1i64 << mbar) * factorial(m) as i64;
        rec.push(format!("sphere/S{m}"), want, got, 1e-10, Policy::Absolute);
    }
    for m in 2..=7 {
        rec.lap();
        let data = TensorAssignment::new().with_boundary(&disk_boundary(m)?);
        let got = epsilon_contract(&f_expression(m, 0)?, &data)?;
        rec.push(format!("disk/D{m}"), factorial(m - 1) as i64, got, 1e-10, Policy::Absolute);
    }
    Ok(rec.finish(Vec::new()))
}

fn gauss_bonnet_cases(cfg: &Config) -> Result<SuiteOutput, LabError> {
    let mut rec = Recorder::new("gauss-bonnet", cfg);
    for (name, g, chi) in gauss_bonnet_suite() {
        rec.lap();
        let got = gauss_bonnet(&g)?;
        rec.push(name, chi, got, 1e-8, Policy::Absolute);
    }
    if let Some(spec) = &cfg.geometry {
        rec.lap();
        let got = gauss_bonnet(&spec.build()?)?;
        rec.push(format!("custom/{spec}"), spec.euler_characteristic(), got, 1e-8, Policy::Absolute);
    }
    Ok(rec.finish(Vec::new()))
}

const CROSSCHECK_TRIALS: usize = 200;
const SHAPE_SAMPLES: usize = 100;

fn heat_crosscheck(cfg: &Config) -> Result<SuiteOutput, LabError> {
    let mut rec = Recorder::new("heat-crosscheck", cfg);
    for m in 1..=2 {
        rec.lap();
        let report = crosscheck_closed_form(m, CROSSCHECK_TRIALS, cfg.seed)?;
        for line in &report.lines {
            rec.push(format!("closed-form/m={m}/{}", line.name), 0, line.max_abs_error, 1e-10, Policy::Absolute);
        }
        for line in &report.cancellations {
            rec.push(format!("cancel/m={m}/{}", line.name), 0, line.max_abs_error, 1e-10, Policy::Absolute);
        }
    }

    // str(S^{dim}) for the boundary shape operator of a graph with Hessian
    // eigenvalues A, in a random frame; the worst sample is reported.
    for dim in 1..=10usize {
        rec.lap();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(dim as u64);
        let mut worst: Option<(f64, f64, f64)> = None;
        for _ in 0..SHAPE_SAMPLES {
            let a: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
            let q = random_orthogonal(dim, &mut rng);
            let l = Tensor::from_fn(&[dim, dim], |x| (0..dim).map(|k| -a[k] * q[(x[0], k)] * q[(x[1], k)]).sum());
            let bj = BoundaryJet::new(l, CurvatureTensor::zeros(dim + 1))?;
            let got = tangential_shape_operator(&bj)?.supertrace_of_power(dim)?;
            let want = factorial(dim) * signed_product(&a);
            let rel = (got - want).abs() / want.abs();
            if worst.is_none_or(|w| rel > w.0) {
                worst = Some((rel, want, got));
            }
        }
        let (_, want, got) = worst.expect("at least one sample");
        rec.push(format!("shape-supertrace/dim={dim:02}"), want, got, 1e-12, Policy::Relative);
    }

    // Normal derivative of E on the warped plane, alone and tensored with
    // powers of the shape operator of the remaining directions.
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for m in 3..=7usize {
        rec.lap();
        let a0 = rng.random_range(-2.0..2.0);
        let a: Vec<f64> = (0..m - 3).map(|_| rng.random_range(-2.0..2.0)).collect();
        let bj = warped_product_jets(a0, m, &a)?;
        let r = bj.curvature();
        let mut jets = [[[[0.0; 2]; 2]; 2]; 2];
        for (i, ji) in jets.iter_mut().enumerate() {
            for (j, jj) in ji.iter_mut().enumerate() {
                for (k, jk) in jj.iter_mut().enumerate() {
                    for (l, v) in jk.iter_mut().enumerate() {
                        *v = r.jet(i, j, k, l, m - 1).ok_or_else(|| supertrace_core::Error::Evaluation("warped jets lack curvature derivatives".into()))?;
                    }
                }
            }
        }
        let e_m = weitzenbock_term(&|i, j, k, l| jets[i][j][k][l], 2)?;
        if m == 3 {
            rec.push("e-normal-jet/plane", 2.0 * a0, e_m.supertrace(), 1e-12, Policy::Either);
        }
        let neg: Vec<f64> = a.iter().map(|x| -x).collect();
        let s = tangential_shape_operator(&BoundaryJet::diagonal(&neg))?.pow(m - 3);
        let got = graded_tensor_product(&e_m, &s)?.supertrace();
        let want = 2.0 * a0 * factorial(m - 3) * signed_product(&a);
        rec.push(format!("e-normal-jet/m={m}"), want, got, 1e-12, Policy::Either);
    }
    Ok(rec.finish(Vec::new()))
}

fn double_factorial(n: i64) -> i64 {
    (1..=n).rev().step_by(2).product()
}

fn invariance(cfg: &Config) -> Result<SuiteOutput, LabError> {
    let mut rec = Recorder::new("invariance", cfg);
    for k in (0..=8usize).step_by(2) {
        rec.lap();
        let n = enumerate_pairings(k)?.len();
        rec.push(format!("pairings/k={k}"), double_factorial(k as i64 - 1), n as f64, 0.0, Policy::Absolute);
    }
    let four: Vec<Functional> = enumerate_pairings(4)?.into_iter().map(Functional::from).collect();
    for m in 1..=4usize {
        rec.lap();
        let r = span_rank(&four, m, 2 * four.len() + 16, cfg.seed)?;
        rec.push(format!("span-rank/k=4,m={m}"), if m == 1 { 1 } else { 3 }, r as f64, 0.0, Policy::Absolute);
    }
    let mut certs: Vec<KernelCertificate> = Vec::new();
    for k in (2..=8usize).step_by(2) {
        for m in 1..=4usize {
            rec.lap();
            let c = kernel_dimension(k, m, cfg.seed)?;
            // Below 2m no Θ invariant survives restriction, so the kernel is trivial.
            let want = if (k, m) == (4, 2) {
                2
            } else if k < 2 * m {
                0
            } else {
                c.theta_rank as i64
            };
            rec.push(format!("kernel/k={k},m={m}"), want, c.dim_kernel as f64, 0.0, Policy::Absolute);
            rec.push(format!("theta-certified/k={k},m={m}"), 1, if c.certified { 1.0 } else { 0.0 }, 0.0, Policy::Absolute);
            certs.push(c);
        }
    }
    for m in 1..=4usize {
        rec.lap();
        let mut fs: Vec<Functional> = enumerate_pairings(6)?.into_iter().map(Functional::from).collect();
        fs.extend(enumerate_theta(6, m.min(3))?.into_iter().map(Functional::from));
        let r = orthogonal_invariance_residual(&fs, m, 20, cfg.seed)?;
        rec.push(format!("orthogonal-invariance/m={m}"), 0, r, 1e-10, Policy::Absolute);
    }
    Ok(rec.finish(vec![kernel_table(&certs)]))
}

/// `(k, m, #pairings, rank, dim ker r, theta_certified)` as aligned text.
pub fn kernel_table(certs: &[KernelCertificate]) -> String {
    let mut s = format!("{:>3} {:>3} {:>10} {:>6} {:>11} {:>16}\n", "k", "m", "#pairings", "rank", "dim ker r", "theta_certified");
    for c in certs {
        s.push_str(&format!(
            "{:>3} {:>3} {:>10} {:>6} {:>11} {:>16}\n",
            c.k, c.m, c.pairings, c.rank, c.dim_kernel, c.certified
        ));
    }
    s
}

/// `1 + x + x²/2`
fn witten_smearing() -> Polynomial {
    Polynomial(vec![1.0, 1.0, 0.5])
}

/// `x (1 - x)⁴`
fn conformal_factor() -> Polynomial {
    Polynomial(vec![0.0, 1.0, -4.0, 6.0, -4.0, 1.0])
}

/// `1 + x²`
fn scalar_potential() -> Polynomial {
    Polynomial(vec![1.0, 0.0, 1.0])
}

fn spectral(cfg: &Config) -> Result<SuiteOutput, LabError> {
    let mut rec = Recorder::new("spectral", cfg);
    let n = cfg.grid;
    let phis: Vec<DilatonProfile> = match &cfg.phi {
        Some(p) => vec![p.clone()],
        None => vec![DilatonProfile::zero(), "c1=1".parse()?, "c2=0.3".parse()?],
    };

    let free = free_neumann_fit(n, cfg.free_grid)?;
    rec.push("free/a0", free.a0.expected, free.a0.actual, 1e-4, Policy::Absolute);
    rec.push("free/a1", free.a1.expected, free.a1.actual, 1e-3, Policy::Absolute);

    let times = geometric_grid(0.05, 0.5, 10)?;
    for phi in &phis {
        rec.lap();
        let e = euler_supertrace(phi, n, &times)?;
        rec.push(format!("euler/phi={phi}"), 1, 1.0 + e.max_deviation, 1e-6, Policy::Absolute);
    }
    for phi in &phis {
        rec.lap();
        let w = witten_fit(phi, &witten_smearing(), n, WITTEN_GRID)?;
        rec.push(format!("witten-half/phi={phi}"), w.half.expected, w.half.actual, 1e-2, Policy::Relative);
    }

    rec.lap();
    let c = conformal_variation_check(&conformal_factor(), 2, n, &CONFORMAL_STEPS, CONFORMAL_GRID)?;
    rec.push("conformal/n=2", c.expected, c.actual(), 1e-2, Policy::Relative);

    rec.lap();
    let s = potential_variation_check(&scalar_potential(), 4, n, SCALAR_STEP, SCALAR_GRID)?;
    rec.push("scalar/n=4", s.expected, s.actual(), 1e-2, Policy::Relative);
    Ok(rec.finish(Vec::new()))
}
