//! Numerical experiments on `[0, 1]` compared with the local heat coefficients.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::problem::{build_problems, BoundaryCondition, DilatonProfile, SturmLiouvilleProblem};
use super::trace::{eigenvalue_budget, fit_asymptotics, geometric_grid, heat_trace, spectrum, super_heat_trace, AsymptoticFit, HeatTraceSeries};
use crate::contraction::{BoundaryJet, CurvatureTensor, DilatonJet, Tensor};
use crate::error::{argument, Result};
use crate::heat::{a_n_density, absolute_boundary, witten_structure, BoundaryOperators, LaplaceTypeStructure, SmearingJet, TraceKind};

/// Polynomial smearing function `Σ c_i x^i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial(pub Vec<f64>);

impl Polynomial {
    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Polynomial(self.0.iter().enumerate().skip(1).map(|(i, c)| i as f64 * c).collect())
    }

    /// Jet at an endpoint of `[0, 1]`, differentiated along the inward normal.
    pub fn boundary_jet(&self, end: End) -> SmearingJet {
        let (x, sign) = end.position();
        let d1 = self.derivative();
        SmearingJet {
            f: self.eval(x),
            f_m: sign * d1.eval(x),
            f_mm: d1.derivative().eval(x),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum End {
    Left,
    Right,
}

impl End {
    /// Position and orientation of the inward normal.
    fn position(self) -> (f64, f64) {
        match self {
            End::Left => (0.0, 1.0),
            End::Right => (1.0, -1.0),
        }
    }
}

/// Time grid and number of fitted terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    pub terms: usize,
}

impl FitGrid {
    pub const fn new(t_min: f64, t_max: f64, terms: usize) -> Self {
        Self {
            t_min,
            t_max,
            points: 16,
            terms,
        }
    }

    pub fn times(&self) -> Result<Vec<f64>> {
        geometric_grid(self.t_min, self.t_max, self.points)
    }
}

/// Grid for the free Neumann coefficients.
pub const FREE_GRID: FitGrid = FitGrid::new(0.005, 0.08, 4);
/// Grid for the smeared Witten supertrace.
pub const WITTEN_GRID: FitGrid = FitGrid::new(0.0005, 0.01, 7);
/// Grid for the conformal variation.
pub const CONFORMAL_GRID: FitGrid = FitGrid::new(0.002, 0.04, 6);
/// Grid for the scalar variation.
pub const SCALAR_GRID: FitGrid = FitGrid::new(0.001, 0.02, 6);

/// Conformal variation steps.
pub const CONFORMAL_STEPS: [f64; 2] = [1e-3, 5e-4];
/// Scalar variation step.
pub const SCALAR_STEP: f64 = 1e-3;

/// Composite Simpson rule on `[0, 1]`.
fn simpson(f: impl Fn(f64) -> f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2;
    let h = 1.0 / n as f64;
    let mut s = f(0.0) + f(1.0);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    s * h / 3.0
}

fn neumann_operators() -> BoundaryOperators {
    BoundaryOperators {
        chi: DMatrix::identity(1, 1),
        s: DMatrix::zeros(1, 1),
        chi_tangential: Vec::new(),
        l_aa: 0.0,
        l_ab_l_ab: 0.0,
        r_amam: 0.0,
    }
}

fn scalar_structure() -> LaplaceTypeStructure {
    LaplaceTypeStructure::new(1, DMatrix::zeros(1, 1), 0.0)
}

/// `a_n(f, -∂²)` on `[0, 1]` with Neumann ends, from the local formulas.
pub fn neumann_coefficient(n: usize, f: &Polynomial) -> Result<f64> {
    let st = scalar_structure();
    let bo = neumann_operators();
    let d = a_n_density(n, &st, Some(&bo), TraceKind::Trace)?;
    let interior = d.interior() * simpson(|x| f.eval(x), 2000);
    let boundary: f64 = [End::Left, End::Right].iter().map(|&e| d.evaluate(&SmearingJet::default(), &f.boundary_jet(e)).1).sum();
    Ok(interior + boundary)
}

fn dilaton_jet(phi: &DilatonProfile, x: f64, normal_sign: f64) -> Result<DilatonJet> {
    DilatonJet::new(vec![normal_sign * phi.d1(x)], Tensor::from_vec(&[1, 1], vec![phi.d2(x)])?)
}

/// `a_n^{str}(f)` for the Witten complex on `[0, 1]` with absolute boundary
/// conditions, from the local formulas.
pub fn witten_supertrace_coefficient(n: usize, phi: &DilatonProfile, f: &Polynomial) -> Result<f64> {
    let flat = CurvatureTensor::zeros(1);
    let bo = absolute_boundary(&BoundaryJet::diagonal(&[]))?;
    let h = 1.0 / 2000.0;
    let samples: Vec<f64> = (0..=2000)
        .map(|i| {
            let x = i as f64 * h;
            let st = witten_structure(&flat, &dilaton_jet(phi, x, 1.0)?)?;
            Ok(f.eval(x) * a_n_density(n, &st, None, TraceKind::Supertrace)?.interior())
        })
        .collect::<Result<_>>()?;
    let interior = simpson(|x| samples[(x / h).round() as usize], 2000);
    let mut boundary = 0.0;
    for end in [End::Left, End::Right] {
        let (x, sign) = end.position();
        let st = witten_structure(&flat, &dilaton_jet(phi, x, sign)?)?;
        let d = a_n_density(n, &st, Some(&bo), TraceKind::Supertrace)?;
        boundary += d.evaluate(&SmearingJet::default(), &f.boundary_jet(end)).1;
    }
    Ok(interior + boundary)
}

/// A fitted coefficient against its local-formula value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientCheck {
    pub expected: f64,
    pub actual: f64,
    pub uncertainty: f64,
    pub condition: f64,
}

impl CoefficientCheck {
    fn from_fit(fit: &AsymptoticFit, index: usize, expected: f64) -> Self {
        Self {
            expected,
            actual: fit.coefficients[index],
            uncertainty: fit.uncertainties[index],
            condition: fit.condition,
        }
    }

    pub fn abs_err(&self) -> f64 {
        (self.actual - self.expected).abs()
    }

    pub fn rel_err(&self) -> f64 {
        self.abs_err() / self.expected.abs().max(f64::MIN_POSITIVE)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeFit {
    pub a0: CoefficientCheck,
    pub a1: CoefficientCheck,
    pub fit: AsymptoticFit,
}

/// Fits `Tr e^{-tΔ}` of the free Neumann Laplacian.
pub fn free_neumann_fit(n: usize, grid: FitGrid) -> Result<FreeFit> {
    let p = SturmLiouvilleProblem::free(n, BoundaryCondition::Neumann)?;
    let s = spectrum(&p, eigenvalue_budget(&p, grid.t_min)?, None)?;
    let series = HeatTraceSeries::sample(grid.times()?, |t| heat_trace(&s, t))?;
    let fit = fit_asymptotics(&series, 1, grid.terms)?;
    if grid.terms < 2 {
        return Err(argument("the free fit needs at least two terms"));
    }
    let one = Polynomial(vec![1.0]);
    Ok(FreeFit {
        a0: CoefficientCheck::from_fit(&fit, 0, neumann_coefficient(0, &one)?),
        a1: CoefficientCheck::from_fit(&fit, 1, neumann_coefficient(1, &one)?),
        fit,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EulerCheck {
    pub phi: String,
    /// `max_t |Str e^{-tΔ} - 1|`
    pub max_deviation: f64,
    pub tail_bound: f64,
    /// Lowest eigenvalue of the Witten Laplacian on functions.
    pub ground_state: f64,
}

/// Supertrace of the Witten complex at the given times.
pub fn euler_supertrace(phi: &DilatonProfile, n: usize, times: &[f64]) -> Result<EulerCheck> {
    let t_min = times.iter().copied().fold(f64::INFINITY, f64::min);
    let (p0, p1) = build_problems(phi, n)?;
    let s0 = spectrum(&p0, eigenvalue_budget(&p0, t_min)?, None)?;
    let s1 = spectrum(&p1, eigenvalue_budget(&p1, t_min)?, None)?;
    let mut max_deviation = 0.0f64;
    let mut tail_bound = 0.0f64;
    for &t in times {
        let v = super_heat_trace(&s0, &s1, t)?;
        max_deviation = max_deviation.max((v.value - 1.0).abs());
        tail_bound = tail_bound.max(v.tail_bound);
    }
    Ok(EulerCheck {
        phi: phi.to_string(),
        max_deviation,
        tail_bound,
        ground_state: s0.eigenvalues[0],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WittenFit {
    pub phi: String,
    /// Coefficient of `t^{1/2}` in the smeared supertrace.
    pub half: CoefficientCheck,
    /// Coefficient of `t^0`.
    pub zeroth: CoefficientCheck,
    pub fit: AsymptoticFit,
}

/// Fits the smeared supertrace `Tr_0(f e^{-tΔ_0}) - Tr_1(f e^{-tΔ_1})`.
pub fn witten_fit(phi: &DilatonProfile, f: &Polynomial, n: usize, grid: FitGrid) -> Result<WittenFit> {
    if grid.terms < 3 {
        return Err(argument("the smeared supertrace fit needs at least three terms"));
    }
    let (p0, p1) = build_problems(phi, n)?;
    let fx = |x: f64| f.eval(x);
    let s0 = spectrum(&p0, eigenvalue_budget(&p0, grid.t_min)?, Some(&fx))?;
    let s1 = spectrum(&p1, eigenvalue_budget(&p1, grid.t_min)?, Some(&fx))?;
    let series = HeatTraceSeries::sample(grid.times()?, |t| super_heat_trace(&s0, &s1, t))?;
    let fit = fit_asymptotics(&series, 1, grid.terms)?;
    Ok(WittenFit {
        phi: phi.to_string(),
        half: CoefficientCheck::from_fit(&fit, 2, witten_supertrace_coefficient(2, phi, f)?),
        zeroth: CoefficientCheck::from_fit(&fit, 1, witten_supertrace_coefficient(1, phi, f)?),
        fit,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationCheck {
    /// Local-formula value of the derivative.
    pub expected: f64,
    /// `(step, centered difference of the fitted coefficient)`.
    pub slopes: Vec<(f64, f64)>,
    /// Largest relative disagreement between the slopes.
    pub step_spread: f64,
    /// Further consistency measure specific to the experiment.
    pub residual: f64,
}

impl VariationCheck {
    /// Slope at the smallest step.
    pub fn actual(&self) -> f64 {
        self.slopes.last().map_or(f64::NAN, |s| s.1)
    }

    pub fn rel_err(&self) -> f64 {
        (self.actual() - self.expected).abs() / self.expected.abs().max(f64::MIN_POSITIVE)
    }
}

fn fitted(p: &SturmLiouvilleProblem, grid: FitGrid) -> Result<Vec<f64>> {
    let s = spectrum(p, eigenvalue_budget(p, grid.t_min)?, None)?;
    let series = HeatTraceSeries::sample(grid.times()?, |t| heat_trace(&s, t))?;
    Ok(fit_asymptotics(&series, 1, grid.terms)?.coefficients)
}

fn spread(slopes: &[(f64, f64)]) -> f64 {
    let lo = slopes.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    let hi = slopes.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    (hi - lo) / lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE)
}

/// `∂_ε a_n(1, e^{-2εf} D)` at `ε = 0` against `(1 - n) a_n(f, D)` for the
/// Neumann Laplacian on `[0, 1]`.
///
/// `residual` is `|∂_ε a_0 - a_0(f, D)| / |a_0(f, D)|` at the smallest step,
/// the same identity for `n = 0`.
pub fn conformal_variation_check(f: &Polynomial, order: usize, n: usize, steps: &[f64], grid: FitGrid) -> Result<VariationCheck> {
    if order >= grid.terms || steps.is_empty() {
        return Err(argument("the fit must contain the varied coefficient and at least one step is needed"));
    }
    let problem = |eps: f64| {
        let w = move |x: f64| (2.0 * eps * f.eval(x)).exp();
        SturmLiouvilleProblem::new(n, &|_| 0.0, BoundaryCondition::Neumann, BoundaryCondition::Neumann, Some(&w))
    };
    let mut slopes = Vec::new();
    let mut a0_slope = 0.0;
    for &eps in steps {
        let hi = fitted(&problem(eps)?, grid)?;
        let lo = fitted(&problem(-eps)?, grid)?;
        slopes.push((eps, (hi[order] - lo[order]) / (2.0 * eps)));
        a0_slope = (hi[0] - lo[0]) / (2.0 * eps);
    }
    let a0_f = neumann_coefficient(0, f)?;
    Ok(VariationCheck {
        expected: (1.0 - order as f64) * neumann_coefficient(order, f)?,
        step_spread: spread(&slopes),
        slopes,
        residual: (a0_slope - a0_f).abs() / a0_f.abs().max(f64::MIN_POSITIVE),
    })
}

/// `∂_ϱ a_n(1, D - ϱf)` at `ϱ = 0` against `a_{n-2}(f, D)` for the Neumann
/// Laplacian on `[0, 1]`.
///
/// `residual` is the largest relative gap between the centered difference of
/// the traces and the exact derivative `t Tr(f e^{-tD})` on the fit grid.
pub fn potential_variation_check(f: &Polynomial, order: usize, n: usize, step: f64, grid: FitGrid) -> Result<VariationCheck> {
    if order < 2 || order >= grid.terms {
        return Err(argument("the varied coefficient must have order >= 2 and lie inside the fit"));
    }
    let fx = |x: f64| f.eval(x);
    let problem = |rho: f64| SturmLiouvilleProblem::new(n, &|x| -rho * fx(x), BoundaryCondition::Neumann, BoundaryCondition::Neumann, None);
    let (plus, minus, base) = (problem(step)?, problem(-step)?, problem(0.0)?);
    let times = grid.times()?;
    let sp = spectrum(&plus, eigenvalue_budget(&plus, grid.t_min)?, None)?;
    let sm = spectrum(&minus, eigenvalue_budget(&minus, grid.t_min)?, None)?;
    let sb = spectrum(&base, eigenvalue_budget(&base, grid.t_min)?, Some(&fx))?;
    let mut residual = 0.0f64;
    for &t in &times {
        let fd = (heat_trace(&sp, t)?.value - heat_trace(&sm, t)?.value) / (2.0 * step);
        let exact = t * heat_trace(&sb, t)?.value;
        residual = residual.max((fd - exact).abs() / exact.abs().max(f64::MIN_POSITIVE));
    }
    let hi = fit_asymptotics(&HeatTraceSeries::sample(times.clone(), |t| heat_trace(&sp, t))?, 1, grid.terms)?;
    let lo = fit_asymptotics(&HeatTraceSeries::sample(times, |t| heat_trace(&sm, t))?, 1, grid.terms)?;
    let slopes = vec![(step, (hi.coefficients[order] - lo.coefficients[order]) / (2.0 * step))];
    Ok(VariationCheck {
        expected: neumann_coefficient(order - 2, f)?,
        step_spread: 0.0,
        slopes,
        residual,
    })
}

/// `1/(2√π)`, the volume coefficient of the unit interval.
pub fn interval_volume_coefficient() -> f64 {
    0.5 / PI.sqrt()
}
