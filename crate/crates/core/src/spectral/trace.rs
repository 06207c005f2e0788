//! Heat traces from discrete spectra and power-law fits of their small-time
//! behaviour.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::problem::SturmLiouvilleProblem;
use crate::error::{argument, Error, Result};

/// Terms below this size are dropped from heat traces.
pub const TRUNCATION: f64 = 1e-16;

/// Condition number above which a fit is flagged.
pub const ILL_CONDITIONED: f64 = 1e12;

/// Lowest part of a spectrum, with `⟨fψ_k, ψ_k⟩` when a smearing function is given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub smeared: Option<Vec<f64>>,
    /// Size of the full discrete problem.
    pub dimension: usize,
    /// Bound on `|f|` used for the tail estimate.
    pub smearing_bound: f64,
}

/// Lowest `count` eigenvalues; `count` may not exceed a quarter of the grid.
pub fn eigenvalues(p: &SturmLiouvilleProblem, count: usize) -> Result<Vec<f64>> {
    if count > p.grid / 4 {
        return Err(argument(format!("{count} eigenvalues requested, at most {} allowed for this grid", p.grid / 4)));
    }
    p.matrix.lowest_eigenvalues(count)
}

/// Number of eigenvalues needed so that every dropped term of a heat trace at
/// times `≥ t_min` is below [`TRUNCATION`], capped at a quarter of the grid.
pub fn eigenvalue_budget(p: &SturmLiouvilleProblem, t_min: f64) -> Result<usize> {
    if t_min.is_nan() || t_min <= 0.0 {
        return Err(argument("t must be positive"));
    }
    let cutoff = -TRUNCATION.ln() / t_min;
    Ok((p.matrix.count_below(cutoff) + 1).min(p.grid / 4).min(p.dimension()))
}

pub fn spectrum(p: &SturmLiouvilleProblem, count: usize, smearing: Option<&dyn Fn(f64) -> f64>) -> Result<Spectrum> {
    let eigs = eigenvalues(p, count)?;
    let (smeared, bound) = match smearing {
        Some(f) => {
            let fv: Vec<f64> = p.nodes.iter().map(|&x| f(x)).collect();
            let bound = fv.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let s = eigs
                .par_iter()
                .map(|&l| {
                    let v = p.matrix.eigenvector(l);
                    v.iter().zip(&fv).map(|(a, b)| a * a * b).sum::<f64>()
                })
                .collect();
            (Some(s), bound)
        }
        None => (None, 1.0),
    };
    Ok(Spectrum {
        eigenvalues: eigs,
        smeared,
        dimension: p.dimension(),
        smearing_bound: bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceValue {
    pub value: f64,
    /// Bound on the omitted eigenvalues' contribution.
    pub tail_bound: f64,
}

/// `Σ e^{-tλ}`, or `Σ ⟨fψ, ψ⟩ e^{-tλ}` when the spectrum is smeared.
pub fn heat_trace(s: &Spectrum, t: f64) -> Result<TraceValue> {
    if t.is_nan() || t <= 0.0 {
        return Err(argument(format!("heat traces need t > 0, got {t}")));
    }
    if s.eigenvalues.is_empty() {
        return Err(argument("empty spectrum"));
    }
    let mut value = 0.0;
    let mut included = 0;
    for (k, &l) in s.eigenvalues.iter().enumerate() {
        let e = (-t * l).exp();
        if e < TRUNCATION && k > 0 {
            break;
        }
        value += match &s.smeared {
            Some(w) => w[k] * e,
            None => e,
        };
        included = k + 1;
    }
    let reference = s.eigenvalues[included.min(s.eigenvalues.len() - 1)];
    let remaining = s.dimension - included;
    let tail_bound = remaining as f64 * (-t * reference).exp() * s.smearing_bound;
    Ok(TraceValue { value, tail_bound })
}

/// `Str = Tr_0 - Tr_1`.
pub fn super_heat_trace(s0: &Spectrum, s1: &Spectrum, t: f64) -> Result<TraceValue> {
    let a = heat_trace(s0, t)?;
    let b = heat_trace(s1, t)?;
    Ok(TraceValue {
        value: a.value - b.value,
        tail_bound: a.tail_bound + b.tail_bound,
    })
}

/// `count` geometrically spaced times in `[t_min, t_max]`.
pub fn geometric_grid(t_min: f64, t_max: f64, count: usize) -> Result<Vec<f64>> {
    if !(t_min > 0.0 && t_max > t_min) || count < 2 {
        return Err(argument(format!("invalid time grid [{t_min}, {t_max}] with {count} points")));
    }
    let r = (t_max / t_min).powf(1.0 / (count - 1) as f64);
    Ok((0..count).map(|i| if i + 1 == count { t_max } else { t_min * r.powi(i as i32) }).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatTraceSeries {
    pub t: Vec<f64>,
    pub values: Vec<f64>,
    /// Samples of the smearing function, when the traces are smeared.
    pub smearing: Option<Vec<f64>>,
    /// Largest truncation bound over the series.
    pub tail_bound: f64,
}

impl HeatTraceSeries {
    pub fn new(t: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if t.len() != values.len() {
            return Err(argument("times and values differ in length"));
        }
        if t.iter().any(|&x| x.is_nan() || x <= 0.0) || t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(argument("times must be positive and strictly increasing"));
        }
        Ok(Self {
            t,
            values,
            smearing: None,
            tail_bound: 0.0,
        })
    }

    /// Evaluates `trace` on the grid.
    pub fn sample(t: Vec<f64>, trace: impl Fn(f64) -> Result<TraceValue> + Sync) -> Result<Self> {
        let vals: Vec<TraceValue> = t.par_iter().map(|&x| trace(x)).collect::<Result<_>>()?;
        let mut s = Self::new(t, vals.iter().map(|v| v.value).collect())?;
        s.tail_bound = vals.iter().fold(0.0, |a, v| a.max(v.tail_bound));
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticFit {
    /// `a_n` for `n = 0 .. n_terms`, multiplying `t^{(n - m)/2}`.
    pub coefficients: Vec<f64>,
    pub uncertainties: Vec<f64>,
    /// Condition number of the column-scaled design matrix.
    pub condition: f64,
    pub ill_conditioned: bool,
    pub max_residual: f64,
}

/// Least-squares fit of `Σ_n a_n t^{(n - m)/2}`.
pub fn fit_asymptotics(series: &HeatTraceSeries, m: usize, n_terms: usize) -> Result<AsymptoticFit> {
    let rows = series.t.len();
    if n_terms == 0 || rows < 2 * n_terms {
        return Err(argument(format!("a fit with {n_terms} terms needs at least {} samples, got {rows}", 2 * n_terms)));
    }
    let power = |n: usize| (n as f64 - m as f64) / 2.0;
    let raw = DMatrix::from_fn(rows, n_terms, |r, c| series.t[r].powf(power(c)));
    let scales: Vec<f64> = (0..n_terms).map(|c| raw.column(c).norm()).collect();
    let design = DMatrix::from_fn(rows, n_terms, |r, c| raw[(r, c)] / scales[c]);
    let y = DVector::from_column_slice(&series.values);
    let svd = design.clone().svd(true, true);
    let sv = &svd.singular_values;
    let smax = sv.max();
    let smin = sv.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let scaled = svd
        .solve(&y, f64::EPSILON * smax)
        .map_err(|e| Error::Numeric {
            index: 0,
            message: format!("least-squares solve failed: {e}"),
        })?;
    let resid = &y - &design * &scaled;
    let dof = (rows - n_terms).max(1) as f64;
    let sigma2 = resid.norm_squared() / dof;
    let gram = design.transpose() * &design;
    let cov = gram.try_inverse().unwrap_or_else(|| DMatrix::from_element(n_terms, n_terms, f64::INFINITY));
    let coefficients = (0..n_terms).map(|c| scaled[c] / scales[c]).collect();
    let uncertainties = (0..n_terms).map(|c| (sigma2 * cov[(c, c)]).sqrt() / scales[c]).collect();
    Ok(AsymptoticFit {
        coefficients,
        uncertainties,
        condition,
        ill_conditioned: condition > ILL_CONDITIONED,
        max_residual: resid.amax(),
    })
}
