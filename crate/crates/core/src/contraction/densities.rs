//! Closed-form supertrace densities and the invariants they are built from.
//!
//! Interior densities contract over the full frame `0..m`. Boundary densities
//! contract over the tangential frame `0..m-1`; the normal is index `m - 1`.

use std::f64::consts::PI;

use super::expression::{ContractionExpression, Slot, Symbol, TensorAssignment};
use super::tensors::{BoundaryJet, CurvatureTensor, DilatonJet};
use crate::error::{argument, Result};
use crate::special::{factorial, sphere_volume};

fn rk(k: usize) -> f64 {
    PI.powi(k as i32) * 8f64.powi(k as i32) * factorial(k)
}

/// `ε_J^I 𝓡_{J,1}^{I,m}`
pub fn interior_expression(m: usize) -> Result<ContractionExpression> {
    if m % 2 == 1 {
        return Err(argument(format!("the Euler invariant needs even m, got {m}")));
    }
    Ok(ContractionExpression::new(m, m)?.curvature_chain(0..m))
}

/// `ε_J^I φ_{;i_1j_1} 𝓡_{J,2}^{I,m}`
pub fn e_expression(m: usize) -> Result<ContractionExpression> {
    if m.is_multiple_of(2) {
        return Err(argument(format!("the dilaton interior invariant needs odd m, got {m}")));
    }
    Ok(ContractionExpression::new(m, m)?
        .factor(Symbol::DilatonHessian, &[Slot::Upper(0), Slot::Lower(0)])
        .curvature_chain(1..m))
}

/// `ℱ^k_{m-1,m} = ε_B^A 𝓡_{B,1}^{A,2k} 𝓛_{B,2k+1}^{A,m-1}`
pub fn f_expression(m: usize, k: usize) -> Result<ContractionExpression> {
    let n = m - 1;
    if 2 * k > n {
        return Err(argument(format!("k = {k} too large for boundary dimension {n}")));
    }
    Ok(ContractionExpression::new(n, n)?.curvature_chain(0..2 * k).l_chain(2 * k..n))
}

/// `ℱ^{1,k}_{m,m} = ε_B^A 𝓡_{B,1}^{A,2k} φ_{;a_{2k+1}b_{2k+1}} 𝓛_{B,2k+2}^{A,m-1}`
pub fn f1_expression(m: usize, k: usize) -> Result<ContractionExpression> {
    let n = m - 1;
    if 2 * k + 1 > n {
        return Err(argument(format!("k = {k} too large for boundary dimension {n}")));
    }
    Ok(ContractionExpression::new(n, n)?
        .curvature_chain(0..2 * k)
        .factor(Symbol::DilatonHessian, &[Slot::Upper(2 * k), Slot::Lower(2 * k)])
        .l_chain(2 * k + 1..n))
}

/// `ℱ^{2,k}_{m,m} = ε_B^A 𝓡_{B,1}^{A,2k} φ_{;a_{2k+1}} φ_{;b_{2k+1}} 𝓛_{B,2k+2}^{A,m-1}`
pub fn f2_expression(m: usize, k: usize) -> Result<ContractionExpression> {
    let n = m - 1;
    if 2 * k + 1 > n {
        return Err(argument(format!("k = {k} too large for boundary dimension {n}")));
    }
    Ok(ContractionExpression::new(n, n)?
        .curvature_chain(0..2 * k)
        .factor(Symbol::DilatonGradient, &[Slot::Upper(2 * k)])
        .factor(Symbol::DilatonGradient, &[Slot::Lower(2 * k)])
        .l_chain(2 * k + 1..n))
}

/// `ℱ^{3,k}_{m,m} = ε_B^A {𝓡_{B,1}^{A,2k} R_{a_{2k+1}a_{2k+2}b_{2k+2}m} 𝓛_{B,2k+3}^{A,m-1}}_{:b_{2k+1}}`
pub fn f3_expression(m: usize, k: usize) -> Result<ContractionExpression> {
    let n = m - 1;
    if 2 * k + 2 > n {
        return Err(argument(format!("k = {k} too large for boundary dimension {n}")));
    }
    Ok(ContractionExpression::new(n, n)?
        .curvature_chain(0..2 * k)
        .factor(
            Symbol::Curvature,
            &[Slot::Upper(2 * k), Slot::Upper(2 * k + 1), Slot::Lower(2 * k + 1), Slot::Fixed(n)],
        )
        .l_chain(2 * k + 2..n)
        .with_divergence(Slot::Lower(2 * k)))
}

/// The closed-form first sum term `ε_B^A φ_{;a_1b_1} 𝓡_{B,2}^{A,2k+1} 𝓛_{B,2k+2}^{A,m-1}`.
fn f_hessian_leading_expression(m: usize, k: usize) -> Result<ContractionExpression> {
    let n = m - 1;
    Ok(ContractionExpression::new(n, n)?
        .factor(Symbol::DilatonHessian, &[Slot::Upper(0), Slot::Lower(0)])
        .curvature_chain(1..2 * k + 1)
        .l_chain(2 * k + 1..n))
}

/// Euler-form density `a_{m,m}` for even `m = 2m̄`:
/// `ε_J^I 𝓡_{J,1}^{I,m} / (π^m̄ 8^m̄ m̄!)`.
pub fn eval_interior_index_density(r: &CurvatureTensor) -> Result<f64> {
    let m = r.dim();
    if !m.is_multiple_of(2) {
        return Err(argument(format!("the interior index density is defined for even m, got {m}")));
    }
    let data = TensorAssignment::new().with_curvature(r);
    Ok(interior_expression(m)?.evaluate(&data)? / rk(m / 2))
}

/// Boundary index density `a_{m,m,0}`:
/// `Σ_k ε_B^A 𝓡_{B,1}^{A,2k} 𝓛_{B,2k+1}^{A,m-1} / (π^k 8^k k! (m-1-2k)! vol(S^{m-1-2k}))`.
pub fn eval_boundary_index_density(bj: &BoundaryJet) -> Result<f64> {
    let m = bj.dim();
    let data = TensorAssignment::new().with_boundary(bj);
    let mut total = 0.0;
    for k in 0..=(m - 1) / 2 {
        let j = m - 1 - 2 * k;
        total += f_expression(m, k)?.evaluate(&data)? / (rk(k) * factorial(j) * sphere_volume(j));
    }
    Ok(total)
}

/// Interior density `a_{m+1,m}` for odd `m = 2m̄ + 1`:
/// `ε_J^I φ_{;i_1j_1} 𝓡_{J,2}^{I,m} / (√π π^m̄ 8^m̄ m̄!)`.
pub fn eval_e_density(dj: &DilatonJet, r: &CurvatureTensor) -> Result<f64> {
    let m = r.dim();
    if m.is_multiple_of(2) {
        return Err(argument(format!("the dilaton interior density is defined for odd m, got {m}")));
    }
    if dj.dim() != m {
        return Err(argument("dilaton and curvature dimensions differ"));
    }
    let data = TensorAssignment::new().with_curvature(r).with_dilaton(dj);
    Ok(e_expression(m)?.evaluate(&data)? / (PI.sqrt() * rk((m - 1) / 2)))
}

/// Boundary densities `(a_{m+1,m,0}, a_{m+1,m,1})` in their closed form.
///
/// The divergence term of `a_{m+1,m,0}` is present when `m ≥ 4` and needs
/// first jets of `R` and `L`; missing jets are an evaluation error.
pub fn eval_f_densities(dj: &DilatonJet, bj: &BoundaryJet) -> Result<(f64, f64)> {
    let m = bj.dim();
    if dj.dim() != m {
        return Err(argument("dilaton and boundary dimensions differ"));
    }
    let data = TensorAssignment::new().with_boundary(bj).with_dilaton(dj);
    let sqrt_pi = PI.sqrt();

    let mut a0 = 0.0;
    let mut k = 0;
    while m >= 2 * k + 2 {
        let j = m - 2 * k - 2;
        let c = 1.0 / (sqrt_pi * rk(k) * sphere_volume(j) * factorial(j));
        a0 += c * f_hessian_leading_expression(m, k)?.evaluate(&data)?;
        if 2 * k + 3 < m {
            a0 += 0.5 * c * f3_expression(m, k)?.evaluate(&data)?;
        }
        k += 1;
    }

    let mut a1 = 0.0;
    for k in 0..=(m - 1) / 2 {
        let j = m - 2 * k;
        a1 += sqrt_pi / (rk(k) * sphere_volume(j) * factorial(j)) * f_expression(m, k)?.evaluate(&data)?;
    }
    Ok((a0, a1))
}

/// The universal constants of the local formulas in dimension `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniversalConstants {
    pub m: usize,
    /// `c_{m+1,m}`; only defined for odd `m`.
    pub c_e: Option<f64>,
    /// `c^k_{m+1,m,1}` indexed by `k`.
    pub c_f: Vec<f64>,
    /// `c^{1,k}_{m+1,m,0}` indexed by `k`.
    pub c_f1: Vec<f64>,
    /// `c^{2,k}_{m+1,m,0}`, identically zero.
    pub c_f2: Vec<f64>,
    /// `c^{3,k}_{m+1,m,0}` indexed by `k`, over `2k ≤ m-3`.
    pub c_f3: Vec<f64>,
}

pub fn universal_constants(m: usize) -> Result<UniversalConstants> {
    if m == 0 {
        return Err(argument("dimension must be positive"));
    }
    let sqrt_pi = PI.sqrt();
    let c_e = (m % 2 == 1).then(|| 1.0 / (sqrt_pi * rk((m - 1) / 2)));
    let c_f = (0..=(m - 1) / 2)
        .map(|k| {
            let j = m - 2 * k;
            sqrt_pi / (rk(k) * sphere_volume(j) * factorial(j))
        })
        .collect();
    let mut c_f1 = Vec::new();
    let mut c_f3 = Vec::new();
    let mut k = 0;
    while m >= 2 * k + 2 {
        let j = m - 2 * k - 2;
        c_f1.push(1.0 / (sqrt_pi * rk(k) * sphere_volume(j) * factorial(j)));
        if 2 * k + 3 == m {
            c_f3.push(0.0);
        } else if 2 * k + 3 < m {
            c_f3.push(1.0 / (2.0 * sqrt_pi * rk(k) * sphere_volume(j) * factorial(j)));
        }
        k += 1;
    }
    let c_f2 = vec![0.0; c_f1.len()];
    Ok(UniversalConstants {
        m,
        c_e,
        c_f,
        c_f1,
        c_f2,
        c_f3,
    })
}

/// Values of the invariants `ℰ`, `ℱ^k`, `ℱ^{1,k}`, `ℱ^{2,k}`, `ℱ^{3,k}` on a jet.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantValues {
    pub e: Option<f64>,
    pub f: Vec<f64>,
    pub f1: Vec<f64>,
    pub f2: Vec<f64>,
    pub f3: Vec<f64>,
}

/// Evaluates every invariant needed by [`universal_constants`] at a boundary
/// point; `ℰ` uses the ambient curvature there and is skipped for even `m`.
pub fn invariant_values(dj: &DilatonJet, bj: &BoundaryJet) -> Result<InvariantValues> {
    let m = bj.dim();
    let c = universal_constants(m)?;
    let data = TensorAssignment::new().with_boundary(bj).with_dilaton(dj);
    let e = if m % 2 == 1 {
        Some(e_expression(m)?.evaluate(&data)?)
    } else {
        None
    };
    let eval_all = |count: usize, build: fn(usize, usize) -> Result<ContractionExpression>| -> Result<Vec<f64>> {
        (0..count).map(|k| build(m, k)?.evaluate(&data)).collect()
    };
    Ok(InvariantValues {
        e,
        f: eval_all(c.c_f.len(), f_expression)?,
        f1: eval_all(c.c_f1.len(), f1_expression)?,
        f2: eval_all(c.c_f2.len(), f2_expression)?,
        f3: eval_all(c.c_f3.len(), f3_expression)?,
    })
}

/// `(a_{m+1,m,0}, a_{m+1,m,1})` assembled from the constants and invariants.
pub fn f_densities_from_constants(dj: &DilatonJet, bj: &BoundaryJet) -> Result<(f64, f64)> {
    let m = bj.dim();
    let c = universal_constants(m)?;
    let v = invariant_values(dj, bj)?;
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let a0 = dot(&c.c_f1, &v.f1) + dot(&c.c_f2, &v.f2) + dot(&c.c_f3, &v.f3);
    let a1 = dot(&c.c_f, &v.f);
    Ok((a0, a1))
}
