//! Finite-difference operators on `[0, 1]`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::eigen::Tridiagonal;
use crate::error::{argument, Error, Result};

/// Smallest admissible grid.
pub const MIN_GRID: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
    /// `(∂_n + s) u = 0` with `∂_n` the inward normal derivative.
    Robin(f64),
}

/// `φ(x) = Σ c_k cos(kπx)`; every such `φ` has `φ'(0) = φ'(1) = 0`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DilatonProfile {
    coefficients: Vec<(usize, f64)>,
}

impl DilatonProfile {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn new(coefficients: &[(usize, f64)]) -> Result<Self> {
        if coefficients.iter().any(|(_, c)| !c.is_finite()) {
            return Err(argument("dilaton coefficients must be finite"));
        }
        let mut c: Vec<(usize, f64)> = coefficients.iter().copied().filter(|&(_, c)| c != 0.0).collect();
        c.sort_by_key(|&(k, _)| k);
        Ok(Self { coefficients: c })
    }

    pub fn coefficients(&self) -> &[(usize, f64)] {
        &self.coefficients
    }

    pub fn value(&self, x: f64) -> f64 {
        self.coefficients.iter().map(|&(k, c)| c * (k as f64 * PI * x).cos()).sum()
    }

    pub fn d1(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .map(|&(k, c)| {
                let w = k as f64 * PI;
                -c * w * (w * x).sin()
            })
            .sum()
    }

    pub fn d2(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .map(|&(k, c)| {
                let w = k as f64 * PI;
                -c * w * w * (w * x).cos()
            })
            .sum()
    }
}

/// Parses `c1=1,c2=0.3`; `0` or an empty string is the zero profile.
impl FromStr for DilatonProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "0" {
            return Ok(Self::zero());
        }
        let mut out = Vec::new();
        for part in s.split(',') {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| argument(format!("expected ck=value in dilaton profile, got '{part}'")))?;
            let k: usize = key
                .trim()
                .strip_prefix('c')
                .and_then(|k| k.parse().ok())
                .ok_or_else(|| argument(format!("bad dilaton mode '{key}'")))?;
            let c: f64 = value.trim().parse().map_err(|_| argument(format!("bad dilaton coefficient '{value}'")))?;
            out.push((k, c));
        }
        Self::new(&out)
    }
}

impl fmt::Display for DilatonProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coefficients.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.coefficients.iter().map(|(k, c)| format!("c{k}={c}")).collect();
        f.write_str(&parts.join(","))
    }
}

/// A self-adjoint second-order operator on `[0, 1]` in symmetric form.
///
/// `nodes` carry the unknowns, `weights` are their quadrature weights and the
/// matrix acts on `√w · u`, so eigenvectors are orthonormal in the discrete
/// `L²` product. `potential` holds `V` sampled at the nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct SturmLiouvilleProblem {
    pub grid: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub potential: Vec<f64>,
    pub left: BoundaryCondition,
    pub right: BoundaryCondition,
    pub matrix: Tridiagonal,
}

fn check_grid(n: usize) -> Result<()> {
    if n < MIN_GRID {
        return Err(argument(format!("grid size {n} is below the minimum {MIN_GRID}")));
    }
    Ok(())
}

impl SturmLiouvilleProblem {
    /// `-u'' + V u` on `x_j = j / n` with central differences, boundary
    /// conditions through mirrored ghost points, and an optional conformal
    /// weight `ρ`, giving the operator `ρ⁻¹ (-u'' + V u)`.
    pub fn new(
        n: usize,
        potential: &dyn Fn(f64) -> f64,
        left: BoundaryCondition,
        right: BoundaryCondition,
        weight: Option<&dyn Fn(f64) -> f64>,
    ) -> Result<Self> {
        check_grid(n)?;
        let h = 1.0 / n as f64;
        let h2 = h * h;
        let first = usize::from(left == BoundaryCondition::Dirichlet);
        let last = if right == BoundaryCondition::Dirichlet { n - 1 } else { n };
        let idx: Vec<usize> = (first..=last).collect();
        let nodes: Vec<f64> = idx.iter().map(|&j| j as f64 * h).collect();
        let weights: Vec<f64> = idx.iter().map(|&j| if j == 0 || j == n { 0.5 * h } else { h }).collect();
        let v: Vec<f64> = nodes.iter().map(|&x| potential(x)).collect();
        if v.iter().any(|x| !x.is_finite()) {
            return Err(argument("potential is not finite on the grid"));
        }
        let rho: Vec<f64> = match weight {
            Some(w) => nodes.iter().map(|&x| w(x)).collect(),
            None => vec![1.0; nodes.len()],
        };
        if rho.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(argument("conformal weight must be positive and finite"));
        }
        // Stiffness K = W A is symmetric; the mass is W ρ.
        let len = nodes.len();
        let mut k_diag = vec![0.0; len];
        let k_off = vec![-h / h2; len - 1];
        for (i, &j) in idx.iter().enumerate() {
            k_diag[i] = if j == 0 || j == n { h / h2 } else { 2.0 * h / h2 };
            if j == 0 {
                if let BoundaryCondition::Robin(s) = left {
                    k_diag[i] -= s;
                }
            }
            if j == n {
                if let BoundaryCondition::Robin(s) = right {
                    k_diag[i] -= s;
                }
            }
            k_diag[i] += weights[i] * v[i];
        }
        for bc in [left, right] {
            if let BoundaryCondition::Robin(s) = bc {
                if !s.is_finite() {
                    return Err(argument("Robin parameter must be finite"));
                }
            }
        }
        let mass: Vec<f64> = weights.iter().zip(&rho).map(|(w, r)| w * r).collect();
        let diag = (0..len).map(|i| k_diag[i] / mass[i]).collect();
        let off = (0..len - 1).map(|i| k_off[i] / (mass[i] * mass[i + 1]).sqrt()).collect();
        Ok(Self {
            grid: n,
            nodes,
            weights: mass,
            potential: v,
            left,
            right,
            matrix: Tridiagonal::new(diag, off)?,
        })
    }

    pub fn free(n: usize, bc: BoundaryCondition) -> Result<Self> {
        Self::new(n, &|_| 0.0, bc, bc, None)
    }

    pub fn dimension(&self) -> usize {
        self.matrix.len()
    }
}

/// Witten Laplacians on functions and 1-forms for absolute boundary
/// conditions: `-u'' + (φ'² - φ'') u` with Neumann ends and
/// `-u'' + (φ'² + φ'') u` with Dirichlet ends.
///
/// Both come from one discrete twisted differential
/// `(Bu)_{j+½} = (e^{φ_{j+1} - φ_{j+½}} u_{j+1} - e^{φ_j - φ_{j+½}} u_j) / h`
/// as `BᵀB` on the nodes and `BBᵀ` on the cell midpoints, so their nonzero
/// spectra agree and the discrete supertrace is exactly the Euler number.
pub fn build_problems(phi: &DilatonProfile, n: usize) -> Result<(SturmLiouvilleProblem, SturmLiouvilleProblem)> {
    check_grid(n)?;
    let h = 1.0 / n as f64;
    let x = |j: f64| j * h;
    let w: Vec<f64> = (0..=n).map(|j| if j == 0 || j == n { 0.5 } else { 1.0 }).collect();
    let mut p = vec![0.0; n];
    let mut q = vec![0.0; n];
    for j in 0..n {
        let mid = phi.value(x(j as f64 + 0.5));
        let a = (phi.value(x(j as f64)) - mid).exp();
        let b = (phi.value(x(j as f64 + 1.0)) - mid).exp();
        p[j] = -a / (h * w[j].sqrt());
        q[j] = b / (h * w[j + 1].sqrt());
    }
    let mut d0 = vec![0.0; n + 1];
    let mut o0 = vec![0.0; n];
    for j in 0..n {
        d0[j] += p[j] * p[j];
        d0[j + 1] += q[j] * q[j];
        o0[j] = p[j] * q[j];
    }
    let d1: Vec<f64> = (0..n).map(|j| p[j] * p[j] + q[j] * q[j]).collect();
    let o1: Vec<f64> = (0..n - 1).map(|j| q[j] * p[j + 1]).collect();
    let v0 = |s: f64| phi.d1(s).powi(2) - phi.d2(s);
    let v1 = |s: f64| phi.d1(s).powi(2) + phi.d2(s);
    let nodes0: Vec<f64> = (0..=n).map(|j| x(j as f64)).collect();
    let nodes1: Vec<f64> = (0..n).map(|j| x(j as f64 + 0.5)).collect();
    let p0 = SturmLiouvilleProblem {
        grid: n,
        potential: nodes0.iter().map(|&s| v0(s)).collect(),
        weights: w.iter().map(|v| v * h).collect(),
        nodes: nodes0,
        left: BoundaryCondition::Neumann,
        right: BoundaryCondition::Neumann,
        matrix: Tridiagonal::new(d0, o0)?,
    };
    let p1 = SturmLiouvilleProblem {
        grid: n,
        potential: nodes1.iter().map(|&s| v1(s)).collect(),
        weights: vec![h; n],
        nodes: nodes1,
        left: BoundaryCondition::Dirichlet,
        right: BoundaryCondition::Dirichlet,
        matrix: Tridiagonal::new(d1, o1)?,
    };
    Ok((p0, p1))
}
