//! Point data: curvature, boundary and dilaton jets in an orthonormal frame.
//!
//! Frame indices are zero based. On a boundary point the inward unit normal
//! is the last frame vector, index `m - 1`, and tangential indices run over
//! `0..m - 1`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{argument, Error, Result, Symmetry};

/// Absolute tolerance for symmetry checks, scaled by the largest entry when
/// that exceeds one.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Tolerance for the Codazzi relation between `L_{ab:c}` and `R_{abcm}`.
pub const CODAZZI_TOLERANCE: f64 = 1e-10;

/// Dense real tensor with row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(shape: &[usize]) -> Self {
        let len = shape.iter().product();
        Self {
            shape: shape.to_vec(),
            data: vec![0.0; len],
        }
    }

    pub fn from_vec(shape: &[usize], data: Vec<f64>) -> Result<Self> {
        let len: usize = shape.iter().product();
        if data.len() != len {
            return Err(argument(format!(
                "tensor of shape {shape:?} needs {len} entries, got {}",
                data.len()
            )));
        }
        Ok(Self {
            shape: shape.to_vec(),
            data,
        })
    }

    pub fn from_fn(shape: &[usize], mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let mut t = Self::zeros(shape);
        let mut idx = vec![0; shape.len()];
        for flat in 0..t.data.len() {
            let mut rem = flat;
            for (slot, &n) in idx.iter_mut().zip(shape).rev() {
                *slot = rem % n;
                rem /= n;
            }
            t.data[flat] = f(&idx);
        }
        t
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    fn offset(&self, idx: &[usize]) -> Option<usize> {
        if idx.len() != self.shape.len() {
            return None;
        }
        let mut off = 0;
        for (&i, &n) in idx.iter().zip(&self.shape) {
            if i >= n {
                return None;
            }
            off = off * n + i;
        }
        Some(off)
    }

    /// Entry at `idx`, or `None` when the index is out of range.
    pub fn get(&self, idx: &[usize]) -> Option<f64> {
        self.offset(idx).map(|o| self.data[o])
    }

    pub fn set(&mut self, idx: &[usize], value: f64) {
        let o = self.offset(idx).expect("tensor index out of range");
        self.data[o] = value;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            shape: self.shape.clone(),
            data: self.data.iter().map(|x| x * factor).collect(),
        }
    }

    /// `self + factor * other`.
    pub fn axpy(&self, factor: f64, other: &Self) -> Self {
        assert_eq!(self.shape, other.shape);
        Self {
            shape: self.shape.clone(),
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + factor * b).collect(),
        }
    }

    /// Slice fixing the last index, used to read one direction of a jet.
    pub fn last_index_slice(&self, n: usize) -> Self {
        let rank = self.rank();
        Self::from_fn(&self.shape[..rank - 1], |idx| {
            let mut full = idx.to_vec();
            full.push(n);
            self.get(&full).unwrap()
        })
    }
}

fn tolerance(scale: f64) -> f64 {
    SYMMETRY_TOLERANCE * scale.max(1.0)
}

fn fmt_idx(idx: &[usize]) -> String {
    let parts: Vec<String> = idx.iter().map(usize::to_string).collect();
    format!("[{}]", parts.join(","))
}

fn check(symmetry: Symmetry, idx: &[usize], residual: f64, tol: f64) -> Result<()> {
    if residual.abs() > tol || residual.is_nan() {
        return Err(Error::Validation {
            symmetry,
            location: fmt_idx(idx),
            residual: residual.abs(),
        });
    }
    Ok(())
}

/// Checks the algebraic curvature symmetries of a rank four tensor, or of
/// each direction slice of a rank five jet.
fn check_curvature_symmetries(t: &Tensor, dim: usize) -> Result<()> {
    let tol = tolerance(t.max_abs());
    let dirs = if t.rank() == 5 { dim } else { 1 };
    for n in 0..dirs {
        let at = |i, j, k, l| {
            if t.rank() == 5 {
                t.get(&[i, j, k, l, n]).unwrap()
            } else {
                t.get(&[i, j, k, l]).unwrap()
            }
        };
        let loc = |i, j, k, l| {
            if t.rank() == 5 {
                vec![i, j, k, l, n]
            } else {
                vec![i, j, k, l]
            }
        };
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    for l in 0..dim {
                        let v = at(i, j, k, l);
                        check(Symmetry::FirstPairAntisymmetry, &loc(i, j, k, l), v + at(j, i, k, l), tol)?;
                        check(Symmetry::SecondPairAntisymmetry, &loc(i, j, k, l), v + at(i, j, l, k), tol)?;
                        check(Symmetry::PairExchange, &loc(i, j, k, l), v - at(k, l, i, j), tol)?;
                        check(
                            Symmetry::FirstBianchi,
                            &loc(i, j, k, l),
                            v + at(j, k, i, l) + at(k, i, j, l),
                            tol,
                        )?;
                    }
                }
            }
        }
    }
    Ok(())
}

/// Riemann curvature `R_{ijkl}` at a point, optionally with `R_{ijkl;n}`.
///
/// Sign convention: `R_{0110} = +1` on the unit 2-sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTensor {
    dim: usize,
    r: Tensor,
    dr: Option<Tensor>,
}

impl CurvatureTensor {
    /// Validates the pair antisymmetries, pair exchange and first Bianchi.
    pub fn new(dim: usize, r: Tensor) -> Result<Self> {
        if r.shape() != [dim; 4] {
            return Err(argument(format!(
                "curvature tensor must have shape [{dim}; 4], got {:?}",
                r.shape()
            )));
        }
        check_curvature_symmetries(&r, dim)?;
        Ok(Self { dim, r, dr: None })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            r: Tensor::zeros(&[dim; 4]),
            dr: None,
        }
    }

    /// Constant sectional curvature `kappa`: `R_{ijkl} = kappa (δ_il δ_jk - δ_ik δ_jl)`.
    pub fn space_form(dim: usize, kappa: f64) -> Self {
        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        let r = Tensor::from_fn(&[dim; 4], |x| kappa * (d(x[0], x[3]) * d(x[1], x[2]) - d(x[0], x[2]) * d(x[1], x[3])));
        Self { dim, r, dr: None }
    }

    /// Random algebraic curvature tensor `Σ_s (h^s_il h^s_jk - h^s_ik h^s_jl) / 2`
    /// built from symmetric Gaussian matrices.
    pub fn random<R: Rng + ?Sized>(dim: usize, terms: usize, rng: &mut R) -> Self {
        let mut r = Tensor::zeros(&[dim; 4]);
        for _ in 0..terms {
            let h = random_symmetric(dim, rng);
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let term = Tensor::from_fn(&[dim; 4], |x| {
                0.5 * sign * (h[x[0] * dim + x[3]] * h[x[1] * dim + x[2]] - h[x[0] * dim + x[2]] * h[x[1] * dim + x[3]])
            });
            r = r.axpy(1.0, &term);
        }
        Self { dim, r, dr: None }
    }

    /// Attaches `R_{ijkl;n}` (shape `[m; 5]`, derivative index last) after
    /// checking its algebraic symmetries and the second Bianchi identity.
    pub fn with_jets(mut self, dr: Tensor) -> Result<Self> {
        let m = self.dim;
        if dr.shape() != [m; 5] {
            return Err(argument(format!(
                "curvature jets must have shape [{m}; 5], got {:?}",
                dr.shape()
            )));
        }
        check_curvature_symmetries(&dr, m)?;
        let tol = tolerance(dr.max_abs());
        let at = |i, j, k, l, n| dr.get(&[i, j, k, l, n]).unwrap();
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        for n in 0..m {
                            let res = at(i, j, k, l, n) + at(i, j, l, n, k) + at(i, j, n, k, l);
                            check(Symmetry::SecondBianchi, &[i, j, k, l, n], res, tol)?;
                        }
                    }
                }
            }
        }
        self.dr = Some(dr);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tensor(&self) -> &Tensor {
        &self.r
    }

    pub fn jets(&self) -> Option<&Tensor> {
        self.dr.as_ref()
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.r.get(&[i, j, k, l]).expect("curvature index out of range")
    }

    pub fn jet(&self, i: usize, j: usize, k: usize, l: usize, n: usize) -> Option<f64> {
        self.dr.as_ref().map(|d| d.get(&[i, j, k, l, n]).expect("jet index out of range"))
    }

    /// `Ric_{jk} = R_{ijki}`.
    pub fn ricci(&self, j: usize, k: usize) -> f64 {
        (0..self.dim).map(|i| self.get(i, j, k, i)).sum()
    }

    /// `τ = R_{ijji}`.
    pub fn scalar(&self) -> f64 {
        (0..self.dim).map(|j| self.ricci(j, j)).sum()
    }

    /// Block diagonal curvature of a Riemannian product; jets are carried
    /// over only when both factors have them.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (m1, m) = (self.dim, self.dim + other.dim);
        let split = |x: &[usize]| -> Option<(bool, Vec<usize>)> {
            if x.iter().all(|&i| i < m1) {
                Some((true, x.to_vec()))
            } else if x.iter().all(|&i| i >= m1) {
                Some((false, x.iter().map(|i| i - m1).collect()))
            } else {
                None
            }
        };
        let r = Tensor::from_fn(&[m; 4], |x| match split(x) {
            Some((true, y)) => self.r.get(&y).unwrap(),
            Some((false, y)) => other.r.get(&y).unwrap(),
            None => 0.0,
        });
        let dr = match (&self.dr, &other.dr) {
            (Some(a), Some(b)) => Some(Tensor::from_fn(&[m; 5], |x| match split(x) {
                Some((true, y)) => a.get(&y).unwrap(),
                Some((false, y)) => b.get(&y).unwrap(),
                None => 0.0,
            })),
            _ => None,
        };
        Self { dim: m, r, dr }
    }
}

fn random_symmetric<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    let mut h = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in i..dim {
            let v: f64 = rng.sample(StandardNormal);
            h[i * dim + j] = v;
            h[j * dim + i] = v;
        }
    }
    h
}

/// Boundary data at a point of `∂M`: second fundamental form `L_{ab}` with
/// respect to the inward normal, optional tangential jets `L_{ab:c}`, and the
/// ambient curvature at the point with the normal as index `m - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryJet {
    dim: usize,
    l: Tensor,
    dl: Option<Tensor>,
    curvature: CurvatureTensor,
}

impl BoundaryJet {
    /// `l` has shape `[m-1, m-1]` and must be symmetric.
    pub fn new(l: Tensor, curvature: CurvatureTensor) -> Result<Self> {
        let m = curvature.dim();
        if m == 0 {
            return Err(argument("a boundary needs dimension at least 1"));
        }
        if l.shape() != [m - 1, m - 1] {
            return Err(argument(format!(
                "second fundamental form must have shape [{0}, {0}], got {1:?}",
                m - 1,
                l.shape()
            )));
        }
        let tol = tolerance(l.max_abs());
        for a in 0..m - 1 {
            for b in 0..m - 1 {
                let res = l.get(&[a, b]).unwrap() - l.get(&[b, a]).unwrap();
                check(Symmetry::SecondFundamentalForm, &[a, b], res, tol)?;
            }
        }
        Ok(Self {
            dim: m,
            l,
            dl: None,
            curvature,
        })
    }

    /// Flat ambient space with `L = diag(values)`.
    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let l = Tensor::from_fn(&[n, n], |x| if x[0] == x[1] { values[x[0]] } else { 0.0 });
        Self {
            dim: n + 1,
            l,
            dl: None,
            curvature: CurvatureTensor::zeros(n + 1),
        }
    }

    /// Attaches `L_{ab:c}` (shape `[m-1; 3]`). When curvature jets are present
    /// the Codazzi relation `L_{bc:a} - L_{ac:b} = R_{abcm}` is enforced.
    pub fn with_jets(mut self, dl: Tensor) -> Result<Self> {
        let n = self.dim - 1;
        if dl.shape() != [n; 3] {
            return Err(argument(format!(
                "second fundamental form jets must have shape [{n}; 3], got {:?}",
                dl.shape()
            )));
        }
        let tol = tolerance(dl.max_abs());
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let res = dl.get(&[a, b, c]).unwrap() - dl.get(&[b, a, c]).unwrap();
                    check(Symmetry::SecondFundamentalForm, &[a, b, c], res, tol)?;
                }
            }
        }
        if self.curvature.jets().is_some() {
            let normal = self.dim - 1;
            let tol = CODAZZI_TOLERANCE * dl.max_abs().max(self.curvature.tensor().max_abs()).max(1.0);
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        let lhs = dl.get(&[b, c, a]).unwrap() - dl.get(&[a, c, b]).unwrap();
                        let res = lhs - self.curvature.get(a, b, c, normal);
                        if res.abs() > tol {
                            return Err(Error::Validation {
                                symmetry: Symmetry::Codazzi,
                                location: fmt_idx(&[a, b, c]),
                                residual: res.abs(),
                            });
                        }
                    }
                }
            }
        }
        self.dl = Some(dl);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Index of the inward normal.
    pub fn normal(&self) -> usize {
        self.dim - 1
    }

    pub fn l(&self, a: usize, b: usize) -> f64 {
        self.l.get(&[a, b]).expect("boundary index out of range")
    }

    pub fn l_tensor(&self) -> &Tensor {
        &self.l
    }

    pub fn l_jets(&self) -> Option<&Tensor> {
        self.dl.as_ref()
    }

    pub fn curvature(&self) -> &CurvatureTensor {
        &self.curvature
    }

    /// `L_aa`
    pub fn mean_curvature_trace(&self) -> f64 {
        (0..self.dim - 1).map(|a| self.l(a, a)).sum()
    }
}

/// First and second covariant derivatives `φ_{;i}`, `φ_{;ij}` of the dilaton.
#[derive(Debug, Clone, PartialEq)]
pub struct DilatonJet {
    dim: usize,
    grad: Vec<f64>,
    hess: Tensor,
}

impl DilatonJet {
    pub fn new(grad: Vec<f64>, hess: Tensor) -> Result<Self> {
        let m = grad.len();
        if hess.shape() != [m, m] {
            return Err(argument(format!(
                "dilaton Hessian must have shape [{m}, {m}], got {:?}",
                hess.shape()
            )));
        }
        let tol = tolerance(hess.max_abs());
        for i in 0..m {
            for j in 0..m {
                let res = hess.get(&[i, j]).unwrap() - hess.get(&[j, i]).unwrap();
                check(Symmetry::Hessian, &[i, j], res, tol)?;
            }
        }
        Ok(Self { dim: m, grad, hess })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            grad: vec![0.0; dim],
            hess: Tensor::zeros(&[dim, dim]),
        }
    }

    /// Gaussian gradient and Hessian entries.
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        let grad = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let h = random_symmetric(dim, rng);
        Self {
            dim,
            grad,
            hess: Tensor::from_vec(&[dim, dim], h).unwrap(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grad(&self, i: usize) -> f64 {
        self.grad[i]
    }

    pub fn hess(&self, i: usize, j: usize) -> f64 {
        self.hess.get(&[i, j]).expect("dilaton index out of range")
    }

    pub fn grad_vec(&self) -> &[f64] {
        &self.grad
    }

    pub fn hess_tensor(&self) -> &Tensor {
        &self.hess
    }

    /// `-φ`
    pub fn negate(&self) -> Self {
        Self {
            dim: self.dim,
            grad: self.grad.iter().map(|x| -x).collect(),
            hess: self.hess.scale(-1.0),
        }
    }

    /// Jet of `φ_1 + φ_2` on a product, each summand depending on its own factor.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (m1, m) = (self.dim, self.dim + other.dim);
        let mut grad = self.grad.clone();
        grad.extend_from_slice(&other.grad);
        let hess = Tensor::from_fn(&[m, m], |x| match (x[0] < m1, x[1] < m1) {
            (true, true) => self.hess(x[0], x[1]),
            (false, false) => other.hess(x[0] - m1, x[1] - m1),
            _ => 0.0,
        });
        Self { dim: m, grad, hess }
    }
}
