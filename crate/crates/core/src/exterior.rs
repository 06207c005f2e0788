//! Dense operators on the exterior algebra `Λ(R^m)`.
//!
//! The basis of `Λ(R^m)` is indexed by bit masks: bit `i` set means the
//! covector `e^i` is present, and the wedge monomial is written with its
//! indices in increasing order. Masks are ordered as unsigned integers, so the
//! matrix of an operator is reproducible across implementations.
//!
//! Frame indices are zero based throughout: `0..m`.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::DMatrix;

use crate::error::{argument, Error, Result};

/// Largest supported dimension; `Λ(R^12)` has 4096 basis elements.
pub const MAX_DIM: usize = 12;

/// A basis element `e^{u_1} ∧ … ∧ e^{u_p}` of `Λ(R^m)`, `u_1 < … < u_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FormBasisIndex(pub usize);

impl FormBasisIndex {
    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    /// `(-1)^degree`
    pub fn parity(self) -> f64 {
        if self.degree().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// Frame indices present in the monomial, increasing.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mask = self.0;
        (0..usize::BITS as usize).filter(move |&i| mask & (1 << i) != 0)
    }
}

fn check_dim(m: usize) -> Result<()> {
    if m > MAX_DIM {
        return Err(Error::Capacity {
            what: "exterior algebra dimension",
            value: m,
            limit: MAX_DIM,
        });
    }
    Ok(())
}

fn check_index(i: usize, m: usize) -> Result<()> {
    if i >= m {
        return Err(argument(format!("frame index {i} out of range for dimension {m}")));
    }
    Ok(())
}

/// Linear operator on `Λ(R^m)`, stored as a dense `2^m × 2^m` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ExteriorOperator {
    dim: usize,
    matrix: DMatrix<f64>,
}

impl ExteriorOperator {
    pub fn zeros(m: usize) -> Result<Self> {
        check_dim(m)?;
        let n = 1 << m;
        Ok(Self {
            dim: m,
            matrix: DMatrix::zeros(n, n),
        })
    }

    pub fn identity(m: usize) -> Result<Self> {
        check_dim(m)?;
        let n = 1 << m;
        Ok(Self {
            dim: m,
            matrix: DMatrix::identity(n, n),
        })
    }

    /// Wraps a `2^m × 2^m` matrix.
    pub fn from_matrix(m: usize, matrix: DMatrix<f64>) -> Result<Self> {
        check_dim(m)?;
        let n = 1 << m;
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(argument(format!(
                "expected a {n}x{n} matrix for Λ(R^{m}), got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { dim: m, matrix })
    }

    /// Diagonal operator with `value(basis element)` on the diagonal.
    pub fn diagonal(m: usize, value: impl Fn(FormBasisIndex) -> f64) -> Result<Self> {
        let mut op = Self::zeros(m)?;
        for mask in 0..op.size() {
            op.matrix[(mask, mask)] = value(FormBasisIndex(mask));
        }
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of basis elements, `2^m`.
    pub fn size(&self) -> usize {
        1 << self.dim
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    /// Matrix entry `<e_row, A e_col>`.
    pub fn entry(&self, row: FormBasisIndex, col: FormBasisIndex) -> f64 {
        self.matrix[(row.0, col.0)]
    }

    pub fn transpose(&self) -> Self {
        Self {
            dim: self.dim,
            matrix: self.matrix.transpose(),
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            matrix: &self.matrix * factor,
        }
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    /// `Σ_p (-1)^p Tr(A|Λ^p)`.
    pub fn supertrace(&self) -> f64 {
        (0..self.size())
            .map(|mask| FormBasisIndex(mask).parity() * self.matrix[(mask, mask)])
            .sum()
    }

    /// Composition `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "operators act on different exterior algebras");
        Self {
            dim: self.dim,
            matrix: &self.matrix * &other.matrix,
        }
    }

    /// `self^power`; `power = 0` gives the identity.
    pub fn pow(&self, power: usize) -> Self {
        let mut acc = Self {
            dim: self.dim,
            matrix: DMatrix::identity(self.size(), self.size()),
        };
        for _ in 0..power {
            acc = acc.compose(self);
        }
        acc
    }

    /// `AB + BA`
    pub fn anticommutator(&self, other: &Self) -> Self {
        self.compose(other) + other.compose(self)
    }

    /// `AB - BA`
    pub fn commutator(&self, other: &Self) -> Self {
        self.compose(other) - other.compose(self)
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// True when the operator maps `Λ^p` into `Λ^{p+shift}` for every `p`.
    /// Restriction to `Λ^p`, in increasing mask order.
    pub fn degree_block(&self, p: usize) -> Result<DMatrix<f64>> {
        if p > self.dim {
            return Err(argument(format!("degree {p} exceeds dimension {}", self.dim)));
        }
        let idx: Vec<usize> = (0..self.size()).filter(|&u| FormBasisIndex(u).degree() == p).collect();
        Ok(DMatrix::from_fn(idx.len(), idx.len(), |r, c| self.matrix[(idx[r], idx[c])]))
    }

    /// `Str(A^power)` for a degree preserving `A`, computed block by block.
    pub fn supertrace_of_power(&self, power: usize) -> Result<f64> {
        if !self.is_homogeneous(0) {
            return Err(argument("operator does not preserve degree"));
        }
        let mut total = 0.0;
        for p in 0..=self.dim {
            let block = self.degree_block(p)?;
            let mut acc = DMatrix::identity(block.nrows(), block.ncols());
            for _ in 0..power {
                acc = &acc * &block;
            }
            total += if p % 2 == 0 { acc.trace() } else { -acc.trace() };
        }
        Ok(total)
    }

    pub fn is_homogeneous(&self, shift: isize) -> bool {
        let n = self.size();
        (0..n).all(|row| {
            (0..n).all(|col| {
                self.matrix[(row, col)] == 0.0
                    || FormBasisIndex(row).degree() as isize - FormBasisIndex(col).degree() as isize == shift
            })
        })
    }
}

/// `𝔢_i`: left exterior multiplication by `e^i`.
pub fn wedge_op(i: usize, m: usize) -> Result<ExteriorOperator> {
    check_dim(m)?;
    check_index(i, m)?;
    let mut op = ExteriorOperator::zeros(m)?;
    let bit = 1usize << i;
    for mask in 0..op.size() {
        if mask & bit != 0 {
            continue;
        }
        let below = (mask & (bit - 1)).count_ones();
        let sign = if below.is_multiple_of(2) { 1.0 } else { -1.0 };
        op.matrix[(mask | bit, mask)] = sign;
    }
    Ok(op)
}

/// `𝔦_i`: left interior multiplication by `e_i`, the adjoint of [`wedge_op`].
pub fn interior_op(i: usize, m: usize) -> Result<ExteriorOperator> {
    Ok(wedge_op(i, m)?.transpose())
}

/// `γ_i = 𝔢_i - 𝔦_i`.
pub fn clifford_op(i: usize, m: usize) -> Result<ExteriorOperator> {
    let e = wedge_op(i, m)?;
    let t = e.transpose();
    Ok(e - t)
}

/// Restriction of `op` to rows and columns of degree `p`.
pub fn degree_projection(op: &ExteriorOperator, p: usize) -> Result<ExteriorOperator> {
    if p > op.dim {
        return Err(argument(format!("degree {p} exceeds dimension {}", op.dim)));
    }
    let mut out = op.clone();
    let n = op.size();
    for row in 0..n {
        for col in 0..n {
            if FormBasisIndex(row).degree() != p || FormBasisIndex(col).degree() != p {
                out.matrix[(row, col)] = 0.0;
            }
        }
    }
    Ok(out)
}

/// Graded tensor product `a ⊗ b` on `Λ(R^{m1+m2}) ≅ Λ(R^{m1}) ⊗ Λ(R^{m2})`.
///
/// The first factor occupies frame indices `0..m1`, the second `m1..m1+m2`,
/// and `e_U ∧ e_V ↔ e_U ⊗ e_V`. Matrix entries of `b` that shift degree by
/// `d` pick up the Koszul sign `(-1)^{d·|U|}`, which makes the identification
/// multiplicative: `𝔢_{m1+j} = Id ⊗ 𝔢_j` and `𝔢_i = 𝔢_i ⊗ Id`.
pub fn graded_tensor_product(a: &ExteriorOperator, b: &ExteriorOperator) -> Result<ExteriorOperator> {
    let m1 = a.dim;
    let m = m1 + b.dim;
    let mut out = ExteriorOperator::zeros(m)?;
    let (n1, n2) = (a.size(), b.size());
    for u_row in 0..n1 {
        for u_col in 0..n1 {
            let av = a.matrix[(u_row, u_col)];
            if av == 0.0 {
                continue;
            }
            let deg_u = FormBasisIndex(u_col).degree();
            for v_row in 0..n2 {
                for v_col in 0..n2 {
                    let bv = b.matrix[(v_row, v_col)];
                    if bv == 0.0 {
                        continue;
                    }
                    let shift = FormBasisIndex(v_row).degree() as isize - FormBasisIndex(v_col).degree() as isize;
                    let sign = if (shift.unsigned_abs() * deg_u).is_multiple_of(2) { 1.0 } else { -1.0 };
                    out.matrix[(u_row | (v_row << m1), u_col | (v_col << m1))] = sign * av * bv;
                }
            }
        }
    }
    Ok(out)
}

impl Add for ExteriorOperator {
    type Output = ExteriorOperator;
    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        Self {
            dim: self.dim,
            matrix: self.matrix + rhs.matrix,
        }
    }
}

impl AddAssign<&ExteriorOperator> for ExteriorOperator {
    fn add_assign(&mut self, rhs: &ExteriorOperator) {
        assert_eq!(self.dim, rhs.dim);
        self.matrix += &rhs.matrix;
    }
}

impl Sub for ExteriorOperator {
    type Output = ExteriorOperator;
    fn sub(self, rhs: Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        Self {
            dim: self.dim,
            matrix: self.matrix - rhs.matrix,
        }
    }
}

impl Neg for ExteriorOperator {
    type Output = ExteriorOperator;
    fn neg(self) -> Self {
        Self {
            dim: self.dim,
            matrix: -self.matrix,
        }
    }
}

impl Mul for &ExteriorOperator {
    type Output = ExteriorOperator;
    fn mul(self, rhs: Self) -> ExteriorOperator {
        self.compose(rhs)
    }
}

impl Mul<f64> for ExteriorOperator {
    type Output = ExteriorOperator;
    fn mul(self, rhs: f64) -> ExteriorOperator {
        self.scale(rhs)
    }
}
