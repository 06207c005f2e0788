//! Orthogonal invariants of `k` vectors: pairings `Π g(v_a, v_b)` and the
//! Gram-determinant invariants `Θ` that vanish when the vectors span fewer
//! than `m` dimensions. Spanning and kernel statements are certified by
//! ranks of evaluation matrices on random inputs.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{argument, Error, Result};
use crate::special::{combinations, random_orthogonal};

/// Largest `k` accepted by [`enumerate_pairings`].
pub const MAX_PAIRING_ORDER: usize = 12;

/// Relative singular-value cutoff used by [`span_rank`].
pub const RANK_CUTOFF: f64 = 1e-8;

/// A perfect matching of the slots `0..k`, stored as sorted `(lo, hi)` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pairing {
    k: usize,
    pairs: Vec<(usize, usize)>,
}

impl Pairing {
    pub fn new(k: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut seen = vec![false; k];
        let mut canon: Vec<(usize, usize)> = Vec::with_capacity(pairs.len());
        for &(a, b) in pairs {
            let (lo, hi) = (a.min(b), a.max(b));
            if hi >= k || lo == hi || seen[lo] || seen[hi] {
                return Err(argument(format!("({a}, {b}) is not a valid pair of distinct unused slots in 0..{k}")));
            }
            seen[lo] = true;
            seen[hi] = true;
            canon.push((lo, hi));
        }
        if seen.iter().any(|s| !s) {
            return Err(argument("a pairing has to cover every slot"));
        }
        canon.sort_unstable();
        Ok(Self { k, pairs: canon })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }
}

fn matchings(slots: &[usize]) -> Vec<Vec<(usize, usize)>> {
    if slots.is_empty() {
        return vec![Vec::new()];
    }
    let first = slots[0];
    let mut out = Vec::new();
    for pos in 1..slots.len() {
        let rest: Vec<usize> = slots[1..].iter().enumerate().filter(|&(i, _)| i + 1 != pos).map(|(_, &s)| s).collect();
        for mut tail in matchings(&rest) {
            tail.insert(0, (first, slots[pos]));
            out.push(tail);
        }
    }
    out
}

/// All `(k-1)!!` perfect matchings of `0..k`.
pub fn enumerate_pairings(k: usize) -> Result<Vec<Pairing>> {
    if !k.is_multiple_of(2) {
        return Err(argument(format!("there are no pairings of an odd number of slots ({k})")));
    }
    if k > MAX_PAIRING_ORDER {
        return Err(Error::Capacity {
            what: "pairing order",
            value: k,
            limit: MAX_PAIRING_ORDER,
        });
    }
    let slots: Vec<usize> = (0..k).collect();
    Ok(matchings(&slots).into_iter().map(|pairs| Pairing { k, pairs }).collect())
}

fn check_vectors(vectors: &[DVector<f64>], k: usize) -> Result<usize> {
    if vectors.len() != k {
        return Err(argument(format!("expected {k} vectors, got {}", vectors.len())));
    }
    let m = vectors.first().map_or(0, |v| v.len());
    if vectors.iter().any(|v| v.len() != m) {
        return Err(argument("vectors have different dimensions"));
    }
    Ok(m)
}

pub fn eval_pairing(p: &Pairing, vectors: &[DVector<f64>]) -> Result<f64> {
    check_vectors(vectors, p.k)?;
    Ok(p.pairs.iter().map(|&(a, b)| vectors[a].dot(&vectors[b])).product())
}

/// `g(v_{l_1} ∧ … ∧ v_{l_m}, v_{r_1} ∧ … ∧ v_{r_m})` times the dot products of
/// the matched remaining slots.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ThetaInvariant {
    k: usize,
    left: Vec<usize>,
    right: Vec<usize>,
    matching: Vec<(usize, usize)>,
}

impl ThetaInvariant {
    pub fn new(k: usize, left: &[usize], right: &[usize], matching: &[(usize, usize)]) -> Result<Self> {
        if left.len() != right.len() || left.is_empty() {
            return Err(argument("wedge blocks must be nonempty and of equal size"));
        }
        let mut slots: Vec<usize> = left.iter().chain(right).copied().collect();
        slots.extend(matching.iter().flat_map(|&(a, b)| [a, b]));
        slots.sort_unstable();
        if slots != (0..k).collect::<Vec<_>>() {
            return Err(argument("wedge blocks and matching must partition 0..k"));
        }
        let mut matching: Vec<(usize, usize)> = matching.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        matching.sort_unstable();
        Ok(Self {
            k,
            left: left.to_vec(),
            right: right.to_vec(),
            matching,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Size of each wedge block.
    pub fn m(&self) -> usize {
        self.left.len()
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    pub fn matching(&self) -> &[(usize, usize)] {
        &self.matching
    }
}

pub fn eval_theta(t: &ThetaInvariant, vectors: &[DVector<f64>]) -> Result<f64> {
    check_vectors(vectors, t.k)?;
    let n = t.m();
    let gram = DMatrix::from_fn(n, n, |i, j| vectors[t.left[i]].dot(&vectors[t.right[j]]));
    let rest: f64 = t.matching.iter().map(|&(a, b)| vectors[a].dot(&vectors[b])).product();
    Ok(gram.determinant() * rest)
}

/// The `Θ` invariants with blocks of size `m`, up to sign: unordered pairs of
/// disjoint increasing blocks, times every matching of the remaining slots.
pub fn enumerate_theta(k: usize, m: usize) -> Result<Vec<ThetaInvariant>> {
    if m == 0 || k < 2 * m || !(k - 2 * m).is_multiple_of(2) {
        return Ok(Vec::new());
    }
    if k > MAX_PAIRING_ORDER {
        return Err(Error::Capacity {
            what: "pairing order",
            value: k,
            limit: MAX_PAIRING_ORDER,
        });
    }
    let mut out = Vec::new();
    for left in combinations(k, m) {
        let others: Vec<usize> = (0..k).filter(|s| !left.contains(s)).collect();
        for pick in combinations(others.len(), m) {
            let right: Vec<usize> = pick.iter().map(|&i| others[i]).collect();
            if right < left {
                continue;
            }
            let rest: Vec<usize> = others.iter().copied().filter(|s| !right.contains(s)).collect();
            for matching in matchings(&rest) {
                out.push(ThetaInvariant {
                    k,
                    left: left.clone(),
                    right: right.clone(),
                    matching,
                });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Functional {
    Pairing(Pairing),
    Theta(ThetaInvariant),
}

impl Functional {
    pub fn k(&self) -> usize {
        match self {
            Functional::Pairing(p) => p.k,
            Functional::Theta(t) => t.k,
        }
    }

    pub fn eval(&self, vectors: &[DVector<f64>]) -> Result<f64> {
        match self {
            Functional::Pairing(p) => eval_pairing(p, vectors),
            Functional::Theta(t) => eval_theta(t, vectors),
        }
    }
}

impl From<Pairing> for Functional {
    fn from(p: Pairing) -> Self {
        Functional::Pairing(p)
    }
}

impl From<ThetaInvariant> for Functional {
    fn from(t: ThetaInvariant) -> Self {
        Functional::Theta(t)
    }
}

/// Evaluates on `i(w)`, the vectors of `R^{m-1}` padded with a trailing zero.
pub fn restrict_eval(f: &Functional, vectors: &[DVector<f64>]) -> Result<f64> {
    let padded: Vec<DVector<f64>> = vectors.iter().map(|w| w.clone().insert_row(w.len(), 0.0)).collect();
    f.eval(&padded)
}

fn random_tuple(k: usize, m: usize, rng: &mut ChaCha8Rng) -> Vec<DVector<f64>> {
    (0..k).map(|_| DVector::from_fn(m, |_, _| rng.sample(StandardNormal))).collect()
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// `trials × functionals` matrix of values on random standard-normal tuples in `R^m`.
pub fn evaluation_matrix(functionals: &[Functional], m: usize, trials: usize, seed: u64) -> Result<DMatrix<f64>> {
    let k = match functionals.first() {
        Some(f) => f.k(),
        None => return Ok(DMatrix::zeros(trials, 0)),
    };
    if functionals.iter().any(|f| f.k() != k) {
        return Err(argument("all functionals must take the same number of vectors"));
    }
    let rows: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let v = random_tuple(k, m, &mut trial_rng(seed, t));
            functionals.iter().map(|f| f.eval(&v)).collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_fn(trials, functionals.len(), |r, c| rows[r][c]))
}

/// Numerical rank with singular values below `RANK_CUTOFF · σ_max` dropped.
pub fn numerical_rank(a: &DMatrix<f64>) -> usize {
    if a.is_empty() {
        return 0;
    }
    let sv = a.clone().svd(false, false).singular_values;
    let max = sv.iter().fold(0.0f64, |x, &y| x.max(y));
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_CUTOFF * max).count()
}

/// Dimension of the span of `functionals` restricted to `R^m`.
pub fn span_rank(functionals: &[Functional], m: usize, trials: usize, seed: u64) -> Result<usize> {
    if trials < 2 * functionals.len() {
        return Err(argument(format!(
            "{trials} trials are too few for {} functionals; use at least twice as many",
            functionals.len()
        )));
    }
    Ok(numerical_rank(&evaluation_matrix(functionals, m, trials, seed)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelCertificate {
    pub k: usize,
    pub m: usize,
    pub pairings: usize,
    /// `dim 𝓘_{k,m}`
    pub rank: usize,
    /// `dim 𝓘_{k,m-1}`
    pub restricted_rank: usize,
    pub dim_kernel: usize,
    /// Rank of the `Θ_{k,m}` family.
    pub theta_rank: usize,
    /// The `Θ` family spans exactly the kernel of restriction and adds
    /// nothing outside the pairing span.
    pub certified: bool,
}

/// Kernel of the restriction `𝓘_{k,m} → 𝓘_{k,m-1}` and its `Θ` certificate.
pub fn kernel_dimension(k: usize, m: usize, seed: u64) -> Result<KernelCertificate> {
    if k > 8 || m > 4 || m == 0 {
        return Err(argument(format!("kernel certificates need even k <= 8 and 1 <= m <= 4, got k={k}, m={m}")));
    }
    let pairings: Vec<Functional> = enumerate_pairings(k)?.into_iter().map(Functional::from).collect();
    let thetas: Vec<Functional> = enumerate_theta(k, m)?.into_iter().map(Functional::from).collect();
    let trials = 2 * (pairings.len() + thetas.len()).max(1) + 16;
    let rank = span_rank(&pairings, m, trials, seed)?;
    let restricted_rank = span_rank(&pairings, m - 1, trials, seed)?;
    let dim_kernel = rank - restricted_rank;
    let theta_rank = span_rank(&thetas, m, trials, seed)?;
    let both: Vec<Functional> = pairings.iter().chain(&thetas).cloned().collect();
    let joint = span_rank(&both, m, trials, seed)?;
    let w = random_tuple(k, m - 1, &mut trial_rng(seed, trials));
    let scale: f64 = w.iter().map(|v| v.norm_squared()).product::<f64>().sqrt();
    let theta_in_kernel = thetas
        .iter()
        .all(|t| restrict_eval(t, &w).is_ok_and(|v| v.abs() <= 1e-12 * scale.max(1.0)));
    Ok(KernelCertificate {
        k,
        m,
        pairings: pairings.len(),
        rank,
        restricted_rank,
        dim_kernel,
        theta_rank,
        certified: theta_rank == dim_kernel && joint == rank && theta_in_kernel,
    })
}

/// Largest `|f(Qv) - f(v)|` over random tuples and random `Q ∈ O(m)`.
pub fn orthogonal_invariance_residual(functionals: &[Functional], m: usize, trials: usize, seed: u64) -> Result<f64> {
    let residuals: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let mut worst = 0.0f64;
            for f in functionals {
                let v = random_tuple(f.k(), m, &mut rng);
                let q = random_orthogonal(m, &mut rng);
                let w: Vec<DVector<f64>> = v.iter().map(|x| &q * x).collect();
                worst = worst.max((f.eval(&w)? - f.eval(&v)?).abs());
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    Ok(residuals.into_iter().fold(0.0, f64::max))
}
