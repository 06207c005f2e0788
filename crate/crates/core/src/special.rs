//! Small numeric helpers shared by the density evaluators.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

/// `n!` as a float. Exact for `n <= 22`.
pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// `ln Γ(half_units / 2)` for a positive number of half units.
///
/// Uses `Γ(1) = 1`, `Γ(1/2) = √π` and the recursion `Γ(x + 1) = x Γ(x)`,
/// so the result is a finite sum of logarithms.
pub fn ln_gamma_half(half_units: usize) -> f64 {
    assert!(half_units > 0, "Γ has a pole at 0");
    let (mut acc, mut x2) = if half_units.is_multiple_of(2) {
        (0.0, 2)
    } else {
        (0.5 * PI.ln(), 1)
    };
    while x2 < half_units {
        acc += (x2 as f64 / 2.0).ln();
        x2 += 2;
    }
    acc
}

/// Volume of the unit sphere `S^k ⊂ R^{k+1}`; `vol(S^0) = 2`.
pub fn sphere_volume(k: usize) -> f64 {
    let half = (k + 1) as f64 / 2.0;
    2.0 * (half * PI.ln() - ln_gamma_half(k + 1)).exp()
}

/// Volume of the unit ball `D^m`.
pub fn ball_volume(m: usize) -> f64 {
    sphere_volume(m - 1) / m as f64
}

/// Pairwise (cascade) summation; the reduction tree depends only on the length.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 16;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// All permutations of `0..n` in lexicographic order, each with its sign.
pub fn signed_permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    let mut out = Vec::with_capacity(factorial(n) as usize);
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        out.push((perm.clone(), permutation_sign(&perm)));
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| perm[i - 1] < perm[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| perm[j] > perm[i - 1]).unwrap();
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
    out
}

/// Sign of a permutation given in one-line notation.
pub fn permutation_sign(perm: &[usize]) -> f64 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1.0;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut k = start;
        while !seen[k] {
            seen[k] = true;
            k = perm[k];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// All `k`-element subsets of `0..n`, increasing, in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            break;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
    out
}

/// Haar-distributed random orthogonal matrix (QR of a Gaussian matrix with
/// the signs of `R`'s diagonal moved into `Q`).
pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}
