#![allow(dead_code)]

use nalgebra::DMatrix;

/// Generalized Kronecker delta `det[δ_{i_a j_b}]`.
pub fn gen_delta(i: &[usize], j: &[usize]) -> f64 {
    let n = i.len();
    if n == 0 {
        return 1.0;
    }
    DMatrix::from_fn(n, n, |a, b| if i[a] == j[b] { 1.0 } else { 0.0 }).determinant()
}

/// All tuples in `range^len`.
pub fn tuples(range: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..range).map(move |x| {
                    let mut u = t.clone();
                    u.push(x);
                    u
                })
            })
            .collect();
    }
    out
}

/// `Σ_{I,J ∈ range^len} det[δ_{i_a j_b}] f(I, J)`, skipping tuples with repeats.
pub fn delta_contract(range: usize, len: usize, f: impl Fn(&[usize], &[usize]) -> f64) -> f64 {
    let distinct = |t: &Vec<usize>| {
        let mut s = t.clone();
        s.sort();
        s.dedup();
        s.len() == t.len()
    };
    let all: Vec<Vec<usize>> = tuples(range, len).into_iter().filter(distinct).collect();
    let mut total = 0.0;
    for i in &all {
        for j in &all {
            let d = gen_delta(i, j);
            if d != 0.0 {
                total += d * f(i, j);
            }
        }
    }
    total
}
