mod common;

use std::f64::consts::PI;

use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use supertrace_core::contraction::*;
use supertrace_core::geometry::{
    disk_boundary, product_geometry, random_boundary_jet, sphere_curvature, ModelGeometry,
};
use supertrace_core::special::factorial;
use supertrace_core::Error;

use common::delta_contract;

fn chain_value(r: &CurvatureTensor, i: &[usize], j: &[usize], from: usize, to: usize) -> f64 {
    let mut acc = 1.0;
    let mut p = from;
    while p < to {
        acc *= r.get(i[p], i[p + 1], j[p + 1], j[p]);
        p += 2;
    }
    acc
}

#[test]
fn sphere_interior_contraction_matches_oracle() {
    // frozen from the delta-determinant oracle: 4, 96, 5760
    let frozen = [(1, 4.0), (2, 96.0), (3, 5760.0)];
    for (mbar, value) in frozen {
        let m = 2 * mbar;
        let r = sphere_curvature(m, 1.0).unwrap();
        let data = TensorAssignment::new().with_curvature(&r);
        let got = epsilon_contract(&interior_expression(m).unwrap(), &data).unwrap();
        assert_eq!(got, value);
        assert_eq!(value, 2f64.powi(mbar as i32) * factorial(m));
        if m <= 4 {
            let oracle = delta_contract(m, m, |i, j| chain_value(&r, i, j, 0, m));
            assert_relative_eq!(oracle, value, epsilon = 1e-10);
        }
    }
}

#[test]
fn disk_boundary_contraction_is_factorial() {
    for m in 2..=7 {
        let bj = disk_boundary(m).unwrap();
        let data = TensorAssignment::new().with_boundary(&bj);
        let got = epsilon_contract(&f_expression(m, 0).unwrap(), &data).unwrap();
        assert_eq!(got, factorial(m - 1), "m = {m}");
    }
}

#[test]
fn zero_factor_gives_zero() {
    let bj = BoundaryJet::diagonal(&[1.0, 0.0, 2.0]);
    let data = TensorAssignment::new().with_boundary(&bj);
    assert_eq!(epsilon_contract(&f_expression(4, 0).unwrap(), &data).unwrap(), 0.0);
}

#[test]
fn interior_density_values() {
    // oracle: 4 / (8π) and 96 / (128π²)
    let s2 = eval_interior_index_density(&sphere_curvature(2, 1.0).unwrap()).unwrap();
    assert_relative_eq!(s2, 1.0 / (2.0 * PI), max_relative = 1e-15);
    let s4 = eval_interior_index_density(&sphere_curvature(4, 1.0).unwrap()).unwrap();
    assert_relative_eq!(s4, 3.0 / (4.0 * PI * PI), max_relative = 1e-15);
    assert_relative_eq!(s4 * 8.0 * PI * PI / 3.0, 2.0, max_relative = 1e-14);
    assert_eq!(eval_interior_index_density(&CurvatureTensor::zeros(4)).unwrap(), 0.0);
    assert!(eval_interior_index_density(&CurvatureTensor::zeros(3)).is_err());
}

#[test]
fn boundary_density_values() {
    let d2 = eval_boundary_index_density(&disk_boundary(2).unwrap()).unwrap();
    assert_relative_eq!(d2, 1.0 / (2.0 * PI), max_relative = 1e-15);
    let d3 = eval_boundary_index_density(&disk_boundary(3).unwrap()).unwrap();
    assert_relative_eq!(d3, 1.0 / (4.0 * PI), max_relative = 1e-15);
    let hemi = ModelGeometry::hemisphere(2).unwrap();
    assert_eq!(eval_boundary_index_density(hemi.boundary.as_ref().unwrap()).unwrap(), 0.0);
}

#[test]
fn e_density_values() {
    let h = 0.7;
    let dj = DilatonJet::new(vec![0.3], Tensor::from_vec(&[1, 1], vec![h]).unwrap()).unwrap();
    let m1 = eval_e_density(&dj, &CurvatureTensor::zeros(1)).unwrap();
    assert_relative_eq!(m1, h / PI.sqrt(), max_relative = 1e-15);

    // S¹ × S² with φ = φ(θ): φ'' / (2π^{3/2}) = (φ''/√π) · 1/(2π)
    let r = CurvatureTensor::zeros(1).direct_sum(&sphere_curvature(2, 1.0).unwrap());
    let dj3 = dj.direct_sum(&DilatonJet::zeros(2));
    let got = eval_e_density(&dj3, &r).unwrap();
    assert_relative_eq!(got, h / (2.0 * PI.powf(1.5)), max_relative = 1e-14);
    assert_relative_eq!(got, (h / PI.sqrt()) * (1.0 / (2.0 * PI)), max_relative = 1e-14);

    assert_eq!(eval_e_density(&DilatonJet::zeros(3), &r).unwrap(), 0.0);
    assert!(eval_e_density(&DilatonJet::zeros(2), &CurvatureTensor::zeros(2)).is_err());
}

#[test]
fn f_density_values() {
    let (a0, a1) = eval_f_densities(&DilatonJet::zeros(1), &BoundaryJet::diagonal(&[])).unwrap();
    assert_eq!(a0, 0.0);
    assert_relative_eq!(a1, 1.0 / (2.0 * PI.sqrt()), max_relative = 1e-15);

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let bj = random_boundary_jet(2, &mut rng);
        let dj = DilatonJet::random(2, &mut rng);
        let (a0, a1) = eval_f_densities(&dj, &bj).unwrap();
        assert_relative_eq!(a1, bj.l(0, 0) / (8.0 * PI.sqrt()), max_relative = 1e-13);
        assert_relative_eq!(a0, dj.hess(0, 0) / (2.0 * PI.sqrt()), max_relative = 1e-13);
    }

    let zero = BoundaryJet::new(Tensor::zeros(&[3, 3]), CurvatureTensor::zeros(4).with_jets(Tensor::zeros(&[4; 5])).unwrap())
        .unwrap()
        .with_jets(Tensor::zeros(&[3; 3]))
        .unwrap();
    assert_eq!(eval_f_densities(&DilatonJet::zeros(4), &zero).unwrap(), (0.0, 0.0));
}

#[test]
fn divergence_term_requires_jets() {
    let bj = BoundaryJet::new(Tensor::zeros(&[3, 3]), CurvatureTensor::space_form(4, 1.0)).unwrap();
    match eval_f_densities(&DilatonJet::zeros(4), &bj) {
        Err(Error::Evaluation(msg)) => assert!(msg.contains("jet"), "{msg}"),
        other => panic!("expected a missing jet error, got {other:?}"),
    }
    // m = 3 has no divergence term
    let bj3 = BoundaryJet::new(Tensor::zeros(&[2, 2]), CurvatureTensor::space_form(3, 1.0)).unwrap();
    assert!(eval_f_densities(&DilatonJet::zeros(3), &bj3).is_ok());
}

#[test]
fn constants_table() {
    assert_relative_eq!(universal_constants(1).unwrap().c_e.unwrap(), 1.0 / PI.sqrt());
    assert_eq!(universal_constants(3).unwrap().c_f3, vec![0.0]);
    for m in 1..=9 {
        let c = universal_constants(m).unwrap();
        assert!(c.c_f2.iter().all(|&x| x == 0.0));
        if m % 2 == 1 {
            let mbar = (m - 1) / 2;
            let expect = 1.0 / (PI.sqrt() * 8f64.powi(mbar as i32) * PI.powi(mbar as i32) * factorial(mbar));
            assert_relative_eq!(c.c_e.unwrap(), expect, max_relative = 1e-15);
        }
    }
}

#[test]
fn constants_reproduce_closed_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for m in 1..=6 {
        for _ in 0..3 {
            let bj = random_boundary_jet(m, &mut rng);
            let dj = DilatonJet::random(m, &mut rng);
            let direct = eval_f_densities(&dj, &bj).unwrap();
            let assembled = f_densities_from_constants(&dj, &bj).unwrap();
            let scale = 1.0 + direct.0.abs() + direct.1.abs();
            assert!((direct.0 - assembled.0).abs() <= 1e-10 * scale, "m={m}: {direct:?} vs {assembled:?}");
            assert!((direct.1 - assembled.1).abs() <= 1e-10 * scale, "m={m}: {direct:?} vs {assembled:?}");
        }
    }
}

#[test]
fn expressions_match_delta_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for m in 2..=4 {
        let bj = random_boundary_jet(m, &mut rng);
        let dj = DilatonJet::random(m, &mut rng);
        let r = bj.curvature();
        let data = TensorAssignment::new().with_boundary(&bj).with_dilaton(&dj);
        let n = m - 1;
        for k in 0..=n / 2 {
            let got = f_expression(m, k).unwrap().evaluate(&data).unwrap();
            let oracle = delta_contract(n, n, |a, b| {
                chain_value(r, a, b, 0, 2 * k) * (2 * k..n).map(|p| bj.l(a[p], b[p])).product::<f64>()
            });
            assert!((got - oracle).abs() < 1e-10 * (1.0 + oracle.abs()), "F m={m} k={k}");
        }
        if m % 2 == 1 {
            let got = e_expression(m).unwrap().evaluate(&data).unwrap();
            let oracle = delta_contract(m, m, |i, j| dj.hess(i[0], j[0]) * chain_value(r, i, j, 1, m));
            assert!((got - oracle).abs() < 1e-10 * (1.0 + oracle.abs()), "E m={m}");
        }
        for k in 0..n.div_ceil(2) {
            let got = f2_expression(m, k).unwrap().evaluate(&data).unwrap();
            let oracle = delta_contract(n, n, |a, b| {
                chain_value(r, a, b, 0, 2 * k)
                    * dj.grad(a[2 * k])
                    * dj.grad(b[2 * k])
                    * (2 * k + 1..n).map(|p| bj.l(a[p], b[p])).product::<f64>()
            });
            assert!((got - oracle).abs() < 1e-10 * (1.0 + oracle.abs()), "F2 m={m} k={k}");
        }
    }
}

#[test]
fn block_and_range_errors() {
    assert!(matches!(ContractionExpression::new(9, 9), Err(Error::Capacity { .. })));
    assert!(matches!(ContractionExpression::new(3, 2), Err(Error::Argument(_))));
    let unbound = ContractionExpression::new(2, 2).unwrap().factor(Symbol::Curvature, &[Slot::Upper(0)]);
    assert!(unbound.evaluate(&TensorAssignment::new()).is_err());
    let missing = ContractionExpression::new(1, 1)
        .unwrap()
        .factor(Symbol::Named("T".into()), &[Slot::Upper(0), Slot::Lower(0)]);
    assert!(matches!(missing.evaluate(&TensorAssignment::new()), Err(Error::Evaluation(_))));
}

#[test]
fn divergence_with_zero_jets_vanishes() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let r = CurvatureTensor::random(5, 2, &mut rng).with_jets(Tensor::zeros(&[5; 5])).unwrap();
    let bj = BoundaryJet::new(Tensor::from_fn(&[4, 4], |x| (x[0] + x[1]) as f64), r)
        .unwrap()
        .with_jets(Tensor::zeros(&[4; 3]));
    // Codazzi forces nonzero L jets when R_{abcm} ≠ 0; check the raw evaluator instead
    assert!(bj.is_err());
    let mut data = TensorAssignment::new();
    data.insert(Symbol::Curvature, CurvatureTensor::random(5, 2, &mut rng).tensor().clone())
        .insert(Symbol::SecondFundamentalForm, Tensor::from_fn(&[4, 4], |x| (x[0] * x[1]) as f64))
        .insert_jet(Symbol::Curvature, Tensor::zeros(&[5; 5]))
        .insert_jet(Symbol::SecondFundamentalForm, Tensor::zeros(&[4; 3]));
    assert_eq!(divergence_eval(&f3_expression(5, 0).unwrap(), &data).unwrap(), 0.0);
}

#[test]
fn divergence_integrates_to_zero_on_flat_torus() {
    // T = (sin(x + 2y) + 0.3 cos y, cos 3x sin y + sin x)
    let t = |x: f64, y: f64| [(x + 2.0 * y).sin() + 0.3 * y.cos(), (3.0 * x).cos() * y.sin() + x.sin()];
    let dt = |x: f64, y: f64| {
        [
            [(x + 2.0 * y).cos(), 2.0 * (x + 2.0 * y).cos() - 0.3 * y.sin()],
            [-3.0 * (3.0 * x).sin() * y.sin() + x.cos(), (3.0 * x).cos() * y.cos()],
        ]
    };
    let mut expr = ContractionExpression::new(0, 2).unwrap();
    let b = expr.dummy(2);
    let expr = expr.factor(Symbol::Named("T".into()), &[b]).with_divergence(b);
    let n = 32;
    let h = 2.0 * PI / n as f64;
    let mut total = 0.0;
    for p in 0..n {
        for q in 0..n {
            let (x, y) = (p as f64 * h, q as f64 * h);
            let mut data = TensorAssignment::new();
            data.insert(Symbol::Named("T".into()), Tensor::from_vec(&[2], t(x, y).to_vec()).unwrap());
            let d = dt(x, y);
            data.insert_jet(
                Symbol::Named("T".into()),
                Tensor::from_vec(&[2, 2], vec![d[0][0], d[0][1], d[1][0], d[1][1]]).unwrap(),
            );
            total += divergence_eval(&expr, &data).unwrap() * h * h;
        }
    }
    assert!(total.abs() < 1e-8, "{total}");
}

/// Replaces the divergence slot by a covector factor `V = e_c` and
/// differentiates numerically along the jets in direction `c`.
fn finite_difference_divergence(expr: &ContractionExpression, data: &TensorAssignment, symbols: &[Symbol], step: f64) -> f64 {
    let slot = expr.divergence().unwrap();
    let mut plain = ContractionExpression::new(expr.block(), expr.range()).unwrap();
    for f in expr.factors() {
        plain = plain.factor(f.symbol.clone(), &f.slots);
    }
    let plain = plain.factor(Symbol::Named("V".into()), &[slot]);
    let range = expr.range();
    let mut total = 0.0;
    for c in 0..range {
        let at = |s: f64| {
            let mut d = TensorAssignment::new();
            for sym in symbols {
                let v = data.value(sym).unwrap();
                let j = data.jet(sym).unwrap().last_index_slice(c);
                d.insert(sym.clone(), v.axpy(s, &j));
            }
            d.insert(
                Symbol::Named("V".into()),
                Tensor::from_fn(&[range], |x| if x[0] == c { 1.0 } else { 0.0 }),
            );
            plain.evaluate(&d).unwrap()
        };
        total += (at(step) - at(-step)) / (2.0 * step);
    }
    total
}

#[test]
fn divergence_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for (m, k) in [(4, 0), (5, 0), (6, 0), (6, 1)] {
        let bj = random_boundary_jet(m, &mut rng);
        let mut data = TensorAssignment::new().with_boundary(&bj);
        // arbitrary jets are fine for the evaluator
        let n = m - 1;
        let noise = |shape: &[usize], rng: &mut ChaCha8Rng| {
            Tensor::from_fn(shape, |_| rand::Rng::random_range(rng, -1.0..1.0))
        };
        data.insert_jet(Symbol::Curvature, noise(&[m; 5], &mut rng));
        data.insert_jet(Symbol::SecondFundamentalForm, noise(&[n; 3], &mut rng));
        let expr = f3_expression(m, k).unwrap();
        let exact = divergence_eval(&expr, &data).unwrap();
        let fd = finite_difference_divergence(&expr, &data, &[Symbol::Curvature, Symbol::SecondFundamentalForm], 1e-4);
        assert!((exact - fd).abs() < 1e-6 * (1.0 + exact.abs()), "m={m} k={k}: {exact} vs {fd}");
    }
}

#[test]
fn product_densities_factor() {
    for m in 2..=6 {
        for k in 1..=m / 2 {
            let rest = m - 2 * k;
            if rest == 0 {
                continue;
            }
            let sphere = ModelGeometry::sphere(2 * k, 1.0).unwrap();
            let second = if rest == 1 {
                ModelGeometry::interval(1.0).unwrap()
            } else {
                ModelGeometry::disk(rest).unwrap()
            };
            let prod = product_geometry(&sphere, &second).unwrap();
            let bj = prod.boundary.as_ref().unwrap();
            let bj2 = second.boundary.as_ref().unwrap();
            let sphere_density = eval_interior_index_density(&sphere.curvature).unwrap();

            let lhs = eval_boundary_index_density(bj).unwrap();
            let rhs = sphere_density * eval_boundary_index_density(bj2).unwrap();
            assert!((lhs - rhs).abs() < 1e-10, "a_mm0 m={m} k={k}: {lhs} vs {rhs}");

            let zero_jets = |b: &BoundaryJet, d: usize| {
                let c = b.curvature().clone();
                let c = if c.jets().is_some() { c } else { c.with_jets(Tensor::zeros(&[d; 5])).unwrap() };
                let mut out = BoundaryJet::new(b.l_tensor().clone(), c).unwrap();
                if d >= 2 {
                    out = out.with_jets(Tensor::zeros(&[d - 1; 3])).unwrap();
                }
                out
            };
            let (_, lhs1) = eval_f_densities(&DilatonJet::zeros(m), &zero_jets(bj, m)).unwrap();
            let (_, rhs1) = eval_f_densities(&DilatonJet::zeros(rest), &zero_jets(bj2, rest)).unwrap();
            assert!((lhs1 - sphere_density * rhs1).abs() < 1e-10, "a_m+1,m,1 m={m} k={k}");
        }
    }
}

fn block_flat_data(m: usize, rng: &mut ChaCha8Rng) -> (DilatonJet, BoundaryJet) {
    // flat direction 0, no curvature, L or dilaton derivatives touching it
    let inner = CurvatureTensor::random(m - 1, 2, rng);
    let r = CurvatureTensor::zeros(1).direct_sum(&inner);
    let r = CurvatureTensor::new(m, r.tensor().clone()).unwrap().with_jets(Tensor::zeros(&[m; 5])).unwrap();
    let n = m - 1;
    let l = Tensor::from_fn(&[n, n], |x| {
        if x[0] == 0 || x[1] == 0 {
            0.0
        } else {
            ((x[0] * 7 + x[1] * 7) % 5) as f64 - 2.0
        }
    });
    let dl = Tensor::from_fn(&[n; 3], |x| (r.get(x[2], x[0], x[1], n) + r.get(x[2], x[1], x[0], n)) / 3.0);
    let bj = BoundaryJet::new(l, r).unwrap().with_jets(dl).unwrap();
    let dj = DilatonJet::zeros(1).direct_sum(&DilatonJet::random(m - 1, rng));
    (dj, bj)
}

#[test]
fn flat_factor_is_in_the_kernel() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for m in 2..=6 {
        for _ in 0..3 {
            let (dj, bj) = block_flat_data(m, &mut rng);
            if m % 2 == 1 {
                assert_eq!(eval_e_density(&dj, bj.curvature()).unwrap(), 0.0);
            }
            assert_eq!(eval_f_densities(&dj, &bj).unwrap(), (0.0, 0.0), "m={m}");
        }
    }
}

#[test]
fn json_input_roundtrip_and_errors() {
    let r = sphere_curvature(2, 1.0).unwrap();
    let doc = serde_json::json!({
        "dim": 2,
        "R": tensor_to_json(r.tensor()),
        "L": [[0.5]],
        "phi_grad": [0.0, 1.0],
        "phi_hess": [[2.0, 0.0], [0.0, 1.0]],
    });
    let pd = read_point_data(&doc.to_string()).unwrap();
    assert_eq!(pd.curvature, r);
    assert_eq!(pd.boundary.unwrap().l(0, 0), 0.5);
    assert_eq!(pd.dilaton.hess(0, 0), 2.0);

    let mut bad = r.tensor().clone();
    bad.set(&[0, 1, 1, 0], 2.0);
    let doc = serde_json::json!({"dim": 2, "R": tensor_to_json(&bad)});
    let err = read_point_data(&doc.to_string()).unwrap_err();
    assert!(err.to_string().contains("antisymmetry"), "{err}");
    assert!(matches!(read_point_data("{\"dim\": "), Err(Error::Input(_))));
    assert!(read_point_data("{\"dim\": 2, \"R\": [1, 2]}").is_err());
}

fn signed_permutation(m: usize, seed: u64) -> (Vec<usize>, Vec<f64>) {
    use rand::seq::SliceRandom;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p: Vec<usize> = (0..m).collect();
    p.shuffle(&mut rng);
    let s = (0..m).map(|_| if rand::Rng::random::<bool>(&mut rng) { 1.0 } else { -1.0 }).collect();
    (p, s)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn relabeling_invariance(seed in any::<u64>(), m in 2usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = CurvatureTensor::random(m, 2, &mut rng);
        let dj = DilatonJet::random(m, &mut rng);
        let (p, s) = signed_permutation(m, seed ^ 0x5eed);
        let rr = CurvatureTensor::new(m, Tensor::from_fn(&[m; 4], |x| {
            s[x[0]] * s[x[1]] * s[x[2]] * s[x[3]] * r.get(p[x[0]], p[x[1]], p[x[2]], p[x[3]])
        })).unwrap();
        let hh = Tensor::from_fn(&[m, m], |x| s[x[0]] * s[x[1]] * dj.hess(p[x[0]], p[x[1]]));
        let gg = (0..m).map(|i| s[i] * dj.grad(p[i])).collect();
        let dj2 = DilatonJet::new(gg, hh).unwrap();
        let l = Tensor::from_fn(&[m, m], |x| 1.0 / (1.0 + x[0] as f64 + x[1] as f64));
        let ll = Tensor::from_fn(&[m, m], |x| s[x[0]] * s[x[1]] * l.get(&[p[x[0]], p[x[1]]]).unwrap());
        let mut before = TensorAssignment::new().with_curvature(&r).with_dilaton(&dj);
        before.insert(Symbol::SecondFundamentalForm, l);
        let mut after = TensorAssignment::new().with_curvature(&rr).with_dilaton(&dj2);
        after.insert(Symbol::SecondFundamentalForm, ll);
        let expr = if m % 2 == 0 { interior_expression(m) } else { e_expression(m) };
        for expr in [expr.unwrap(), f_expression(m + 1, 0).unwrap()] {
            let a = expr.evaluate(&before).unwrap();
            let b = expr.evaluate(&after).unwrap();
            prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn e_density_is_odd_in_the_dilaton(seed in any::<u64>(), mbar in 0usize..=2) {
        let m = 2 * mbar + 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = CurvatureTensor::random(m, 2, &mut rng);
        let dj = DilatonJet::random(m, &mut rng);
        let plus = eval_e_density(&dj, &r).unwrap();
        let minus = eval_e_density(&dj.negate(), &r).unwrap();
        prop_assert!((plus + minus).abs() <= 1e-12 * (1.0 + plus.abs()));
    }
}
