//! Exact point data for model geometries and their Gauss–Bonnet integrals.
//!
//! Boundary frames put the tangential directions first and the inward normal
//! last. For products, the closed factor's directions come first.

use std::fmt;

use crate::contraction::{
    eval_boundary_index_density, eval_interior_index_density, BoundaryJet, CurvatureTensor, Tensor,
};
use crate::error::{argument, Result};
use crate::special::{ball_volume, random_orthogonal, sphere_volume};

#[derive(Debug, Clone, PartialEq)]
pub enum GeometryKind {
    /// Round sphere `S^m` of the given radius.
    Sphere { radius: f64 },
    /// Unit ball `D^m`.
    Disk,
    /// Upper hemisphere of the unit `S^m`, bounded by a totally geodesic equator.
    Hemisphere,
    /// Flat torus `(R / side Z)^m`; `m = 1`, `side = 2π` is the unit circle.
    FlatTorus { side: f64 },
    /// Interval `[0, length]`.
    Interval { length: f64 },
    /// Boundary of a graph `x_m = f(y)` with `∂_i∂_j f(0) = A_i δ_ij`.
    Graph { a: Vec<f64> },
    /// Warped product jets with parameters `A_0` and `A_1 … A_{m-3}`.
    Warped { a0: f64, a: Vec<f64> },
    Product(Box<ModelGeometry>, Box<ModelGeometry>),
}

impl fmt::Display for GeometryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryKind::Sphere { radius } => write!(f, "sphere(r={radius})"),
            GeometryKind::Disk => f.write_str("disk"),
            GeometryKind::Hemisphere => f.write_str("hemisphere"),
            GeometryKind::FlatTorus { side } => write!(f, "torus(side={side})"),
            GeometryKind::Interval { length } => write!(f, "interval(length={length})"),
            GeometryKind::Graph { a } => write!(f, "graph(A={a:?})"),
            GeometryKind::Warped { a0, a } => write!(f, "warped(A0={a0}, A={a:?})"),
            GeometryKind::Product(g1, g2) => write!(f, "{}x{}", g1.kind, g2.kind),
        }
    }
}

/// A model geometry with constant point data.
///
/// `volume` and `boundary_volume` are `None` for local models (graph, warped)
/// whose densities are not constant.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelGeometry {
    pub kind: GeometryKind,
    pub dim: usize,
    pub curvature: CurvatureTensor,
    pub boundary: Option<BoundaryJet>,
    pub volume: Option<f64>,
    pub boundary_volume: Option<f64>,
}

/// `R_{ijkl} = (δ_il δ_jk - δ_ik δ_jl) / radius²`.
pub fn sphere_curvature(m: usize, radius: f64) -> Result<CurvatureTensor> {
    if m < 2 {
        return Err(argument(format!("a curved sphere needs m >= 2, got {m}")));
    }
    if radius <= 0.0 || !radius.is_finite() {
        return Err(argument(format!("radius must be positive, got {radius}")));
    }
    Ok(CurvatureTensor::space_form(m, 1.0 / (radius * radius)))
}

/// Boundary of the unit disk: flat interior and `L = δ` for the inward normal.
pub fn disk_boundary(m: usize) -> Result<BoundaryJet> {
    if m < 2 {
        return Err(argument(format!("disk_boundary needs m >= 2, got {m}")));
    }
    Ok(BoundaryJet::diagonal(&vec![1.0; m - 1]))
}

/// Flat ambient space, `L = -diag(A)` and vanishing tangential jets of `L`.
pub fn graph_hypersurface(a: &[f64]) -> BoundaryJet {
    let n = a.len();
    let l: Vec<f64> = a.iter().map(|x| -x).collect();
    let curvature = CurvatureTensor::zeros(n + 1).with_jets(Tensor::zeros(&[n + 1; 5])).unwrap();
    let l = Tensor::from_fn(&[n, n], |x| if x[0] == x[1] { l[x[0]] } else { 0.0 });
    BoundaryJet::new(l, curvature)
        .and_then(|b| b.with_jets(Tensor::zeros(&[n; 3])))
        .expect("diagonal graph data is valid")
}

/// `𝒜 = (-1)^{m-1} A_1 … A_{m-1}` for `m - 1 = a.len()`.
pub fn signed_product(a: &[f64]) -> f64 {
    let sign = if a.len().is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * a.iter().product::<f64>()
}

fn fill_orbit(t: &mut Tensor, [i, j, k, l]: [usize; 4], n: usize, value: f64) {
    for (idx, sign) in [
        ([i, j, k, l], 1.0),
        ([j, i, k, l], -1.0),
        ([i, j, l, k], -1.0),
        ([j, i, l, k], 1.0),
        ([k, l, i, j], 1.0),
        ([l, k, i, j], -1.0),
        ([k, l, j, i], -1.0),
        ([l, k, j, i], 1.0),
    ] {
        t.set(&[idx[0], idx[1], idx[2], idx[3], n], sign * value);
    }
}

/// Point data at the origin of the warped metric
/// `du_1² + e^{-A_0 u_1² r} du_2² + Σ dy_i² + dr²` over the graph boundary
/// with parameters `a = (A_1, …, A_{m-3})`.
///
/// Frame order is `(u_1, u_2, y_1, …, y_{m-3}, r)`. The curvature vanishes at
/// the origin; its first jets are `R_{0110;r} = A_0` and `R_{011r;0} = A_0`
/// together with everything forced by the curvature symmetries.
pub fn warped_product_jets(a0: f64, m: usize, a: &[f64]) -> Result<BoundaryJet> {
    if m < 3 {
        return Err(argument(format!("warped product jets need m >= 3, got {m}")));
    }
    if a.len() != m - 3 {
        return Err(argument(format!("expected {} graph parameters, got {}", m - 3, a.len())));
    }
    let r = m - 1;
    let mut dr = Tensor::zeros(&[m; 5]);
    fill_orbit(&mut dr, [0, 1, 1, 0], r, a0);
    fill_orbit(&mut dr, [0, 1, 1, r], 0, a0);
    let curvature = CurvatureTensor::zeros(m).with_jets(dr)?;
    let mut l_diag = vec![0.0; 2];
    l_diag.extend(a.iter().map(|x| -x));
    let n = m - 1;
    let l = Tensor::from_fn(&[n, n], |x| if x[0] == x[1] { l_diag[x[0]] } else { 0.0 });
    BoundaryJet::new(l, curvature)?.with_jets(Tensor::zeros(&[n; 3]))
}

/// Random valid boundary jet in dimension `m`.
///
/// `R` is a random algebraic curvature tensor. `R_{ijkl;n}` is the warped
/// product jet with random `A_0`, rotated by a random orthogonal map of the
/// tangential frame, so it satisfies the second Bianchi identity. `L` is a
/// random symmetric matrix, and `L_{ab:c}` is a random totally symmetric
/// tensor plus `(R_{cabm} + R_{cbam}) / 3`, which solves the Codazzi relation.
pub fn random_boundary_jet<R: rand::Rng + ?Sized>(m: usize, rng: &mut R) -> BoundaryJet {
    use rand_distr::StandardNormal;
    assert!(m >= 1);
    let n = m - 1;
    let normal = |rng: &mut R| -> f64 { rng.sample(StandardNormal) };
    let r = CurvatureTensor::random(m, 2, rng);
    let dr = if m >= 3 {
        let base = warped_product_jets(normal(rng), m, &vec![0.0; m - 3]).unwrap();
        let base = base.curvature().jets().unwrap().clone();
        let q = random_orthogonal(n, rng);
        let rot = |i: usize, p: usize| -> f64 {
            match (i < n, p < n) {
                (true, true) => q[(i, p)],
                (false, false) => 1.0,
                _ => 0.0,
            }
        };
        rotate(&base, &rot, m)
    } else {
        Tensor::zeros(&[m; 5])
    };
    let r = CurvatureTensor::new(m, r.tensor().clone())
        .and_then(|r| r.with_jets(dr))
        .expect("random curvature data is valid");
    let mut sym = Tensor::zeros(&[n, n]);
    for a in 0..n {
        for b in a..n {
            let v = normal(rng);
            sym.set(&[a, b], v);
            sym.set(&[b, a], v);
        }
    }
    let mut t = Tensor::zeros(&[n; 3]);
    for a in 0..n {
        for b in a..n {
            for c in b..n {
                let v = normal(rng);
                for p in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
                    t.set(&p, v);
                }
            }
        }
    }
    let dl = Tensor::from_fn(&[n; 3], |x| {
        let (a, b, c) = (x[0], x[1], x[2]);
        t.get(x).unwrap() + (r.get(c, a, b, n) + r.get(c, b, a, n)) / 3.0
    });
    BoundaryJet::new(sym, r)
        .and_then(|b| b.with_jets(dl))
        .expect("random boundary data is valid")
}

/// `T'_{ijkln} = Σ Q_{ip} Q_{jq} Q_{kr} Q_{ls} Q_{nt} T_{pqrst}`.
fn rotate(t: &Tensor, q: &impl Fn(usize, usize) -> f64, m: usize) -> Tensor {
    let mut cur = t.clone();
    for axis in 0..5 {
        cur = Tensor::from_fn(&[m; 5], |x| {
            (0..m)
                .map(|p| {
                    let w = q(x[axis], p);
                    if w == 0.0 {
                        return 0.0;
                    }
                    let mut y = [x[0], x[1], x[2], x[3], x[4]];
                    y[axis] = p;
                    w * cur.get(&y).unwrap()
                })
                .sum()
        });
    }
    cur
}

impl ModelGeometry {
    pub fn sphere(m: usize, radius: f64) -> Result<Self> {
        Ok(Self {
            kind: GeometryKind::Sphere { radius },
            dim: m,
            curvature: sphere_curvature(m, radius)?,
            boundary: None,
            volume: Some(sphere_volume(m) * radius.powi(m as i32)),
            boundary_volume: None,
        })
    }

    pub fn disk(m: usize) -> Result<Self> {
        let boundary = disk_boundary(m)?;
        Ok(Self {
            kind: GeometryKind::Disk,
            dim: m,
            curvature: CurvatureTensor::zeros(m),
            boundary: Some(boundary),
            volume: Some(ball_volume(m)),
            boundary_volume: Some(sphere_volume(m - 1)),
        })
    }

    pub fn hemisphere(m: usize) -> Result<Self> {
        let curvature = sphere_curvature(m, 1.0)?;
        let boundary = BoundaryJet::new(Tensor::zeros(&[m - 1, m - 1]), curvature.clone())?;
        Ok(Self {
            kind: GeometryKind::Hemisphere,
            dim: m,
            curvature,
            boundary: Some(boundary),
            volume: Some(sphere_volume(m) / 2.0),
            boundary_volume: Some(sphere_volume(m - 1)),
        })
    }

    pub fn flat_torus(m: usize, side: f64) -> Result<Self> {
        if m == 0 || side <= 0.0 {
            return Err(argument("a flat torus needs m >= 1 and positive side"));
        }
        Ok(Self {
            kind: GeometryKind::FlatTorus { side },
            dim: m,
            curvature: CurvatureTensor::zeros(m),
            boundary: None,
            volume: Some(side.powi(m as i32)),
            boundary_volume: None,
        })
    }

    /// The unit circle `S^1`.
    pub fn circle() -> Self {
        Self::flat_torus(1, 2.0 * std::f64::consts::PI).unwrap()
    }

    /// `[0, length]`; the boundary volume counts its two endpoints.
    pub fn interval(length: f64) -> Result<Self> {
        if length <= 0.0 {
            return Err(argument("interval length must be positive"));
        }
        Ok(Self {
            kind: GeometryKind::Interval { length },
            dim: 1,
            curvature: CurvatureTensor::zeros(1),
            boundary: Some(BoundaryJet::new(Tensor::zeros(&[0, 0]), CurvatureTensor::zeros(1))?),
            volume: Some(length),
            boundary_volume: Some(2.0),
        })
    }

    pub fn graph(a: &[f64]) -> Self {
        let boundary = graph_hypersurface(a);
        Self {
            kind: GeometryKind::Graph { a: a.to_vec() },
            dim: a.len() + 1,
            curvature: boundary.curvature().clone(),
            boundary: Some(boundary),
            volume: None,
            boundary_volume: None,
        }
    }

    pub fn warped(a0: f64, m: usize, a: &[f64]) -> Result<Self> {
        let boundary = warped_product_jets(a0, m, a)?;
        Ok(Self {
            kind: GeometryKind::Warped { a0, a: a.to_vec() },
            dim: m,
            curvature: boundary.curvature().clone(),
            boundary: Some(boundary),
            volume: None,
            boundary_volume: None,
        })
    }

    pub fn has_boundary(&self) -> bool {
        self.boundary.is_some()
    }
}

/// Riemannian product `g1 × g2` of a closed `g1` with `g2`.
pub fn product_geometry(g1: &ModelGeometry, g2: &ModelGeometry) -> Result<ModelGeometry> {
    if g1.has_boundary() {
        return Err(argument("the first factor of a product must be closed"));
    }
    let (m1, m) = (g1.dim, g1.dim + g2.dim);
    let curvature = g1.curvature.direct_sum(&g2.curvature);
    let boundary = match &g2.boundary {
        Some(b2) => {
            let n = m - 1;
            let l = Tensor::from_fn(&[n, n], |x| {
                if x[0] >= m1 && x[1] >= m1 {
                    b2.l(x[0] - m1, x[1] - m1)
                } else {
                    0.0
                }
            });
            let bc = g1.curvature.direct_sum(b2.curvature());
            let mut bj = BoundaryJet::new(l, bc)?;
            if let Some(dl2) = b2.l_jets() {
                let dl = Tensor::from_fn(&[n; 3], |x| {
                    if x.iter().all(|&i| i >= m1) {
                        dl2.get(&[x[0] - m1, x[1] - m1, x[2] - m1]).unwrap()
                    } else {
                        0.0
                    }
                });
                bj = bj.with_jets(dl)?;
            }
            Some(bj)
        }
        None => None,
    };
    let mul = |a: Option<f64>, b: Option<f64>| a.zip(b).map(|(x, y)| x * y);
    Ok(ModelGeometry {
        kind: GeometryKind::Product(Box::new(g1.clone()), Box::new(g2.clone())),
        dim: m,
        curvature,
        boundary,
        volume: mul(g1.volume, g2.volume),
        boundary_volume: mul(g1.volume, g2.boundary_volume),
    })
}

/// Interior and boundary contributions to `χ(M)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerIntegral {
    pub interior: f64,
    pub boundary: f64,
}

impl EulerIntegral {
    pub fn total(&self) -> f64 {
        self.interior + self.boundary
    }
}

/// `∫_M a_{m,m} + ∫_{∂M} a_{m,m,0}` for geometries with constant densities.
pub fn gauss_bonnet_parts(g: &ModelGeometry) -> Result<EulerIntegral> {
    let volume = g
        .volume
        .ok_or_else(|| argument(format!("{} has no exact volume; Gauss–Bonnet needs a homogeneous model", g.kind)))?;
    let interior = if g.dim.is_multiple_of(2) {
        eval_interior_index_density(&g.curvature)? * volume
    } else {
        0.0
    };
    let boundary = match &g.boundary {
        Some(bj) => {
            let area = g.boundary_volume.ok_or_else(|| argument("missing boundary volume"))?;
            eval_boundary_index_density(bj)? * area
        }
        None => 0.0,
    };
    Ok(EulerIntegral { interior, boundary })
}

pub fn gauss_bonnet(g: &ModelGeometry) -> Result<f64> {
    gauss_bonnet_parts(g).map(|p| p.total())
}

/// The Gauss–Bonnet suite: `(case id, geometry, expected χ)`.
pub fn gauss_bonnet_suite() -> Vec<(&'static str, ModelGeometry, i64)> {
    let circle = ModelGeometry::circle();
    let s2 = ModelGeometry::sphere(2, 1.0).unwrap();
    vec![
        ("S2", s2.clone(), 2),
        ("S4", ModelGeometry::sphere(4, 1.0).unwrap(), 2),
        ("D2", ModelGeometry::disk(2).unwrap(), 1),
        ("D3", ModelGeometry::disk(3).unwrap(), 1),
        ("hemisphere", ModelGeometry::hemisphere(2).unwrap(), 1),
        ("S1xD2", product_geometry(&circle, &ModelGeometry::disk(2).unwrap()).unwrap(), 0),
        ("S2xD2", product_geometry(&s2, &ModelGeometry::disk(2).unwrap()).unwrap(), 2),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sphere_scaling() {
        let r1 = sphere_curvature(3, 1.0).unwrap();
        let r2 = sphere_curvature(3, 2.0).unwrap();
        assert_eq!(r1.get(0, 1, 1, 0), 1.0);
        assert_relative_eq!(r2.get(0, 2, 2, 0), 0.25);
        assert!(sphere_curvature(1, 1.0).is_err());
    }

    #[test]
    fn warped_jets_vanish_with_a0() {
        let bj = warped_product_jets(0.0, 4, &[1.5]).unwrap();
        assert_eq!(bj.curvature().jets().unwrap().max_abs(), 0.0);
        assert_eq!(bj.l(2, 2), -1.5);
        assert!(warped_product_jets(1.0, 2, &[]).is_err());
    }

    #[test]
    fn product_rejects_boundary_first_factor() {
        let d = ModelGeometry::disk(2).unwrap();
        assert!(product_geometry(&d, &d).is_err());
    }
}
