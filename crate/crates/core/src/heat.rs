//! Heat trace coefficients `a_0 … a_3` of Laplace-type operators with mixed
//! boundary conditions, and their instantiation for the twisted de Rham
//! complex with absolute boundary conditions.
//!
//! The engine works on any finite fiber given as dense matrices together with
//! a grading `±1` per basis vector; the grading is only used for supertraces.
//! On a boundary the inward normal is the last frame index.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::contraction::{
    eval_boundary_index_density, eval_e_density, eval_f_densities, eval_interior_index_density, BoundaryJet,
    CurvatureTensor, DilatonJet,
};
use crate::error::{argument, Error, Result};
use crate::exterior::{clifford_op, interior_op, wedge_op, ExteriorOperator, FormBasisIndex};
use crate::geometry::random_boundary_jet;

/// Sign `s` in `Ω_ij = s Σ_kl R_ijkl 𝔢_l 𝔦_k`, fixed by requiring
/// `-½ γ_i γ_j Ω_ij = -Ric` on 1-forms.
pub const OMEGA_SIGN: f64 = 1.0;

/// `Ω_ij` built from any tensor with curvature symmetries.
pub fn curvature_operator(r: &impl Fn(usize, usize, usize, usize) -> f64, m: usize, i: usize, j: usize) -> Result<ExteriorOperator> {
    let mut out = ExteriorOperator::zeros(m)?;
    for k in 0..m {
        for l in 0..m {
            let v = r(i, j, k, l);
            if v != 0.0 {
                out += &wedge_op(l, m)?.compose(&interior_op(k, m)?).scale(OMEGA_SIGN * v);
            }
        }
    }
    Ok(out)
}

/// Weitzenböck term `-½ γ_i γ_j Ω_ij`.
pub fn weitzenbock_term(r: &impl Fn(usize, usize, usize, usize) -> f64, m: usize) -> Result<ExteriorOperator> {
    let mut out = ExteriorOperator::zeros(m)?;
    for i in 0..m {
        for j in 0..m {
            let omega = curvature_operator(r, m, i, j)?;
            let gg = clifford_op(i, m)?.compose(&clifford_op(j, m)?);
            out += &gg.compose(&omega).scale(-0.5);
        }
    }
    Ok(out)
}

/// Named summand of the endomorphism `E`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EPart {
    /// `-½ γ_i γ_j Ω_ij`
    Curvature,
    /// `-φ_{;i} φ_{;i}`
    Gradient,
    /// Hessian terms with both indices tangential.
    HessianTangential,
    /// Hessian terms with one normal index.
    HessianMixed,
    /// The `φ_{;mm}` term.
    HessianNormal,
    /// Anything else supplied by the caller.
    Other,
}

impl fmt::Display for EPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EPart::Curvature => "curvature",
            EPart::Gradient => "gradient",
            EPart::HessianTangential => "hessian_tangential",
            EPart::HessianMixed => "hessian_mixed",
            EPart::HessianNormal => "hessian_normal",
            EPart::Other => "other",
        };
        f.write_str(s)
    }
}

/// Interior data of an operator `D = -(∇_i∇_i + E)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplaceTypeStructure {
    pub dim: usize,
    /// `(-1)^degree` for each fiber basis vector.
    pub parity: Vec<f64>,
    /// Summands of `E`.
    pub e_parts: Vec<(EPart, DMatrix<f64>)>,
    /// `Ω_ij` stored at `i * dim + j`; empty when not needed.
    pub omega: Vec<DMatrix<f64>>,
    /// `E_{;m}` at a boundary point, curvature part only.
    pub e_normal_jet: Option<DMatrix<f64>>,
    /// `τ = R_ijji`
    pub tau: f64,
}

impl LaplaceTypeStructure {
    /// Trivially graded structure with a single `E`.
    pub fn new(dim: usize, e: DMatrix<f64>, tau: f64) -> Self {
        let n = e.nrows();
        Self {
            dim,
            parity: vec![1.0; n],
            e_parts: vec![(EPart::Other, e)],
            omega: Vec::new(),
            e_normal_jet: None,
            tau,
        }
    }

    pub fn fiber_dim(&self) -> usize {
        self.parity.len()
    }

    pub fn e(&self) -> DMatrix<f64> {
        let n = self.fiber_dim();
        self.e_parts.iter().fold(DMatrix::zeros(n, n), |acc, (_, p)| acc + p)
    }

    pub fn e_part(&self, part: EPart) -> DMatrix<f64> {
        let n = self.fiber_dim();
        self.e_parts
            .iter()
            .filter(|(p, _)| *p == part)
            .fold(DMatrix::zeros(n, n), |acc, (_, m)| acc + m)
    }
}

/// `χ`, `S` and `χ_{:a}` for mixed boundary conditions, with the boundary scalars.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryOperators {
    pub chi: DMatrix<f64>,
    pub s: DMatrix<f64>,
    pub chi_tangential: Vec<DMatrix<f64>>,
    /// `L_aa`
    pub l_aa: f64,
    /// `L_ab L_ab`
    pub l_ab_l_ab: f64,
    /// `R_amam`, read as the normal Ricci component `Σ_a R_{amma}`.
    pub r_amam: f64,
}

impl BoundaryOperators {
    /// `Π_± = (Id ± χ) / 2`.
    pub fn projections(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        let id = DMatrix::identity(self.chi.nrows(), self.chi.ncols());
        ((&id + &self.chi) * 0.5, (&id - &self.chi) * 0.5)
    }
}

/// `E = -½γγΩ - |dφ|² - φ_{;ji}(𝔢_i𝔦_j - 𝔦_j𝔢_i)` on `Λ(R^m)`, with `Ω_ij`
/// and, when the curvature carries first jets, `E_{;m}` from `R_{ijkl;m}`.
pub fn witten_structure(r: &CurvatureTensor, dj: &DilatonJet) -> Result<LaplaceTypeStructure> {
    let m = r.dim();
    if dj.dim() != m {
        return Err(argument("dilaton and curvature dimensions differ"));
    }
    let rf = |i, j, k, l| r.get(i, j, k, l);
    let curvature = weitzenbock_term(&rf, m)?;
    let n = 1 << m;
    let grad2: f64 = dj.grad_vec().iter().map(|x| x * x).sum();
    let gradient = DMatrix::identity(n, n) * (-grad2);
    let normal = m - 1;
    let mut hess = [DMatrix::zeros(n, n), DMatrix::zeros(n, n), DMatrix::zeros(n, n)];
    for i in 0..m {
        for j in 0..m {
            let h = dj.hess(j, i);
            if h == 0.0 {
                continue;
            }
            let op = wedge_op(i, m)?.compose(&interior_op(j, m)?) - interior_op(j, m)?.compose(&wedge_op(i, m)?);
            let slot = usize::from(i == normal) + usize::from(j == normal);
            hess[slot] -= op.matrix() * h;
        }
    }
    let [ht, hm, hn] = hess;
    let mut omega = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            omega.push(curvature_operator(&rf, m, i, j)?.into_matrix());
        }
    }
    let e_normal_jet = match r.jets() {
        Some(_) => {
            let dr = |i, j, k, l| r.jet(i, j, k, l, normal).unwrap();
            Some(weitzenbock_term(&dr, m)?.into_matrix())
        }
        None => None,
    };
    Ok(LaplaceTypeStructure {
        dim: m,
        parity: (0..n).map(|mask| FormBasisIndex(mask).parity()).collect(),
        e_parts: vec![
            (EPart::Curvature, curvature.into_matrix()),
            (EPart::Gradient, gradient),
            (EPart::HessianTangential, ht),
            (EPart::HessianMixed, hm),
            (EPart::HessianNormal, hn),
        ],
        omega,
        e_normal_jet,
        tau: r.scalar(),
    })
}

/// Absolute boundary conditions: `χ = ±1` on tangential / normal forms,
/// `S = -L_ab 𝔢_b 𝔦_a` on tangential forms and `χ_{:a} = 2 L_ab (𝔢_b 𝔦_m + 𝔢_m 𝔦_b)`.
pub fn absolute_boundary(bj: &BoundaryJet) -> Result<BoundaryOperators> {
    let m = bj.dim();
    let normal = m - 1;
    let chi = ExteriorOperator::diagonal(m, |u| if u.contains(normal) { -1.0 } else { 1.0 })?;
    let plus = ExteriorOperator::diagonal(m, |u| if u.contains(normal) { 0.0 } else { 1.0 })?;
    let mut raw = ExteriorOperator::zeros(m)?;
    for a in 0..normal {
        for b in 0..normal {
            let l = bj.l(a, b);
            if l != 0.0 {
                raw += &wedge_op(b, m)?.compose(&interior_op(a, m)?).scale(-l);
            }
        }
    }
    let s = plus.compose(&raw).compose(&plus);
    let mut chi_tangential = Vec::with_capacity(normal);
    for a in 0..normal {
        let mut op = ExteriorOperator::zeros(m)?;
        for b in 0..normal {
            let l = bj.l(a, b);
            if l != 0.0 {
                let t = wedge_op(b, m)?.compose(&interior_op(normal, m)?) + wedge_op(normal, m)?.compose(&interior_op(b, m)?);
                op += &t.scale(2.0 * l);
            }
        }
        chi_tangential.push(op.into_matrix());
    }
    let r = bj.curvature();
    let l_aa = bj.mean_curvature_trace();
    let l_ab_l_ab = (0..normal).flat_map(|a| (0..normal).map(move |b| (a, b))).map(|(a, b)| bj.l(a, b).powi(2)).sum();
    let r_amam = (0..normal).map(|a| r.get(a, normal, normal, a)).sum();
    Ok(BoundaryOperators {
        chi: chi.into_matrix(),
        s: s.into_matrix(),
        chi_tangential,
        l_aa,
        l_ab_l_ab,
        r_amam,
    })
}

/// `S = -L_ab 𝔢_b 𝔦_a` as an operator on `Λ(R^{m-1})`, the forms of the boundary.
pub fn tangential_shape_operator(bj: &BoundaryJet) -> Result<ExteriorOperator> {
    let d = bj.dim() - 1;
    let n = 1usize << d;
    let mut mat = DMatrix::zeros(n, n);
    let below = |u: usize, i: usize| if (u & ((1 << i) - 1)).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
    for u in 0..n {
        for a in (0..d).filter(|&a| u & (1 << a) != 0) {
            let v = u & !(1 << a);
            let s_a = below(u, a);
            for b in (0..d).filter(|&b| v & (1 << b) == 0) {
                let l = bj.l(a, b);
                if l != 0.0 {
                    mat[(v | (1 << b), u)] -= l * s_a * below(v, b);
                }
            }
        }
    }
    ExteriorOperator::from_matrix(d, mat)
}

/// `f`, `f_{;m}` and `f_{;mm}` at a boundary point (or `f` at an interior point).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SmearingJet {
    pub f: f64,
    pub f_m: f64,
    pub f_mm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TraceKind {
    Trace,
    Supertrace,
}

/// Which smearing jet a density term multiplies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum JetSlot {
    Interior,
    F,
    Fm,
    Fmm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityTerm {
    pub name: String,
    pub slot: JetSlot,
    pub value: f64,
}

/// Integrand coefficients of `a_n`, with their term-by-term breakdown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatDensity {
    pub n: usize,
    pub m: usize,
    pub kind: TraceKind,
    pub terms: Vec<DensityTerm>,
}

impl HeatDensity {
    pub fn coefficient(&self, slot: JetSlot) -> f64 {
        self.terms.iter().filter(|t| t.slot == slot).map(|t| t.value).sum()
    }

    /// Coefficient of `f` in the interior integrand.
    pub fn interior(&self) -> f64 {
        self.coefficient(JetSlot::Interior)
    }

    pub fn boundary_f(&self) -> f64 {
        self.coefficient(JetSlot::F)
    }

    pub fn boundary_fm(&self) -> f64 {
        self.coefficient(JetSlot::Fm)
    }

    pub fn boundary_fmm(&self) -> f64 {
        self.coefficient(JetSlot::Fmm)
    }

    pub fn term(&self, name: &str) -> f64 {
        self.terms.iter().filter(|t| t.name == name).map(|t| t.value).sum()
    }

    /// `(interior integrand, boundary integrand)` for a smearing jet.
    pub fn evaluate(&self, interior: &SmearingJet, boundary: &SmearingJet) -> (f64, f64) {
        (
            self.interior() * interior.f,
            self.boundary_f() * boundary.f + self.boundary_fm() * boundary.f_m + self.boundary_fmm() * boundary.f_mm,
        )
    }
}

fn trace(m: &DMatrix<f64>, parity: &[f64], kind: TraceKind) -> f64 {
    match kind {
        TraceKind::Trace => m.trace(),
        TraceKind::Supertrace => (0..m.nrows()).map(|k| parity[k] * m[(k, k)]).sum(),
    }
}

/// Local integrands of `a_n(f, D, 𝓑)` for `n ≤ 3`.
///
/// Without boundary operators only interior terms are produced.
pub fn a_n_density(n: usize, st: &LaplaceTypeStructure, bo: Option<&BoundaryOperators>, kind: TraceKind) -> Result<HeatDensity> {
    if n > 3 {
        return Err(Error::Unsupported(format!("heat coefficient a_{n}; only n <= 3 are implemented")));
    }
    let m = st.dim as f64;
    let fiber = st.fiber_dim();
    let id = DMatrix::<f64>::identity(fiber, fiber);
    let tr = |x: &DMatrix<f64>| trace(x, &st.parity, kind);
    let mut terms = Vec::new();
    let mut push = |name: &str, slot: JetSlot, value: f64| {
        terms.push(DensityTerm {
            name: name.to_string(),
            slot,
            value,
        })
    };
    let interior_pref = (4.0 * PI).powf(-m / 2.0);
    let boundary_pref = (4.0 * PI).powf(-(m - 1.0) / 2.0);
    match n {
        0 => push("Id", JetSlot::Interior, interior_pref * tr(&id)),
        1 => {
            if let Some(bo) = bo {
                push("chi", JetSlot::F, boundary_pref * 0.25 * tr(&bo.chi));
            }
        }
        2 => {
            let p = interior_pref / 6.0;
            for (part, e) in &st.e_parts {
                push(&format!("E_{part}"), JetSlot::Interior, p * 6.0 * tr(e));
            }
            push("tau", JetSlot::Interior, p * st.tau * tr(&id));
            if let Some(bo) = bo {
                push("Laa", JetSlot::F, p * 2.0 * bo.l_aa * tr(&id));
                push("S", JetSlot::F, p * 12.0 * tr(&bo.s));
                push("chi", JetSlot::Fm, p * 3.0 * tr(&bo.chi));
            }
        }
        3 => {
            if let Some(bo) = bo {
                let p = boundary_pref / 384.0;
                let (plus, minus) = bo.projections();
                for (part, e) in &st.e_parts {
                    push(&format!("chi_E_{part}"), JetSlot::F, p * 96.0 * tr(&(&bo.chi * e)));
                }
                push("chi_tau", JetSlot::F, p * 16.0 * st.tau * tr(&bo.chi));
                push("chi_Ramam", JetSlot::F, p * 8.0 * bo.r_amam * tr(&bo.chi));
                push(
                    "LaaLbb",
                    JetSlot::F,
                    p * bo.l_aa * bo.l_aa * tr(&(&plus * 13.0 - &minus * 7.0)),
                );
                push("LabLab", JetSlot::F, p * bo.l_ab_l_ab * tr(&(&plus * 2.0 + &minus * 10.0)));
                push("S_Laa", JetSlot::F, p * 96.0 * bo.l_aa * tr(&bo.s));
                push("S2", JetSlot::F, p * 192.0 * tr(&(&bo.s * &bo.s)));
                let cc = bo.chi_tangential.iter().fold(DMatrix::zeros(fiber, fiber), |acc, c| acc + c * c);
                push("chi_a_chi_a", JetSlot::F, p * -12.0 * tr(&cc));
                push("Laa_fm", JetSlot::Fm, p * bo.l_aa * tr(&(&plus * 6.0 + &minus * 30.0)));
                push("S_fm", JetSlot::Fm, p * 96.0 * tr(&bo.s));
                push("chi_fmm", JetSlot::Fmm, p * 24.0 * tr(&bo.chi));
            }
        }
        _ => unreachable!(),
    }
    Ok(HeatDensity {
        n,
        m: st.dim,
        kind,
        terms,
    })
}

/// [`a_n_density`] with `(-1)^degree` weights in every trace.
pub fn supertrace_density(n: usize, st: &LaplaceTypeStructure, bo: Option<&BoundaryOperators>) -> Result<HeatDensity> {
    a_n_density(n, st, bo, TraceKind::Supertrace)
}

/// One compared quantity of a cross-check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckLine {
    pub name: String,
    pub max_abs_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub m: usize,
    pub trials: usize,
    pub seed: u64,
    /// Engine supertrace versus closed form, maximum over trials.
    pub lines: Vec<CrosscheckLine>,
    /// Largest supertrace value of each group of terms that has to cancel.
    pub cancellations: Vec<CrosscheckLine>,
}

impl CrosscheckReport {
    pub fn max_error(&self) -> f64 {
        self.lines
            .iter()
            .chain(&self.cancellations)
            .map(|l| l.max_abs_error)
            .fold(0.0, f64::max)
    }
}

/// Groups of `a_3` boundary terms whose supertraces cancel in dimension two.
pub const CANCELLING_GROUPS: [(&str, &[&str]); 4] = [
    ("L^2, S^2 and chi_a chi_a", &["LaaLbb", "LabLab", "S_Laa", "S2", "chi_a_chi_a"]),
    ("curvature", &["chi_E_curvature", "chi_tau", "chi_Ramam"]),
    ("normal dilaton derivatives", &["chi_E_hessian_normal", "chi_E_hessian_mixed"]),
    ("dilaton gradient", &["chi_E_gradient"]),
];

/// Compares the engine's supertraces with the closed-form densities over
/// random jets, with per-trial seeds derived from `seed`.
pub fn crosscheck_closed_form(m: usize, trials: usize, seed: u64) -> Result<CrosscheckReport> {
    if !(1..=2).contains(&m) {
        return Err(argument(format!("cross-checks need a_3 or lower, so m must be 1 or 2, got {m}")));
    }
    let mut err = std::collections::BTreeMap::<String, f64>::new();
    let mut groups = vec![0.0f64; CANCELLING_GROUPS.len()];
    let mut record = |name: &str, got: f64, want: f64| {
        let e = err.entry(name.to_string()).or_insert(0.0);
        *e = e.max((got - want).abs());
    };
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add((trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)));
        let bj = random_boundary_jet(m, &mut rng);
        let dj = DilatonJet::random(m, &mut rng);
        let st = witten_structure(bj.curvature(), &dj)?;
        let bo = absolute_boundary(&bj)?;
        let (f0, f1) = eval_f_densities(&dj, &bj)?;
        let a1 = supertrace_density(1, &st, Some(&bo))?;
        let a2 = supertrace_density(2, &st, Some(&bo))?;
        let a3 = supertrace_density(3, &st, Some(&bo))?;
        match m {
            1 => {
                record("a_1 boundary f", a1.boundary_f(), eval_boundary_index_density(&bj)?);
                record("a_2 interior", a2.interior(), eval_e_density(&dj, bj.curvature())?);
                record("a_2 boundary f", a2.boundary_f(), f0);
                record("a_2 boundary f_m", a2.boundary_fm(), f1);
            }
            _ => {
                record("a_2 interior", a2.interior(), eval_interior_index_density(bj.curvature())?);
                record("a_2 boundary f", a2.boundary_f(), eval_boundary_index_density(&bj)?);
                record("a_2 boundary f_m", a2.boundary_fm(), 0.0);
                record("a_3 boundary f", a3.boundary_f(), f0);
                record("a_3 boundary f_m", a3.boundary_fm(), f1);
                record("a_3 boundary f_mm", a3.boundary_fmm(), 0.0);
                for (g, (_, names)) in groups.iter_mut().zip(CANCELLING_GROUPS.iter()) {
                    let v: f64 = names.iter().map(|n| a3.term(n)).sum();
                    *g = g.max(v.abs());
                }
            }
        }
    }
    let lines = err
        .into_iter()
        .map(|(name, max_abs_error)| CrosscheckLine { name, max_abs_error })
        .collect();
    let cancellations = if m == 2 {
        CANCELLING_GROUPS
            .iter()
            .zip(groups)
            .map(|((name, _), v)| CrosscheckLine {
                name: name.to_string(),
                max_abs_error: v,
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok(CrosscheckReport {
        m,
        trials,
        seed,
        lines,
        cancellations,
    })
}
