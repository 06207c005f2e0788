//! ε-block contraction expressions and their brute-force evaluator.
//!
//! An expression is a product of tensor factors whose index slots are bound
//! to positions of an ε block `ε_J^I` (upper positions carry `I`, lower
//! positions carry `J`), to summed dummy indices, or to fixed frame indices.
//! The ε block of size `μ` ranges over an index set `0..n`; the evaluator sums
//! `sign(π) sign(ρ)` over all `μ`-subsets `U` of `0..n` and all orderings
//! `I = π(U)`, `J = ρ(U)`.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use super::tensors::{BoundaryJet, CurvatureTensor, DilatonJet, Tensor};
use crate::error::{argument, Error, Result};
use crate::special::{combinations, pairwise_sum, signed_permutations};

/// Largest supported ε block.
pub const MAX_BLOCK: usize = 8;

/// Name of a tensor in an expression.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    /// `R_{ijkl}`
    Curvature,
    /// `L_{ab}`
    SecondFundamentalForm,
    /// `φ_{;i}`
    DilatonGradient,
    /// `φ_{;ij}`
    DilatonHessian,
    /// Any other tensor supplied by the caller.
    Named(String),
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Curvature => f.write_str("R"),
            Symbol::SecondFundamentalForm => f.write_str("L"),
            Symbol::DilatonGradient => f.write_str("dphi"),
            Symbol::DilatonHessian => f.write_str("hess_phi"),
            Symbol::Named(name) => f.write_str(name),
        }
    }
}

/// Binding of one index slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    /// Position `p` of the upper ε tuple `I`.
    Upper(usize),
    /// Position `p` of the lower ε tuple `J`.
    Lower(usize),
    /// Dummy index `d`, summed over its declared range.
    Dummy(usize),
    /// A fixed frame index, e.g. the normal.
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    pub symbol: Symbol,
    pub slots: Vec<Slot>,
}

/// A product of factors contracted against an ε block.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionExpression {
    block: usize,
    range: usize,
    dummy_ranges: Vec<usize>,
    factors: Vec<Factor>,
    divergence: Option<Slot>,
}

/// Concrete tensors (and first jets, derivative index last) for each symbol.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TensorAssignment {
    values: BTreeMap<Symbol, Tensor>,
    jets: BTreeMap<Symbol, Tensor>,
}

impl TensorAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, symbol: Symbol, value: Tensor) -> &mut Self {
        self.values.insert(symbol, value);
        self
    }

    pub fn insert_jet(&mut self, symbol: Symbol, jet: Tensor) -> &mut Self {
        self.jets.insert(symbol, jet);
        self
    }

    pub fn value(&self, symbol: &Symbol) -> Option<&Tensor> {
        self.values.get(symbol)
    }

    pub fn jet(&self, symbol: &Symbol) -> Option<&Tensor> {
        self.jets.get(symbol)
    }

    pub fn with_curvature(mut self, r: &CurvatureTensor) -> Self {
        self.values.insert(Symbol::Curvature, r.tensor().clone());
        if let Some(dr) = r.jets() {
            self.jets.insert(Symbol::Curvature, dr.clone());
        }
        self
    }

    pub fn with_boundary(mut self, bj: &BoundaryJet) -> Self {
        self = self.with_curvature(bj.curvature());
        self.values.insert(Symbol::SecondFundamentalForm, bj.l_tensor().clone());
        if let Some(dl) = bj.l_jets() {
            self.jets.insert(Symbol::SecondFundamentalForm, dl.clone());
        }
        self
    }

    pub fn with_dilaton(mut self, dj: &DilatonJet) -> Self {
        let n = dj.dim();
        self.values.insert(
            Symbol::DilatonGradient,
            Tensor::from_vec(&[n], dj.grad_vec().to_vec()).unwrap(),
        );
        self.values.insert(Symbol::DilatonHessian, dj.hess_tensor().clone());
        self
    }
}

impl ContractionExpression {
    /// Empty product against an ε block of size `block` over `0..range`.
    pub fn new(block: usize, range: usize) -> Result<Self> {
        if block > MAX_BLOCK {
            return Err(Error::Capacity {
                what: "epsilon block size",
                value: block,
                limit: MAX_BLOCK,
            });
        }
        if block > range {
            return Err(argument(format!("epsilon block of size {block} exceeds index range {range}")));
        }
        Ok(Self {
            block,
            range,
            dummy_ranges: Vec::new(),
            factors: Vec::new(),
            divergence: None,
        })
    }

    pub fn block(&self) -> usize {
        self.block
    }

    pub fn range(&self) -> usize {
        self.range
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn divergence(&self) -> Option<Slot> {
        self.divergence
    }

    /// Declares a new dummy index over `0..range` and returns its slot.
    pub fn dummy(&mut self, range: usize) -> Slot {
        self.dummy_ranges.push(range);
        Slot::Dummy(self.dummy_ranges.len() - 1)
    }

    pub fn factor(mut self, symbol: Symbol, slots: &[Slot]) -> Self {
        self.factors.push(Factor {
            symbol,
            slots: slots.to_vec(),
        });
        self
    }

    /// `𝓡` chain over ε positions `positions`: `R_{i_p i_{p+1} j_{p+1} j_p}` for
    /// `p = start, start + 2, …`. An empty range contributes the factor 1.
    pub fn curvature_chain(mut self, positions: std::ops::Range<usize>) -> Self {
        assert!(positions.len().is_multiple_of(2), "curvature chains pair consecutive positions");
        let mut p = positions.start;
        while p < positions.end {
            self = self.factor(
                Symbol::Curvature,
                &[Slot::Upper(p), Slot::Upper(p + 1), Slot::Lower(p + 1), Slot::Lower(p)],
            );
            p += 2;
        }
        self
    }

    /// `𝓛` chain `L_{a_p b_p}` for `p` in `positions`.
    pub fn l_chain(mut self, positions: std::ops::Range<usize>) -> Self {
        for p in positions {
            self = self.factor(Symbol::SecondFundamentalForm, &[Slot::Upper(p), Slot::Lower(p)]);
        }
        self
    }

    /// Marks `slot` as the index of an outer tangential divergence `{…}_{:slot}`.
    pub fn with_divergence(mut self, slot: Slot) -> Self {
        self.divergence = Some(slot);
        self
    }

    /// Checks that every ε position is bound exactly once and every dummy
    /// exactly twice, counting the divergence slot.
    pub fn validate(&self) -> Result<()> {
        let mut upper = vec![0usize; self.block];
        let mut lower = vec![0usize; self.block];
        let mut dummies = vec![0usize; self.dummy_ranges.len()];
        let slots = self.factors.iter().flat_map(|f| f.slots.iter()).chain(self.divergence.iter());
        for slot in slots {
            match *slot {
                Slot::Upper(p) if p < self.block => upper[p] += 1,
                Slot::Lower(p) if p < self.block => lower[p] += 1,
                Slot::Dummy(d) if d < dummies.len() => dummies[d] += 1,
                Slot::Fixed(_) => {}
                other => return Err(argument(format!("slot {other:?} is not declared"))),
            }
        }
        if let Some((p, _)) = upper.iter().enumerate().find(|(_, &c)| c != 1) {
            return Err(argument(format!("upper epsilon position {p} must be bound exactly once")));
        }
        if let Some((p, _)) = lower.iter().enumerate().find(|(_, &c)| c != 1) {
            return Err(argument(format!("lower epsilon position {p} must be bound exactly once")));
        }
        if let Some((d, _)) = dummies.iter().enumerate().find(|(_, &c)| c != 2) {
            return Err(argument(format!("dummy index {d} must appear exactly twice")));
        }
        if let Some(Slot::Fixed(_)) = self.divergence {
            return Err(argument("the divergence index must be summed"));
        }
        Ok(())
    }

    /// Contracts the expression against `data`. Expressions with a
    /// divergence are expanded by the Leibniz rule using the supplied jets.
    pub fn evaluate(&self, data: &TensorAssignment) -> Result<f64> {
        self.validate()?;
        let values = self.lookup(data, false)?;
        let jets = if self.divergence.is_some() {
            Some(self.lookup(data, true)?)
        } else {
            None
        };

        let perms = signed_permutations(self.block);
        let subsets = combinations(self.range, self.block);
        let partial: Vec<f64> = subsets
            .par_iter()
            .flat_map_iter(|subset| perms.iter().map(move |pi| (subset, pi)))
            .map(|(subset, (pi, sign_pi))| {
                let upper: Vec<usize> = pi.iter().map(|&k| subset[k]).collect();
                let terms: Vec<f64> = perms
                    .iter()
                    .map(|(rho, sign_rho)| {
                        let lower: Vec<usize> = rho.iter().map(|&k| subset[k]).collect();
                        sign_rho * self.sum_dummies(&upper, &lower, &values, jets.as_deref())
                    })
                    .collect();
                sign_pi * pairwise_sum(&terms)
            })
            .collect();
        Ok(pairwise_sum(&partial))
    }

    fn lookup<'a>(&self, data: &'a TensorAssignment, jets: bool) -> Result<Vec<&'a Tensor>> {
        self.factors
            .iter()
            .map(|f| {
                let (source, what) = if jets {
                    (&data.jets, "first jet")
                } else {
                    (&data.values, "value")
                };
                let t = source
                    .get(&f.symbol)
                    .ok_or_else(|| Error::Evaluation(format!("missing {what} for tensor symbol {}", f.symbol)))?;
                let rank = f.slots.len() + usize::from(jets);
                if t.rank() != rank {
                    return Err(Error::Evaluation(format!(
                        "{what} of {} has rank {}, expression needs {rank}",
                        f.symbol,
                        t.rank()
                    )));
                }
                Ok(t)
            })
            .collect()
    }

    fn sum_dummies(&self, upper: &[usize], lower: &[usize], values: &[&Tensor], jets: Option<&[&Tensor]>) -> f64 {
        let count: usize = self.dummy_ranges.iter().product();
        let mut dummy = vec![0usize; self.dummy_ranges.len()];
        let mut total = 0.0;
        for flat in 0..count {
            let mut rem = flat;
            for (d, &n) in dummy.iter_mut().zip(&self.dummy_ranges) {
                *d = rem % n;
                rem /= n;
            }
            let resolve = |slot: &Slot| match *slot {
                Slot::Upper(p) => upper[p],
                Slot::Lower(p) => lower[p],
                Slot::Dummy(d) => dummy[d],
                Slot::Fixed(i) => i,
            };
            total += match jets {
                None => self.product(&resolve, values),
                Some(jets) => self.leibniz(&resolve, values, jets, resolve(&self.divergence.unwrap())),
            };
        }
        total
    }

    fn entry(t: &Tensor, slots: &[Slot], resolve: &impl Fn(&Slot) -> usize, extra: Option<usize>) -> f64 {
        let mut idx = [0usize; 8];
        for (k, s) in slots.iter().enumerate() {
            idx[k] = resolve(s);
        }
        let mut n = slots.len();
        if let Some(e) = extra {
            idx[n] = e;
            n += 1;
        }
        // indices outside a tensor's own range (e.g. the normal in L) read as 0
        t.get(&idx[..n]).unwrap_or(0.0)
    }

    fn product(&self, resolve: &impl Fn(&Slot) -> usize, values: &[&Tensor]) -> f64 {
        let mut acc = 1.0;
        for (f, t) in self.factors.iter().zip(values) {
            acc *= Self::entry(t, &f.slots, resolve, None);
            if acc == 0.0 {
                break;
            }
        }
        acc
    }

    fn leibniz(&self, resolve: &impl Fn(&Slot) -> usize, values: &[&Tensor], jets: &[&Tensor], dir: usize) -> f64 {
        let vals: Vec<f64> = self
            .factors
            .iter()
            .zip(values)
            .map(|(f, t)| Self::entry(t, &f.slots, resolve, None))
            .collect();
        let mut total = 0.0;
        for (k, (f, t)) in self.factors.iter().zip(jets).enumerate() {
            let d = Self::entry(t, &f.slots, resolve, Some(dir));
            if d == 0.0 {
                continue;
            }
            let rest: f64 = vals.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, v)| v).product();
            total += d * rest;
        }
        total
    }
}

/// Standalone form of [`ContractionExpression::evaluate`].
pub fn epsilon_contract(expr: &ContractionExpression, data: &TensorAssignment) -> Result<f64> {
    expr.evaluate(data)
}

/// Evaluates an expression that carries an outer divergence.
pub fn divergence_eval(expr: &ContractionExpression, data: &TensorAssignment) -> Result<f64> {
    if expr.divergence().is_none() {
        return Err(argument("expression has no divergence index"));
    }
    expr.evaluate(data)
}
