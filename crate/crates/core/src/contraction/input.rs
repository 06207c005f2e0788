//! JSON tensor input.
//!
//! ```json
//! { "dim": 2,
//!   "R": [[[[0,0],[0,0]], ...]],
//!   "dR": ..., "L": [[1.0]], "dL": ..., "phi_grad": [0, 0], "phi_hess": [[0, 0], [0, 0]] }
//! ```
//!
//! Arrays are nested row-major and zero based: `R[i][j][k][l]` is
//! `R_{(i+1)(j+1)(k+1)(l+1)}` in one-based frame notation, `dR[i][j][k][l][n]`
//! is `R_{ijkl;n}`, `L[a][b]` runs over tangential indices and `dL[a][b][c]`
//! is `L_{ab:c}`. The normal at a boundary point is the last frame index.
//! Omitted fields default to zero, except jets, which stay absent.

use serde::{Deserialize, Serialize};

use super::tensors::{BoundaryJet, CurvatureTensor, DilatonJet, Tensor};
use crate::error::{argument, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TensorInput {
    pub dim: usize,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub r: Option<serde_json::Value>,
    #[serde(rename = "dR", default, skip_serializing_if = "Option::is_none")]
    pub dr: Option<serde_json::Value>,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub l: Option<serde_json::Value>,
    #[serde(rename = "dL", default, skip_serializing_if = "Option::is_none")]
    pub dl: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_grad: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_hess: Option<Vec<Vec<f64>>>,
}

/// Validated point data read from a [`TensorInput`].
#[derive(Debug, Clone, PartialEq)]
pub struct PointData {
    pub curvature: CurvatureTensor,
    pub boundary: Option<BoundaryJet>,
    pub dilaton: DilatonJet,
}

fn flatten(value: &serde_json::Value, shape: &[usize], name: &str) -> Result<Tensor> {
    fn walk(v: &serde_json::Value, shape: &[usize], out: &mut Vec<f64>, name: &str) -> Result<()> {
        match shape.split_first() {
            None => {
                let x = v
                    .as_f64()
                    .ok_or_else(|| argument(format!("{name}: expected a number, found {v}")))?;
                out.push(x);
                Ok(())
            }
            Some((&n, rest)) => {
                let arr = v
                    .as_array()
                    .ok_or_else(|| argument(format!("{name}: expected an array of length {n}")))?;
                if arr.len() != n {
                    return Err(argument(format!("{name}: expected length {n}, found {}", arr.len())));
                }
                arr.iter().try_for_each(|x| walk(x, rest, out, name))
            }
        }
    }
    let mut data = Vec::new();
    walk(value, shape, &mut data, name)?;
    Tensor::from_vec(shape, data)
}

impl TensorInput {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn into_point_data(self) -> Result<PointData> {
        let m = self.dim;
        if m == 0 {
            return Err(argument("dim must be positive"));
        }
        let r = match &self.r {
            Some(v) => flatten(v, &[m; 4], "R")?,
            None => Tensor::zeros(&[m; 4]),
        };
        let mut curvature = CurvatureTensor::new(m, r)?;
        if let Some(v) = &self.dr {
            curvature = curvature.with_jets(flatten(v, &[m; 5], "dR")?)?;
        }
        let boundary = match &self.l {
            Some(v) => {
                let mut bj = BoundaryJet::new(flatten(v, &[m - 1; 2], "L")?, curvature.clone())?;
                if let Some(dv) = &self.dl {
                    bj = bj.with_jets(flatten(dv, &[m - 1; 3], "dL")?)?;
                }
                Some(bj)
            }
            None if self.dl.is_some() => return Err(argument("dL given without L")),
            None => None,
        };
        let grad = self.phi_grad.clone().unwrap_or_else(|| vec![0.0; m]);
        if grad.len() != m {
            return Err(argument(format!("phi_grad: expected length {m}, found {}", grad.len())));
        }
        let hess = match &self.phi_hess {
            Some(rows) => {
                let v = serde_json::to_value(rows)?;
                flatten(&v, &[m, m], "phi_hess")?
            }
            None => Tensor::zeros(&[m, m]),
        };
        let dilaton = DilatonJet::new(grad, hess)?;
        Ok(PointData {
            curvature,
            boundary,
            dilaton,
        })
    }
}

/// Parses and validates a JSON tensor document.
pub fn read_point_data(text: &str) -> Result<PointData> {
    TensorInput::from_json(text)?.into_point_data()
}

/// Nested JSON array for a dense tensor.
pub fn tensor_to_json(t: &Tensor) -> serde_json::Value {
    fn build(t: &Tensor, prefix: &mut Vec<usize>) -> serde_json::Value {
        if prefix.len() == t.rank() {
            return serde_json::json!(t.get(prefix).unwrap());
        }
        let n = t.shape()[prefix.len()];
        let items = (0..n)
            .map(|i| {
                prefix.push(i);
                let v = build(t, prefix);
                prefix.pop();
                v
            })
            .collect();
        serde_json::Value::Array(items)
    }
    build(t, &mut Vec::new())
}
