use std::fmt;

use thiserror::Error;

/// Tensor symmetry that failed validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    /// `R_ijkl = -R_jikl`
    FirstPairAntisymmetry,
    /// `R_ijkl = -R_ijlk`
    SecondPairAntisymmetry,
    /// `R_ijkl = R_klij`
    PairExchange,
    /// `R_ijkl + R_jkil + R_kijl = 0`
    FirstBianchi,
    /// `R_ijkl;n + R_ijln;k + R_ijnk;l = 0`
    SecondBianchi,
    /// `L_ab = L_ba`
    SecondFundamentalForm,
    /// `phi_;ij = phi_;ji`
    Hessian,
    /// `L_{c2c3:c1} - L_{c1c3:c2} = R_{c1c2c3m}`
    Codazzi,
}

impl fmt::Display for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Symmetry::FirstPairAntisymmetry => "antisymmetry in the first index pair (R_ijkl = -R_jikl)",
            Symmetry::SecondPairAntisymmetry => "antisymmetry in the second index pair (R_ijkl = -R_ijlk)",
            Symmetry::PairExchange => "pair exchange symmetry (R_ijkl = R_klij)",
            Symmetry::FirstBianchi => "first Bianchi identity",
            Symmetry::SecondBianchi => "second Bianchi identity",
            Symmetry::SecondFundamentalForm => "symmetry of the second fundamental form",
            Symmetry::Hessian => "symmetry of the dilaton Hessian",
            Symmetry::Codazzi => "Codazzi equation",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("capacity exceeded: {what} = {value} (limit {limit})")]
    Capacity {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("tensor validation failed: {symmetry} violated at {location} (residual {residual:e})")]
    Validation {
        symmetry: Symmetry,
        location: String,
        residual: f64,
    },

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("numerical failure at index {index}: {message}")]
    Numeric { index: usize, message: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("malformed tensor input: {0}")]
    Input(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}
