//! Batch runner for the supertrace verification suites.
//!
//! Suites live in a registration table ([`SUITES`]); each one turns a
//! [`Config`] into a list of [`VerificationReport`]s. Reports are emitted as
//! JSON, CSV or text in canonical `(suite, case)` order.

pub mod geometry_spec;
pub mod report;
pub mod suites;

use supertrace_core::spectral::{DilatonProfile, FitGrid, FREE_GRID};

pub use geometry_spec::GeometrySpec;
pub use report::{emit_report, Expected, Format, Policy, VerificationReport, CSV_HEADER};
pub use suites::{run_suite, SuiteOutput, SUITES};

/// Default seed.
pub const DEFAULT_SEED: u64 = 0x00D1_1A70;

/// Default spectral grid size.
pub const DEFAULT_GRID: usize = 4000;

/// Environment variable capping the worker pool.
pub const THREADS_ENV: &str = "SUPERTRACE_LAB_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] supertrace_core::Error),
}

impl LabError {
    /// 2 for usage errors and rejected inputs, 3 for I/O, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use supertrace_core::Error as E;
        match self {
            LabError::Usage(_) => 2,
            LabError::Io(_) => 3,
            LabError::Core(E::Argument(_) | E::Capacity { .. } | E::Unsupported(_) | E::Input(_) | E::Validation { .. }) => 2,
            LabError::Core(_) => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub seed: u64,
    /// Extra geometry for the Gauss–Bonnet suite.
    pub geometry: Option<GeometrySpec>,
    /// Replaces the default dilaton profiles of the spectral suite.
    pub phi: Option<DilatonProfile>,
    pub grid: usize,
    /// Time grid of the free-interval fit.
    pub free_grid: FitGrid,
    pub tolerance_scale: f64,
    pub timings: bool,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            geometry: None,
            phi: None,
            grid: DEFAULT_GRID,
            free_grid: FREE_GRID,
            tolerance_scale: 1.0,
            timings: false,
        }
    }
}

impl Config {
    pub fn tolerance(&self, base: f64) -> f64 {
        base * self.tolerance_scale
    }
}
