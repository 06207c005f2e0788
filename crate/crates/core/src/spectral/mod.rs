//! Heat traces of Witten Laplacians on an interval, computed from discrete
//! spectra and compared with the local heat coefficients.

mod checks;
mod eigen;
mod problem;
mod trace;

pub use checks::{
    conformal_variation_check, euler_supertrace, free_neumann_fit, interval_volume_coefficient, neumann_coefficient,
    potential_variation_check, witten_fit, witten_supertrace_coefficient, CoefficientCheck, End, EulerCheck, FitGrid,
    FreeFit, Polynomial, VariationCheck, WittenFit, CONFORMAL_GRID, CONFORMAL_STEPS, FREE_GRID, SCALAR_GRID, SCALAR_STEP,
    WITTEN_GRID,
};
pub use eigen::Tridiagonal;
pub use problem::{build_problems, BoundaryCondition, DilatonProfile, SturmLiouvilleProblem, MIN_GRID};
pub use trace::{
    eigenvalue_budget, eigenvalues, fit_asymptotics, geometric_grid, heat_trace, spectrum, super_heat_trace,
    AsymptoticFit, HeatTraceSeries, Spectrum, TraceValue, ILL_CONDITIONED, TRUNCATION,
};
