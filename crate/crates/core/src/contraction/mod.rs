//! ε-tensor contractions and the local index densities built from them.

mod densities;
mod expression;
mod input;
mod tensors;

pub use densities::{
    e_expression, eval_boundary_index_density, eval_e_density, eval_f_densities, eval_interior_index_density,
    f1_expression, f2_expression, f3_expression, f_densities_from_constants, f_expression, interior_expression,
    invariant_values, universal_constants, InvariantValues, UniversalConstants,
};
pub use expression::{
    divergence_eval, epsilon_contract, ContractionExpression, Factor, Slot, Symbol, TensorAssignment, MAX_BLOCK,
};
pub use input::{read_point_data, tensor_to_json, PointData, TensorInput};
pub use tensors::{BoundaryJet, CurvatureTensor, DilatonJet, Tensor, CODAZZI_TOLERANCE, SYMMETRY_TOLERANCE};
