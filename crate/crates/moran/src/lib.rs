//! Self-similar Moran constructions: the closed-form τ and spectrum, an
//! embedded tree builder and structural validation.

mod analytic;
mod build;
mod spec;
mod validate;

pub use analytic::{
    alpha_range, dim_formula, exact_spectrum, solve_tau, spectrum_point, tau_derivative, tau_residual, Q_CAP,
};
pub use build::{build_selfsimilar_tree, MAX_CELLS};
pub use spec::SelfSimilarSpec;
pub use validate::{validate_moran, ConditionCheck, MoranValidation, RATIO_DEVIATION_MAX};
