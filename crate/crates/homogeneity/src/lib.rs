//! Homogeneity counts, finite-resolution profiles and homogeneity dimension estimates.

mod check;
mod count;
mod mis;
mod profile;

pub use check::{check_main_inequality, MainInequalityReport, MainInequalityRow};
pub use count::{counting_measure, hom_count, hom_count_atomic, Exactness, HomCount, HomogeneityQuery, DEFAULT_GAMMA};
pub use mis::EXACT_CUTOFF;
pub use profile::{
    dim_hom_estimate, halving_grid, hom_delta_profile, hom_delta_profile_atomic, HomDimEstimate, HomogeneityProfile,
    ProfileEntry, ProfileSettings,
};
