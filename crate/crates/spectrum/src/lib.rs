//! L^q-spectra, entropy and local dimensions, and the discrete Legendre transform.

mod checks;
mod dims;
mod fit;
mod ladder;
mod legendre;
mod packing;
mod tau;

pub use checks::{check_dim_sandwich, check_global_is_min_local, GlobalMinReport, SandwichReport, SandwichRow};
pub use dims::{
    dimension_report, dimension_report_on, entropy_dim, entropy_dim_on, local_dim_ball, local_dim_partition,
    local_dim_partition_on, window_scales, DimensionReport, EntropyDim,
};
pub use fit::{fit, Estimate};
pub use ladder::{atomic_ladder, ladder, tree_ladder, Ladder, LadderCell, Region, Rung};
pub use legendre::{curve_alphas, legendre, LegendrePoint};
pub use packing::{s_q_packing, PackingSum};
pub use tau::{
    default_q_grid, dim_q, spectrum_curve, spectrum_curve_on, tau_global, tau_local, tau_local_measure, Backend,
    SpectrumCurve, TauSample,
};
