//! Porosity of sets and measures, conical masses, and the porosity dimension bounds.

mod bounds;
mod cone;
mod cover;
mod frames;
mod porosity;
mod tradeoff;

pub use bounds::{kpor_bound, metric_poro_bound};
pub use cone::{cone_mass_ratio, cone_mass_ratio_atomic, Cone};
pub use cover::{porous_cover_count, PorousCover};
pub use frames::{axis_frame, random_frames};
pub use porosity::{
    por_measure, por_measure_atomic, por_set, Hole, HoleDomain, Porosity, PorosityMode, PorosityQuery, DEFAULT_FRAMES,
};
pub use tradeoff::{
    check_porosity_dimension_tradeoff, udim_estimate, TradeoffMember, TradeoffReport, TradeoffRow, TradeoffSettings,
};
