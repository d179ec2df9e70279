//! Command-line front end for the multifractal toolkit.

pub mod acceptance;
pub mod app;
pub mod format;
pub mod range;

pub use app::run;
