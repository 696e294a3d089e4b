//! Command-line front end, file formats and the parallel Monte Carlo driver.

pub mod caps;
pub mod cli;
pub mod config;
pub mod error;
pub mod format;
pub mod parallel;
pub mod validate;

pub use cli::run;
