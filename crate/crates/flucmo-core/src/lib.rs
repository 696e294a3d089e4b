//! Deterministic approximations of first- and second-order fluctuation moments for
//! alternating products `G(z_1)A_1 ... G(z_k)A_k` of Wigner resolvents and deterministic
//! matrices.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and the parallel
//! Monte Carlo driver live in the `flucmo` companion crate.
#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

pub mod caps;
pub mod error;
pub mod functional_cov;
pub mod linalg;
pub mod matrix_layer;
pub mod montecarlo;
pub mod ncgeom;
pub mod second_order;
pub mod semicircle;

pub use caps::Caps;
pub use error::{Error, Result};
pub use linalg::ComplexMatrix;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
