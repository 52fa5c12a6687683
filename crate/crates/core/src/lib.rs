//! Lifshitz-theory Casimir pressures between plates coated with gapped
//! graphene, and sphere-plate force gradients derived from them.
//!
//! The pieces, from the bottom up:
//!
//! - [`material`]: dielectric response ε(iξ) on the imaginary axis;
//! - [`graphene`]: the polarization tensor of a gapped Dirac sheet;
//! - [`reflection`]: TM/TE reflection coefficients of layered stacks;
//! - [`engine`]: the Matsubara sum and the T = 0 frequency integral;
//! - [`sphere_plate`]: gradients, thermal corrections and model bands.

// NaN-rejecting checks read naturally as `!(x > 0.0)`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod engine;
pub mod error;
pub mod graphene;
pub mod material;
pub mod quadrature;
pub mod reflection;
pub mod sphere_plate;
pub mod units;

pub use engine::{pressure, pressure_t0, PressureResult, QuadratureConfig, Scenario};
pub use error::{CasimirError, Result};
pub use graphene::GrapheneSheet;
pub use material::MaterialModel;
pub use reflection::{FilmRecursion, PlateStack};

/// Crate version, reported in output metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
