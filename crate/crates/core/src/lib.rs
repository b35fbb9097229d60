//! Zero-temperature Casimir energy and forces for two planar mirrors separated
//! by an arbitrary stack of homogeneous magnetodielectric layers.
//!
//! The crate is organised bottom-up: [`materials`] evaluates the response of
//! each medium at imaginary frequency, [`fresnel`] builds interface and stack
//! coefficients, [`kernel`] evaluates the spectral integrands at one point,
//! and [`quadrature`] integrates them into energies and forces. [`config`],
//! [`report`] and [`checks`] back the `casimir` command-line tool.

pub mod checks;
pub mod config;
pub mod error;
pub mod fresnel;
pub mod kernel;
pub mod materials;
pub mod quadrature;
pub mod report;
pub mod run;

pub use error::{Error, Result};
pub use fresnel::{Layer, PlateModel, StackCoefficients};
pub use kernel::SystemConfig;
pub use materials::{MaterialModel, Oscillator, Polarization, SpectralPoint};
pub use quadrature::{CasimirResult, QuadratureSpec};
