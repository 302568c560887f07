//! Pseudospectral simulation of the 2D second-grade fluid equations in a
//! no-slip periodic channel, with the diagnostics used to study the joint
//! limit of vanishing elastic length `alpha` and viscosity `nu`.

pub mod error;
pub mod spectral;

pub use error::{Error, Result};
pub mod fields;
pub mod dynamics;
pub mod diagnostics;
pub mod verify;
pub mod experiments;
pub mod io;
