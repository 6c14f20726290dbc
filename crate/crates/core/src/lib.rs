//! Radial heat conduction in multilayer cylinders: mesh construction,
//! conservative band assembly, diagonal conditioning and band solvers.

pub mod assembly;
pub mod band;
pub mod bench;
pub mod conditioning;
pub mod config;
pub mod error;
pub mod materials;
pub mod mesh;
pub mod scalar;
pub mod solvers;
pub mod time_stepper;

pub use error::{Error, Result};
