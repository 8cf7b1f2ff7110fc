//! Pseudo-spectral solver and diagnostics for incompressible fractional
//! Hall-MHD with ion-slip on a periodic box.

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod fft;
pub mod field;
pub mod grid;
pub mod init;
pub mod integrator;
pub mod norms;
pub mod ops;
pub mod padding;
pub mod product;

pub use error::{Error, Result};
pub use field::{PhysVector, SpectralScalarField, SpectralVectorField, C64};
pub use grid::{make_grid, Grid, Mask};
