//! Initial data: smooth cutoff, annular Beltrami field, small random parts
//! and their assembly into `(u0, b0)`.

pub mod assemble;
pub mod beltrami;
pub mod cutoff;
pub mod params;
pub mod small;

pub use assemble::{assemble_initial_data, assemble_with, localize, localize_band, AssemblyOptions, InitialData, Provenance};
pub use beltrami::{helical_basis, make_beltrami, AnnulusRealization};
pub use cutoff::{make_cutoff, Cutoff, CutoffReport};
pub use params::SimParams;
pub use small::make_small_part;
