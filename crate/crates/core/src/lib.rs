//! Eigenstate families of one-dimensional potentials and numerical checks of
//! their completeness.
//!
//! Units are natural (ħ = m = 1). Free states carry the average-density
//! normalization: 1/(2π) on a full line, 1/π on a half line, and
//! period/(2π) per cell for Bloch states.

pub mod completeness;
pub mod eigenstates;
pub mod error;
pub mod numerics;
pub mod potentials;
pub mod spectra;

mod csv;

pub use completeness::{
    expand, grid_oracle, identity_check, make_initial, project, total_probability, ExpansionOptions,
    ExpansionResult, InitialKind, InitialState, OracleResult, ProbabilityReport,
};
pub use eigenstates::{Basis, Eigenstate, Family, PiecewiseWave, Region};
pub use error::{Error, Result};
pub use csv::fmt_num;
pub use num_complex::Complex64;
pub use potentials::{AsymptoticClass, AsymptoticKind, Potential, PotentialValue, Side};
pub use spectra::{BandStructure, Branch, SpectralBand};
