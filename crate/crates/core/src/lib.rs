//! Second-order coherence of coherent superpositions of two single-mode
//! squeezed vacua.
//!
//! * [`analytic`]: closed-form overlaps, cross moments and g² formulas.
//! * [`fock`]: an independent truncated photon-number oracle.
//! * [`optimize`]: constrained grid search and simplex refinement.
//! * [`scan`] and [`export`]: gridded g² surfaces and their file formats.

pub mod analytic;
pub mod error;
pub mod export;
pub mod fock;
pub mod optimize;
pub mod params;
pub mod scan;

pub use error::{JanusError, Result};
pub use params::{JanusParams, PhaseGeometry, ReducedVars, SqueezeParam};
