//! Certified spectral data for the lossy Drude-Lorentz model in a
//! semi-infinite rectangular waveguide containing a metamaterial slab.
//!
//! The crate is split along the computational pipeline:
//!
//! * [`model`] closed-form symbols, sign regions, spectral enclosures,
//!   essential-spectrum sets and large-parameter asymptotics;
//! * [`rootfinding`] an Aberth-Ehrlich polynomial solver and an
//!   argument-principle rectangle subdivision root finder;
//! * [`waveguide`] transverse modes, branch-managed dispersion functions for
//!   the full and the truncated guide, spectrum sweeps and truncation studies;
//! * [`fd_oracle`] an independent finite-difference determinant check of the
//!   truncated problem;
//! * [`report`] the serializable sweep output consumed by the CLI.

pub mod fd_oracle;
pub mod geometry;
pub mod model;
pub mod report;
pub mod rootfinding;
pub mod waveguide;

pub use geometry::{ModeIndex, Truncation, WaveguideGeometry};
pub use model::MaterialParams;
pub use num_complex::Complex64;
