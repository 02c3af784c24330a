//! Separated transverse modes of the guide and their dispersion relations.
//!
//! A mode (n2, n3) reduces the problem to a two-point problem along x₁ with
//! the symbol f_slab(ω) on the slab and ω² in the vacuum part. The resulting
//! scalar relations are evaluated in regularized, log-scaled form
//! ([`Dispersion`]) so that they stay finite and analytic on the search
//! region, then handed to the argument-principle solver by [`spectrum`].
//! [`truncation_study`] repeats the truncated sweep for growing X and links
//! the eigenvalues into chains.

mod branch;
mod dispersion;
mod spectrum;
mod study;

pub use branch::principal_sqrt;
pub use dispersion::{
    dispersion_full, dispersion_full_raw, dispersion_truncated, dispersion_truncated_raw, lambda1_sq, lambda2_sq,
    Dispersion, ScaledValue, BRANCH_CUT_GAP,
};
pub use spectrum::{
    enclosure_verdict, search_tiles, spectrum, spectrum_of_modes, EnclosureVerdict, ModeFailure, PointClass, Spectrum, SpectrumOptions,
    SpectrumPoint, UnresolvedPoint,
};
pub use study::{truncation_study, ChainLink, LimitClass, StudyOptions, TrajectoryReport, TruncationStudy};

use thiserror::Error;

use crate::geometry::GeometryError;
use crate::model::ModelError;
use crate::rootfinding::RootError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WaveguideError {
    #[error("ω = {re} + {im}i lies on the branch cut of λ2")]
    BranchCut { re: f64, im: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Root(#[from] RootError),
}
