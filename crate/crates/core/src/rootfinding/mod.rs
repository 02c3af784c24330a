//! Root-finding kernels.
//!
//! [`poly_roots`] finds all roots of a small complex polynomial by
//! Aberth-Ehrlich simultaneous iteration. [`winding_count`] counts the zeros of
//! an analytic function inside a rectangle by tracking its argument along the
//! boundary, and [`isolate_roots`] turns counts into certified roots by
//! recursive quadrisection followed by Newton polish.
//!
//! Only the argument of the function matters for the counts, so callers may
//! hand in any positive real rescaling of an analytic function. The
//! rescaling should vary slowly: the boundary refinement reads |F′/F| off the
//! sampled values. The waveguide code relies on this to keep exponentially
//! large dispersion functions finite.

mod isolate;
mod polynomial;
mod region;
mod winding;

pub use isolate::{
    isolate_roots, isolate_roots_with, CentralDifference, CertifiedRoot, IsolateOptions, Isolation, Polisher,
    UnresolvedRoot,
};
pub use polynomial::{poly_roots, Polynomial, MAX_DEGREE};
pub use region::SearchRegion;
pub use winding::{winding_count, winding_info, WindingInfo};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RootError {
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("polynomial degree {0} exceeds the supported maximum {MAX_DEGREE}")]
    DegreeTooLarge(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid search region: {0}")]
    InvalidRegion(String),
    #[error("simultaneous iteration did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error("function vanishes (numerically) on the boundary near {re} + {im}i")]
    BoundaryZero { re: f64, im: f64 },
    #[error("argument tracking did not resolve: {0}")]
    PhaseUnresolved(String),
    #[error("non-finite function value at {re} + {im}i")]
    NonFinite { re: f64, im: f64 },
    #[error("negative winding number {0}: the function has poles inside the rectangle")]
    PolesInside(i64),
    #[error("region holds {found} zeros, more than the limit {limit}")]
    TooManyRoots { found: i64, limit: usize },
    #[error("children winding numbers sum to {children}, parent has {parent}")]
    Inconsistent { parent: i64, children: i64 },
}
