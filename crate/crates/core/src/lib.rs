//! Numerical toolkit for properly-convex real-projective geometry.
//!
//! The crate computes Hilbert metrics, dual domains, Vinberg's characteristic
//! hypersurface and the Θ map, spherical centers, inertia normalization with
//! box sandwiches, the box estimate, degeneration diagnostics for sequences of
//! representations, and PL convexity certificates.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod domain;
pub mod error;
pub mod group;
pub mod hilbert;
pub mod linalg;
pub mod normalize;
pub mod plconvex;
pub mod projgeom;
pub mod tol;
pub mod vinberg;

pub use error::{Error, Result};
