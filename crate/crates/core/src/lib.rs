//! Numerical machinery for properly convex foliated projective structures on
//! the unit tangent bundle of a genus-2 surface: surface-group representations
//! into SL(2,R) and SL(4,R), sampled hyperconvex flag curves, leaves of the
//! codimension-1 foliation with frame normalization and Hausdorff comparison,
//! Jordan-projection spectra with their constraint polynomials, and boundary
//! regularity exponents.

pub mod cli;
pub mod config;
pub mod error;
pub mod foliation;
pub mod frenet;
pub mod group;
pub mod numeric;
pub mod projlin;
pub mod regularity;
pub mod report;
pub mod spectra;

pub use error::{GeomError, Result};
