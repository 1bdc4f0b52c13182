//! Freeze-tag scheduling under the L1 metric.
//!
//! The crate provides an exact rational substrate ([`numeric`]), the
//! wake-up tree model ([`model`]), exact and greedy solvers ([`solvers`]),
//! numerical 3-dimensional matching ([`n3dm`]), the reduction from N3DM to
//! planar L1 freeze-tag together with its integer-scaling, grid-embedding
//! and perturbation transforms ([`reduction`]), and an end-to-end
//! verification harness with JSON documents and SVG output ([`harness`]).

pub mod harness;
pub mod model;
pub mod n3dm;
pub mod numeric;
pub mod reduction;
pub mod solvers;

pub use model::{FtpInstance, Point2, WakeupTree};
pub use n3dm::{Matching, N3dmInstance};
pub use numeric::Rational;
