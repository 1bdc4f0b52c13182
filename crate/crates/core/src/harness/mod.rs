//! Documents, the end-to-end reduction check, and drawings.

pub mod documents;
pub mod svg;
pub mod verify;

use thiserror::Error;

use crate::model::Violation;

pub use documents::{
    parse_instance, parse_meta, parse_n3dm, parse_schedule, serialize_instance, serialize_n3dm, serialize_schedule,
    DocError, ReductionMeta,
};
pub use svg::{render_svg, write_svg};
pub use verify::{verify_reduction, Answer, ShiftPolicy, VerificationReport, VerifyOptions};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("drawing requires an L1-plane instance")]
    NotPlanar,
    #[error("schedule is not a wake-up tree: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidTree(Vec<Violation>),
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
}
