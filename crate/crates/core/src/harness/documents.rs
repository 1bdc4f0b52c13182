//! JSON documents.
//!
//! * instance: `{"metric": "L1", "robots": [["p/q", "p/q"], ...], "source": 0}`,
//!   or `{"metric": "matrix", "matrix": [[...], ...], "source": 0}` with
//!   optional `robots` used only for drawing;
//! * schedule: `{"parent": [null, 0, ...]}`;
//! * N3DM input: `{"U": [...], "V": [...], "W": [...]}`;
//! * reduction metadata: see [`ReductionMeta`].
//!
//! Rationals are strings `"p/q"` or `"p"`; plain JSON integers are accepted
//! on input.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{validate_tree, DistanceMatrix, FtpInstance, Metric, ModelError, Point2, Violation, WakeupTree};
use crate::n3dm::{validate_n3dm, N3dmError, N3dmInstance};
use crate::numeric::Rational;
use crate::reduction::{GroupMap, ReductionArtifacts};

#[derive(Debug, Error)]
pub enum DocError {
    #[error("{path}: {message}")]
    Json { path: String, message: String },
    #[error("unknown metric tag {0:?} (expected \"L1\" or \"matrix\")")]
    UnknownMetric(String),
    #[error("field {0} is required for this metric")]
    MissingField(&'static str),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    N3dm(#[from] N3dmError),
    #[error("schedule is not a wake-up tree: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidSchedule(Vec<Violation>),
    #[error(transparent)]
    Serialize(#[from] serde_json::Error),
}

fn from_json<T: DeserializeOwned>(text: &str) -> Result<T, DocError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| DocError::Json {
        path: match e.path().to_string().as_str() {
            "." => "document".to_string(),
            p => p.to_string(),
        },
        message: e.inner().to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub metric: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub robots: Vec<[Rational; 2]>,
    pub source: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<Rational>>>,
}

impl InstanceDoc {
    pub fn from_instance(inst: &FtpInstance) -> Self {
        let robots = inst.robots().iter().map(|p| [p.x, p.y]).collect();
        match inst.metric() {
            Metric::L1Plane => InstanceDoc {
                metric: "L1".into(),
                robots,
                source: inst.source(),
                matrix: None,
            },
            Metric::Explicit(m) => InstanceDoc {
                metric: "matrix".into(),
                robots,
                source: inst.source(),
                matrix: Some(m.rows()),
            },
        }
    }

    pub fn into_instance(self) -> Result<FtpInstance, DocError> {
        let robots: Vec<Point2> = self.robots.into_iter().map(|[x, y]| Point2::new(x, y)).collect();
        match self.metric.as_str() {
            "L1" => Ok(FtpInstance::l1(robots, self.source)?),
            "matrix" => {
                let rows = self.matrix.ok_or(DocError::MissingField("matrix"))?;
                Ok(FtpInstance::explicit(
                    DistanceMatrix::from_rows(rows)?,
                    robots,
                    self.source,
                )?)
            }
            other => Err(DocError::UnknownMetric(other.to_string())),
        }
    }
}

pub fn parse_instance(text: &str) -> Result<FtpInstance, DocError> {
    from_json::<InstanceDoc>(text)?.into_instance()
}

pub fn serialize_instance(inst: &FtpInstance) -> String {
    to_pretty(&InstanceDoc::from_instance(inst))
}

/// Parses a schedule and checks that it is a wake-up tree for `inst`.
pub fn parse_schedule(text: &str, inst: &FtpInstance) -> Result<WakeupTree, DocError> {
    let tree: WakeupTree = from_json(text)?;
    validate_tree(&tree, inst, None).map_err(DocError::InvalidSchedule)?;
    Ok(tree)
}

pub fn serialize_schedule(tree: &WakeupTree) -> String {
    to_pretty(tree)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct N3dmDoc {
    #[serde(rename = "U")]
    pub u: Vec<i64>,
    #[serde(rename = "V")]
    pub v: Vec<i64>,
    #[serde(rename = "W")]
    pub w: Vec<i64>,
}

pub fn parse_n3dm(text: &str) -> Result<N3dmInstance, DocError> {
    let doc: N3dmDoc = from_json(text)?;
    Ok(validate_n3dm(&doc.u, &doc.v, &doc.w)?)
}

pub fn serialize_n3dm(inst: &N3dmInstance) -> String {
    to_pretty(&N3dmDoc {
        u: inst.u().to_vec(),
        v: inst.v().to_vec(),
        w: inst.w().to_vec(),
    })
}

/// Sidecar document written next to a reduced instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionMeta {
    pub n: usize,
    /// Target of the (possibly shifted) instance that was reduced.
    pub q: i64,
    #[serde(rename = "L")]
    pub l: Rational,
    pub epsilon: Rational,
    pub delta: Rational,
    /// Amount added to every element of W before reducing.
    pub shift: i64,
    pub source: usize,
    pub groups: GroupMap,
}

impl ReductionMeta {
    pub fn new(art: &ReductionArtifacts, shift: i64) -> Self {
        ReductionMeta {
            n: art.n(),
            q: art.n3dm.q(),
            l: art.l,
            epsilon: art.epsilon,
            delta: art.delta,
            shift,
            source: art.source,
            groups: art.groups.clone(),
        }
    }
}

pub fn parse_meta(text: &str) -> Result<ReductionMeta, DocError> {
    from_json(text)
}

pub fn to_pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("documents serialize infallibly")
}
