//! Freeze-tag instances, wake-up trees and their evaluation.
//!
//! An instance is a multiset of robots (identified by list index) with one
//! initially active source. A schedule is a [`WakeupTree`]: a rooted binary
//! tree over the robots whose root is the source. Each edge is one robot
//! moving at unit speed between the two positions, so the arrival time of a
//! node is the weight of its root path and the makespan is the largest
//! arrival.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::numeric::{Rational, RationalError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Numeric(#[from] RationalError),
    #[error("instance has no robots")]
    Empty,
    #[error("source index {source_index} out of range for {robots} robots")]
    SourceOutOfRange { source_index: usize, robots: usize },
    #[error("distance matrix is not square ({rows} rows, row {row} has {len} entries)")]
    MatrixShape { rows: usize, row: usize, len: usize },
    #[error("distance matrix has {rows} rows but the instance lists {robots} robots")]
    MatrixSize { rows: usize, robots: usize },
    #[error("distance matrix diagonal entry ({0},{0}) is nonzero")]
    NonzeroDiagonal(usize),
    #[error("distance matrix entry ({0},{1}) is negative")]
    NegativeDistance(usize, usize),
    #[error("distance matrix is asymmetric at ({0},{1})")]
    Asymmetric(usize, usize),
    #[error("triangle inequality fails: d({i},{k}) > d({i},{j}) + d({j},{k})")]
    Triangle { i: usize, j: usize, k: usize },
    #[error("operation requires an L1-plane instance")]
    NotPlanar,
    #[error("invalid wake-up tree: {}", display_violations(.0))]
    InvalidTree(Vec<Violation>),
}

fn display_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize)]
pub struct Point2 {
    pub x: Rational,
    pub y: Rational,
}

impl Point2 {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point2 { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point2::new(x.into(), y.into())
    }

    pub fn origin() -> Self {
        Point2::default()
    }

    /// Scales both coordinates by `factor`.
    pub fn scaled(&self, factor: Rational) -> Result<Point2, RationalError> {
        Ok(Point2::new(self.x.checked_mul(factor)?, self.y.checked_mul(factor)?))
    }

    pub fn norm_l1(&self) -> Result<Rational, RationalError> {
        l1_distance(&Point2::origin(), self)
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Manhattan distance `|p.x - q.x| + |p.y - q.y|`.
pub fn l1_distance(p: &Point2, q: &Point2) -> Result<Rational, RationalError> {
    let dx = p.x.checked_sub(q.x)?.checked_abs()?;
    let dy = p.y.checked_sub(q.y)?.checked_abs()?;
    dx.checked_add(dy)
}

/// Dense symmetric distance matrix over robot indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    size: usize,
    entries: Vec<Rational>,
}

impl DistanceMatrix {
    /// Checks the metric axioms and wraps the rows.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, ModelError> {
        let size = rows.len();
        for (row, r) in rows.iter().enumerate() {
            if r.len() != size {
                return Err(ModelError::MatrixShape {
                    rows: size,
                    row,
                    len: r.len(),
                });
            }
        }
        let m = DistanceMatrix {
            size,
            entries: rows.into_iter().flatten().collect(),
        };
        m.check_metric()?;
        Ok(m)
    }

    fn check_metric(&self) -> Result<(), ModelError> {
        let n = self.size;
        for i in 0..n {
            if !self.get(i, i).is_zero() {
                return Err(ModelError::NonzeroDiagonal(i));
            }
            for j in 0..n {
                if self.get(i, j).is_negative() {
                    return Err(ModelError::NegativeDistance(i, j));
                }
                if self.get(i, j) != self.get(j, i) {
                    return Err(ModelError::Asymmetric(i, j));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let via = self.get(i, j).checked_add(self.get(j, k))?;
                    if self.get(i, k) > via {
                        return Err(ModelError::Triangle { i, j, k });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.entries[i * self.size + j]
    }

    pub fn rows(&self) -> Vec<Vec<Rational>> {
        self.entries.chunks(self.size.max(1)).map(|c| c.to_vec()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Metric {
    L1Plane,
    Explicit(DistanceMatrix),
}

/// A freeze-tag instance: robots, the index of the initially active source,
/// and the metric.
///
/// For [`Metric::Explicit`] the robot list may be empty; when present its
/// coordinates are only used for drawing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FtpInstance {
    robots: Vec<Point2>,
    source: usize,
    metric: Metric,
}

impl FtpInstance {
    pub fn l1(robots: Vec<Point2>, source: usize) -> Result<Self, ModelError> {
        if robots.is_empty() {
            return Err(ModelError::Empty);
        }
        if source >= robots.len() {
            return Err(ModelError::SourceOutOfRange {
                source_index: source,
                robots: robots.len(),
            });
        }
        Ok(FtpInstance {
            robots,
            source,
            metric: Metric::L1Plane,
        })
    }

    pub fn explicit(matrix: DistanceMatrix, robots: Vec<Point2>, source: usize) -> Result<Self, ModelError> {
        if matrix.is_empty() {
            return Err(ModelError::Empty);
        }
        if !robots.is_empty() && robots.len() != matrix.len() {
            return Err(ModelError::MatrixSize {
                rows: matrix.len(),
                robots: robots.len(),
            });
        }
        if source >= matrix.len() {
            return Err(ModelError::SourceOutOfRange {
                source_index: source,
                robots: matrix.len(),
            });
        }
        Ok(FtpInstance {
            robots,
            source,
            metric: Metric::Explicit(matrix),
        })
    }

    pub fn len(&self) -> usize {
        match &self.metric {
            Metric::L1Plane => self.robots.len(),
            Metric::Explicit(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn robots(&self) -> &[Point2] {
        &self.robots
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn is_planar(&self) -> bool {
        matches!(self.metric, Metric::L1Plane)
    }

    pub fn distance(&self, i: usize, j: usize) -> Result<Rational, RationalError> {
        match &self.metric {
            Metric::L1Plane => l1_distance(&self.robots[i], &self.robots[j]),
            Metric::Explicit(m) => Ok(m.get(i, j)),
        }
    }

    /// Same robots and metric, every coordinate multiplied by `factor`.
    pub fn scaled(&self, factor: Rational) -> Result<FtpInstance, ModelError> {
        let robots = self
            .robots
            .iter()
            .map(|p| p.scaled(factor))
            .collect::<Result<Vec<_>, _>>()?;
        match &self.metric {
            Metric::L1Plane => FtpInstance::l1(robots, self.source),
            Metric::Explicit(m) => {
                let rows = m
                    .rows()
                    .into_iter()
                    .map(|r| {
                        r.into_iter()
                            .map(|d| d.checked_mul(factor))
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                FtpInstance::explicit(DistanceMatrix::from_rows(rows)?, robots, self.source)
            }
        }
    }
}

/// The complete weighted graph over the robots, as a matrix.
#[allow(clippy::needless_range_loop)]
pub fn build_distance_matrix(inst: &FtpInstance) -> Result<DistanceMatrix, ModelError> {
    match &inst.metric {
        Metric::Explicit(m) => Ok(m.clone()),
        Metric::L1Plane => {
            let n = inst.len();
            let mut rows = vec![vec![Rational::ZERO; n]; n];
            for i in 0..n {
                for j in i + 1..n {
                    let d = l1_distance(&inst.robots[i], &inst.robots[j])?;
                    rows[i][j] = d;
                    rows[j][i] = d;
                }
            }
            Ok(DistanceMatrix {
                size: n,
                entries: rows.into_iter().flatten().collect(),
            })
        }
    }
}

/// A wake-up tree stored as a parent array; the root has no parent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct WakeupTree {
    pub parent: Vec<Option<usize>>,
}

impl WakeupTree {
    pub fn new(parent: Vec<Option<usize>>) -> Self {
        WakeupTree { parent }
    }

    /// Children lists ordered by child index. Out-of-range parents are ignored.
    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.parent.len()];
        for (v, p) in self.parent.iter().enumerate() {
            if let Some(p) = *p {
                if p < ch.len() {
                    ch[p].push(v);
                }
            }
        }
        ch
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parent.iter().enumerate().filter_map(|(v, p)| p.map(|p| (p, v)))
    }

    pub fn leaves(&self) -> Vec<usize> {
        self.children()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_empty())
            .map(|(v, _)| v)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct ScheduleEvaluation {
    pub arrival: Vec<Rational>,
    pub makespan: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    WrongLength {
        expected: usize,
        found: usize,
    },
    SourceHasParent {
        node: usize,
    },
    MissingParent {
        node: usize,
    },
    ParentOutOfRange {
        node: usize,
        parent: usize,
    },
    SelfLoop {
        node: usize,
    },
    Cycle {
        node: usize,
    },
    RootOutDegree {
        node: usize,
        degree: usize,
        expected: usize,
    },
    OutDegree {
        node: usize,
        degree: usize,
    },
    MakespanExceedsBound {
        makespan: Rational,
        bound: Rational,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::WrongLength { expected, found } => {
                write!(f, "parent array has {found} entries, expected {expected}")
            }
            Violation::SourceHasParent { node } => write!(f, "source {node} has a parent"),
            Violation::MissingParent { node } => write!(f, "node {node} has no parent"),
            Violation::ParentOutOfRange { node, parent } => {
                write!(f, "node {node} has out-of-range parent {parent}")
            }
            Violation::SelfLoop { node } => write!(f, "node {node} is its own parent"),
            Violation::Cycle { node } => write!(f, "node {node} lies on a parent cycle"),
            Violation::RootOutDegree { node, degree, expected } => {
                write!(f, "root {node} has out-degree {degree}, expected {expected}")
            }
            Violation::OutDegree { node, degree } => {
                write!(f, "node {node} has out-degree > 2 ({degree})")
            }
            Violation::MakespanExceedsBound { makespan, bound } => {
                write!(f, "makespan exceeds bound ({makespan} > {bound})")
            }
        }
    }
}

fn structural_violations(tree: &WakeupTree, inst: &FtpInstance) -> Vec<Violation> {
    let n = inst.len();
    let src = inst.source();
    let mut out = Vec::new();
    if tree.parent.len() != n {
        out.push(Violation::WrongLength {
            expected: n,
            found: tree.parent.len(),
        });
        return out;
    }
    for (v, p) in tree.parent.iter().enumerate() {
        match (*p, v == src) {
            (Some(_), true) => out.push(Violation::SourceHasParent { node: v }),
            (None, false) => out.push(Violation::MissingParent { node: v }),
            (Some(p), false) if p >= n => out.push(Violation::ParentOutOfRange { node: v, parent: p }),
            (Some(p), false) if p == v => out.push(Violation::SelfLoop { node: v }),
            _ => {}
        }
    }
    if !out.is_empty() {
        return out;
    }
    // every node must reach the source by following parents
    let mut state = vec![0u8; n]; // 0 unknown, 1 on current walk, 2 reaches source
    state[src] = 2;
    for start in 0..n {
        let mut walk = Vec::new();
        let mut v = start;
        while state[v] == 0 {
            state[v] = 1;
            walk.push(v);
            v = tree.parent[v].expect("checked above");
        }
        let reached = state[v] == 2;
        if state[v] == 1 {
            out.push(Violation::Cycle { node: v });
        }
        for w in walk {
            state[w] = if reached { 2 } else { 3 };
        }
    }
    let children = tree.children();
    let expected_root = usize::from(n >= 2);
    if children[src].len() != expected_root {
        out.push(Violation::RootOutDegree {
            node: src,
            degree: children[src].len(),
            expected: expected_root,
        });
    }
    for (v, c) in children.iter().enumerate() {
        if v != src && c.len() > 2 {
            out.push(Violation::OutDegree {
                node: v,
                degree: c.len(),
            });
        }
    }
    out
}

fn arrivals(tree: &WakeupTree, inst: &FtpInstance) -> Result<Vec<Rational>, RationalError> {
    let children = tree.children();
    let mut arrival = vec![Rational::ZERO; inst.len()];
    let mut queue = VecDeque::from([inst.source()]);
    while let Some(v) = queue.pop_front() {
        for &c in &children[v] {
            arrival[c] = arrival[v].checked_add(inst.distance(v, c)?)?;
            queue.push_back(c);
        }
    }
    Ok(arrival)
}

/// Arrival times and makespan of a structurally valid tree.
pub fn evaluate_tree(tree: &WakeupTree, inst: &FtpInstance) -> Result<ScheduleEvaluation, ModelError> {
    let v = structural_violations(tree, inst);
    if !v.is_empty() {
        return Err(ModelError::InvalidTree(v));
    }
    let arrival = arrivals(tree, inst)?;
    let makespan = arrival.iter().copied().max().unwrap_or(Rational::ZERO);
    Ok(ScheduleEvaluation { arrival, makespan })
}

/// Checks that `tree` is a wake-up tree for `inst` and, when `bound` is
/// given, that its makespan does not exceed it. This is the certificate
/// check for the decision problem.
pub fn validate_tree(tree: &WakeupTree, inst: &FtpInstance, bound: Option<Rational>) -> Result<(), Vec<Violation>> {
    let mut v = structural_violations(tree, inst);
    if v.is_empty() {
        if let Some(bound) = bound {
            match arrivals(tree, inst) {
                Ok(arr) => {
                    let makespan = arr.into_iter().max().unwrap_or(Rational::ZERO);
                    if makespan > bound {
                        v.push(Violation::MakespanExceedsBound { makespan, bound });
                    }
                }
                // an overflowing makespan certainly exceeds any representable bound
                Err(_) => v.push(Violation::MakespanExceedsBound { makespan: bound, bound }),
            }
        }
    }
    if v.is_empty() {
        Ok(())
    } else {
        Err(v)
    }
}
