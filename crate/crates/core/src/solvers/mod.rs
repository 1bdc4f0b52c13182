//! Exact and heuristic solvers.
//!
//! * [`solve_exhaustive`] enumerates every parent array; it is the reference
//!   oracle for small instances.
//! * [`solve_branch_bound`] searches chronological dispatch decisions with
//!   admissible lower bounds, symmetry breaking among colocated robots and a
//!   node/time budget.
//! * [`greedy_schedule`] simulates the nearest-frozen-robot rule.

mod branch_bound;
mod exhaustive;
mod greedy;

use std::time::Duration;

use serde::Serialize;
use thiserror::Error;

use crate::model::{FtpInstance, ModelError, WakeupTree};
use crate::numeric::{Rational, RationalError};

pub use branch_bound::{solve_branch_bound, solve_branch_bound_with, BranchBoundOptions};
pub use exhaustive::{solve_exhaustive, solve_exhaustive_with_cap, DEFAULT_EXHAUSTIVE_CAP};
pub use greedy::greedy_schedule;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("exhaustive search refused: {robots} robots exceed the cap of {cap}")]
    CapExceeded { robots: usize, cap: usize },
    #[error(transparent)]
    Numeric(#[from] RationalError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", content = "bound", rename_all = "snake_case")]
pub enum Mode {
    Optimize,
    Decision(Rational),
    Heuristic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    /// The returned tree has minimum makespan.
    Optimal,
    /// Decision mode: a tree within the bound exists (the witness is returned).
    Yes,
    /// Decision mode: every tree exceeds the bound.
    No,
    /// Budget exhausted before the question was settled. Any tree carried is
    /// the best found so far.
    Inconclusive,
    /// Heuristic result with no optimality claim.
    Heuristic,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SolveStats {
    pub nodes_explored: u64,
    pub pruned_by_bound: u64,
    pub pruned_by_symmetry: u64,
    pub forced_by_dominance: u64,
    pub incumbent_updates: u64,
    #[serde(serialize_with = "serialize_secs")]
    pub elapsed: Duration,
}

fn serialize_secs<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolveResult {
    pub mode: Mode,
    pub status: SolveStatus,
    /// Makespan of `tree`; the optimum when `status` is `Optimal`.
    pub makespan: Option<Rational>,
    pub tree: Option<WakeupTree>,
    pub stats: SolveStats,
}

impl SolveResult {
    /// Decision answer: `Some(true)` for YES, `Some(false)` for NO.
    pub fn answer(&self) -> Option<bool> {
        match self.status {
            SolveStatus::Yes => Some(true),
            SolveStatus::No => Some(false),
            _ => None,
        }
    }

    pub fn optimum(&self) -> Option<Rational> {
        (self.status == SolveStatus::Optimal).then_some(self.makespan).flatten()
    }

    pub fn nodes_explored(&self) -> u64 {
        self.stats.nodes_explored
    }
}

/// Largest distance from the source. No robot can be woken earlier than its
/// distance from the source, so this bounds every makespan from below.
pub fn lower_bound_eccentricity(inst: &FtpInstance) -> Result<Rational, RationalError> {
    let s = inst.source();
    (0..inst.len()).try_fold(Rational::ZERO, |acc, r| Ok(acc.max(inst.distance(s, r)?)))
}
