//! End-to-end check of the reduction on one N3DM instance: decide the N3DM
//! side by brute force, reduce, build the makespan-`L` schedule when a
//! matching exists, and decide the freeze-tag side at `L` exactly.

use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::model::{evaluate_tree, WakeupTree};
use crate::n3dm::{brute_force_match, shift_w, Matching, N3dmError, N3dmInstance};
use crate::numeric::Rational;
use crate::reduction::{
    canonical_schedule, construct_reduction, layout_soundness, required_shift, ReductionError, SoundnessReport,
};
use crate::solvers::{lower_bound_eccentricity, solve_branch_bound_with, BranchBoundOptions, SolveError, SolveStats};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    N3dm(#[from] N3dmError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShiftPolicy {
    /// Apply [`required_shift`].
    #[default]
    Auto,
    Fixed(i64),
    Off,
}

impl std::str::FromStr for ShiftPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(ShiftPolicy::Auto),
            "off" => Ok(ShiftPolicy::Off),
            k => k
                .parse::<i64>()
                .ok()
                .filter(|k| *k >= 0)
                .map(ShiftPolicy::Fixed)
                .ok_or_else(|| format!("shift must be auto, off, or a nonnegative integer, got {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    pub shift: ShiftPolicy,
    /// Budget for the exact solver; its `bound` field is ignored.
    pub solver: BranchBoundOptions,
    /// Also compute the exact freeze-tag optimum.
    pub optimize: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Answer {
    Yes,
    No,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timings {
    pub n3dm_secs: f64,
    pub solver_secs: f64,
    pub total_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    #[serde(rename = "U")]
    pub u: Vec<i64>,
    #[serde(rename = "V")]
    pub v: Vec<i64>,
    #[serde(rename = "W")]
    pub w: Vec<i64>,
    pub q: i64,
    pub n3dm_answer: Answer,
    pub matching: Option<Matching>,
    pub shift_used: i64,
    #[serde(rename = "L")]
    pub l: Rational,
    pub epsilon: Rational,
    pub delta: Rational,
    pub soundness: SoundnessReport,
    pub canonical_makespan: Option<Rational>,
    pub canonical_error: Option<String>,
    pub eccentricity: Rational,
    /// Exact decision "is there a schedule of makespan at most L?".
    pub ftp_decision: Answer,
    /// The freeze-tag optimum when it is known exactly: on a YES it equals
    /// `L` whenever the eccentricity bound is `L`; otherwise only with
    /// `optimize`.
    pub ftp_optimum: Option<Rational>,
    /// A schedule of makespan at most `L` found by the solver.
    pub witness: Option<WakeupTree>,
    /// `n3dm_answer == yes` iff `ftp_decision == yes`; absent when the
    /// decision is inconclusive.
    pub equivalence_holds: Option<bool>,
    pub solver: SolveStats,
    pub timings: Timings,
}

pub fn verify_reduction(inst: &N3dmInstance, opts: &VerifyOptions) -> Result<VerificationReport, VerifyError> {
    let start = Instant::now();
    let matching = brute_force_match(inst)?;
    let n3dm_secs = start.elapsed().as_secs_f64();
    let n3dm_answer = if matching.is_some() { Answer::Yes } else { Answer::No };

    let shift = match opts.shift {
        ShiftPolicy::Auto => required_shift(inst),
        ShiftPolicy::Fixed(k) => k,
        ShiftPolicy::Off => 0,
    };
    let shifted = shift_w(inst, shift)?;
    let art = construct_reduction(&shifted)?;
    let soundness = layout_soundness(&art)?;

    let (canonical_makespan, canonical_error) = match &matching {
        Some(m) => match canonical_schedule(&art, m) {
            Ok(tree) => (
                Some(
                    evaluate_tree(&tree, &art.instance)
                        .map_err(ReductionError::from)?
                        .makespan,
                ),
                None,
            ),
            Err(e) => (None, Some(e.to_string())),
        },
        None => (None, None),
    };

    let eccentricity = lower_bound_eccentricity(&art.instance).map_err(SolveError::from)?;
    let solve_start = Instant::now();
    let decision = solve_branch_bound_with(
        &art.instance,
        &BranchBoundOptions {
            bound: Some(art.l),
            ..opts.solver.clone()
        },
    )?;
    let mut solver = decision.stats.clone();
    let ftp_decision = match decision.answer() {
        Some(true) => Answer::Yes,
        Some(false) => Answer::No,
        None => Answer::Inconclusive,
    };
    let mut ftp_optimum = (ftp_decision == Answer::Yes && eccentricity == art.l).then_some(art.l);
    if opts.optimize && ftp_optimum.is_none() {
        let opt = solve_branch_bound_with(
            &art.instance,
            &BranchBoundOptions {
                bound: None,
                ..opts.solver.clone()
            },
        )?;
        solver = merge_stats(&solver, &opt.stats);
        ftp_optimum = opt.optimum();
    }
    let solver_secs = solve_start.elapsed().as_secs_f64();

    let equivalence_holds = match ftp_decision {
        Answer::Inconclusive => None,
        d => Some((d == Answer::Yes) == (n3dm_answer == Answer::Yes)),
    };

    Ok(VerificationReport {
        u: inst.u().to_vec(),
        v: inst.v().to_vec(),
        w: inst.w().to_vec(),
        q: inst.q(),
        n3dm_answer,
        matching,
        shift_used: shift,
        l: art.l,
        epsilon: art.epsilon,
        delta: art.delta,
        soundness,
        canonical_makespan,
        canonical_error,
        eccentricity,
        ftp_decision,
        ftp_optimum,
        witness: decision.tree,
        equivalence_holds,
        solver,
        timings: Timings {
            n3dm_secs,
            solver_secs,
            total_secs: start.elapsed().as_secs_f64(),
        },
    })
}

fn merge_stats(a: &SolveStats, b: &SolveStats) -> SolveStats {
    SolveStats {
        nodes_explored: a.nodes_explored + b.nodes_explored,
        pruned_by_bound: a.pruned_by_bound + b.pruned_by_bound,
        pruned_by_symmetry: a.pruned_by_symmetry + b.pruned_by_symmetry,
        forced_by_dominance: a.forced_by_dominance + b.forced_by_dominance,
        incumbent_updates: a.incumbent_updates + b.incumbent_updates,
        elapsed: a.elapsed + b.elapsed,
    }
}

impl VerificationReport {
    /// The report with every wall-clock field zeroed, for reproducibility
    /// comparisons.
    pub fn without_timings(&self) -> VerificationReport {
        let mut r = self.clone();
        r.timings = Timings {
            n3dm_secs: 0.0,
            solver_secs: 0.0,
            total_secs: 0.0,
        };
        r.solver.elapsed = Duration::ZERO;
        r
    }
}
