use std::time::Instant;

use super::{Mode, SolveError, SolveResult, SolveStats, SolveStatus};
use crate::model::{evaluate_tree, validate_tree, FtpInstance, WakeupTree};

pub const DEFAULT_EXHAUSTIVE_CAP: usize = 7;

pub fn solve_exhaustive(inst: &FtpInstance) -> Result<SolveResult, SolveError> {
    solve_exhaustive_with_cap(inst, DEFAULT_EXHAUSTIVE_CAP)
}

/// Enumerates every parent array over the non-source robots, keeps those
/// that are wake-up trees, and returns the first one of minimum makespan.
///
/// Shares nothing with the branch-and-bound search except the model's tree
/// validation and evaluation, which is what makes it usable as an oracle.
pub fn solve_exhaustive_with_cap(inst: &FtpInstance, cap: usize) -> Result<SolveResult, SolveError> {
    let n = inst.len();
    if n > cap {
        return Err(SolveError::CapExceeded { robots: n, cap });
    }
    let start = Instant::now();
    let src = inst.source();
    let others: Vec<usize> = (0..n).filter(|&v| v != src).collect();
    let mut parent: Vec<Option<usize>> = vec![None; n];
    // odometer over parent choices; each digit skips the node itself
    let mut digits = vec![0usize; others.len()];
    let mut best: Option<(crate::numeric::Rational, WakeupTree)> = None;
    let mut stats = SolveStats::default();
    loop {
        for (d, &v) in digits.iter().zip(&others) {
            parent[v] = Some(if *d >= v { d + 1 } else { *d });
        }
        stats.nodes_explored += 1;
        let tree = WakeupTree::new(parent.clone());
        if validate_tree(&tree, inst, None).is_ok() {
            let ev = evaluate_tree(&tree, inst)?;
            if best.as_ref().is_none_or(|(b, _)| ev.makespan < *b) {
                stats.incumbent_updates += 1;
                best = Some((ev.makespan, tree));
            }
        }
        // advance
        let mut pos = 0;
        loop {
            if pos == digits.len() {
                let (makespan, tree) = best.expect("a chain through all robots is always a wake-up tree");
                stats.elapsed = start.elapsed();
                return Ok(SolveResult {
                    mode: Mode::Optimize,
                    status: SolveStatus::Optimal,
                    makespan: Some(makespan),
                    tree: Some(tree),
                    stats,
                });
            }
            digits[pos] += 1;
            if digits[pos] < n - 1 {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
}
