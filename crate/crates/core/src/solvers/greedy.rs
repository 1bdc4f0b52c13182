use std::time::Instant;

use super::{Mode, SolveError, SolveResult, SolveStats, SolveStatus};
use crate::model::{FtpInstance, WakeupTree};
use crate::numeric::Rational;

/// Event-driven nearest-neighbour schedule.
///
/// The free robot with the earliest free time (then smallest index) claims
/// the nearest unclaimed frozen robot (ties to the smaller index), travels
/// there, and both robots become free on arrival. A free robot finding
/// nothing left to claim stops.
pub fn greedy_schedule(inst: &FtpInstance) -> Result<SolveResult, SolveError> {
    let start = Instant::now();
    let n = inst.len();
    let src = inst.source();
    let mut claimed = vec![false; n];
    claimed[src] = true;
    let mut remaining = n - 1;
    let mut parent = vec![None; n];
    let mut arrival = vec![Rational::ZERO; n];
    // (free time, robot, node it stands on)
    let mut free: Vec<(Rational, usize, usize)> = vec![(Rational::ZERO, src, src)];
    let mut stats = SolveStats::default();

    while remaining > 0 {
        let next = (0..free.len())
            .min_by(|&a, &b| (free[a].0, free[a].1).cmp(&(free[b].0, free[b].1)))
            .expect("an unclaimed robot implies an active one");
        let (t, robot, node) = free.swap_remove(next);
        let mut target: Option<(Rational, usize)> = None;
        for f in (0..n).filter(|&f| !claimed[f]) {
            let d = inst.distance(node, f)?;
            if target.is_none_or(|(bd, _)| d < bd) {
                target = Some((d, f));
            }
        }
        let (d, f) = target.expect("remaining > 0");
        stats.nodes_explored += 1;
        claimed[f] = true;
        remaining -= 1;
        parent[f] = Some(node);
        let at = t.checked_add(d)?;
        arrival[f] = at;
        free.push((at, robot, f));
        free.push((at, f, f));
    }

    let makespan = arrival.iter().copied().max().unwrap_or(Rational::ZERO);
    stats.elapsed = start.elapsed();
    Ok(SolveResult {
        mode: Mode::Heuristic,
        status: SolveStatus::Heuristic,
        makespan: Some(makespan),
        tree: Some(WakeupTree::new(parent)),
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_tree, Point2};

    fn p(x: i64, y: i64) -> Point2 {
        Point2::from_ints(x, y)
    }

    #[test]
    fn single_robot() {
        let inst = FtpInstance::l1(vec![p(0, 0)], 0).unwrap();
        assert_eq!(greedy_schedule(&inst).unwrap().makespan, Some(Rational::ZERO));
    }

    #[test]
    fn collinear_chain() {
        let inst = FtpInstance::l1(vec![p(0, 0), p(1, 0), p(2, 0)], 0).unwrap();
        let res = greedy_schedule(&inst).unwrap();
        assert_eq!(res.makespan, Some(2.into()));
        let tree = res.tree.unwrap();
        assert_eq!(tree.parent, vec![None, Some(0), Some(1)]);
        assert!(validate_tree(&tree, &inst, Some(2.into())).is_ok());
    }

    #[test]
    fn ties_go_to_smaller_target_index() {
        let inst = FtpInstance::l1(vec![p(0, 0), p(0, -1), p(0, 1)], 0).unwrap();
        let tree = greedy_schedule(&inst).unwrap().tree.unwrap();
        assert_eq!(tree.parent[1], Some(0));
        assert_eq!(tree.parent[2], Some(1));
    }
}
