//! Depth-first branch and bound over chronological dispatch decisions.
//!
//! The search state is the set of claimed robots plus, for every active
//! robot, the tree node it stands on and the time it is free there. The
//! active robot with the earliest free time (then smallest index) decides
//! next: it either claims an unclaimed frozen robot and travels to it, or
//! stops for good. A claim adds the edge `node -> target` to the tree and
//! makes both the traveller and the woken robot free at the target on
//! arrival, so every node gets at most two children and the source at most
//! one. Every wake-up tree arises this way.
//!
//! All times are integers: distances are rescaled by the lcm of their
//! denominators before the search starts.
//!
//! Lower bound for a state: the largest of
//! * the latest arrival already fixed, and
//! * for each unclaimed robot `f`, the minimum over active robots `r` of
//!   `free(r) + d(r, f)`. Whoever eventually wakes `f` descends from some
//!   currently active robot, so by the triangle inequality it cannot arrive
//!   earlier. This dominates the eccentricity bound.
//!
//! Search reductions (both can be switched off for cross-checking):
//! * symmetry: robots at distance zero from each other are interchangeable.
//!   Identical frozen robots are claimed in index order, and the decisions
//!   taken by robots free at the same place and time are forced into
//!   increasing order (claims of colocated robots first, then other claims by
//!   target index, then stops);
//! * dominance: a free robot standing on an unclaimed frozen robot wakes it
//!   immediately. Exchanging the waker's original trip for a direct trip from
//!   its previous node never delays anybody.

use std::time::{Duration, Instant};

use super::{lower_bound_eccentricity, Mode, SolveError, SolveResult, SolveStats, SolveStatus};
use crate::model::{FtpInstance, WakeupTree};
use crate::numeric::{lcm, Rational, RationalError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchBoundOptions {
    /// Decision bound; `None` optimizes.
    pub bound: Option<Rational>,
    pub symmetry_breaking: bool,
    pub dominance: bool,
    pub node_limit: Option<u64>,
    pub time_limit: Option<Duration>,
}

impl Default for BranchBoundOptions {
    fn default() -> Self {
        BranchBoundOptions {
            bound: None,
            symmetry_breaking: true,
            dominance: true,
            node_limit: Some(2_000_000_000),
            time_limit: None,
        }
    }
}

pub fn solve_branch_bound(inst: &FtpInstance, bound: Option<Rational>) -> Result<SolveResult, SolveError> {
    solve_branch_bound_with(
        inst,
        &BranchBoundOptions {
            bound,
            ..Default::default()
        },
    )
}

pub fn solve_branch_bound_with(inst: &FtpInstance, opts: &BranchBoundOptions) -> Result<SolveResult, SolveError> {
    let start = Instant::now();
    let ticks = TickMetric::new(inst)?;
    let n = inst.len();
    let mode = opts.bound.map_or(Mode::Optimize, Mode::Decision);
    let eccentricity = lower_bound_eccentricity(inst)?;

    // quick answers that need no search
    if let Some(bound) = opts.bound {
        if eccentricity > bound {
            return Ok(SolveResult {
                mode,
                status: SolveStatus::No,
                makespan: None,
                tree: None,
                stats: SolveStats {
                    elapsed: start.elapsed(),
                    ..Default::default()
                },
            });
        }
    }

    let limit = match opts.bound {
        // largest integer tick count not exceeding the bound
        Some(b) => b.checked_mul_int(ticks.scale as i128)?.floor(),
        None => i128::from(i64::MAX),
    };
    let limit = i64::try_from(limit).unwrap_or(i64::MAX);

    let mut search = Search::new(&ticks, inst.source(), opts, limit, start);
    search.global_lb = ticks.to_ticks(eccentricity)?;
    if n == 1 {
        search.record_solution();
    } else {
        search.dfs();
    }

    let stats = SolveStats {
        elapsed: start.elapsed(),
        ..search.stats.clone()
    };
    let witness = search.best.as_ref().map(|(ms, parent)| {
        (
            Rational::new(i128::from(*ms), ticks.scale as i128),
            WakeupTree::new(parent.clone()),
        )
    });
    let (makespan, tree) = match witness {
        Some((ms, tree)) => (Some(ms?), Some(tree)),
        None => (None, None),
    };
    let status = match (search.aborted, opts.bound, &tree) {
        (_, Some(_), Some(_)) => SolveStatus::Yes,
        (true, _, _) => SolveStatus::Inconclusive,
        (false, Some(_), None) => SolveStatus::No,
        (false, None, _) => SolveStatus::Optimal,
    };
    Ok(SolveResult {
        mode,
        status,
        makespan,
        tree,
        stats,
    })
}

/// Distances as integer multiples of `1/scale`.
struct TickMetric {
    n: usize,
    scale: i64,
    dist: Vec<i64>,
    /// Robots at distance zero share a class id.
    class: Vec<usize>,
}

impl TickMetric {
    fn new(inst: &FtpInstance) -> Result<Self, RationalError> {
        let n = inst.len();
        let mut raw = Vec::with_capacity(n * n);
        let mut scale: i128 = 1;
        for i in 0..n {
            for j in 0..n {
                let d = inst.distance(i, j)?;
                scale = lcm(scale, d.denominator())?;
                raw.push(d);
            }
        }
        let scale_r = Rational::from_integer(scale);
        let mut dist = Vec::with_capacity(n * n);
        let mut max = 0i64;
        for d in raw {
            let t = d.checked_mul(scale_r)?.numerator();
            let t = i64::try_from(t).map_err(|_| RationalError::Overflow)?;
            max = max.max(t);
            dist.push(t);
        }
        // a makespan is a sum of at most n - 1 distances
        max.checked_mul(n as i64).ok_or(RationalError::Overflow)?;
        let scale = i64::try_from(scale).map_err(|_| RationalError::Overflow)?;
        let mut class = vec![usize::MAX; n];
        for i in 0..n {
            if class[i] == usize::MAX {
                for j in i..n {
                    if dist[i * n + j] == 0 {
                        class[j] = i;
                    }
                }
            }
        }
        Ok(TickMetric { n, scale, dist, class })
    }

    #[inline]
    fn d(&self, i: usize, j: usize) -> i64 {
        self.dist[i * self.n + j]
    }

    fn to_ticks(&self, r: Rational) -> Result<i64, RationalError> {
        let t = r.checked_mul_int(self.scale as i128)?;
        i64::try_from(t.ceil()).map_err(|_| RationalError::Overflow)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Agent {
    Frozen,
    Active { node: usize, free_at: i64 },
    Stopped,
}

/// Order of decisions among robots free at the same place and time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum ChoiceKey {
    Colocated(usize),
    Claim(usize),
    Stop,
}

#[derive(Debug, Clone, Copy)]
struct LogEntry {
    class: usize,
    time: i64,
    key: ChoiceKey,
}

#[derive(Debug, Clone, Copy)]
enum Choice {
    Claim(usize),
    Stop,
}

struct Search<'a> {
    m: &'a TickMetric,
    opts: &'a BranchBoundOptions,
    start: Instant,
    agents: Vec<Agent>,
    claimed: Vec<bool>,
    unclaimed: usize,
    parent: Vec<Option<usize>>,
    fixed_makespan: i64,
    log: Vec<LogEntry>,
    /// Prune any state whose lower bound exceeds this.
    limit: i64,
    global_lb: i64,
    best: Option<(i64, Vec<Option<usize>>)>,
    done: bool,
    aborted: bool,
    stats: SolveStats,
}

impl<'a> Search<'a> {
    fn new(m: &'a TickMetric, source: usize, opts: &'a BranchBoundOptions, limit: i64, start: Instant) -> Self {
        let mut agents = vec![Agent::Frozen; m.n];
        agents[source] = Agent::Active {
            node: source,
            free_at: 0,
        };
        let mut claimed = vec![false; m.n];
        claimed[source] = true;
        Search {
            m,
            opts,
            start,
            agents,
            claimed,
            unclaimed: m.n - 1,
            parent: vec![None; m.n],
            fixed_makespan: 0,
            log: Vec::new(),
            limit,
            global_lb: 0,
            best: None,
            done: false,
            aborted: false,
            stats: SolveStats::default(),
        }
    }

    fn lower_bound(&self) -> i64 {
        let mut lb = self.fixed_makespan;
        for f in 0..self.m.n {
            if self.claimed[f] {
                continue;
            }
            let mut reach = i64::MAX;
            for a in &self.agents {
                if let Agent::Active { node, free_at } = *a {
                    reach = reach.min(free_at + self.m.d(node, f));
                }
            }
            lb = lb.max(reach);
            if lb == i64::MAX {
                break;
            }
        }
        lb
    }

    fn next_agent(&self) -> Option<usize> {
        let mut best: Option<(i64, usize)> = None;
        for (r, a) in self.agents.iter().enumerate() {
            if let Agent::Active { free_at, .. } = *a {
                if best.is_none_or(|(t, _)| free_at < t) {
                    best = Some((free_at, r));
                }
            }
        }
        best.map(|(_, r)| r)
    }

    fn record_solution(&mut self) {
        let ms = self.fixed_makespan;
        if ms > self.limit {
            return;
        }
        self.stats.incumbent_updates += 1;
        self.best = Some((ms, self.parent.clone()));
        if self.opts.bound.is_some() || ms <= self.global_lb {
            self.done = true;
        } else {
            self.limit = ms - 1;
        }
    }

    fn over_budget(&mut self) -> bool {
        if let Some(limit) = self.opts.node_limit {
            if self.stats.nodes_explored >= limit {
                return true;
            }
        }
        if let Some(tl) = self.opts.time_limit {
            if self.stats.nodes_explored.is_multiple_of(4096) && self.start.elapsed() >= tl {
                return true;
            }
        }
        false
    }

    fn dfs(&mut self) {
        if self.done || self.aborted {
            return;
        }
        if self.over_budget() {
            self.aborted = true;
            return;
        }
        self.stats.nodes_explored += 1;
        if self.unclaimed == 0 {
            self.record_solution();
            return;
        }
        if self.lower_bound() > self.limit {
            self.stats.pruned_by_bound += 1;
            return;
        }
        let Some(agent) = self.next_agent() else {
            return;
        };
        let Agent::Active { node, free_at } = self.agents[agent] else {
            unreachable!()
        };
        let class = self.m.class[node];

        let mut children: Vec<(i64, u8, i64, usize, Choice)> = Vec::new();
        for choice in self.choices(node, free_at, class) {
            let undo = self.apply(agent, node, free_at, class, choice);
            let lb = self.lower_bound();
            self.revert(agent, undo);
            if lb > self.limit {
                self.stats.pruned_by_bound += 1;
                continue;
            }
            let (kind, arrival, idx) = match choice {
                Choice::Claim(f) => (0, free_at + self.m.d(node, f), f),
                Choice::Stop => (1, free_at, usize::MAX),
            };
            children.push((lb, kind, arrival, idx, choice));
        }
        children.sort_by_key(|c| (c.0, c.1, c.2, c.3));

        for (_, _, _, _, choice) in children {
            // the limit may have tightened since the child was generated
            let undo = self.apply(agent, node, free_at, class, choice);
            self.dfs();
            self.revert(agent, undo);
            if self.done || self.aborted {
                return;
            }
        }
    }

    /// Admissible decisions for `agent`, after symmetry and dominance filters.
    fn choices(&mut self, node: usize, free_at: i64, class: usize) -> Vec<Choice> {
        let n = self.m.n;
        if self.opts.dominance {
            if let Some(f) = (0..n).find(|&f| !self.claimed[f] && self.m.d(node, f) == 0) {
                self.stats.forced_by_dominance += 1;
                return vec![Choice::Claim(f)];
            }
        }
        let floor = if self.opts.symmetry_breaking {
            self.log
                .iter()
                .rev()
                .take_while(|e| e.time == free_at)
                .find(|e| e.class == class)
                .map(|e| e.key)
        } else {
            None
        };
        let mut out = Vec::new();
        for f in 0..n {
            if self.claimed[f] {
                continue;
            }
            if self.opts.symmetry_breaking {
                let fc = self.m.class[f];
                // identical frozen robots are claimed lowest index first
                if (fc..f).any(|g| self.m.class[g] == fc && !self.claimed[g]) {
                    self.stats.pruned_by_symmetry += 1;
                    continue;
                }
                if let Some(floor) = floor {
                    if self.key(class, f) <= floor {
                        self.stats.pruned_by_symmetry += 1;
                        continue;
                    }
                }
            }
            out.push(Choice::Claim(f));
        }
        out.push(Choice::Stop);
        out
    }

    fn key(&self, class: usize, f: usize) -> ChoiceKey {
        if self.m.class[f] == class {
            ChoiceKey::Colocated(f)
        } else {
            ChoiceKey::Claim(f)
        }
    }

    fn apply(&mut self, agent: usize, node: usize, free_at: i64, class: usize, choice: Choice) -> Undo {
        let undo = Undo {
            fixed_makespan: self.fixed_makespan,
            agent_state: self.agents[agent],
            target: None,
        };
        match choice {
            Choice::Claim(f) => {
                let at = free_at + self.m.d(node, f);
                self.claimed[f] = true;
                self.unclaimed -= 1;
                self.parent[f] = Some(node);
                self.agents[f] = Agent::Active { node: f, free_at: at };
                self.agents[agent] = Agent::Active { node: f, free_at: at };
                self.fixed_makespan = self.fixed_makespan.max(at);
                self.log.push(LogEntry {
                    class,
                    time: free_at,
                    key: self.key(class, f),
                });
                Undo {
                    target: Some(f),
                    ..undo
                }
            }
            Choice::Stop => {
                self.agents[agent] = Agent::Stopped;
                self.log.push(LogEntry {
                    class,
                    time: free_at,
                    key: ChoiceKey::Stop,
                });
                undo
            }
        }
    }

    fn revert(&mut self, agent: usize, undo: Undo) {
        self.log.pop();
        if let Some(f) = undo.target {
            self.claimed[f] = false;
            self.unclaimed += 1;
            self.parent[f] = None;
            self.agents[f] = Agent::Frozen;
        }
        self.fixed_makespan = undo.fixed_makespan;
        self.agents[agent] = undo.agent_state;
    }
}

struct Undo {
    fixed_makespan: i64,
    agent_state: Agent,
    target: Option<usize>,
}
