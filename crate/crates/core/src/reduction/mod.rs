//! Reduction from numerical 3-dimensional matching to planar L1 freeze-tag.
//!
//! For a canonical instance `(U, V, W, q)` of size `n` let `L = (2 + n) q`,
//! `eps = 1/n` and `delta = 2 (q - w_n)`. The reduced instance has `6n`
//! robots, listed in this order (each group by index `i = 1..n`):
//!
//! | group | position                                   |
//! |-------|--------------------------------------------|
//! | R     | origin (`r_1` is the source)               |
//! | A     | `(u_i - i eps, i eps)`                     |
//! | A'    | `(L - i eps, i eps)`                       |
//! | B     | `(-v_i + i eps, -i eps)`                   |
//! | B'    | `(-(L - 2 u_i) + 2 - i eps, -2 + i eps)`   |
//! | C     | `(2 w_i + n q - i delta, i delta)`         |
//!
//! A matching of the N3DM instance gives a schedule of makespan exactly `L`
//! ([`canonical_schedule`]) provided every `C_k` lies weakly to the right of
//! every `B_j`; [`layout_soundness`] checks that, and [`required_shift`]
//! computes how much to add to `W` (see [`crate::n3dm::shift_w`]) so that it
//! holds.

mod transforms;

use serde::Serialize;
use thiserror::Error;

use crate::model::{l1_distance, FtpInstance, ModelError, Point2, WakeupTree};
use crate::n3dm::{Matching, N3dmError, N3dmInstance};
use crate::numeric::{Rational, RationalError};

pub use transforms::{embed_grid, perturb_unique, scale_to_integers, GridEmbedding};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error(transparent)]
    Numeric(#[from] RationalError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Matching(#[from] N3dmError),
    #[error("layout premise violated: C_k.x >= B_j.x fails for {}", describe_slacks(.0))]
    Unsound(Vec<SlackViolation>),
    #[error("layout premise violated: {0}")]
    Premise(String),
    #[error("scaled coordinate {0} is not an integer")]
    NotIntegral(Rational),
    #[error("operation requires an L1-plane instance")]
    NotPlanar,
    #[error("perturbation radius must be positive, got {0}")]
    NonPositiveRadius(Rational),
    #[error("perturbation disks around {} and {} touch; use a smaller rho", .0.0, .0.1)]
    DiskCollision(Box<(Point2, Point2)>),
    #[error("grid of {width} x {height} cells is too large")]
    GridTooLarge { width: i128, height: i128 },
}

fn describe_slacks(v: &[SlackViolation]) -> String {
    v.iter()
        .map(|s| format!("(j={}, k={}) slack {}", s.j + 1, s.k + 1, s.slack))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Robot indices of each group, in index order `1..n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct GroupMap {
    pub roots: Vec<usize>,
    pub a: Vec<usize>,
    pub a_prime: Vec<usize>,
    pub b: Vec<usize>,
    pub b_prime: Vec<usize>,
    pub c: Vec<usize>,
}

impl GroupMap {
    fn for_size(n: usize) -> Self {
        let block = |g: usize| (g * n..(g + 1) * n).collect::<Vec<_>>();
        GroupMap {
            roots: block(0),
            a: block(1),
            a_prime: block(2),
            b: block(3),
            b_prime: block(4),
            c: block(5),
        }
    }

    /// Number of robots covered.
    pub fn len(&self) -> usize {
        self.roots.len() + self.a.len() + self.a_prime.len() + self.b.len() + self.b_prime.len() + self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Name of the group containing robot `r`.
    pub fn group_of(&self, r: usize) -> Option<&'static str> {
        [
            ("R", &self.roots),
            ("A", &self.a),
            ("A'", &self.a_prime),
            ("B", &self.b),
            ("B'", &self.b_prime),
            ("C", &self.c),
        ]
        .into_iter()
        .find(|(_, g)| g.contains(&r))
        .map(|(name, _)| name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionArtifacts {
    pub instance: FtpInstance,
    pub n3dm: N3dmInstance,
    pub l: Rational,
    pub epsilon: Rational,
    pub delta: Rational,
    pub groups: GroupMap,
    pub source: usize,
}

impl ReductionArtifacts {
    pub fn n(&self) -> usize {
        self.n3dm.n()
    }

    fn point(&self, r: usize) -> &Point2 {
        &self.instance.robots()[r]
    }

    pub fn a(&self, i: usize) -> &Point2 {
        self.point(self.groups.a[i])
    }

    pub fn a_prime(&self, i: usize) -> &Point2 {
        self.point(self.groups.a_prime[i])
    }

    pub fn b(&self, j: usize) -> &Point2 {
        self.point(self.groups.b[j])
    }

    pub fn b_prime(&self, i: usize) -> &Point2 {
        self.point(self.groups.b_prime[i])
    }

    pub fn c(&self, k: usize) -> &Point2 {
        self.point(self.groups.c[k])
    }
}

fn int(v: i64) -> Rational {
    Rational::from(v)
}

/// Builds the reduced freeze-tag instance.
#[allow(clippy::needless_range_loop)]
pub fn construct_reduction(inst: &N3dmInstance) -> Result<ReductionArtifacts, ReductionError> {
    let n = inst.n();
    let n_r = int(n as i64);
    let q = int(inst.q());
    let l = int(2 + n as i64).checked_mul(q)?;
    let eps = Rational::new(1, n as i128)?;
    let delta = q.checked_sub(int(inst.w()[n - 1]))?.checked_mul_int(2)?;
    let nq = n_r.checked_mul(q)?;

    let mut robots = Vec::with_capacity(6 * n);
    robots.extend((0..n).map(|_| Point2::origin()));
    let steps = |k: Rational| -> Result<Vec<Rational>, RationalError> {
        (1..=n as i128).map(|i| k.checked_mul_int(i)).collect()
    };
    let ie = steps(eps)?;
    let id = steps(delta)?;
    for i in 0..n {
        robots.push(Point2::new(int(inst.u()[i]).checked_sub(ie[i])?, ie[i]));
    }
    for i in 0..n {
        robots.push(Point2::new(l.checked_sub(ie[i])?, ie[i]));
    }
    for i in 0..n {
        robots.push(Point2::new(int(-inst.v()[i]).checked_add(ie[i])?, ie[i].checked_neg()?));
    }
    for i in 0..n {
        // -(L - 2u_i) + 2 - i eps
        let x = int(2 * inst.u()[i] + 2).checked_sub(l)?.checked_sub(ie[i])?;
        robots.push(Point2::new(x, int(-2).checked_add(ie[i])?));
    }
    for i in 0..n {
        let x = int(2 * inst.w()[i]).checked_add(nq)?.checked_sub(id[i])?;
        robots.push(Point2::new(x, id[i]));
    }

    Ok(ReductionArtifacts {
        instance: FtpInstance::l1(robots, 0)?,
        n3dm: inst.clone(),
        l,
        epsilon: eps,
        delta,
        groups: GroupMap::for_size(n),
        source: 0,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SlackViolation {
    /// 0-based index into B.
    pub j: usize,
    /// 0-based index into C.
    pub k: usize,
    pub slack: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SoundnessReport {
    pub sound: bool,
    /// Pairs with `C_k.x - B_j.x < 0`.
    pub violations: Vec<SlackViolation>,
    /// The pair with the smallest slack.
    pub min_slack: Option<SlackViolation>,
    /// Failures of the geometric facts that hold for every valid input;
    /// nonempty only on a construction bug.
    pub premise_failures: Vec<String>,
}

/// Checks the geometric premises of the makespan-`L` schedule.
pub fn layout_soundness(art: &ReductionArtifacts) -> Result<SoundnessReport, ReductionError> {
    let n = art.n();
    let inst = &art.n3dm;
    let mut violations = Vec::new();
    let mut min_slack: Option<SlackViolation> = None;
    for j in 0..n {
        for k in 0..n {
            let slack = art.c(k).x.checked_sub(art.b(j).x)?;
            let entry = SlackViolation { j, k, slack };
            if min_slack.as_ref().is_none_or(|m| slack < m.slack) {
                min_slack = Some(entry.clone());
            }
            if slack.is_negative() {
                violations.push(entry);
            }
        }
    }

    let mut fails = Vec::new();
    let d = |p: &Point2, q: &Point2| l1_distance(p, q);
    for i in 0..n {
        let u = int(inst.u()[i]);
        if art.a_prime(i).norm_l1()? != art.l {
            fails.push(format!("||A'_{}|| != L", i + 1));
        }
        if art.a(i).norm_l1()? != u {
            fails.push(format!("||A_{}|| != u_{}", i + 1, i + 1));
        }
        if d(art.b_prime(i), art.a(i))? != art.l.checked_sub(u)? {
            fails.push(format!("||B'_{0} - A_{0}|| != L - u_{0}", i + 1));
        }
        for i2 in i + 1..n {
            if !(art.a(i).x > art.a(i2).x && art.a(i).y < art.a(i2).y) {
                fails.push(format!("A_{} and A_{} are not on a Pareto front", i + 1, i2 + 1));
            }
        }
        for j in 0..n {
            let v = int(inst.v()[j]);
            if d(art.b(j), art.a(i))? != u.checked_add(v)? {
                fails.push(format!("||B_{} - A_{}|| != u + v", j + 1, i + 1));
            }
            let (bp, b) = (art.b_prime(i), art.b(j));
            if !(bp.x <= b.x && bp.y <= b.y) {
                fails.push(format!("B'_{} is not dominated by B_{}", i + 1, j + 1));
            }
        }
    }
    let two_delta = art.delta.checked_mul_int(2)?;
    for k in 0..n {
        for k2 in k + 1..n {
            if d(art.c(k), art.c(k2))? < two_delta {
                fails.push(format!("||C_{} - C_{}|| < 2 delta", k + 1, k2 + 1));
            }
        }
    }

    Ok(SoundnessReport {
        sound: violations.is_empty() && fails.is_empty(),
        violations,
        min_slack,
        premise_failures: fails,
    })
}

/// Smallest `K >= 0` such that shifting `W` by `K` makes the layout sound.
///
/// `delta` is unchanged by the shift, and the tightest pair is `(B_n, C_n)`,
/// so the condition is `2(w_n + K) + n(q + K) - n delta + v_n - 1 >= 0`.
pub fn required_shift(inst: &N3dmInstance) -> i64 {
    let n = inst.n() as i64;
    let wn = inst.w()[inst.n() - 1];
    let vn = inst.v()[inst.n() - 1];
    let delta = 2 * (inst.q() - wn);
    let num = n * delta - 2 * wn - n * inst.q() - vn + 1;
    if num <= 0 {
        0
    } else {
        (num + n + 1) / (n + 2)
    }
}

/// The makespan-`L` schedule induced by a matching.
///
/// Roots form a zero-length chain `r_1 -> r_2 -> ... -> r_n`; root `r_l`
/// (for `l >= 2`) sends one robot to `a` of triple `l - 1` and `r_n` also
/// serves triple `n`. For a triple `(i, j, k)` the path continues
/// `a_i -> b_j -> c_k`, with side trips `a_i -> a'_i` and `b_j -> b'_i`.
pub fn canonical_schedule(art: &ReductionArtifacts, m: &Matching) -> Result<WakeupTree, ReductionError> {
    m.verify(&art.n3dm)?;
    let report = layout_soundness(art)?;
    if !report.violations.is_empty() {
        return Err(ReductionError::Unsound(report.violations));
    }
    if let Some(f) = report.premise_failures.first() {
        return Err(ReductionError::Premise(f.clone()));
    }
    let n = art.n();
    let g = &art.groups;
    let mut parent = vec![None; art.instance.len()];
    for l in 1..n {
        parent[g.roots[l]] = Some(g.roots[l - 1]);
    }
    for (l, &(i, j, k)) in m.triples.iter().enumerate() {
        let dispatcher = if n == 1 {
            g.roots[0]
        } else if l + 1 < n {
            g.roots[l + 1]
        } else {
            g.roots[n - 1]
        };
        parent[g.a[i]] = Some(dispatcher);
        parent[g.a_prime[i]] = Some(g.a[i]);
        parent[g.b[j]] = Some(g.a[i]);
        parent[g.b_prime[i]] = Some(g.b[j]);
        parent[g.c[k]] = Some(g.b[j]);
    }
    Ok(WakeupTree::new(parent))
}
