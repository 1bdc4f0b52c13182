use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use super::{ReductionArtifacts, ReductionError};
use crate::model::{l1_distance, FtpInstance, Point2};
use crate::numeric::Rational;

/// Multiplies every coordinate by `1/eps = n`. Returns the scaled instance
/// and the factor; makespans scale by exactly the same factor.
pub fn scale_to_integers(art: &ReductionArtifacts) -> Result<(FtpInstance, Rational), ReductionError> {
    let factor = Rational::ONE.checked_div(art.epsilon)?;
    let scaled = art.instance.scaled(factor)?;
    for p in scaled.robots() {
        for c in [p.x, p.y] {
            if !c.is_integer() {
                return Err(ReductionError::NotIntegral(c));
            }
        }
    }
    Ok((scaled, factor))
}

/// A full rectangular unit grid covering the robots' bounding box.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GridEmbedding {
    pub width: usize,
    pub height: usize,
    /// Plane coordinates of cell `(0, 0)`.
    pub origin: (i128, i128),
    /// `(column, row)` of each robot.
    pub cells: Vec<(usize, usize)>,
}

const MAX_GRID_CELLS: i128 = 1 << 28;

pub fn embed_grid(inst: &FtpInstance) -> Result<GridEmbedding, ReductionError> {
    if !inst.is_planar() {
        return Err(ReductionError::NotPlanar);
    }
    let mut coords = Vec::with_capacity(inst.len());
    for p in inst.robots() {
        for c in [p.x, p.y] {
            if !c.is_integer() {
                return Err(ReductionError::NotIntegral(c));
            }
        }
        coords.push((p.x.numerator(), p.y.numerator()));
    }
    let min_x = coords.iter().map(|c| c.0).min().expect("instances are nonempty");
    let max_x = coords.iter().map(|c| c.0).max().expect("instances are nonempty");
    let min_y = coords.iter().map(|c| c.1).min().expect("instances are nonempty");
    let max_y = coords.iter().map(|c| c.1).max().expect("instances are nonempty");
    let width = max_x - min_x + 1;
    let height = max_y - min_y + 1;
    if width.checked_mul(height).is_none_or(|cells| cells > MAX_GRID_CELLS) {
        return Err(ReductionError::GridTooLarge { width, height });
    }
    Ok(GridEmbedding {
        width: width as usize,
        height: height as usize,
        origin: (min_x, min_y),
        cells: coords
            .into_iter()
            .map(|(x, y)| ((x - min_x) as usize, (y - min_y) as usize))
            .collect(),
    })
}

impl GridEmbedding {
    pub fn cell_count(&self) -> usize {
        self.width * self.height
    }

    /// Breadth-first hop counts from `start` to every cell, indexed
    /// `row * width + column`.
    pub fn bfs(&self, start: (usize, usize)) -> Vec<u64> {
        let mut dist = vec![u64::MAX; self.cell_count()];
        let idx = |(c, r): (usize, usize)| r * self.width + c;
        dist[idx(start)] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some((c, r)) = queue.pop_front() {
            let d = dist[idx((c, r))];
            let mut push = |cell: (usize, usize)| {
                let i = idx(cell);
                if dist[i] == u64::MAX {
                    dist[i] = d + 1;
                    queue.push_back(cell);
                }
            };
            if c > 0 {
                push((c - 1, r));
            }
            if c + 1 < self.width {
                push((c + 1, r));
            }
            if r > 0 {
                push((c, r - 1));
            }
            if r + 1 < self.height {
                push((c, r + 1));
            }
        }
        dist
    }

    /// Grid distances between every pair of robots.
    pub fn robot_distances(&self) -> Vec<Vec<u64>> {
        self.cells
            .iter()
            .map(|&from| {
                let d = self.bfs(from);
                self.cells.iter().map(|&(c, r)| d[r * self.width + c]).collect()
            })
            .collect()
    }
}

/// Spreads colocated robots apart along `+x`.
///
/// The `t`-th of `k` robots sharing a position moves by `t * rho / k`, the
/// source (if among them) taking slot `t = 0` and the rest following in
/// index order. Positions holding several robots get a disk of radius `rho`;
/// disks of distinct positions must not touch.
pub fn perturb_unique(inst: &FtpInstance, rho: Rational) -> Result<FtpInstance, ReductionError> {
    if !inst.is_planar() {
        return Err(ReductionError::NotPlanar);
    }
    if rho <= Rational::ZERO {
        return Err(ReductionError::NonPositiveRadius(rho));
    }
    let robots = inst.robots();
    let mut order: Vec<usize> = (0..robots.len()).collect();
    // source first, so it keeps slot 0 of its group
    order.sort_by_key(|&r| (r != inst.source(), r));
    let mut groups: Vec<(Point2, Vec<usize>)> = Vec::new();
    let mut index_of: HashMap<Point2, usize> = HashMap::new();
    for r in order {
        let slot = *index_of.entry(robots[r]).or_insert_with(|| {
            groups.push((robots[r], Vec::new()));
            groups.len() - 1
        });
        groups[slot].1.push(r);
    }

    let radius = |members: &[usize]| if members.len() > 1 { rho } else { Rational::ZERO };
    for (a, (pa, ma)) in groups.iter().enumerate() {
        for (pb, mb) in &groups[a + 1..] {
            if ma.len() == 1 && mb.len() == 1 {
                continue;
            }
            let reach = radius(ma).checked_add(radius(mb))?;
            if l1_distance(pa, pb)? <= reach {
                return Err(ReductionError::DiskCollision(Box::new((*pa, *pb))));
            }
        }
    }

    let mut moved = robots.to_vec();
    for (p, members) in &groups {
        let k = members.len() as i128;
        for (t, &r) in members.iter().enumerate() {
            let dx = rho.checked_mul(Rational::new(t as i128, k)?)?;
            moved[r] = Point2::new(p.x.checked_add(dx)?, p.y);
        }
    }
    Ok(FtpInstance::l1(moved, inst.source())?)
}
