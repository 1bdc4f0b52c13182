//! Numerical 3-dimensional matching.
//!
//! Given three size-`n` multisets `U`, `V`, `W` of positive integers whose
//! total is `n * q`, decide whether they can be split into `n` triples
//! `(u, v, w)`, one element from each list, each summing to `q`.
//!
//! Indices in [`Matching`] are 0-based positions in the canonical
//! (non-increasing) order of each list.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_MATCH_CAP: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum N3dmError {
    #[error("not a valid N3DM instance: {0}")]
    Invalid(String),
    #[error("not a valid N3DM instance: total {total} is not divisible by n = {n}")]
    NonIntegralTarget { total: i64, n: usize },
    #[error("brute-force matching refused: n = {n} exceeds the cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("invalid matching: {0}")]
    InvalidMatching(String),
    #[error("integer overflow")]
    Overflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    U,
    V,
    W,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::U => "U",
            Side::V => "V",
            Side::W => "W",
        })
    }
}

/// A validated instance with each list sorted non-increasing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct N3dmInstance {
    u: Vec<i64>,
    v: Vec<i64>,
    w: Vec<i64>,
    q: i64,
}

fn canonical(list: &[i64]) -> Vec<i64> {
    let mut out = list.to_vec();
    // stable, so equal values keep their input order
    out.sort_by(|a, b| b.cmp(a));
    out
}

/// Validates three integer lists and returns the canonical instance.
pub fn validate_n3dm(u: &[i64], v: &[i64], w: &[i64]) -> Result<N3dmInstance, N3dmError> {
    let n = u.len();
    if n == 0 {
        return Err(N3dmError::Invalid("lists must be nonempty".into()));
    }
    if v.len() != n || w.len() != n {
        return Err(N3dmError::Invalid(format!(
            "lists have different lengths ({}, {}, {})",
            n,
            v.len(),
            w.len()
        )));
    }
    for (side, list) in [(Side::U, u), (Side::V, v), (Side::W, w)] {
        if let Some(pos) = list.iter().position(|&x| x < 1) {
            return Err(N3dmError::Invalid(format!(
                "{side}[{pos}] = {} is not a positive integer",
                list[pos]
            )));
        }
    }
    let total = u
        .iter()
        .chain(v)
        .chain(w)
        .try_fold(0i64, |acc, &x| acc.checked_add(x))
        .ok_or(N3dmError::Overflow)?;
    if total % n as i64 != 0 {
        return Err(N3dmError::NonIntegralTarget { total, n });
    }
    Ok(N3dmInstance {
        u: canonical(u),
        v: canonical(v),
        w: canonical(w),
        q: total / n as i64,
    })
}

impl N3dmInstance {
    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn u(&self) -> &[i64] {
        &self.u
    }

    pub fn v(&self) -> &[i64] {
        &self.v
    }

    pub fn w(&self) -> &[i64] {
        &self.w
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    pub triples: Vec<(usize, usize, usize)>,
}

impl Matching {
    /// Checks that every index of each list is used exactly once and that
    /// every triple sums to `q`.
    pub fn verify(&self, inst: &N3dmInstance) -> Result<(), N3dmError> {
        let n = inst.n();
        if self.triples.len() != n {
            return Err(N3dmError::InvalidMatching(format!(
                "{} triples for n = {n}",
                self.triples.len()
            )));
        }
        let mut seen = [vec![false; n], vec![false; n], vec![false; n]];
        for &(i, j, k) in &self.triples {
            for (slot, idx) in [i, j, k].into_iter().enumerate() {
                if idx >= n || std::mem::replace(&mut seen[slot][idx], true) {
                    return Err(N3dmError::InvalidMatching(format!(
                        "index {idx} of list {} is out of range or reused",
                        ["U", "V", "W"][slot]
                    )));
                }
            }
            let sum = inst.u[i] + inst.v[j] + inst.w[k];
            if sum != inst.q {
                return Err(N3dmError::InvalidMatching(format!(
                    "triple ({i}, {j}, {k}) sums to {sum}, not {}",
                    inst.q
                )));
            }
        }
        Ok(())
    }
}

pub fn brute_force_match(inst: &N3dmInstance) -> Result<Option<Matching>, N3dmError> {
    brute_force_match_with_cap(inst, DEFAULT_MATCH_CAP)
}

/// Exhaustive backtracking: each `u_i` in order is paired with an unused
/// `(v_j, w_k)` summing to `q - u_i`. Among unused equal values only the
/// first index is tried.
pub fn brute_force_match_with_cap(inst: &N3dmInstance, cap: usize) -> Result<Option<Matching>, N3dmError> {
    let n = inst.n();
    if n > cap {
        return Err(N3dmError::CapExceeded { n, cap });
    }
    let mut used_v = vec![false; n];
    let mut used_w = vec![false; n];
    let mut triples = Vec::with_capacity(n);
    if backtrack(inst, 0, &mut used_v, &mut used_w, &mut triples) {
        Ok(Some(Matching { triples }))
    } else {
        Ok(None)
    }
}

fn backtrack(
    inst: &N3dmInstance,
    i: usize,
    used_v: &mut [bool],
    used_w: &mut [bool],
    triples: &mut Vec<(usize, usize, usize)>,
) -> bool {
    if i == inst.n() {
        return true;
    }
    let need = inst.q - inst.u[i];
    let mut last_v = None;
    for j in 0..inst.n() {
        if used_v[j] || last_v == Some(inst.v[j]) || inst.v[j] >= need {
            continue;
        }
        last_v = Some(inst.v[j]);
        let Some(k) = (0..inst.n()).find(|&k| !used_w[k] && inst.w[k] == need - inst.v[j]) else {
            continue;
        };
        used_v[j] = true;
        used_w[k] = true;
        triples.push((i, j, k));
        if backtrack(inst, i + 1, used_v, used_w, triples) {
            return true;
        }
        triples.pop();
        used_v[j] = false;
        used_w[k] = false;
    }
    false
}

/// Adds `k` to every element of `W` and to `q`. Each triple contains exactly
/// one `w`, so the yes/no answer is unchanged.
pub fn shift_w(inst: &N3dmInstance, k: i64) -> Result<N3dmInstance, N3dmError> {
    if k < 0 {
        return Err(N3dmError::Invalid(format!("shift {k} is negative")));
    }
    let w = inst
        .w
        .iter()
        .map(|&x| x.checked_add(k))
        .collect::<Option<Vec<_>>>()
        .ok_or(N3dmError::Overflow)?;
    Ok(N3dmInstance {
        u: inst.u.clone(),
        v: inst.v.clone(),
        w,
        q: inst.q.checked_add(k).ok_or(N3dmError::Overflow)?,
    })
}
