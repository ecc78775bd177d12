//! Absorbing-chain quantities on dense matrices: hit-A-before-B
//! probabilities, hitting-time CDFs, and expected absorption times, all by
//! direct linear solves or absorbed evolution.

use crate::error::{Error, Result};
use crate::linalg::solve_dense;
use crate::matrix::StochasticMatrix;

fn mark(dim: usize, states: &[usize], name: &str) -> Result<Vec<bool>> {
    if states.is_empty() {
        return Err(Error::EmptySubset(format!("{name} is empty")));
    }
    let mut mask = vec![false; dim];
    for &s in states {
        if s >= dim {
            return Err(Error::DimensionMismatch(format!(
                "{name} state {s} outside 0..{dim}"
            )));
        }
        mask[s] = true;
    }
    Ok(mask)
}

/// Every transient state must reach the absorbing set with positive
/// probability (possibly in several steps); otherwise the chain has a
/// closed class disjoint from the targets and no absorption happens.
#[allow(clippy::needless_range_loop)] // scan mutates `reached` mid-loop
fn check_absorbing_reachability(matrix: &StochasticMatrix, absorbing: &[bool]) -> Result<()> {
    let dim = matrix.dim();
    // Reverse reachability from the absorbing set over transient states.
    let mut reached = absorbing.to_vec();
    let mut stack: Vec<usize> = (0..dim).filter(|&i| absorbing[i]).collect();
    while let Some(y) = stack.pop() {
        for x in 0..dim {
            if !reached[x] && matrix.get(x, y) > 0.0 {
                reached[x] = true;
                stack.push(x);
            }
        }
    }
    if let Some(x) = (0..dim).find(|&x| !reached[x]) {
        return Err(Error::NotAbsorbing(x));
    }
    Ok(())
}

/// Probability of hitting `targets_a` strictly before `targets_b`, starting
/// from `start`. Solves `(I - P_TT) h = P_TA 1` on the transient block.
pub fn absorbing_hit_probability(
    matrix: &StochasticMatrix,
    targets_a: &[usize],
    targets_b: &[usize],
    start: usize,
) -> Result<f64> {
    let dim = matrix.dim();
    let in_a = mark(dim, targets_a, "target set A")?;
    let in_b = mark(dim, targets_b, "target set B")?;
    if let Some(s) = (0..dim).find(|&s| in_a[s] && in_b[s]) {
        return Err(Error::Incompatible(format!(
            "state {s} belongs to both target sets"
        )));
    }
    if start >= dim {
        return Err(Error::DimensionMismatch(format!(
            "start {start} outside 0..{dim}"
        )));
    }
    if in_a[start] {
        return Ok(1.0);
    }
    if in_b[start] {
        return Ok(0.0);
    }
    let absorbing: Vec<bool> = (0..dim).map(|i| in_a[i] || in_b[i]).collect();
    check_absorbing_reachability(matrix, &absorbing)?;

    let transient: Vec<usize> = (0..dim).filter(|&i| !absorbing[i]).collect();
    let index: std::collections::HashMap<usize, usize> =
        transient.iter().enumerate().map(|(k, &x)| (x, k)).collect();
    let m = transient.len();
    let mut a = vec![0.0; m * m];
    let mut rhs = vec![0.0; m];
    for (k, &x) in transient.iter().enumerate() {
        a[k * m + k] = 1.0;
        let row = matrix.row(x);
        for (y, &p) in row.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            if in_a[y] {
                rhs[k] += p;
            } else if !in_b[y] {
                a[k * m + index[&y]] -= p;
            }
        }
    }
    let h = solve_dense(a, rhs, m)?;
    Ok(h[index[&start]].clamp(0.0, 1.0))
}

/// `Prob(tau_targets <= t)` for `t = 0..=t_max`, by evolving the chain with
/// the target set made absorbing. Entry 0 is 1 if `start` is a target.
pub fn hitting_time_cdf(
    matrix: &StochasticMatrix,
    targets: &[usize],
    start: usize,
    t_max: u64,
) -> Result<Vec<f64>> {
    let dim = matrix.dim();
    let in_t = mark(dim, targets, "target set")?;
    if start >= dim {
        return Err(Error::DimensionMismatch(format!(
            "start {start} outside 0..{dim}"
        )));
    }
    let mut cur = vec![0.0; dim];
    cur[start] = 1.0;
    let mut absorbed = if in_t[start] { 1.0 } else { 0.0 };
    if in_t[start] {
        cur[start] = 0.0;
    }
    let mut cdf = Vec::with_capacity(t_max as usize + 1);
    cdf.push(absorbed);
    let mut next = vec![0.0; dim];
    for _ in 0..t_max {
        next.iter_mut().for_each(|v| *v = 0.0);
        for (x, &mass) in cur.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let row = matrix.row(x);
            for (y, &p) in row.iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                if in_t[y] {
                    absorbed += mass * p;
                } else {
                    next[y] += mass * p;
                }
            }
        }
        std::mem::swap(&mut cur, &mut next);
        cdf.push(absorbed.min(1.0));
    }
    Ok(cdf)
}

/// Expected number of steps to reach `targets` from `start`; solves
/// `(I - P_TT) m = 1`.
pub fn expected_absorption_time(
    matrix: &StochasticMatrix,
    targets: &[usize],
    start: usize,
) -> Result<f64> {
    let dim = matrix.dim();
    let in_t = mark(dim, targets, "target set")?;
    if start >= dim {
        return Err(Error::DimensionMismatch(format!(
            "start {start} outside 0..{dim}"
        )));
    }
    if in_t[start] {
        return Ok(0.0);
    }
    check_absorbing_reachability(matrix, &in_t)?;
    let transient: Vec<usize> = (0..dim).filter(|&i| !in_t[i]).collect();
    let index: std::collections::HashMap<usize, usize> =
        transient.iter().enumerate().map(|(k, &x)| (x, k)).collect();
    let m = transient.len();
    let mut a = vec![0.0; m * m];
    for (k, &x) in transient.iter().enumerate() {
        a[k * m + k] = 1.0;
        let row = matrix.row(x);
        for (y, &p) in row.iter().enumerate() {
            if p != 0.0 && !in_t[y] {
                a[k * m + index[&y]] -= p;
            }
        }
    }
    let sol = solve_dense(a, vec![1.0; m], m)?;
    Ok(sol[index[&start]])
}
