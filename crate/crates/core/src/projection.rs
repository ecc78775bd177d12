//! One-dimensional reductions of the enumerated chains: birth-and-death
//! rate profiles, the weight projection of the OR chain, the magnetization
//! projection of the spin chain, the Ehrenfest urn, the lazy transform,
//! and an exact-lumpability checker for arbitrary partitions.

use crate::error::{Error, Result};
use crate::game::{GameFamily, GameSpec};
use crate::logit::LogitKernel;
use crate::matrix::StochasticMatrix;

/// Birth-and-death chain on `{0, .., n}`: up-rates `p_k`, down-rates `q_k`,
/// holding `r_k = 1 - p_k - q_k`. Optional state labels carry an affine
/// relabeling (magnetization chains live on `{-n, -n+2, .., n}`).
#[derive(Debug, Clone, PartialEq)]
pub struct BirthDeathChain {
    up: Vec<f64>,
    down: Vec<f64>,
    labels: Option<Vec<f64>>,
}

impl BirthDeathChain {
    pub fn new(up: Vec<f64>, down: Vec<f64>, labels: Option<Vec<f64>>) -> Result<Self> {
        if up.len() != down.len() || up.is_empty() {
            return Err(Error::InvalidChain(format!(
                "rate vectors of lengths {} and {}",
                up.len(),
                down.len()
            )));
        }
        if let Some(l) = &labels {
            if l.len() != up.len() {
                return Err(Error::InvalidChain(format!(
                    "{} labels for {} states",
                    l.len(),
                    up.len()
                )));
            }
        }
        let n = up.len() - 1;
        for k in 0..=n {
            let (p, q) = (up[k], down[k]);
            if !(p >= 0.0) || !(q >= 0.0) || p + q > 1.0 + 1e-12 {
                return Err(Error::InvalidChain(format!(
                    "rates p_{k} = {p}, q_{k} = {q} outside the simplex"
                )));
            }
        }
        if up[n] != 0.0 {
            return Err(Error::InvalidChain(format!("p_n = {} at the top", up[n])));
        }
        if down[0] != 0.0 {
            return Err(Error::InvalidChain(format!(
                "q_0 = {} at the bottom",
                down[0]
            )));
        }
        Ok(BirthDeathChain { up, down, labels })
    }

    /// Top state index.
    pub fn n(&self) -> usize {
        self.up.len() - 1
    }

    pub fn states(&self) -> usize {
        self.up.len()
    }

    pub fn up(&self, k: usize) -> f64 {
        self.up[k]
    }

    pub fn down(&self, k: usize) -> f64 {
        self.down[k]
    }

    pub fn hold(&self, k: usize) -> f64 {
        // p + q can exceed 1 by an ulp for chains that never hold.
        (1.0 - self.up[k] - self.down[k]).max(0.0)
    }

    pub fn label(&self, k: usize) -> f64 {
        match &self.labels {
            Some(l) => l[k],
            None => k as f64,
        }
    }

    pub fn labels(&self) -> Option<&[f64]> {
        self.labels.as_deref()
    }

    /// Index of the state labeled `label` (exact match).
    pub fn index_of_label(&self, label: f64) -> Option<usize> {
        (0..self.states()).find(|&k| self.label(k) == label)
    }

    /// Largest index whose label is `<= label`.
    pub fn last_index_with_label_at_most(&self, label: f64) -> Option<usize> {
        (0..self.states()).rev().find(|&k| self.label(k) <= label)
    }

    /// Lazy version: every moving rate halved.
    pub fn lazy(&self) -> BirthDeathChain {
        BirthDeathChain {
            up: self.up.iter().map(|p| p / 2.0).collect(),
            down: self.down.iter().map(|q| q / 2.0).collect(),
            labels: self.labels.clone(),
        }
    }

    /// Dense matrix form (for cross-checks against the generic machinery).
    pub fn to_matrix(&self) -> StochasticMatrix {
        let dim = self.states();
        let mut data = vec![0.0; dim * dim];
        for k in 0..dim {
            if k + 1 < dim {
                data[k * dim + k + 1] = self.up[k];
            }
            if k > 0 {
                data[k * dim + k - 1] = self.down[k];
            }
            data[k * dim + k] = self.hold(k);
        }
        StochasticMatrix::new(dim, data).expect("validated rates form a stochastic matrix")
    }

    /// Stationary distribution by detailed balance (requires all interior
    /// rates positive); normalized on the fly.
    pub fn stationary(&self) -> Result<Vec<f64>> {
        let n = self.n();
        let mut logw = vec![0.0; n + 1];
        for k in 0..n {
            if self.up[k] <= 0.0 || self.down[k + 1] <= 0.0 {
                return Err(Error::InvalidChain(format!(
                    "zero rate between {k} and {} blocks detailed balance",
                    k + 1
                )));
            }
            logw[k + 1] = logw[k] + (self.up[k] / self.down[k + 1]).ln();
        }
        let max = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = logw.iter().map(|&w| (w - max).exp()).sum();
        Ok(logw.iter().map(|&w| (w - max).exp() / z).collect())
    }
}

/// Ehrenfest urn on `{0, .., n}`: down `k/n`, up `(n-k)/n`, never holds.
pub fn ehrenfest(n: usize) -> Result<BirthDeathChain> {
    if n == 0 {
        return Err(Error::InvalidChain("urn needs n >= 1".into()));
    }
    let nf = n as f64;
    let up = (0..=n).map(|k| (n - k) as f64 / nf).collect();
    let down = (0..=n).map(|k| k as f64 / nf).collect();
    BirthDeathChain::new(up, down, None)
}

/// Weight projection of the OR-game chain. The interior rows are the lazy
/// Ehrenfest urn; state 1 feels the pull of the all-zeros profile and its
/// down-rate is `1 / (n (1 + e^{-beta}))`; from state 0 a selected player
/// leaves with probability `1 / (1 + e^{beta})`.
pub fn or_projection(n: usize, beta: f64) -> Result<BirthDeathChain> {
    if n < 2 {
        return Err(Error::InvalidChain("weight projection needs n >= 2".into()));
    }
    if !(beta >= 0.0) {
        return Err(Error::InvalidChain(format!("beta {beta} must be >= 0")));
    }
    let nf = n as f64;
    let mut up = vec![0.0; n + 1];
    let mut down = vec![0.0; n + 1];
    for i in 2..=n {
        up[i] = (n - i) as f64 / (2.0 * nf);
        down[i] = i as f64 / (2.0 * nf);
    }
    up[1] = (n - 1) as f64 / (2.0 * nf);
    down[1] = 1.0 / (nf * (1.0 + (-beta).exp()));
    up[0] = 1.0 / (1.0 + beta.exp());
    BirthDeathChain::new(up, down, None)
}

/// Magnetization projection of the spin chain: states `{0, .., n}` labeled
/// `2k - n`, up-rate `((n-m)/2n) / (1 + e^{-2(m+1) beta})` and down-rate
/// `((n+m)/2n) / (1 + e^{2(m-1) beta})` at label `m`.
pub fn magnetization_chain(n: usize, beta: f64) -> Result<BirthDeathChain> {
    if n < 2 {
        return Err(Error::InvalidChain(
            "magnetization chain needs n >= 2".into(),
        ));
    }
    if !(beta >= 0.0) {
        return Err(Error::InvalidChain(format!("beta {beta} must be >= 0")));
    }
    let nf = n as f64;
    let mut up = vec![0.0; n + 1];
    let mut down = vec![0.0; n + 1];
    let mut labels = vec![0.0; n + 1];
    for k in 0..=n {
        let m = 2.0 * k as f64 - nf;
        labels[k] = m;
        up[k] = (nf - m) / (2.0 * nf) / (1.0 + (-2.0 * (m + 1.0) * beta).exp());
        down[k] = (nf + m) / (2.0 * nf) / (1.0 + (2.0 * (m - 1.0) * beta).exp());
    }
    // The boundary factors vanish exactly: (n - m) = 0 at the top,
    // (n + m) = 0 at the bottom.
    up[n] = 0.0;
    down[0] = 0.0;
    BirthDeathChain::new(up, down, Some(labels))
}

/// Result of an exact-lumpability test for a state partition.
#[derive(Debug, Clone)]
pub struct LumpabilityReport {
    /// Block-to-block transition matrix assembled from block-averaged rows.
    pub lumped: StochasticMatrix,
    /// Largest deviation of any state's block-row from its block average;
    /// zero (up to rounding) iff the partition is exactly lumpable.
    pub max_deviation: f64,
}

/// Check strong lumpability of `matrix` under `partition` (state -> block).
/// Never fails on non-lumpable partitions; the deviation is reported.
pub fn lumpability_check(
    matrix: &StochasticMatrix,
    partition: &[usize],
) -> Result<LumpabilityReport> {
    let dim = matrix.dim();
    if partition.len() != dim {
        return Err(Error::DimensionMismatch(format!(
            "partition of {} states for matrix of {}",
            partition.len(),
            dim
        )));
    }
    let blocks = match partition.iter().max() {
        Some(&m) => m + 1,
        None => 0,
    };
    let mut seen = vec![false; blocks];
    for &b in partition {
        seen[b] = true;
    }
    if seen.iter().any(|&s| !s) {
        return Err(Error::Incompatible(
            "partition block indices must be contiguous from 0".into(),
        ));
    }

    let mut sums = vec![0.0; blocks]; // row sums into each block, reused per state
    let mut avg = vec![0.0; blocks * blocks];
    let mut counts = vec![0usize; blocks];
    let mut per_state: Vec<(usize, Vec<f64>)> = Vec::with_capacity(dim);
    for x in 0..dim {
        sums.iter_mut().for_each(|v| *v = 0.0);
        let row = matrix.row(x);
        for (y, &p) in row.iter().enumerate() {
            if p != 0.0 {
                sums[partition[y]] += p;
            }
        }
        let b = partition[x];
        counts[b] += 1;
        for (j, &s) in sums.iter().enumerate() {
            avg[b * blocks + j] += s;
        }
        per_state.push((b, sums.clone()));
    }
    for b in 0..blocks {
        for j in 0..blocks {
            avg[b * blocks + j] /= counts[b] as f64;
        }
    }
    let mut max_dev = 0.0f64;
    for (b, sums) in &per_state {
        for (j, &s) in sums.iter().enumerate() {
            max_dev = max_dev.max((s - avg[b * blocks + j]).abs());
        }
    }
    // Block averages of stochastic rows are stochastic up to rounding.
    let lumped = StochasticMatrix::new(blocks, avg)
        .map_err(|e| Error::InvalidMatrix(format!("lumped matrix failed validation: {e}")))?;
    Ok(LumpabilityReport {
        lumped,
        max_deviation: max_dev,
    })
}

/// Partition of the enumerated hypercube by Hamming weight.
pub fn weight_partition(n: usize) -> Vec<usize> {
    (0usize..(1 << n))
        .map(|x| x.count_ones() as usize)
        .collect()
}

/// Exact weight/magnetization lumping of a game's chain, with the
/// deviation report. OR games and spin games lump exactly; ring games do
/// not.
pub fn project_by_weight(game: &GameSpec) -> Result<LumpabilityReport> {
    let matrix = crate::logit::build_transition_matrix(game)?;
    lumpability_check(&matrix, &weight_partition(game.n()))
}

/// Birth-and-death view of a game's exact weight lumping. Fails if the
/// lumped matrix is not tridiagonal.
pub fn lumped_birth_death(game: &GameSpec) -> Result<(BirthDeathChain, f64)> {
    let report = project_by_weight(game)?;
    let n = game.n();
    let lum = &report.lumped;
    let mut up = vec![0.0; n + 1];
    let mut down = vec![0.0; n + 1];
    for k in 0..=n {
        for j in 0..=n {
            let p = lum.get(k, j);
            if p == 0.0 {
                continue;
            }
            match j as isize - k as isize {
                0 => {}
                1 => up[k] = p,
                -1 => down[k] = p,
                _ => {
                    return Err(Error::InvalidChain(format!(
                        "lumped chain jumps from {k} to {j}"
                    )))
                }
            }
        }
    }
    let labels = match game.family() {
        GameFamily::Ising => Some((0..=n).map(|k| 2.0 * k as f64 - n as f64).collect()),
        _ => None,
    };
    Ok((
        BirthDeathChain::new(up, down, labels)?,
        report.max_deviation,
    ))
}

/// Kernel-level single-row lumping oracle: total transition mass from
/// state `x` into each weight class, straight from the update law.
pub fn weight_row_of_state(kernel: &LogitKernel, x: usize) -> Vec<f64> {
    let n = kernel.game().n();
    let mut row = vec![0.0; n + 1];
    for (y, p) in kernel.row(x) {
        row[y.count_ones() as usize] += p;
    }
    row
}
