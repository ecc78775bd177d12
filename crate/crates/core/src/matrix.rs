//! Dense row-stochastic matrices and distribution evolution.

use crate::dist::Distribution;
use crate::error::{Error, Result};

/// Row-sum tolerance for stochastic matrices.
pub const ROW_SUM_EPS: f64 = 1e-12;

/// Anything that can push a distribution one step forward. Implemented by
/// the dense matrix and by the matrix-free logit kernel so that evolution,
/// certificates and pseudo-mixing measurements share one code path.
pub trait TransitionKernel: Sync {
    fn dim(&self) -> usize;

    /// `dst = src * P`; `dst` is zeroed by the callee.
    fn apply_into(&self, src: &[f64], dst: &mut [f64]);

    fn apply(&self, src: &[f64]) -> Vec<f64> {
        let mut dst = vec![0.0; self.dim()];
        self.apply_into(src, &mut dst);
        dst
    }
}

/// Dense row-stochastic matrix over an enumerated state space.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    dim: usize,
    data: Vec<f64>, // row-major
}

impl StochasticMatrix {
    /// Validate nonnegativity and row sums within [`ROW_SUM_EPS`].
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != dim * dim || dim == 0 {
            return Err(Error::InvalidMatrix(format!(
                "{} entries for dimension {dim}",
                data.len()
            )));
        }
        for (i, row) in data.chunks(dim).enumerate() {
            if let Some(&bad) = row.iter().find(|&&v| !(v >= 0.0)) {
                return Err(Error::InvalidMatrix(format!(
                    "negative entry {bad} in row {i}"
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_EPS {
                return Err(Error::InvalidMatrix(format!(
                    "row {i} sums to {sum} (off by {:e})",
                    (sum - 1.0).abs()
                )));
            }
        }
        Ok(StochasticMatrix { dim, data })
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1.0;
        }
        StochasticMatrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Lazy version `(P + I) / 2`.
    pub fn lazy(&self) -> StochasticMatrix {
        let mut data = self.data.clone();
        for v in data.iter_mut() {
            *v *= 0.5;
        }
        for i in 0..self.dim {
            data[i * self.dim + i] += 0.5;
        }
        StochasticMatrix {
            dim: self.dim,
            data,
        }
    }

    /// Row distribution as a [`Distribution`].
    pub fn row_distribution(&self, i: usize) -> Result<Distribution> {
        Distribution::new_lenient(self.row(i).to_vec(), 1e-9)
    }
}

impl TransitionKernel for StochasticMatrix {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply_into(&self, src: &[f64], dst: &mut [f64]) {
        dst.iter_mut().for_each(|v| *v = 0.0);
        for (x, &m) in src.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            let row = self.row(x);
            for (y, &p) in row.iter().enumerate() {
                if p != 0.0 {
                    dst[y] += m * p;
                }
            }
        }
    }
}

/// `mu * P^t`. Mass is allowed to drift by `1e-10 * t` per the simplex
/// contract; the result is checked leniently against that budget.
pub fn evolve<K: TransitionKernel>(mu: &Distribution, kernel: &K, t: u64) -> Result<Distribution> {
    if mu.len() != kernel.dim() {
        return Err(Error::DimensionMismatch(format!(
            "distribution of {} states against kernel of {}",
            mu.len(),
            kernel.dim()
        )));
    }
    let mut cur = mu.as_slice().to_vec();
    let mut buf = vec![0.0; cur.len()];
    for _ in 0..t {
        kernel.apply_into(&cur, &mut buf);
        std::mem::swap(&mut cur, &mut buf);
    }
    Distribution::new_lenient(cur, 1e-10 * (t.max(1) as f64))
}

/// Bottleneck ratio `Q(S, S^c) / pi(S)` with
/// `Q(S, S^c) = sum_{x in S, y notin S} pi(x) P(x, y)`.
///
/// The boundary flow is accumulated directly over off-diagonal entries;
/// computing it as `1 - P(x, x)` would lose everything below the f64
/// rounding threshold at strong rationality.
pub fn bottleneck_ratio(
    matrix: &StochasticMatrix,
    pi: &Distribution,
    subset: &[usize],
) -> Result<f64> {
    if pi.len() != matrix.dim() {
        return Err(Error::DimensionMismatch(format!(
            "stationary vector of {} states against matrix of {}",
            pi.len(),
            matrix.dim()
        )));
    }
    if subset.is_empty() {
        return Err(Error::EmptySubset("bottleneck of empty set".into()));
    }
    let mut inset = vec![false; matrix.dim()];
    for &s in subset {
        if s >= matrix.dim() {
            return Err(Error::DimensionMismatch(format!(
                "subset state {s} outside 0..{}",
                matrix.dim()
            )));
        }
        inset[s] = true;
    }
    let pi_s: f64 = (0..pi.len())
        .filter(|&i| inset[i])
        .map(|i| pi.as_slice()[i])
        .sum();
    if pi_s <= 0.0 {
        return Err(Error::EmptySubset(format!("subset carries mass {pi_s}")));
    }
    let mut flow = 0.0;
    for x in 0..matrix.dim() {
        if !inset[x] {
            continue;
        }
        let w = pi.as_slice()[x];
        if w == 0.0 {
            continue;
        }
        let row = matrix.row(x);
        for (y, &p) in row.iter().enumerate() {
            if !inset[y] && p != 0.0 {
                flow += w * p;
            }
        }
    }
    Ok(flow / pi_s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::tv_distance;

    fn toy(eps: f64) -> StochasticMatrix {
        StochasticMatrix::new(
            3,
            vec![
                eps,
                (1.0 - eps) / 2.0,
                (1.0 - eps) / 2.0,
                eps,
                1.0 - eps,
                0.0,
                eps,
                0.0,
                1.0 - eps,
            ],
        )
        .unwrap()
    }

    #[test]
    fn validation_rejects_bad_rows() {
        assert!(StochasticMatrix::new(2, vec![0.5, 0.4, 0.0, 1.0]).is_err());
        assert!(StochasticMatrix::new(2, vec![-0.1, 1.1, 0.0, 1.0]).is_err());
        assert!(StochasticMatrix::new(2, vec![0.5, 0.5, 0.0]).is_err());
    }

    #[test]
    fn evolve_identity_and_stationarity() {
        let p = toy(0.01);
        let mu = Distribution::point(3, 0).unwrap();
        let same = evolve(&mu, &p, 0).unwrap();
        assert_eq!(same.as_slice(), mu.as_slice());

        let pi = Distribution::new(vec![0.01, 0.495, 0.495]).unwrap();
        let out = evolve(&pi, &p, 7).unwrap();
        assert!(tv_distance(&out, &pi).unwrap() <= 1e-12);

        // From state 0 one step lands exactly on the stationary vector.
        let one = evolve(&mu, &p, 1).unwrap();
        assert!(tv_distance(&one, &pi).unwrap() <= 1e-15);
    }

    #[test]
    fn contraction_under_evolution() {
        let p = toy(0.07);
        let mut rng = crate::rng::CounterRng::new(3, 1);
        for _ in 0..50 {
            let mut a: Vec<f64> = (0..3).map(|_| rng.next_f64()).collect();
            let mut b: Vec<f64> = (0..3).map(|_| rng.next_f64()).collect();
            let sa: f64 = a.iter().sum();
            let sb: f64 = b.iter().sum();
            a.iter_mut().for_each(|v| *v /= sa);
            b.iter_mut().for_each(|v| *v /= sb);
            let da = Distribution::new_lenient(a, 1e-9).unwrap();
            let db = Distribution::new_lenient(b, 1e-9).unwrap();
            let before = tv_distance(&da, &db).unwrap();
            let after =
                tv_distance(&evolve(&da, &p, 1).unwrap(), &evolve(&db, &p, 1).unwrap()).unwrap();
            assert!(after <= before + 1e-15, "after {after} before {before}");
        }
    }

    #[test]
    fn bottleneck_edge_cases() {
        let p = toy(0.25);
        let pi = Distribution::new(vec![0.25, 0.375, 0.375]).unwrap();
        // Whole space: no outgoing mass.
        assert_eq!(bottleneck_ratio(&p, &pi, &[0, 1, 2]).unwrap(), 0.0);
        // Singleton {1}: flow = pi(1) * eps over pi(1).
        let b = bottleneck_ratio(&p, &pi, &[1]).unwrap();
        assert!((b - 0.25).abs() < 1e-15);
        assert!(bottleneck_ratio(&p, &pi, &[]).is_err());
    }

    #[test]
    fn lazy_halves_off_diagonal() {
        let p = toy(0.2);
        let l = p.lazy();
        for i in 0..3 {
            for j in 0..3 {
                if i == j {
                    assert!((l.get(i, j) - (0.5 + 0.5 * p.get(i, j))).abs() < 1e-15);
                } else {
                    assert!((l.get(i, j) - 0.5 * p.get(i, j)).abs() < 1e-15);
                }
            }
        }
    }
}
