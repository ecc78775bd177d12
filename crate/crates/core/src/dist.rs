//! Probability vectors over an enumerated state space.

use crate::error::{Error, Result};

/// Tolerance on the simplex invariants at construction time.
pub const SIMPLEX_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    p: Vec<f64>,
}

impl Distribution {
    /// Validate entries >= 0 and total mass 1 within [`SIMPLEX_EPS`].
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidDistribution("empty vector".into()));
        }
        if let Some(&bad) = p.iter().find(|&&v| !(v >= 0.0)) {
            return Err(Error::InvalidDistribution(format!("negative entry {bad}")));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_EPS {
            return Err(Error::InvalidDistribution(format!(
                "mass {sum} deviates from 1 by {:e}",
                (sum - 1.0).abs()
            )));
        }
        Ok(Distribution { p })
    }

    /// Accept a vector whose mass may have drifted (e.g. after long
    /// evolution); rejects only negative entries and gross mass errors.
    pub fn new_lenient(p: Vec<f64>, mass_tol: f64) -> Result<Self> {
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > mass_tol {
            return Err(Error::InvalidDistribution(format!(
                "mass {sum} deviates from 1 by more than {mass_tol:e}"
            )));
        }
        if let Some(&bad) = p.iter().find(|&&v| !(v >= 0.0)) {
            return Err(Error::InvalidDistribution(format!("negative entry {bad}")));
        }
        Ok(Distribution { p })
    }

    pub fn uniform(count: usize) -> Self {
        Distribution {
            p: vec![1.0 / count as f64; count],
        }
    }

    /// Degenerate distribution at `state`.
    pub fn point(count: usize, state: usize) -> Result<Self> {
        if state >= count {
            return Err(Error::DimensionMismatch(format!(
                "point mass at {state} outside 0..{count}"
            )));
        }
        let mut p = vec![0.0; count];
        p[state] = 1.0;
        Ok(Distribution { p })
    }

    /// Convex combination `w * a + (1 - w) * b`.
    pub fn mix(a: &Distribution, b: &Distribution, w: f64) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch(format!(
                "mix of {} and {}",
                a.len(),
                b.len()
            )));
        }
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::InvalidDistribution(format!(
                "weight {w} outside [0,1]"
            )));
        }
        let p = a
            .as_slice()
            .iter()
            .zip(b.as_slice())
            .map(|(&x, &y)| w * x + (1.0 - w) * y)
            .collect();
        Ok(Distribution { p })
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.p
    }

    pub fn mass(&self) -> f64 {
        self.p.iter().sum()
    }

    /// Mass on a set of states.
    pub fn mass_on(&self, states: &[usize]) -> f64 {
        states.iter().map(|&s| self.p[s]).sum()
    }

    /// Support = states with strictly positive mass.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.p[i] > 0.0).collect()
    }
}

/// Total variation distance: half the L1 distance.
pub fn tv_distance(mu: &Distribution, nu: &Distribution) -> Result<f64> {
    if mu.len() != nu.len() {
        return Err(Error::DimensionMismatch(format!(
            "tv of {} and {}",
            mu.len(),
            nu.len()
        )));
    }
    Ok(tv_slices(mu.as_slice(), nu.as_slice()))
}

pub(crate) fn tv_slices(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(&x, &y)| (x - y).abs()).sum::<f64>()
}

/// Conditional distribution on `subset`: `pi(x) / pi(S)` inside, 0 outside.
pub fn restricted_distribution(pi: &Distribution, subset: &[usize]) -> Result<Distribution> {
    if subset.is_empty() {
        return Err(Error::EmptySubset("restriction to empty set".into()));
    }
    let mut mask = vec![false; pi.len()];
    for &s in subset {
        if s >= pi.len() {
            return Err(Error::DimensionMismatch(format!(
                "subset state {s} outside 0..{}",
                pi.len()
            )));
        }
        mask[s] = true;
    }
    let total: f64 = (0..pi.len())
        .filter(|&i| mask[i])
        .map(|i| pi.as_slice()[i])
        .sum();
    if total <= 0.0 {
        return Err(Error::EmptySubset(format!("subset carries mass {total}")));
    }
    let p = (0..pi.len())
        .map(|i| {
            if mask[i] {
                pi.as_slice()[i] / total
            } else {
                0.0
            }
        })
        .collect();
    Distribution::new_lenient(p, 1e-9)
}
