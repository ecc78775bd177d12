//! Exit analysis of birth-and-death chains: the constant-rate closed form,
//! the exact tridiagonal oracle, the geometric certified bound, expected
//! exit times, and O(n)-per-step hitting CDFs.

use crate::error::{Error, Result};
use crate::linalg::solve_tridiagonal;
use crate::projection::BirthDeathChain;

/// Closed-form or forced exit answer; `degenerate` marks the zero-rate
/// cases where the formula does not apply and the answer is structural.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuinValue {
    /// Probability of hitting `n` before `0` from the start state.
    pub probability: f64,
    pub degenerate: bool,
}

/// Ratio within which `delta/eps` is treated as exactly 1 and the
/// symmetric limit `h/n` is returned.
pub const RATIO_UNIT_EPS: f64 = 1e-12;

/// Probability that a birth-and-death chain with constant interior rates
/// `p_k = eps` (up) and `q_k = delta` (down) hits `n` before `0` from `h`:
/// `(1 - (delta/eps)^h) / (1 - (delta/eps)^n)`, with the `delta = eps`
/// limit `h/n` taken analytically.
pub fn ruin_probability_constant_rates(
    n: usize,
    h: usize,
    eps: f64,
    delta: f64,
) -> Result<RuinValue> {
    if n == 0 || h > n {
        return Err(Error::InvalidChain(format!("start {h} outside 0..={n}")));
    }
    if !(eps >= 0.0) || !(delta >= 0.0) || eps + delta > 1.0 + 1e-12 {
        return Err(Error::InvalidChain(format!(
            "rates eps = {eps}, delta = {delta} outside the simplex"
        )));
    }
    if h == 0 {
        return Ok(RuinValue {
            probability: 0.0,
            degenerate: false,
        });
    }
    if h == n {
        return Ok(RuinValue {
            probability: 1.0,
            degenerate: false,
        });
    }
    // Interior start with a frozen direction: the exit side is forced.
    if eps == 0.0 && delta == 0.0 {
        return Err(Error::InvalidChain(
            "eps = delta = 0 never exits the interior".into(),
        ));
    }
    if eps == 0.0 {
        return Ok(RuinValue {
            probability: 0.0,
            degenerate: true,
        });
    }
    if delta == 0.0 {
        return Ok(RuinValue {
            probability: 1.0,
            degenerate: true,
        });
    }
    let ratio = delta / eps;
    if (ratio - 1.0).abs() < RATIO_UNIT_EPS {
        return Ok(RuinValue {
            probability: h as f64 / n as f64,
            degenerate: false,
        });
    }
    // Evaluate in the numerically safe direction: for ratio > 1 divide
    // numerator and denominator by ratio^n to avoid overflow.
    let log_r = delta.ln() - eps.ln();
    let probability = if ratio < 1.0 {
        let num = -((h as f64 * log_r).exp_m1());
        let den = -((n as f64 * log_r).exp_m1());
        num / den
    } else {
        let num = ((h as f64 - n as f64) * log_r).exp() - (-(n as f64) * log_r).exp();
        let den = 1.0 - (-(n as f64) * log_r).exp();
        num / den
    };
    Ok(RuinValue {
        probability: probability.clamp(0.0, 1.0),
        degenerate: false,
    })
}

/// Exact probability of hitting `hi` before `lo` from `h`, by a
/// tridiagonal solve over the interior `(lo, hi)`. Holding mass cancels
/// out of the balance equations, so lazy variants give identical answers.
pub fn ruin_probability_interval(
    chain: &BirthDeathChain,
    lo: usize,
    hi: usize,
    h: usize,
) -> Result<f64> {
    if lo >= hi || hi > chain.n() {
        return Err(Error::InvalidChain(format!(
            "interval ({lo}, {hi}) invalid for top state {}",
            chain.n()
        )));
    }
    if h <= lo {
        return Ok(0.0);
    }
    if h >= hi {
        return Ok(1.0);
    }
    let m = hi - lo - 1;
    let mut sub = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut sup = vec![0.0; m];
    let mut rhs = vec![0.0; m];
    for (i, k) in (lo + 1..hi).enumerate() {
        let p = chain.up(k);
        let q = chain.down(k);
        diag[i] = p + q;
        if i > 0 {
            sub[i] = -q;
        }
        if i + 1 < m {
            sup[i] = -p;
        }
        if k + 1 == hi {
            rhs[i] = p;
        }
    }
    let alpha = solve_tridiagonal(&sub, &diag, &sup, &rhs)?;
    Ok(alpha[h - lo - 1].clamp(0.0, 1.0))
}

/// Probability of hitting the top state before state 0.
pub fn ruin_probability(chain: &BirthDeathChain, h: usize) -> Result<f64> {
    ruin_probability_interval(chain, 0, chain.n(), h)
}

/// Certified geometric bound: if `q_k / p_k <= alpha < 1` on the interior,
/// the probability of hitting 0 before `n` from `h` is at most `alpha^h`.
/// Verifies the precondition and reports the worst offending state.
pub fn ruin_bound_geometric(chain: &BirthDeathChain, h: usize, alpha: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidChain(format!("alpha {alpha} outside [0, 1)")));
    }
    if h > chain.n() {
        return Err(Error::InvalidChain(format!(
            "start {h} outside 0..={}",
            chain.n()
        )));
    }
    let mut worst: Option<(usize, f64)> = None;
    for k in 1..chain.n() {
        let p = chain.up(k);
        let q = chain.down(k);
        let ratio = if q == 0.0 {
            0.0
        } else if p == 0.0 {
            f64::INFINITY
        } else {
            q / p
        };
        if ratio > alpha {
            match worst {
                Some((_, r)) if r >= ratio => {}
                _ => worst = Some((k, ratio)),
            }
        }
    }
    if let Some((k, ratio)) = worst {
        return Err(Error::RateRatioExceeded { k, ratio, alpha });
    }
    Ok(alpha.powi(h as i32))
}

/// Expected time to exit the open interval `(lo, hi)` from `h`.
pub fn exit_time_expectation_interval(
    chain: &BirthDeathChain,
    lo: usize,
    hi: usize,
    h: usize,
) -> Result<f64> {
    if lo >= hi || hi > chain.n() {
        return Err(Error::InvalidChain(format!(
            "interval ({lo}, {hi}) invalid for top state {}",
            chain.n()
        )));
    }
    if h <= lo || h >= hi {
        return Ok(0.0);
    }
    let m = hi - lo - 1;
    let mut sub = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut sup = vec![0.0; m];
    let rhs = vec![1.0; m];
    for (i, k) in (lo + 1..hi).enumerate() {
        let p = chain.up(k);
        let q = chain.down(k);
        diag[i] = p + q;
        if i > 0 {
            sub[i] = -q;
        }
        if i + 1 < m {
            sup[i] = -p;
        }
    }
    let sol = solve_tridiagonal(&sub, &diag, &sup, &rhs)?;
    Ok(sol[h - lo - 1])
}

/// Expected time to hit `{0, n}` from `h`.
pub fn exit_time_expectation(chain: &BirthDeathChain, h: usize) -> Result<f64> {
    exit_time_expectation_interval(chain, 0, chain.n(), h)
}

/// `Prob(tau_targets <= t)` for `t = 0..=t_max` on the line, O(n) per step.
pub fn hit_cdf_1d(
    chain: &BirthDeathChain,
    targets: &[usize],
    start: usize,
    t_max: u64,
) -> Result<Vec<f64>> {
    let states = chain.states();
    if start >= states {
        return Err(Error::DimensionMismatch(format!(
            "start {start} outside 0..{states}"
        )));
    }
    if targets.is_empty() {
        return Err(Error::EmptySubset("empty target set".into()));
    }
    let mut in_t = vec![false; states];
    for &s in targets {
        if s >= states {
            return Err(Error::DimensionMismatch(format!(
                "target {s} outside 0..{states}"
            )));
        }
        in_t[s] = true;
    }
    let mut cur = vec![0.0; states];
    let mut absorbed = 0.0;
    if in_t[start] {
        absorbed = 1.0;
    } else {
        cur[start] = 1.0;
    }
    let mut cdf = Vec::with_capacity(t_max as usize + 1);
    cdf.push(absorbed);
    let mut next = vec![0.0; states];
    for _ in 0..t_max {
        next.iter_mut().for_each(|v| *v = 0.0);
        for (k, &mass) in cur.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let mut send = |state: usize, p: f64| {
                if p == 0.0 {
                    return;
                }
                if in_t[state] {
                    absorbed += mass * p;
                } else {
                    next[state] += mass * p;
                }
            };
            if k + 1 < states {
                send(k + 1, chain.up(k));
            }
            if k > 0 {
                send(k - 1, chain.down(k));
            }
            send(k, chain.hold(k));
        }
        std::mem::swap(&mut cur, &mut next);
        cdf.push(absorbed.min(1.0));
    }
    Ok(cdf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projection::{ehrenfest, magnetization_chain};
    use crate::rng::CounterRng;

    fn constant_chain(n: usize, eps: f64, delta: f64) -> BirthDeathChain {
        let mut up = vec![0.0; n + 1];
        let mut down = vec![0.0; n + 1];
        for k in 1..n {
            up[k] = eps;
            down[k] = delta;
        }
        up[0] = eps.min(1.0);
        down[n] = delta.min(1.0);
        BirthDeathChain::new(up, down, None).unwrap()
    }

    #[test]
    fn constant_rate_closed_form_examples() {
        let v = ruin_probability_constant_rates(10, 3, 0.2, 0.2).unwrap();
        assert_eq!(v.probability, 0.3);
        assert!(!v.degenerate);

        let v = ruin_probability_constant_rates(4, 2, 0.5, 0.25).unwrap();
        assert!((v.probability - 0.8).abs() < 1e-12);

        assert_eq!(
            ruin_probability_constant_rates(7, 0, 0.4, 0.3)
                .unwrap()
                .probability,
            0.0
        );
        assert_eq!(
            ruin_probability_constant_rates(7, 7, 0.4, 0.3)
                .unwrap()
                .probability,
            1.0
        );
    }

    #[test]
    fn degenerate_rates_are_flagged() {
        let v = ruin_probability_constant_rates(5, 3, 0.0, 0.4).unwrap();
        assert_eq!(v.probability, 0.0);
        assert!(v.degenerate);
        let v = ruin_probability_constant_rates(5, 3, 0.4, 0.0).unwrap();
        assert_eq!(v.probability, 1.0);
        assert!(v.degenerate);
        assert!(ruin_probability_constant_rates(5, 3, 0.0, 0.0).is_err());
        // Boundary starts never consult the rates.
        assert!(
            !ruin_probability_constant_rates(5, 0, 0.0, 0.0333)
                .unwrap()
                .degenerate
        );
    }

    #[test]
    fn closed_form_matches_tridiagonal_oracle() {
        let mut rng = CounterRng::new(17, 0);
        for trial in 0..500 {
            let n = 2 + rng.below(199);
            let h = rng.below(n + 1);
            let eps = 1e-3 + 0.9 * rng.next_f64();
            let delta = (1.0 - eps) * rng.next_f64();
            let closed = ruin_probability_constant_rates(n, h, eps, delta)
                .unwrap()
                .probability;
            let oracle = ruin_probability(&constant_chain(n, eps, delta), h).unwrap();
            assert!(
                (closed - oracle).abs() <= 1e-10,
                "trial {trial} n {n} h {h} eps {eps} delta {delta}: {closed} vs {oracle}"
            );
        }
    }

    #[test]
    fn laziness_does_not_move_the_exit_location() {
        let mut rng = CounterRng::new(23, 0);
        for _ in 0..100 {
            let n = 2 + rng.below(60);
            let h = 1 + rng.below(n - 1);
            let mut up = vec![0.0; n + 1];
            let mut down = vec![0.0; n + 1];
            for k in 1..n {
                up[k] = 0.05 + 0.4 * rng.next_f64();
                down[k] = 0.05 + 0.4 * rng.next_f64();
            }
            up[0] = 0.3;
            down[n] = 0.3;
            let chain = BirthDeathChain::new(up, down, None).unwrap();
            let a = ruin_probability(&chain, h).unwrap();
            let b = ruin_probability(&chain.lazy(), h).unwrap();
            assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn geometric_bound_dominates_exact() {
        let mut rng = CounterRng::new(31, 0);
        for trial in 0..500 {
            let n = 3 + rng.below(60);
            let h = 1 + rng.below(n - 1);
            let alpha = 0.15 + 0.8 * rng.next_f64();
            let mut up = vec![0.0; n + 1];
            let mut down = vec![0.0; n + 1];
            for k in 1..n {
                let p = 0.1 + 0.4 * rng.next_f64();
                up[k] = p;
                down[k] = p * alpha * rng.next_f64();
            }
            up[0] = 0.5;
            down[n] = 0.5;
            let chain = BirthDeathChain::new(up, down, None).unwrap();
            let bound = ruin_bound_geometric(&chain, h, alpha).unwrap();
            let exact_hit_zero = 1.0 - ruin_probability(&chain, h).unwrap();
            assert!(
                exact_hit_zero <= bound + 1e-12,
                "trial {trial}: exact {exact_hit_zero} bound {bound}"
            );
        }
    }

    #[test]
    fn geometric_bound_validates_ratio() {
        let chain = constant_chain(6, 0.3, 0.2);
        assert!((ruin_bound_geometric(&chain, 3, 0.7).unwrap() - 0.7f64.powi(3)).abs() < 1e-15);
        assert_eq!(ruin_bound_geometric(&chain, 0, 0.7).unwrap(), 1.0);
        match ruin_bound_geometric(&chain, 3, 0.5) {
            Err(Error::RateRatioExceeded { ratio, .. }) => {
                assert!((ratio - 2.0 / 3.0).abs() < 1e-12)
            }
            other => panic!("expected precondition failure, got {other:?}"),
        }
    }

    #[test]
    fn exit_time_classics() {
        // Symmetric interior: E[tau] = h (n - h).
        let chain = constant_chain(4, 0.5, 0.5);
        assert!((exit_time_expectation(&chain, 2).unwrap() - 4.0).abs() < 1e-10);
        assert_eq!(exit_time_expectation(&chain, 0).unwrap(), 0.0);
        assert_eq!(exit_time_expectation(&chain, 4).unwrap(), 0.0);
        // Holding time scales the symmetric answer by 1/(p+q).
        let lazy = chain.lazy();
        assert!((exit_time_expectation(&lazy, 2).unwrap() - 8.0).abs() < 1e-10);
    }

    #[test]
    fn ruin_is_monotone_in_start() {
        let chain = constant_chain(30, 0.3, 0.25);
        let mut prev = 0.0;
        for h in 0..=30 {
            let v = ruin_probability(&chain, h).unwrap();
            assert!(v >= prev - 1e-13, "h {h}");
            prev = v;
        }
    }

    #[test]
    fn hit_cdf_matches_dense_route() {
        let chain = magnetization_chain(8, 0.7).unwrap();
        let matrix = chain.to_matrix();
        let targets = [0usize, 8];
        for start in [3usize, 5, 7] {
            let a = hit_cdf_1d(&chain, &targets, start, 200).unwrap();
            let b = crate::absorb::hitting_time_cdf(&matrix, &targets, start, 200).unwrap();
            for t in 0..a.len() {
                assert!((a[t] - b[t]).abs() <= 1e-12, "start {start} t {t}");
            }
        }
    }

    #[test]
    fn hit_cdf_edges() {
        let chain = ehrenfest(6).unwrap();
        let unit = hit_cdf_1d(&chain, &[3], 3, 4).unwrap();
        assert!(unit.iter().all(|&v| v == 1.0));
        let zero = hit_cdf_1d(&chain, &[0], 3, 0).unwrap();
        assert_eq!(zero, vec![0.0]);
        for w in hit_cdf_1d(&chain, &[0], 5, 300).unwrap().windows(2) {
            assert!(w[1] >= w[0] - 1e-15);
        }
    }

    #[test]
    fn lazy_hitting_is_slower_pointwise() {
        let urn = ehrenfest(32).unwrap();
        let lazy = urn.lazy();
        for start in [1usize, 2, 3, 8] {
            let fast = hit_cdf_1d(&urn, &[0], start, 400).unwrap();
            let slow = hit_cdf_1d(&lazy, &[0], start, 400).unwrap();
            for t in 0..fast.len() {
                assert!(
                    slow[t] <= fast[t] + 1e-12,
                    "start {start} t {t}: lazy {} fast {}",
                    slow[t],
                    fast[t]
                );
            }
        }
    }

    #[test]
    fn frozen_interior_is_reported_singular() {
        // An interior state that never moves makes absorption impossible.
        let chain = BirthDeathChain::new(vec![0.3, 0.0, 0.0], vec![0.0, 0.0, 0.3], None).unwrap();
        assert!(matches!(
            exit_time_expectation(&chain, 1),
            Err(Error::SingularSystem(_))
        ));
        assert!(matches!(
            ruin_probability(&chain, 1),
            Err(Error::SingularSystem(_))
        ));
    }

    #[test]
    fn interval_variants_respect_outside_starts() {
        let chain = magnetization_chain(10, 1.0).unwrap();
        let hi = chain.states() - 1;
        let mid = chain.index_of_label(0.0).unwrap();
        // Start above the interval: forced exit on the high side.
        assert_eq!(
            ruin_probability_interval(&chain, 0, mid, mid + 2).unwrap(),
            1.0
        );
        assert_eq!(
            exit_time_expectation_interval(&chain, mid, hi, mid).unwrap(),
            0.0
        );
    }
}
