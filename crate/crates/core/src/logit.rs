//! The one-player-at-a-time logit chain: single-player update law, the
//! full transition matrix in the exact regime, a matrix-free kernel for
//! larger state counts, and the Gibbs stationary distribution.
//!
//! Transition law: pick a player uniformly, then resample their strategy
//! with probability proportional to `exp(beta * utility)`. Off-diagonal
//! entries exist only between profiles differing at exactly one player.

use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::game::{GameFamily, GameSpec, Strategy, StrategyProfile};
use crate::matrix::{StochasticMatrix, TransitionKernel};
use crate::space::StateSpace;

/// Two-point softmax with max-shift; immune to overflow for any `beta`,
/// saturating to exact best response (0, 1/2 or 1) once the exponent
/// underflows.
#[inline]
pub(crate) fn softmax_pair(beta: f64, u0: f64, u1: f64) -> [f64; 2] {
    let m = u0.max(u1);
    let e0 = (beta * (u0 - m)).exp();
    let e1 = (beta * (u1 - m)).exp();
    let z = e0 + e1;
    [e0 / z, e1 / z]
}

/// Update law of `player` at `profile`: probabilities of playing bit 0
/// and bit 1 after being selected.
pub fn update_distribution(
    game: &GameSpec,
    profile: &StrategyProfile,
    player: usize,
) -> Result<[f64; 2]> {
    game.validate_profile(profile)?;
    if player >= game.n() {
        return Err(Error::PlayerIndex {
            player,
            n: game.n(),
        });
    }
    let u0 = game.utility_with(profile, player, 0);
    let u1 = game.utility_with(profile, player, 1);
    Ok(softmax_pair(game.beta(), u0, u1))
}

/// Utilities `(u(bit 0), u(bit 1))` of `player` at the packed profile `x`,
/// holding everyone else fixed. Works for any player count that fits a
/// machine word; no state enumeration involved.
#[inline]
pub fn state_utilities(game: &GameSpec, x: usize, player: usize) -> (f64, f64) {
    let n = game.n();
    match game.family() {
        GameFamily::Or => {
            let others = x & !(1usize << player);
            if others != 0 {
                (-1.0, -1.0)
            } else {
                (0.0, -1.0)
            }
        }
        GameFamily::Ising => {
            let bit = (x >> player) & 1;
            let s = 2 * (x.count_ones() as i64) - n as i64;
            let rest = s - (2 * bit as i64 - 1);
            (-rest as f64, rest as f64)
        }
        GameFamily::Ring(p) => {
            let l = ((x >> ((player + n - 1) % n)) & 1) as Strategy;
            let r = ((x >> ((player + 1) % n)) & 1) as Strategy;
            let pay = |own: Strategy, other: Strategy| match (own, other) {
                (0, 0) => p.a,
                (0, 1) => p.c,
                (1, 0) => p.d,
                _ => p.b,
            };
            (pay(0, l) + pay(0, r), pay(1, l) + pay(1, r))
        }
    }
}

/// Probability that `player` plays bit 0 after selection at the packed
/// profile `x`.
#[inline]
pub fn state_keep_zero_probability(game: &GameSpec, x: usize, player: usize) -> f64 {
    let (u0, u1) = state_utilities(game, x, player);
    softmax_pair(game.beta(), u0, u1)[0]
}

/// Matrix-free transition kernel over the enumerated state space; rows are
/// generated on the fly, so evolution is `O(count * n)` per step and full
/// dense storage is never allocated.
#[derive(Debug, Clone)]
pub struct LogitKernel {
    game: GameSpec,
    space: StateSpace,
}

impl LogitKernel {
    pub fn new(game: &GameSpec) -> Result<Self> {
        let space = StateSpace::for_vector(game.n())?;
        Ok(LogitKernel {
            game: game.clone(),
            space,
        })
    }

    pub fn game(&self) -> &GameSpec {
        &self.game
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    /// Probability that `player` plays bit 0 after selection at state `x`.
    #[inline]
    pub fn keep_zero_probability(&self, x: usize, player: usize) -> f64 {
        state_keep_zero_probability(&self.game, x, player)
    }

    /// Utilities `(u(bit 0), u(bit 1))` of `player` at state `x`, holding
    /// everyone else fixed.
    #[inline]
    pub fn strategy_utilities(&self, x: usize, player: usize) -> (f64, f64) {
        state_utilities(&self.game, x, player)
    }

    /// Potential of state `x`.
    #[inline]
    pub fn potential(&self, x: usize) -> f64 {
        let n = self.game.n();
        match self.game.family() {
            GameFamily::Or => {
                if x == 0 {
                    0.0
                } else {
                    -1.0
                }
            }
            GameFamily::Ising => {
                let s = 2 * (x.count_ones() as i64) - n as i64;
                ((s * s - n as i64) as f64) / 2.0
            }
            GameFamily::Ring(p) => {
                let mut phi = 0.0;
                for i in 0..n {
                    let a = (x >> i) & 1;
                    let b = (x >> ((i + 1) % n)) & 1;
                    if a == 0 && b == 0 {
                        phi += p.gain_zero();
                    } else if a == 1 && b == 1 {
                        phi += p.gain_one();
                    }
                }
                phi
            }
        }
    }

    /// Nonzero entries of row `x`: `(x, diagonal)` first, then one entry
    /// per player flip.
    pub fn row(&self, x: usize) -> Vec<(usize, f64)> {
        let n = self.game.n();
        let inv_n = 1.0 / n as f64;
        let mut out = Vec::with_capacity(n + 1);
        out.push((x, 0.0));
        let mut diag = 0.0;
        for i in 0..n {
            let bit = (x >> i) & 1;
            let (u0, u1) = self.strategy_utilities(x, i);
            let sigma = softmax_pair(self.game.beta(), u0, u1);
            diag += inv_n * sigma[bit];
            out.push((x ^ (1 << i), inv_n * sigma[1 - bit]));
        }
        out[0].1 = diag;
        out
    }
}

/// Precomputed sparse rows of a logit kernel: same law, no per-step
/// exponentials. Costs `O(count * n)` memory, so it suits repeated
/// evolution on mid-sized spaces.
#[derive(Debug, Clone)]
pub struct SparseKernel {
    dim: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseKernel {
    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }
}

impl LogitKernel {
    /// Materialize all rows once for fast repeated application.
    pub fn to_sparse(&self) -> SparseKernel {
        let dim = self.space.count();
        SparseKernel {
            dim,
            rows: (0..dim).map(|x| self.row(x)).collect(),
        }
    }
}

impl TransitionKernel for SparseKernel {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply_into(&self, src: &[f64], dst: &mut [f64]) {
        dst.iter_mut().for_each(|v| *v = 0.0);
        for (x, &m) in src.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            for &(y, p) in &self.rows[x] {
                dst[y] += m * p;
            }
        }
    }
}

impl TransitionKernel for LogitKernel {
    fn dim(&self) -> usize {
        self.space.count()
    }

    fn apply_into(&self, src: &[f64], dst: &mut [f64]) {
        let n = self.game.n();
        let inv_n = 1.0 / n as f64;
        dst.iter_mut().for_each(|v| *v = 0.0);
        for (x, &m) in src.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            let mut diag = 0.0;
            for i in 0..n {
                let bit = (x >> i) & 1;
                let (u0, u1) = self.strategy_utilities(x, i);
                let sigma = softmax_pair(self.game.beta(), u0, u1);
                diag += sigma[bit];
                dst[x ^ (1 << i)] += m * inv_n * sigma[1 - bit];
            }
            dst[x] += m * inv_n * diag;
        }
    }
}

/// Full dense transition matrix; requires the state count to fit the
/// matrix cap.
pub fn build_transition_matrix(game: &GameSpec) -> Result<StochasticMatrix> {
    let space = StateSpace::for_matrix(game.n())?;
    let kernel = LogitKernel {
        game: game.clone(),
        space,
    };
    let dim = space.count();
    let mut data = vec![0.0; dim * dim];
    for x in 0..dim {
        for (y, p) in kernel.row(x) {
            data[x * dim + y] += p;
        }
    }
    StochasticMatrix::new(dim, data)
}

/// Gibbs measure `pi(x) = exp(beta * Phi(x)) / Z`, computed with
/// log-sum-exp normalization.
pub fn gibbs_distribution(game: &GameSpec) -> Result<Distribution> {
    let kernel = LogitKernel::new(game)?;
    let count = kernel.dim();
    let beta = game.beta();
    let mut logw = vec![0.0; count];
    let mut max = f64::NEG_INFINITY;
    for (x, lw) in logw.iter_mut().enumerate() {
        *lw = beta * kernel.potential(x);
        if *lw > max {
            max = *lw;
        }
    }
    let z: f64 = logw.iter().map(|&lw| (lw - max).exp()).sum();
    let log_z = max + z.ln();
    let p: Vec<f64> = logw.iter().map(|&lw| (lw - log_z).exp()).collect();
    Distribution::new_lenient(p, 1e-10)
}
