//! Small worked chains used by the experiment presets: a three-state chain
//! with one fast state and two sticky states, and the logit chain of the
//! basic two-player coordination game.

use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::logit::softmax_pair;
use crate::matrix::StochasticMatrix;

/// Three-state chain: state 0 redistributes immediately, states 1 and 2
/// hold with probability `1 - eps`. Mixing slows as `eps` shrinks while
/// the sticky states stay close to themselves for ~`1/eps` steps.
pub fn three_state_chain(eps: f64) -> Result<StochasticMatrix> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::InvalidMatrix(format!("eps {eps} outside [0, 1]")));
    }
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
}

/// Stationary law of [`three_state_chain`].
pub fn three_state_stationary(eps: f64) -> Result<Distribution> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::InvalidMatrix(format!("eps {eps} outside [0, 1]")));
    }
    Distribution::new_lenient(vec![eps, (1.0 - eps) / 2.0, (1.0 - eps) / 2.0], 1e-12)
}

/// Logit chain of one basic coordination game between two players.
///
/// Unlike the ring game (where each player meets two neighbors), the game
/// is played once, so the escape rates are `eps = 1/(1+e^{(a-d) beta})`
/// out of `(0,0)` and `delta = 1/(1+e^{(b-c) beta})` out of `(1,1)`.
/// States are ordered `(0,0), (0,1), (1,0), (1,1)` with the first player
/// on the high bit.
#[derive(Debug, Clone)]
pub struct TwoPlayerCoordination {
    pub matrix: StochasticMatrix,
    pub stationary: Distribution,
    pub eps: f64,
    pub delta: f64,
}

pub fn two_player_coordination(
    beta: f64,
    a: f64,
    b: f64,
    c: f64,
    d: f64,
) -> Result<TwoPlayerCoordination> {
    if !(a > d) || !(b > c) {
        return Err(Error::InvalidGame(format!(
            "coordination payoffs need a > d and b > c, got a={a} b={b} c={c} d={d}"
        )));
    }
    if !(beta >= 0.0) {
        return Err(Error::InvalidGame(format!("beta {beta} must be >= 0")));
    }
    let pay = |own: u8, other: u8| match (own, other) {
        (0, 0) => a,
        (0, 1) => c,
        (1, 0) => d,
        _ => b,
    };
    let state = |x1: u8, x2: u8| (2 * x1 + x2) as usize;
    let mut data = vec![0.0; 16];
    for x1 in 0..2u8 {
        for x2 in 0..2u8 {
            let from = state(x1, x2);
            let mut diag = 0.0;
            // First player updates against x2.
            let s1 = softmax_pair(beta, pay(0, x2), pay(1, x2));
            data[from * 4 + state(1 - x1, x2)] += 0.5 * s1[(1 - x1) as usize];
            diag += 0.5 * s1[x1 as usize];
            // Second player updates against x1.
            let s2 = softmax_pair(beta, pay(0, x1), pay(1, x1));
            data[from * 4 + state(x1, 1 - x2)] += 0.5 * s2[(1 - x2) as usize];
            diag += 0.5 * s2[x2 as usize];
            data[from * 4 + from] = diag;
        }
    }
    let matrix = StochasticMatrix::new(4, data)?;
    let eps = 1.0 / (1.0 + ((a - d) * beta).exp());
    let delta = 1.0 / (1.0 + ((b - c) * beta).exp());
    let z = eps + delta;
    let stationary = Distribution::new_lenient(
        vec![
            delta * (1.0 - eps) / z,
            eps * delta / z,
            eps * delta / z,
            eps * (1.0 - delta) / z,
        ],
        1e-12,
    )?;
    Ok(TwoPlayerCoordination {
        matrix,
        stationary,
        eps,
        delta,
    })
}
