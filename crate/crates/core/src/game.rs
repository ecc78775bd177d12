//! Potential games driven by one-player logit updates: the all-or-nothing
//! OR game, the mean-field spin (Curie-Weiss) game, and two-strategy
//! coordination games on a ring.
//!
//! Strategies are stored as bits `{0,1}` for every family so that all
//! families share one state enumeration. Spin games interpret bit `b` as
//! the spin `2b - 1`, i.e. bit 1 is spin `+1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A strategy is a bit. For spin games bit `b` encodes spin `2b - 1`.
pub type Strategy = u8;

#[inline]
pub fn bit_to_spin(b: Strategy) -> i64 {
    2 * (b as i64) - 1
}

#[inline]
pub fn spin_to_bit(s: i64) -> Result<Strategy> {
    match s {
        -1 => Ok(0),
        1 => Ok(1),
        _ => Err(Error::InvalidProfile(format!("spin {s} not in {{-1,+1}}"))),
    }
}

/// One joint strategy assignment; the chain's state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StrategyProfile {
    bits: Vec<Strategy>,
}

impl StrategyProfile {
    pub fn from_bits(bits: &[Strategy]) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::InvalidProfile("empty profile".into()));
        }
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidProfile(format!(
                "strategy {b} not in {{0,1}}"
            )));
        }
        Ok(StrategyProfile {
            bits: bits.to_vec(),
        })
    }

    pub fn from_spins(spins: &[i64]) -> Result<Self> {
        let bits = spins
            .iter()
            .map(|&s| spin_to_bit(s))
            .collect::<Result<Vec<_>>>()?;
        Self::from_bits(&bits)
    }

    pub fn all_zeros(n: usize) -> Self {
        StrategyProfile { bits: vec![0; n] }
    }

    pub fn all_ones(n: usize) -> Self {
        StrategyProfile { bits: vec![1; n] }
    }

    pub fn bits(&self) -> &[Strategy] {
        &self.bits
    }

    pub fn spins(&self) -> Vec<i64> {
        self.bits.iter().map(|&b| bit_to_spin(b)).collect()
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    pub fn zeros(&self) -> usize {
        self.len() - self.ones()
    }

    /// Sum of spins under the `2b - 1` encoding.
    pub fn magnetization(&self) -> i64 {
        self.ones() as i64 - self.zeros() as i64
    }

    pub fn with_strategy(&self, player: usize, s: Strategy) -> Self {
        let mut bits = self.bits.clone();
        bits[player] = s;
        StrategyProfile { bits }
    }
}

/// Payoff matrix of the basic two-player coordination game.
///
/// Row player's payoffs: both play 0 -> `a`; row 0 vs column 1 -> `c`;
/// row 1 vs column 0 -> `d`; both play 1 -> `b`. Requires `a > d`, `b > c`,
/// and `a - d >= b - c` (strategy 0 carries the weakly larger gain).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingPayoffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl RingPayoffs {
    /// Coordination gain of strategy 0: `a - d`.
    pub fn gain_zero(&self) -> f64 {
        self.a - self.d
    }

    /// Coordination gain of strategy 1: `b - c`.
    pub fn gain_one(&self) -> f64 {
        self.b - self.c
    }

    fn payoff(&self, own: Strategy, other: Strategy) -> f64 {
        match (own, other) {
            (0, 0) => self.a,
            (0, 1) => self.c,
            (1, 0) => self.d,
            _ => self.b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "family")]
pub enum GameFamily {
    /// Every player pays the OR of all strategies: utility 0 at the
    /// all-zeros profile and -1 everywhere else.
    Or,
    /// Mean-field spin game: `u_i = s_i * sum_{j != i} s_j`.
    Ising,
    /// Each player plays the basic coordination game with both ring
    /// neighbors `(i - 1) mod n` and `(i + 1) mod n`.
    Ring(RingPayoffs),
}

/// A potential game instance together with the rationality level `beta`.
#[derive(Debug, Clone, PartialEq)]
pub struct GameSpec {
    n: usize,
    beta: f64,
    family: GameFamily,
}

impl GameSpec {
    pub fn new(family: GameFamily, n: usize, beta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGame("player count must be >= 1".into()));
        }
        if !(beta >= 0.0) {
            return Err(Error::InvalidGame(format!("beta {beta} must be >= 0")));
        }
        if let GameFamily::Ring(p) = &family {
            if !(p.a > p.d) || !(p.b > p.c) {
                return Err(Error::InvalidGame(format!(
                    "ring payoffs need a > d and b > c, got a={} b={} c={} d={}",
                    p.a, p.b, p.c, p.d
                )));
            }
            if p.gain_zero() < p.gain_one() {
                return Err(Error::InvalidGame(format!(
                    "ring payoffs need a - d >= b - c, got {} < {}",
                    p.gain_zero(),
                    p.gain_one()
                )));
            }
        }
        Ok(GameSpec { n, beta, family })
    }

    pub fn or(n: usize, beta: f64) -> Result<Self> {
        Self::new(GameFamily::Or, n, beta)
    }

    pub fn ising(n: usize, beta: f64) -> Result<Self> {
        Self::new(GameFamily::Ising, n, beta)
    }

    pub fn ring(n: usize, beta: f64, a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::new(GameFamily::Ring(RingPayoffs { a, b, c, d }), n, beta)
    }

    /// Parse `{"family": "or"|"ising"|"ring", "n": .., "beta": .., "a": ..}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: GameSpecJson = serde_json::from_str(text)?;
        raw.build()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GameSpecJson::from(self)).expect("game spec serializes")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Same game at a different rationality level.
    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Self::new(self.family, self.n, beta)
    }

    pub fn family(&self) -> &GameFamily {
        &self.family
    }

    pub fn ring_payoffs(&self) -> Option<&RingPayoffs> {
        match &self.family {
            GameFamily::Ring(p) => Some(p),
            _ => None,
        }
    }

    pub fn validate_profile(&self, profile: &StrategyProfile) -> Result<()> {
        if profile.len() != self.n {
            return Err(Error::InvalidProfile(format!(
                "profile has {} players, game has {}",
                profile.len(),
                self.n
            )));
        }
        Ok(())
    }

    fn check_player(&self, player: usize) -> Result<()> {
        if player >= self.n {
            return Err(Error::PlayerIndex { player, n: self.n });
        }
        Ok(())
    }

    /// Payoff of `player` at `profile`.
    pub fn utility(&self, profile: &StrategyProfile, player: usize) -> Result<f64> {
        self.validate_profile(profile)?;
        self.check_player(player)?;
        Ok(self.utility_with(profile, player, profile.bits()[player]))
    }

    /// Payoff of `player` if they played `s` while everyone else keeps
    /// `profile`. `s` must already be validated.
    pub(crate) fn utility_with(
        &self,
        profile: &StrategyProfile,
        player: usize,
        s: Strategy,
    ) -> f64 {
        let bits = profile.bits();
        match &self.family {
            GameFamily::Or => {
                let others_one = bits.iter().enumerate().any(|(j, &b)| j != player && b == 1);
                if others_one || s == 1 {
                    -1.0
                } else {
                    0.0
                }
            }
            GameFamily::Ising => {
                let rest: i64 = bits
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != player)
                    .map(|(_, &b)| bit_to_spin(b))
                    .sum();
                (bit_to_spin(s) * rest) as f64
            }
            GameFamily::Ring(p) => {
                let n = self.n;
                let left = bits[(player + n - 1) % n];
                let right = bits[(player + 1) % n];
                p.payoff(s, left) + p.payoff(s, right)
            }
        }
    }

    /// Exact potential of `profile`.
    ///
    /// OR: 0 at all-zeros and -1 elsewhere (all utilities coincide, so this
    /// is the unique exact potential up to a constant). Spin game:
    /// `(S^2 - n) / 2` where `S` is the magnetization. Ring: sum over edges
    /// `(i, i+1 mod n)` of `a - d` when both endpoints play 0, `b - c` when
    /// both play 1, and 0 otherwise. For the ring the exact-potential
    /// identity `du = dPhi` requires `n >= 2`; the `n = 1` self-loop game is
    /// constructible but is not a potential game under this edge potential.
    pub fn potential(&self, profile: &StrategyProfile) -> Result<f64> {
        self.validate_profile(profile)?;
        Ok(self.potential_unchecked(profile.bits()))
    }

    pub(crate) fn potential_unchecked(&self, bits: &[Strategy]) -> f64 {
        match &self.family {
            GameFamily::Or => {
                if bits.iter().all(|&b| b == 0) {
                    0.0
                } else {
                    -1.0
                }
            }
            GameFamily::Ising => {
                let s: i64 = bits.iter().map(|&b| bit_to_spin(b)).sum();
                ((s * s - self.n as i64) as f64) / 2.0
            }
            GameFamily::Ring(p) => {
                let n = self.n;
                let mut phi = 0.0;
                for i in 0..n {
                    let x = bits[i];
                    let y = bits[(i + 1) % n];
                    if x == 0 && y == 0 {
                        phi += p.gain_zero();
                    } else if x == 1 && y == 1 {
                        phi += p.gain_one();
                    }
                }
                phi
            }
        }
    }

    /// `(du, dPhi)` for `player` unilaterally switching to `new_strategy`.
    pub fn deviation_deltas(
        &self,
        profile: &StrategyProfile,
        player: usize,
        new_strategy: Strategy,
    ) -> Result<(f64, f64)> {
        self.validate_profile(profile)?;
        self.check_player(player)?;
        if new_strategy > 1 {
            return Err(Error::InvalidProfile(format!(
                "strategy {new_strategy} not in {{0,1}}"
            )));
        }
        let u_old = self.utility_with(profile, player, profile.bits()[player]);
        let u_new = self.utility_with(profile, player, new_strategy);
        let deviated = profile.with_strategy(player, new_strategy);
        let phi_old = self.potential_unchecked(profile.bits());
        let phi_new = self.potential_unchecked(deviated.bits());
        Ok((u_new - u_old, phi_new - phi_old))
    }

    /// Counting statistics of `profile` for this family.
    pub fn profile_stats(&self, profile: &StrategyProfile) -> Result<ProfileStats> {
        self.validate_profile(profile)?;
        let zeros = profile.zeros();
        let ones = profile.ones();
        let mut stats = ProfileStats {
            zeros,
            ones,
            magnetization: None,
            level: None,
            size_one_zero_blocks: None,
            size_one_one_blocks: None,
        };
        match &self.family {
            GameFamily::Ising => {
                stats.magnetization = Some(profile.magnetization());
            }
            GameFamily::Ring(_) => {
                let (level, s0, s1) = ring_block_stats(profile.bits());
                stats.level = Some(level);
                stats.size_one_zero_blocks = Some(s0);
                stats.size_one_one_blocks = Some(s1);
            }
            GameFamily::Or => {}
        }
        Ok(stats)
    }
}

/// Per-profile counts; fields are `None` for families they do not apply to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ProfileStats {
    pub zeros: usize,
    pub ones: usize,
    /// Spin sum (spin games only).
    pub magnetization: Option<i64>,
    /// Number of maximal zero-runs around the ring, equivalently of
    /// one-runs; 0 for monochromatic profiles (ring only).
    pub level: Option<usize>,
    /// Zero-runs of length exactly 1 (ring only).
    pub size_one_zero_blocks: Option<usize>,
    /// One-runs of length exactly 1 (ring only).
    pub size_one_one_blocks: Option<usize>,
}

/// `(level, s0, s1)` of a cyclic bit pattern: the number of maximal
/// zero-runs, and how many zero-runs / one-runs have length exactly 1.
pub fn ring_block_stats(bits: &[Strategy]) -> (usize, usize, usize) {
    let n = bits.len();
    if bits.iter().all(|&b| b == bits[0]) {
        return (0, 0, 0);
    }
    let mut level = 0;
    let mut s0 = 0;
    let mut s1 = 0;
    for i in 0..n {
        let prev = bits[(i + n - 1) % n];
        let next = bits[(i + 1) % n];
        let cur = bits[i];
        if cur == 0 && prev == 1 {
            level += 1;
        }
        if prev != cur && next != cur {
            if cur == 0 {
                s0 += 1;
            } else {
                s1 += 1;
            }
        }
    }
    (level, s0, s1)
}

/// Flat JSON form shared by the CLI and `GameSpec::from_json`.
#[derive(Debug, Serialize, Deserialize)]
struct GameSpecJson {
    family: String,
    n: usize,
    beta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    d: Option<f64>,
}

impl GameSpecJson {
    fn build(self) -> Result<GameSpec> {
        match self.family.as_str() {
            "or" => GameSpec::or(self.n, self.beta),
            "ising" => GameSpec::ising(self.n, self.beta),
            "ring" => {
                let need = |v: Option<f64>, name: &str| {
                    v.ok_or_else(|| {
                        Error::InvalidGame(format!("ring game requires field `{name}`"))
                    })
                };
                GameSpec::ring(
                    self.n,
                    self.beta,
                    need(self.a, "a")?,
                    need(self.b, "b")?,
                    need(self.c, "c")?,
                    need(self.d, "d")?,
                )
            }
            other => Err(Error::InvalidGame(format!("unknown family `{other}`"))),
        }
    }
}

impl From<&GameSpec> for GameSpecJson {
    fn from(g: &GameSpec) -> Self {
        let (family, p) = match g.family() {
            GameFamily::Or => ("or", None),
            GameFamily::Ising => ("ising", None),
            GameFamily::Ring(p) => ("ring", Some(p)),
        };
        GameSpecJson {
            family: family.to_string(),
            n: g.n(),
            beta: g.beta(),
            a: p.map(|p| p.a),
            b: p.map(|p| p.b),
            c: p.map(|p| p.c),
            d: p.map(|p| p.d),
        }
    }
}
