//! Trajectory simulation of the logit chain, hitting-time sampling, and
//! coupled evolutions for empirical total-variation bounds.
//!
//! Every update consumes exactly one player draw and one uniform, and
//! strategies are resolved by quantile inversion: play 0 iff the uniform
//! falls below the update law's probability of 0. All couplings here share
//! the player index and the uniform between the two copies, which realizes
//! the min-overlap joint law while keeping each marginal a faithful chain.
//!
//! Determinism: replica `r` started from state `s` draws from
//! `CounterRng::new(seed, CounterRng::replica_stream(s, r))`, so results
//! are bit-identical regardless of thread count; parallel fans collect
//! into replica order before any aggregation.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::{GameFamily, GameSpec, StrategyProfile};
use crate::logit::state_keep_zero_probability;
use crate::rng::CounterRng;

/// Replica fan-out settings for trajectory recording.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub steps: u64,
    pub replicas: usize,
    pub seed: u64,
    /// Snapshot stride; 1 records every step.
    pub record_every: u64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicas == 0 {
            return Err(Error::Incompatible("replicas must be >= 1".into()));
        }
        if self.record_every == 0 {
            return Err(Error::Incompatible("record_every must be >= 1".into()));
        }
        Ok(())
    }
}

/// Largest player count whose profiles pack into one machine word.
pub const MAX_SIM_PLAYERS: usize = usize::BITS as usize - 1;

/// Simulation works on packed profiles and needs no state enumeration, so
/// it scales to any game whose profile fits a machine word.
pub fn ensure_simulable(game: &GameSpec) -> Result<()> {
    if game.n() > MAX_SIM_PLAYERS {
        return Err(Error::Unsupported(format!(
            "simulation packs profiles into one word; {} players exceed {MAX_SIM_PLAYERS}",
            game.n()
        )));
    }
    Ok(())
}

/// A start state must fit the game's profile width.
pub fn ensure_valid_start(game: &GameSpec, start: usize) -> Result<()> {
    ensure_simulable(game)?;
    if game.n() < MAX_SIM_PLAYERS && start >= (1usize << game.n()) {
        return Err(Error::DimensionMismatch(format!(
            "start {start} outside 0..{}",
            1usize << game.n()
        )));
    }
    Ok(())
}

fn pack(profile: &StrategyProfile) -> usize {
    profile
        .bits()
        .iter()
        .enumerate()
        .fold(0usize, |acc, (i, &b)| acc | ((b as usize) << i))
}

fn unpack(x: usize, n: usize) -> StrategyProfile {
    let bits: Vec<u8> = (0..n).map(|i| ((x >> i) & 1) as u8).collect();
    StrategyProfile::from_bits(&bits).expect("bits are binary")
}

/// One logit step on the packed state index.
#[inline]
pub fn step_index(game: &GameSpec, x: usize, rng: &mut CounterRng) -> usize {
    let n = game.n();
    let player = rng.below(n);
    let u = rng.next_f64();
    let keep_zero = state_keep_zero_probability(game, x, player);
    let bit = usize::from(u >= keep_zero);
    (x & !(1usize << player)) | (bit << player)
}

/// One logit step at the profile level: uniform player, strategy resampled
/// from the update law; at most one coordinate changes.
pub fn step(
    game: &GameSpec,
    profile: &StrategyProfile,
    rng: &mut CounterRng,
) -> Result<StrategyProfile> {
    game.validate_profile(profile)?;
    ensure_simulable(game)?;
    Ok(unpack(step_index(game, pack(profile), rng), game.n()))
}

/// Hitting-time draw, censored at the cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HittingSample {
    Hit(u64),
    Censored(u64),
}

impl HittingSample {
    pub fn time(&self) -> u64 {
        match *self {
            HittingSample::Hit(t) | HittingSample::Censored(t) => t,
        }
    }

    pub fn is_censored(&self) -> bool {
        matches!(self, HittingSample::Censored(_))
    }
}

/// First `t <= cap` at which `targets` holds, else `Censored(cap)`.
pub fn hitting_time_sample<F: Fn(usize) -> bool>(
    game: &GameSpec,
    start: usize,
    targets: F,
    cap: u64,
    rng: &mut CounterRng,
) -> HittingSample {
    if targets(start) {
        return HittingSample::Hit(0);
    }
    let mut x = start;
    for t in 1..=cap {
        x = step_index(game, x, rng);
        if targets(x) {
            return HittingSample::Hit(t);
        }
    }
    HittingSample::Censored(cap)
}

/// Independent replicas of a hitting-time experiment, in replica order.
pub fn hitting_time_samples<F: Fn(usize) -> bool + Sync>(
    game: &GameSpec,
    start: usize,
    targets: F,
    cap: u64,
    replicas: usize,
    seed: u64,
) -> Result<Vec<HittingSample>> {
    ensure_valid_start(game, start)?;
    Ok((0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = CounterRng::new(seed, CounterRng::replica_stream(start as u64, r as u64));
            hitting_time_sample(game, start, &targets, cap, &mut rng)
        })
        .collect())
}

/// Two copies advanced under one randomness source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoupledPair {
    pub x: usize,
    pub y: usize,
}

impl CoupledPair {
    /// `x` precedes `y` in the coordinatewise order whose maximum is the
    /// all-zeros profile: every 1 of `y` is a 1 of `x`.
    pub fn ordered(&self) -> bool {
        self.y & !self.x == 0
    }

    pub fn coalesced(&self) -> bool {
        self.x == self.y
    }
}

/// Shared-player shared-uniform step of two ring chains. Marginals are
/// faithful; the joint law matches min-overlap matching on the two
/// play-zero probabilities, which preserves the coordinatewise order.
pub fn monotone_coupled_step(
    game: &GameSpec,
    pair: &mut CoupledPair,
    rng: &mut CounterRng,
) -> Result<()> {
    if !matches!(game.family(), GameFamily::Ring(_)) {
        return Err(Error::Unsupported(
            "monotone coupling is defined for ring games".into(),
        ));
    }
    let n = game.n();
    let player = rng.below(n);
    let u = rng.next_f64();
    let sx = state_keep_zero_probability(game, pair.x, player);
    let sy = state_keep_zero_probability(game, pair.y, player);
    let mask = !(1usize << player);
    pair.x = (pair.x & mask) | (usize::from(u >= sx) << player);
    pair.y = (pair.y & mask) | (usize::from(u >= sy) << player);
    Ok(())
}

/// Coupling of the OR-game chain with a lazy uniform walk on the cube.
/// The walk's one-step law is a fair coin on the selected coordinate, so
/// its marginal stays uniform; the chain component is a faithful OR chain.
/// Tracks the first time every player has been selected, the chain's first
/// visit to all-zeros, and coalescence.
#[derive(Debug, Clone)]
pub struct OrUniformCoupling {
    pub chain: usize,
    pub walk: usize,
    selected: u64,
    t: u64,
    pub all_selected_at: Option<u64>,
    pub chain_hit_zero_at: Option<u64>,
    pub coalesced_at: Option<u64>,
    players: usize,
}

impl OrUniformCoupling {
    pub fn new(game: &GameSpec, chain_start: usize, walk_start: usize) -> Result<Self> {
        if !matches!(game.family(), GameFamily::Or) {
            return Err(Error::Unsupported(
                "the uniform-walk coupling is defined for the OR game".into(),
            ));
        }
        ensure_simulable(game)?;
        let mut c = OrUniformCoupling {
            chain: chain_start,
            walk: walk_start,
            selected: 0,
            t: 0,
            all_selected_at: None,
            chain_hit_zero_at: None,
            coalesced_at: None,
            players: game.n(),
        };
        c.observe();
        Ok(c)
    }

    fn observe(&mut self) {
        if self.chain == 0 && self.chain_hit_zero_at.is_none() {
            self.chain_hit_zero_at = Some(self.t);
        }
        if self.chain == self.walk && self.coalesced_at.is_none() {
            self.coalesced_at = Some(self.t);
        }
    }

    pub fn time(&self) -> u64 {
        self.t
    }

    pub fn step(&mut self, game: &GameSpec, rng: &mut CounterRng) {
        let n = self.players;
        let player = rng.below(n);
        let u = rng.next_f64();
        let sx = state_keep_zero_probability(game, self.chain, player);
        let mask = !(1usize << player);
        self.chain = (self.chain & mask) | (usize::from(u >= sx) << player);
        self.walk = (self.walk & mask) | (usize::from(u >= 0.5) << player);
        self.selected |= 1 << player;
        self.t += 1;
        if self.all_selected_at.is_none() && self.selected == (1 << n) - 1 {
            self.all_selected_at = Some(self.t);
        }
        self.observe();
    }
}

/// Empirical upper bound on `max_{x,y in starts} ||P^t(x,.) - P^t(y,.)||`
/// together with the Hoeffding half-width of the underlying tail estimate.
#[derive(Debug, Clone, Copy)]
pub struct TvBoundEstimate {
    /// The bound itself (`2 * tail` on the monotone path).
    pub bound: f64,
    /// Largest estimated `Prob(tau > t)` across start states.
    pub tail: f64,
    /// Confidence half-width on each tail estimate.
    pub half_width: f64,
    pub replicas: usize,
    pub confidence: f64,
}

/// Monotone-coupling route (ring): the coupling coalesces once either copy
/// reaches the order's maximum (all-zeros), so the coupled tail is bounded
/// by twice the worst single-chain tail of `tau_{all-zeros}`.
pub fn empirical_tv_bound_monotone(
    game: &GameSpec,
    starts: &[usize],
    t: u64,
    replicas: usize,
    seed: u64,
) -> Result<TvBoundEstimate> {
    if !matches!(game.family(), GameFamily::Ring(_)) {
        return Err(Error::Unsupported(
            "monotone tv bound is defined for ring games".into(),
        ));
    }
    if starts.is_empty() || replicas == 0 {
        return Err(Error::EmptySubset("no starts or replicas".into()));
    }
    for &z in starts {
        ensure_valid_start(game, z)?;
    }
    let tails: Vec<f64> = starts
        .par_iter()
        .map(|&z| {
            let mut censored = 0usize;
            for r in 0..replicas {
                let mut rng = CounterRng::new(seed, CounterRng::replica_stream(z as u64, r as u64));
                if hitting_time_sample(game, z, |x| x == 0, t, &mut rng).is_censored() {
                    censored += 1;
                }
            }
            censored as f64 / replicas as f64
        })
        .collect();
    let tail = tails.iter().cloned().fold(0.0f64, f64::max);
    let confidence = 0.95;
    let half_width = ((2.0f64 / (1.0 - confidence)).ln() / (2.0 * replicas as f64)).sqrt();
    Ok(TvBoundEstimate {
        bound: (2.0 * tail).min(1.0),
        tail,
        half_width,
        replicas,
        confidence,
    })
}

/// Crude estimator for families without a monotone coupling: two
/// independent copies from each ordered pair of starts; the disagreement
/// frequency at time `t` estimates an upper bound on their TV distance.
pub fn empirical_tv_bound_independent(
    game: &GameSpec,
    starts: &[usize],
    t: u64,
    replicas: usize,
    seed: u64,
) -> Result<TvBoundEstimate> {
    if starts.len() < 2 || replicas == 0 {
        return Err(Error::EmptySubset("need two starts and replicas".into()));
    }
    for &z in starts {
        ensure_valid_start(game, z)?;
    }
    let mut pairs = Vec::new();
    for (i, &x) in starts.iter().enumerate() {
        for &y in &starts[i + 1..] {
            pairs.push((x, y));
        }
    }
    let tails: Vec<f64> = pairs
        .par_iter()
        .map(|&(x, y)| {
            let mut disagree = 0usize;
            for r in 0..replicas {
                let mut rng_x = CounterRng::new(
                    seed,
                    CounterRng::replica_stream(x as u64 ^ 0x517c_c1b7_2722_0a95, r as u64),
                );
                let mut rng_y = CounterRng::new(
                    seed,
                    CounterRng::replica_stream((y as u64) << 1 | 1, r as u64),
                );
                let mut cx = x;
                let mut cy = y;
                for _ in 0..t {
                    cx = step_index(game, cx, &mut rng_x);
                    cy = step_index(game, cy, &mut rng_y);
                }
                if cx != cy {
                    disagree += 1;
                }
            }
            disagree as f64 / replicas as f64
        })
        .collect();
    let tail = tails.iter().cloned().fold(0.0f64, f64::max);
    let confidence = 0.95;
    let half_width = ((2.0f64 / (1.0 - confidence)).ln() / (2.0 * replicas as f64)).sqrt();
    Ok(TvBoundEstimate {
        bound: tail.min(1.0),
        tail,
        half_width,
        replicas,
        confidence,
    })
}

/// Recorded trajectory of one replica: `(t, state)` snapshots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pub replica: usize,
    pub snapshots: Vec<(u64, usize)>,
}

/// Run independent replicas from `start`, recording every
/// `config.record_every` steps (plus the initial state). Replicas run in
/// parallel and are returned in replica order.
pub fn run_trajectories(
    game: &GameSpec,
    start: usize,
    config: &SimConfig,
) -> Result<Vec<Trajectory>> {
    config.validate()?;
    ensure_valid_start(game, start)?;
    Ok((0..config.replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = CounterRng::new(
                config.seed,
                CounterRng::replica_stream(start as u64, r as u64),
            );
            let mut x = start;
            let mut snapshots = vec![(0u64, x)];
            for t in 1..=config.steps {
                x = step_index(game, x, &mut rng);
                if t % config.record_every == 0 {
                    snapshots.push((t, x));
                }
            }
            Trajectory {
                replica: r,
                snapshots,
            }
        })
        .collect())
}

/// Empirical one-step law from a fixed state: frequency of each landing
/// state over `trials` single steps.
pub fn empirical_one_step_law(
    game: &GameSpec,
    x: usize,
    trials: usize,
    seed: u64,
) -> Vec<(usize, f64)> {
    let mut counts: std::collections::HashMap<usize, usize> = Default::default();
    let mut rng = CounterRng::new(seed, CounterRng::replica_stream(x as u64, 0));
    for _ in 0..trials {
        *counts.entry(step_index(game, x, &mut rng)).or_default() += 1;
    }
    let mut out: Vec<(usize, f64)> = counts
        .into_iter()
        .map(|(s, c)| (s, c as f64 / trials as f64))
        .collect();
    out.sort_unstable_by_key(|&(s, _)| s);
    out
}

/// TV distance between an empirical law and an exact sparse row.
pub fn tv_to_exact_row(empirical: &[(usize, f64)], exact: &[(usize, f64)]) -> f64 {
    let mut all: std::collections::HashMap<usize, (f64, f64)> = Default::default();
    for &(s, p) in empirical {
        all.entry(s).or_default().0 = p;
    }
    for &(s, p) in exact {
        all.entry(s).or_default().1 += p;
    }
    0.5 * all.values().map(|&(a, b)| (a - b).abs()).sum::<f64>()
}
