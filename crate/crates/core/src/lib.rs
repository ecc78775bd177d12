//! Logit dynamics for finite potential games.
//!
//! One player at a time is selected uniformly and resamples their strategy
//! with probability proportional to `exp(beta * utility)`. For potential
//! games this chain is reversible with the Gibbs measure `exp(beta * Phi)/Z`
//! as its stationary law, but it can take exponentially long to get there;
//! this crate is built around what happens *before* stationarity:
//!
//! - [`game`]: the OR game, the mean-field spin game, and ring
//!   coordination games, with their exact potentials and profile counts.
//! - [`logit`]: the transition kernel, dense or matrix-free, and the Gibbs
//!   distribution.
//! - [`matrix`] / [`dist`] / [`absorb`]: dense-regime machinery —
//!   evolution, total variation, bottleneck ratios, absorbing-chain solves.
//! - [`meta`]: metastability certificates (drift curves, amplification)
//!   and pseudo-mixing measurements.
//! - [`projection`] / [`bd`]: exact one-dimensional lumpings (weight and
//!   magnetization chains, the Ehrenfest urn) and birth-and-death exit
//!   analysis with closed forms against tridiagonal oracles.
//! - [`sim`]: reproducible Monte Carlo — counter-based RNG streams,
//!   hitting-time sampling, monotone and uniform-walk couplings.
//! - [`csvio`]: flat-file formats shared with the CLI.
//!
//! ```
//! use logitdyn::{certify_exact, gibbs_distribution, GameSpec, LogitKernel};
//!
//! // Mean-field spin game, 6 players, strong rationality.
//! let game = GameSpec::ising(6, 2.0)?;
//! let kernel = LogitKernel::new(&game)?;
//!
//! // The Gibbs law is a fixed point: its drift curve is flat.
//! let pi = gibbs_distribution(&game)?;
//! let cert = certify_exact("gibbs", &pi, &kernel, 1e-10, 50)?;
//! assert!(cert.valid && cert.drift_max <= 1e-10);
//!
//! // The all-plus consensus is not stationary, but it moves so little
//! // that it stays within 1e-3 of itself for thousands of steps.
//! let plus = logitdyn::Distribution::point(kernel.space().count(), 63)?;
//! let sticky = certify_exact("all-plus", &plus, &kernel, 1e-3, 2_000)?;
//! assert!(sticky.valid);
//! # Ok::<(), logitdyn::Error>(())
//! ```

// Validation guards use `!(v >= 0.0)` so NaN is rejected along with
// negative values; the suggested `v < 0.0` would wave NaN through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod absorb;
pub mod bd;
pub mod csvio;
pub mod dist;
pub mod error;
pub mod game;
pub mod linalg;
pub mod logit;
pub mod matrix;
pub mod meta;
pub mod projection;
pub mod rng;
pub mod sim;
pub mod space;
pub mod toy;

pub use dist::{restricted_distribution, tv_distance, Distribution};
pub use error::{Error, Result};
pub use game::{GameFamily, GameSpec, ProfileStats, RingPayoffs, StrategyProfile};
pub use logit::{build_transition_matrix, gibbs_distribution, update_distribution, LogitKernel};
pub use matrix::{bottleneck_ratio, evolve, StochasticMatrix, TransitionKernel};
pub use meta::{
    amplify, certify_exact, extend_window, pseudo_mix_time, tv_bound_via_coupling,
    tv_bound_via_hitting, MetastabilityCertificate, PseudoMixReport,
};
pub use projection::{
    ehrenfest, lumpability_check, magnetization_chain, or_projection, BirthDeathChain,
};
pub use rng::CounterRng;
pub use space::StateSpace;
