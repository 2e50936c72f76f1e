//! Random walks in random environments on the integer lattice.
//!
//! The crate is organized around four layers:
//!
//! * [`env`] — per-site jump distributions, environment families (periodic,
//!   seeded i.i.d., two-letter column environments), the translation action,
//!   and executable validators (no deterministic sites, tail decay, double
//!   stochasticity, zero local drift).
//! * [`pvp`] — the walk driven through a piecewise-linear interval map: each
//!   site's jump law becomes a partition of `[0,1)`, one iteration consumes
//!   one branch and emits one lattice jump. Includes an exact-rational mode
//!   and the arithmetic-coding style trajectory encoder/decoder.
//! * [`evp`] — exact linear-algebra oracles for periodic environments: the
//!   re-centered chain on the torus, stationary measures, exact velocity,
//!   diffusion matrix, entropy rate, and reachability / absorbing-class
//!   analysis.
//! * [`mc`] — reproducible Monte Carlo ensembles and statistical tests that
//!   compare simulation against the exact oracles.
//!
//! All randomness is derived from a single master seed via counter-based
//! streams, so every estimator is a pure function of its inputs regardless
//! of thread count.

pub mod env;
pub mod error;
pub mod evp;
pub mod lattice;
pub mod mc;
pub mod pvp;
pub mod rng;

pub use env::{DriftVector, Environment, EnvironmentSpec, JumpDistribution};
pub use error::Error;
pub use pvp::{Mode, Observable, Partition, PvpState, Trajectory};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
