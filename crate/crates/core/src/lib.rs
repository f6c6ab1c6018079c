//! Laboratory for pseudo-telepathy games.
//!
//! A pseudo-telepathy game has no classical winning strategy, yet quantum
//! players sharing entanglement win it with certainty. This crate provides:
//!
//! - [`game`]: the n-player game framework — promises, winning relations,
//!   deterministic strategies, exact success proportions;
//! - [`quantum`]: exact state-vector simulation of the quantum strategies;
//! - [`catalog`]: the six known game families with their quantum winning
//!   strategies, plus Kochen-Specker set machinery;
//! - [`analysis`]: exact classical bounds ω̃ (enumeration) and ω (rational
//!   linear programming), framework theorems, and classical p-value bounds;
//! - [`imperfect`]: noisy/inefficient detector models and the thresholds
//!   p* and η*;
//! - [`harness`]: a seeded Monte Carlo referee reproducing the experimental
//!   protocol with post-selection.

pub mod analysis;
pub mod catalog;
pub mod error;
pub mod game;
pub mod harness;
pub mod imperfect;
pub mod quantum;

pub use error::{Error, Result};

/// Configure the global worker-thread pool. Call once, before any parallel
/// evaluation; later calls fail harmlessly.
pub fn build_thread_pool(threads: usize) -> std::result::Result<(), rayon::ThreadPoolBuildError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
}
