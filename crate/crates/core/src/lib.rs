//! Poisoning attacks on graph metrics collected under edge local
//! differential privacy, with the estimators, attacks, gain accounting and
//! countermeasures needed to measure them.

pub mod attacks;
pub mod bits;
pub mod dataset;
pub mod defenses;
pub mod error;
pub mod estimator;
pub mod gain;
pub mod graph;
pub mod harness;
pub mod ldp;
pub mod plot;
pub mod rng;
pub mod synth;

pub use error::{Error, Result};
pub use rng::Seed;
