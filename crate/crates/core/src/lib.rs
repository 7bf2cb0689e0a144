//! Simulation library for online caching with next-arrival predictions.
//!
//! - [`trace`]: request traces, predictions, phases, ℓ1 error, noise models.
//! - [`opt`]: offline optimum (Belady), an exhaustive oracle, clean counts.
//! - [`policies`]: LRU, random marker, blind-follow, predictive marker,
//!   LMARKER, LNONMARKER and the combiner, with chain instrumentation.
//! - [`adversary`]: lower-bound instance sampler.
//! - [`lemma_lab`]: inversion and bounded-geometric checks.
//! - [`bench`]: experiment configs, CSV output and the CLI's subcommands.

pub mod adversary;
pub mod bench;
pub mod error;
pub mod lemma_lab;
pub mod math;
pub mod opt;
pub mod policies;
pub mod rng;
pub mod trace;

pub use error::{Error, Result};
pub use policies::{simulate, PolicyKind, PolicySpec, SimReport};
pub use trace::{PageId, Trace};
