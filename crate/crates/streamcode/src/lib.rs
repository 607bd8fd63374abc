//! Streaming data transmission over discrete memoryless channels.
//!
//! A stream of messages arrives at the encoder, one per block of `n` channel
//! uses; every codeword is a joint encoding of the fresh message and (all or a
//! truncated window of) the previous ones, and the decoder recovers each
//! message `T` blocks after its arrival by information-density threshold
//! tests. This crate provides:
//!
//! - [`channel`]: DMC representation and the single-letter information
//!   quantities (information density, mutual information, capacity via
//!   Blahut-Arimoto, conditional/unconditional information variance,
//!   dispersion);
//! - [`bounds`]: closed-form error-probability machinery (Gaussian Q sums and
//!   the geometric-tail constant that collapses them, moderate-deviations and
//!   Chernoff tail bounds driven by the cumulant generating function,
//!   exponent targets for every decoder variant);
//! - [`schedule`]: the message-to-block mapping combinatorics for the
//!   infinite-memory, truncated-memory, and alternating-rate schemes;
//! - [`codebook`]: deterministic lazily-evaluated random codebooks addressed
//!   by a counter-based PRF, so the exponentially large codebook is never
//!   materialized;
//! - [`codec`]: the streaming encoder and the threshold sequential decoder
//!   variants (basic, erasure option, variable delay, alternating rates);
//! - [`sim`]: a Monte Carlo harness with an exact small-instance oracle and
//!   bound-comparison reports.
//!
//! All internal logarithms are natural (nats).

// Alphabet sums read most naturally as index loops over (x, y).
#![allow(clippy::needless_range_loop)]

pub mod bounds;
pub mod channel;
pub mod codebook;
pub mod codec;
pub mod schedule;
pub mod sim;

pub use channel::{Dmc, InfoMeasures, InputDist};
pub use schedule::{Scheme, StreamParams};
