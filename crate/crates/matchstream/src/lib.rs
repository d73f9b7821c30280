//! Streaming weighted-matching toolkit.
//!
//! The library has three layers:
//!
//! * core types ([`graph`], [`matching`], [`augment`], [`potentials`]) shared by
//!   every algorithm,
//! * the algorithms themselves: the single-pass random-arrival pipeline
//!   ([`local_ratio`], [`unweighted`], [`wgt_aug_paths`], [`random_arrival`])
//!   and the multi-pass layered-graph pipeline ([`layered`], [`multipass`]),
//! * desk-scale verification support: exact solvers ([`oracle`]), a seeded
//!   stream harness with memory accounting ([`stream`]), instance generators
//!   ([`generators`]) and brute-force reference implementations ([`testkit`]).
//!
//! Everything is deterministic given a seed; see README for the exact PRNG.

pub mod augment;
pub mod error;
pub mod generators;
pub mod graph;
pub mod layered;
pub mod local_ratio;
pub mod matching;
pub mod multipass;
pub mod oracle;
pub mod potentials;
pub mod random_arrival;
pub mod report;
pub mod rng;
pub mod stream;
pub mod testkit;
pub mod unweighted;
pub mod wgt_aug_paths;

pub mod rounding;

pub use augment::{AugKind, Augmentation};
pub use error::Error;
pub use graph::{Edge, WeightedGraph};
pub use matching::Matching;
pub use potentials::VertexPotentials;

pub type Result<T> = std::result::Result<T, Error>;
