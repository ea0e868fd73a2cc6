//! Exact simulation and verification toolkit for bipartite no-signaling boxes
//! and random access codes (RACs).
//!
//! The crate is organised bottom-up:
//!
//! * [`box_core`] holds conditional probability tables ([`BipartiteBox`]),
//!   the named box families (PR / `B_n` / `B_n^d(±)` boxes and RAC boxes),
//!   joint distributions and the textual box format.
//! * [`protocols`] runs one-way protocols (box plus local processing plus a
//!   single message wire) by exact forward enumeration.
//! * [`wiring`] compiles `(n→1)` RACs out of `(2→1)` RAC boxes and evaluates
//!   them under noisy boxes.
//! * [`infotheory`] computes Shannon quantities and checks the capacity
//!   bounds on explicit strategies.
//! * [`search`] enumerates deterministic strategies exhaustively.
//!
//! Exhaustive loops run on rayon when the `parallel` feature is enabled and
//! fall back to plain iterators otherwise; see [`exec`].

pub mod box_core;
pub mod exec;
pub mod infotheory;
pub mod lp;
pub mod protocols;
pub mod rational;
pub mod report;
pub mod search;
pub mod tables;
pub mod wiring;

pub use box_core::{
    Alphabet, BipartiteBox, BoxError, BoxSignature, JointDistribution, Party, RbVariant, Role,
    Sign, SignalingDirection, Variable,
};
pub use exec::Execution;
pub use rational::Rational;
pub use report::{ProbeReport, Quantity, Status};
