//! Influence ranking for developers and projects in a heterogeneous
//! social-coding network.
//!
//! The network joins a developer follow graph with a weighted
//! developer–project commit graph. [`rankers`] implements DevRank, which
//! alternates a PageRank step over follows with an asymmetric propagation
//! step over commits, plus four baselines (PageRank, HITS, and the
//! follow-only / commit-only ablations). [`evaluation`] scores rankings
//! against follower and star gains observed after a temporal split.
//!
//! All numeric code is generic over [`Scalar`]; the aliases below fix it to
//! `f64`, which is what the tolerance-sensitive paths are tested against.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dense;
pub mod error;
pub mod evaluation;
pub mod graph;
pub mod propagation;
pub mod rankers;
pub mod scalar;
pub mod synthetic;

pub use error::{Error, Result};
pub use graph::{DevId, Event, EventKind, EventLog, HeteroNetwork, LoadOptions, ProjectId};
pub use propagation::{CommitPropagation, FollowTransition, Propagator, SparsePropagator};
pub use rankers::{AlgorithmKind, RankParams, RankState};
pub use scalar::Scalar;

pub type RankParams64 = RankParams<f64>;
pub type RankState64 = RankState<f64>;
pub type DensePropagator64 = dense::DensePropagator<f64>;

pub type RankParams32 = RankParams<f32>;
pub type RankState32 = RankState<f32>;
