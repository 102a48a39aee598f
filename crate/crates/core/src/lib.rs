//! Growing-tree simulator for preferential attachment with local redirection.
//!
//! A new node picks an initial target with probability proportional to
//! `d^alpha` and then either attaches to it or is redirected to one of its
//! neighbours. Two redirection rules are provided: QPA, where the new node
//! attaches uniformly within the target's closed neighbourhood, and CR, where
//! redirection happens with a fixed probability `r`.
//!
//! The crate contains the growth kernels ([`growth`]), exact weight oracles
//! ([`exact`]), observables of grown trees ([`observables`]), the degree
//! recurrence for QPA at `alpha = -inf` ([`master_eq`]), closed-form
//! asymptotics ([`predictions`]) and a replica/sweep harness
//! ([`experiment`]).

pub mod alpha;
pub mod degree_index;
pub mod error;
pub mod exact;
pub mod experiment;
pub mod growth;
pub mod io;
pub mod master_eq;
pub mod model;
pub mod observables;
pub mod predictions;
pub mod rng;
pub mod tree;
pub mod validate;

pub use alpha::Alpha;
pub use error::{Error, Result};
pub use growth::{AttachEvent, Grower};
pub use model::{Family, ModelParams};
pub use observables::{DegreeHistogram, RunSummary};
pub use rng::GrowthRng;
pub use tree::{GrowingTree, NodeId};
