//! Post-processing and evaluation of graph clusterings: connectivity
//! treatments (CC, WCC), stochastic block model description lengths, flat
//! SBM fitting, and clustering accuracy metrics.

pub mod dl;
pub mod error;
pub mod graph;
pub mod inference;
pub mod metrics;
pub mod mincut;
pub mod synthgen;
pub mod treatments;

pub use error::{Error, Result};
pub use graph::{Graph, NodeId, NodeSet, Partition};
