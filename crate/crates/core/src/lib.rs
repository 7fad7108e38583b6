//! Unsupervised decomposition of a single graph into hierarchical
//! layers, per-layer adversarial learning of subgraph topology, a
//! learned weighted recombination, and extraction of ordered
//! reconstruction stages that rank edges by topological importance.
//!
//! The pipeline, phase by phase:
//!
//! 1. [`hierarchy`] — Louvain community detection; one layer per
//!    aggregation round, each expressed over the original node set.
//! 2. [`partition`] — balance every layer into M equal-size subgraphs
//!    and pad them to a common tile size k.
//! 3. [`gan`] — train one generator/discriminator pair per layer on the
//!    layer's k-by-k adjacency tiles, then regenerate the layer.
//! 4. [`reconstruct`] — fit scalar layer weights by gradient descent on
//!    a KL-like loss and cut the weighted reconstruction into nested
//!    stages.
//! 5. [`metrics`], [`sampling`] — evaluation measures and the classic
//!    sampling baselines the stages are compared against.
//!
//! [`generators`] supplies the synthetic inputs (ER, BA, WS, stochastic
//! Kronecker) and [`pipeline`] wires everything into a reproducible,
//! artifact-emitting run.

pub mod error;
pub mod gan;
pub mod generators;
pub mod graph;
pub mod hierarchy;
pub mod metrics;
pub(crate) mod par;
pub mod partition;
pub mod pipeline;
pub mod reconstruct;
pub mod rng;
pub mod sampling;

pub use error::GtiError;
pub use graph::{Graph, WeightedAdjacency};
