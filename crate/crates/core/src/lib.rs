//! Farthest-distance and farthest-point queries on two-terminal
//! series-parallel networks.

pub mod abacus;
pub mod bead_chain;
pub mod error;
pub mod exact;
pub mod network;
pub mod oracle;
pub mod parallel_path;
pub mod plf;
pub mod rat;
pub mod sp;
pub mod testkit;
pub mod walk;

pub use error::{Error, Result};
pub use exact::{Length, Q};
pub use network::{build_network, Edge, EdgeId, FarthestResult, Network, PointOnEdge, VertexId};
pub use oracle::{network_distance, oracle_farthest};
