//! Word-adjacency networks and per-node topological measurements.

mod network;
mod topology;

pub use network::WordAdjacencyNetwork;
pub use topology::{node_topology, NodeTopology, TopologyAnalyzer, TOPOLOGY_FEATURES};
