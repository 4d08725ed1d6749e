use std::collections::VecDeque;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::{Error, Result};

use super::WordAdjacencyNetwork;

/// Feature names of [`NodeTopology::to_features`] for the default two levels.
pub const TOPOLOGY_FEATURES: [&str; 8] = [
    "hierarchical_degree_1",
    "hierarchical_degree_2",
    "hierarchical_clustering_1",
    "hierarchical_clustering_2",
    "neighbor_degree_mean",
    "neighbor_degree_std",
    "average_shortest_path",
    "betweenness",
];

/// Topological measurements of one node, computed on the undirected,
/// unweighted projection of the network.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeTopology {
    /// Number of nodes at shortest-path distance exactly `h`, for h = 1, 2, ...
    pub hierarchical_degree: Vec<usize>,
    /// Edge density inside the ring of nodes at distance exactly `h`.
    pub hierarchical_clustering: Vec<f64>,
    pub neighbor_degree_mean: f64,
    /// Population standard deviation of the neighbors' degrees.
    pub neighbor_degree_std: f64,
    /// Mean distance to reachable nodes; 0 when nothing is reachable.
    pub average_shortest_path: f64,
    /// Unnormalized Brandes betweenness (unordered pairs).
    pub betweenness: f64,
}

impl NodeTopology {
    pub fn to_features(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.hierarchical_degree.iter().map(|&d| d as f64).collect();
        v.extend(&self.hierarchical_clustering);
        v.extend([
            self.neighbor_degree_mean,
            self.neighbor_degree_std,
            self.average_shortest_path,
            self.betweenness,
        ]);
        v
    }

    pub fn feature_names(levels: usize) -> Vec<String> {
        let mut names: Vec<String> = (1..=levels)
            .map(|h| format!("hierarchical_degree_{h}"))
            .collect();
        names.extend((1..=levels).map(|h| format!("hierarchical_clustering_{h}")));
        names.extend(TOPOLOGY_FEATURES[4..].iter().map(|s| s.to_string()));
        names
    }
}

/// Computes [`NodeTopology`] for nodes of one network. Betweenness is
/// computed once for all nodes on first use.
pub struct TopologyAnalyzer {
    adj: Vec<Vec<usize>>,
    levels: usize,
    betweenness: OnceLock<Vec<f64>>,
}

impl TopologyAnalyzer {
    pub fn new(network: &WordAdjacencyNetwork) -> Self {
        Self::from_adjacency(network.undirected_adjacency(), 2)
    }

    /// `adj` must be symmetric, sorted and free of self-loops.
    pub fn from_adjacency(adj: Vec<Vec<usize>>, levels: usize) -> Self {
        TopologyAnalyzer {
            adj,
            levels: levels.max(1),
            betweenness: OnceLock::new(),
        }
    }

    pub fn with_levels(mut self, levels: usize) -> Self {
        self.levels = levels.max(1);
        self
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn betweenness(&self) -> &[f64] {
        self.betweenness.get_or_init(|| brandes(&self.adj))
    }

    pub fn analyze(&self, node: usize) -> Result<NodeTopology> {
        if node >= self.adj.len() {
            return Err(Error::NodeOutOfRange(node));
        }
        let dist = bfs(&self.adj, node);

        let mut rings = vec![Vec::new(); self.levels];
        let mut reached = 0usize;
        let mut total = 0usize;
        for (v, d) in dist.iter().enumerate() {
            if let Some(d) = *d {
                if v != node {
                    reached += 1;
                    total += d;
                }
                if d >= 1 && d <= self.levels {
                    rings[d - 1].push(v);
                }
            }
        }

        let hierarchical_clustering = rings.iter().map(|ring| self.ring_density(ring)).collect();

        let neighbor_degrees: Vec<f64> = self.adj[node]
            .iter()
            .map(|&u| self.adj[u].len() as f64)
            .collect();
        let (neighbor_degree_mean, neighbor_degree_std) = mean_std(&neighbor_degrees);

        Ok(NodeTopology {
            hierarchical_degree: rings.iter().map(Vec::len).collect(),
            hierarchical_clustering,
            neighbor_degree_mean,
            neighbor_degree_std,
            average_shortest_path: if reached == 0 {
                0.0
            } else {
                total as f64 / reached as f64
            },
            betweenness: self.betweenness()[node],
        })
    }

    fn ring_density(&self, ring: &[usize]) -> f64 {
        let k = ring.len();
        if k < 2 {
            return 0.0;
        }
        let mut links = 0usize;
        for (a, &u) in ring.iter().enumerate() {
            for &v in &ring[a + 1..] {
                if self.adj[u].binary_search(&v).is_ok() {
                    links += 1;
                }
            }
        }
        links as f64 / (k * (k - 1) / 2) as f64
    }
}

/// Convenience wrapper building an analyzer for a single query.
pub fn node_topology(network: &WordAdjacencyNetwork, node: usize) -> Result<NodeTopology> {
    TopologyAnalyzer::new(network).analyze(node)
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn bfs(adj: &[Vec<usize>], source: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        let d = dist[v].unwrap();
        for &u in &adj[v] {
            if dist[u].is_none() {
                dist[u] = Some(d + 1);
                queue.push_back(u);
            }
        }
    }
    dist
}

const BRANDES_CHUNK: usize = 64;

/// Brandes accumulation over all sources. Sources are processed in fixed
/// chunks whose partial sums are added in order, so the result does not
/// depend on the thread count.
fn brandes(adj: &[Vec<usize>]) -> Vec<f64> {
    let n = adj.len();
    let sources: Vec<usize> = (0..n).collect();
    let partials: Vec<Vec<f64>> = sources
        .par_chunks(BRANDES_CHUNK)
        .map(|chunk| {
            let mut acc = vec![0.0; n];
            let mut sigma = vec![0f64; n];
            let mut dist = vec![usize::MAX; n];
            let mut delta = vec![0f64; n];
            let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
            let mut order = Vec::with_capacity(n);
            let mut queue = VecDeque::new();
            for &s in chunk {
                for v in 0..n {
                    sigma[v] = 0.0;
                    dist[v] = usize::MAX;
                    delta[v] = 0.0;
                    preds[v].clear();
                }
                order.clear();
                sigma[s] = 1.0;
                dist[s] = 0;
                queue.push_back(s);
                while let Some(v) = queue.pop_front() {
                    order.push(v);
                    for &w in &adj[v] {
                        if dist[w] == usize::MAX {
                            dist[w] = dist[v] + 1;
                            queue.push_back(w);
                        }
                        if dist[w] == dist[v] + 1 {
                            sigma[w] += sigma[v];
                            preds[w].push(v);
                        }
                    }
                }
                for &w in order.iter().rev() {
                    for &v in &preds[w] {
                        delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
                    }
                    if w != s {
                        acc[w] += delta[w];
                    }
                }
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; n];
    for part in partials {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    // Each unordered pair was counted from both endpoints.
    total.iter_mut().for_each(|b| *b /= 2.0);
    total
}
