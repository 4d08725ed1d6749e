//! Attribute-space class graphs.
//!
//! Training instances become vertices; each class forms its own component.
//! A vertex links to every same-class vertex closer than `epsilon` when
//! there are more than `kappa` of them (dense region), and to its `kappa`
//! nearest same-class vertices otherwise (sparse region). Components left
//! disconnected are bridged with their shortest inter-component edges.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet};
use std::hash::{Hash, Hasher};
use std::io::Write;

use crate::error::{Error, Result};
use crate::features::{Dataset, Instance, InstanceId};
use crate::scalar::{euclidean, Scalar};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GraphConfig<F> {
    pub epsilon: F,
    pub kappa: usize,
    /// Test points farther than `epsilon * fallback_factor` from a component
    /// get no links to it.
    pub fallback_factor: F,
}

impl<F: Scalar> GraphConfig<F> {
    pub fn new(epsilon: F, kappa: usize) -> Self {
        GraphConfig {
            epsilon,
            kappa,
            fallback_factor: F::of(3.0),
        }
    }

    pub fn with_fallback_factor(mut self, factor: F) -> Self {
        self.fallback_factor = factor;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > F::zero()) || !self.epsilon.is_finite() {
            return Err(Error::InvalidConfig(format!("epsilon must be > 0, got {}", self.epsilon)));
        }
        if self.kappa == 0 {
            return Err(Error::InvalidConfig("kappa must be at least 1".into()));
        }
        if self.fallback_factor < F::zero() {
            return Err(Error::InvalidConfig("fallback factor must be non-negative".into()));
        }
        Ok(())
    }
}

/// One class component. Vertex `v` is the `v`-th training instance of the
/// class in dataset order, so smaller local index means smaller instance id.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassGraph<F> {
    pub class_id: u32,
    pub vertices: Vec<InstanceId>,
    pub positions: Vec<Vec<F>>,
    adjacency: Vec<Vec<(usize, F)>>,
    revision: u64,
}

impl<F: Scalar> ClassGraph<F> {
    /// Graph over `positions` with exactly the given undirected edges.
    pub fn from_edges(class_id: u32, positions: Vec<Vec<F>>, edges: &[(usize, usize)]) -> Result<Self> {
        let n = positions.len();
        let mut g = ClassGraph {
            class_id,
            vertices: (0..n).map(|i| InstanceId::new(format!("class{class_id}"), i)).collect(),
            positions,
            adjacency: vec![Vec::new(); n],
            revision: 0,
        };
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::VertexNotInComponent { vertex: a.max(b), len: n });
            }
            g.add_edge(a, b);
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Neighbors of `v` with distances, sorted by neighbor index.
    pub fn neighbors(&self, v: usize) -> &[(usize, F)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Undirected edges `(a, b, distance)` with `a < b`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, F)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(a, l)| l.iter().filter(move |(b, _)| a < *b).map(move |&(b, d)| (a, b, d)))
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search_by_key(&b, |&(v, _)| v).is_ok()
    }

    /// Bumped on every structural change; walk statistics cached against an
    /// older revision are stale.
    pub fn revision(&self) -> u64 {
        self.revision
    }

    pub fn component_count(&self) -> usize {
        let mut uf = UnionFind::new(self.len());
        for (a, b, _) in self.edges() {
            uf.union(a, b);
        }
        uf.count()
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() <= 1
    }

    /// Hash of the full graph state, positions included bit for bit.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.class_id.hash(&mut h);
        self.vertices.hash(&mut h);
        for p in &self.positions {
            for v in p {
                v.as_f64().to_bits().hash(&mut h);
            }
        }
        for l in &self.adjacency {
            for &(v, d) in l {
                v.hash(&mut h);
                d.as_f64().to_bits().hash(&mut h);
            }
        }
        self.revision.hash(&mut h);
        h.finish()
    }

    fn add_edge(&mut self, a: usize, b: usize) -> bool {
        if a == b || self.has_edge(a, b) {
            return false;
        }
        let d = euclidean(&self.positions[a], &self.positions[b]);
        for (x, y) in [(a, b), (b, a)] {
            let list = &mut self.adjacency[x];
            let at = list.partition_point(|&(v, _)| v < y);
            list.insert(at, (y, d));
        }
        true
    }

    /// Indices of the `k` nearest vertices to `point` (ties by index),
    /// skipping `exclude`.
    fn nearest(&self, point: &[F], k: usize, exclude: Option<usize>) -> Vec<(usize, F)> {
        let mut all: Vec<(usize, F)> = self
            .positions
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != exclude)
            .map(|(i, p)| (i, euclidean(point, p)))
            .collect();
        all.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
        all.truncate(k);
        all
    }

    /// Neighborhood of an existing or prospective vertex under the combined
    /// rule: the epsilon ball when it holds more than `kappa` vertices, the
    /// `kappa` nearest otherwise.
    fn combined_neighborhood(&self, point: &[F], exclude: Option<usize>, config: &GraphConfig<F>) -> Vec<usize> {
        let ball: Vec<usize> = self
            .positions
            .iter()
            .enumerate()
            .filter(|(i, p)| Some(*i) != exclude && euclidean(point, p) < config.epsilon)
            .map(|(i, _)| i)
            .collect();
        if ball.len() > config.kappa {
            ball
        } else {
            self.nearest(point, config.kappa, exclude)
                .into_iter()
                .map(|(i, _)| i)
                .collect()
        }
    }

    /// Joins components with their shortest connecting edges until one
    /// remains (Kruskal over all vertex pairs, seeded with existing edges).
    fn repair_connectivity(&mut self) -> usize {
        let n = self.len();
        let mut uf = UnionFind::new(n);
        for (a, b, _) in self.edges().collect::<Vec<_>>() {
            uf.union(a, b);
        }
        if uf.count() <= 1 {
            return 0;
        }
        let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
        for a in 0..n {
            for b in a + 1..n {
                if uf.find(a) != uf.find(b) {
                    pairs.push((euclidean(&self.positions[a], &self.positions[b]), a, b));
                }
            }
        }
        pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap().then((x.1, x.2).cmp(&(y.1, y.2))));
        let mut added = 0;
        for (_, a, b) in pairs {
            if uf.union(a, b) {
                self.add_edge(a, b);
                added += 1;
                if uf.count() == 1 {
                    break;
                }
            }
        }
        added
    }

    fn build(class_id: u32, members: Vec<(InstanceId, Vec<F>)>, config: &GraphConfig<F>) -> Self {
        let n = members.len();
        let (vertices, positions): (Vec<_>, Vec<_>) = members.into_iter().unzip();
        let mut g = ClassGraph {
            class_id,
            vertices,
            positions,
            adjacency: vec![Vec::new(); n],
            revision: 0,
        };
        let neighborhoods: Vec<Vec<usize>> = (0..n)
            .map(|i| g.combined_neighborhood(&g.positions[i], Some(i), config))
            .collect();
        for (i, hood) in neighborhoods.into_iter().enumerate() {
            for j in hood {
                g.add_edge(i, j);
            }
        }
        g.repair_connectivity();
        g
    }
}

/// Builds one component per class of a labelled dataset. Classes are
/// returned in ascending id order.
pub fn build_training_graph<F: Scalar>(dataset: &Dataset<F>, config: &GraphConfig<F>) -> Result<Vec<ClassGraph<F>>> {
    config.validate()?;
    let mut by_class: BTreeMap<u32, Vec<(InstanceId, Vec<F>)>> = BTreeMap::new();
    for inst in &dataset.instances {
        let label = inst
            .label
            .ok_or_else(|| Error::InvalidDataset(format!("training instance {:?} is unlabeled", inst.id)))?;
        by_class
            .entry(label)
            .or_default()
            .push((inst.id.clone(), inst.features.clone()));
    }
    if let Some((&class, members)) = by_class.iter().find(|(_, m)| m.len() < 2) {
        return Err(Error::ClassTooSmall {
            class,
            count: members.len(),
        });
    }
    Ok(by_class
        .into_iter()
        .map(|(class, members)| ClassGraph::build(class, members, config))
        .collect())
}

/// Links a test point would have into one class component.
#[derive(Clone, Debug, PartialEq)]
pub struct InsertionView<F> {
    pub class_id: u32,
    /// `(vertex, distance)` sorted by vertex.
    pub links: Vec<(usize, F)>,
}

impl<F> InsertionView<F> {
    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }
}

/// Virtually inserts a test point: per component, the vertices within
/// `epsilon`; if none, the `kappa` nearest when the component lies within
/// `epsilon * fallback_factor`; otherwise no links. Graphs are not modified.
pub fn insert_test<F: Scalar>(point: &[F], graphs: &[ClassGraph<F>], config: &GraphConfig<F>) -> Vec<InsertionView<F>> {
    graphs
        .iter()
        .map(|g| {
            let dists: Vec<F> = g.positions.iter().map(|p| euclidean(point, p)).collect();
            let mut links: Vec<(usize, F)> = dists
                .iter()
                .enumerate()
                .filter(|(_, &d)| d < config.epsilon)
                .map(|(i, &d)| (i, d))
                .collect();
            if links.is_empty() {
                let reach = config.epsilon * config.fallback_factor;
                if dists.iter().any(|&d| d <= reach) {
                    links = g.nearest(point, config.kappa, None);
                    links.sort_by_key(|&(v, _)| v);
                }
            }
            InsertionView {
                class_id: g.class_id,
                links,
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CommitMode {
    /// Leave the training graphs unchanged.
    #[default]
    Discard,
    /// Add the classified instance to its predicted class component.
    Incorporate,
}

/// Applies the post-classification policy. Returns whether any graph changed.
pub fn commit_or_discard<F: Scalar>(
    graphs: &mut [ClassGraph<F>],
    instance: &Instance<F>,
    predicted: u32,
    mode: CommitMode,
    config: &GraphConfig<F>,
) -> Result<bool> {
    if mode == CommitMode::Discard {
        return Ok(false);
    }
    let g = graphs
        .iter_mut()
        .find(|g| g.class_id == predicted)
        .ok_or_else(|| Error::InvalidDataset(format!("no component for class {predicted}")))?;
    let hood = g.combined_neighborhood(&instance.features, None, config);
    let v = g.len();
    g.vertices.push(instance.id.clone());
    g.positions.push(instance.features.clone());
    g.adjacency.push(Vec::new());
    for u in hood {
        g.add_edge(v, u);
    }
    g.repair_connectivity();
    g.revision += 1;
    Ok(true)
}

/// Median distance over all same-class pairs; the default `epsilon`.
pub fn median_same_class_distance<F: Scalar>(dataset: &Dataset<F>) -> Option<F> {
    let mut by_class: BTreeMap<u32, Vec<&[F]>> = BTreeMap::new();
    for inst in &dataset.instances {
        if let Some(l) = inst.label {
            by_class.entry(l).or_default().push(&inst.features);
        }
    }
    let mut d: Vec<F> = Vec::new();
    for members in by_class.values() {
        for (i, a) in members.iter().enumerate() {
            for b in &members[i + 1..] {
                d.push(euclidean(a, b));
            }
        }
    }
    if d.is_empty() {
        return None;
    }
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = d.len();
    Some(if m % 2 == 1 {
        d[m / 2]
    } else {
        (d[m / 2 - 1] + d[m / 2]) / F::of(2.0)
    })
}

/// Writes `class<TAB>from<TAB>to<TAB>distance` lines, vertex ids rendered
/// as `document:position`.
pub fn write_graph_dump<F: Scalar, W: Write>(graphs: &[ClassGraph<F>], mut out: W) -> Result<()> {
    for g in graphs {
        for (a, b, d) in g.edges() {
            let (x, y) = (&g.vertices[a], &g.vertices[b]);
            writeln!(
                out,
                "{}\t{}:{}\t{}:{}\t{}",
                g.class_id, x.document_id, x.position, y.document_id, y.position, d
            )?;
        }
    }
    Ok(())
}

/// Vertex set of each connected component, for diagnostics.
pub fn components<F: Scalar>(g: &ClassGraph<F>) -> Vec<BTreeSet<usize>> {
    let mut uf = UnionFind::new(g.len());
    for (a, b, _) in g.edges() {
        uf.union(a, b);
    }
    let mut groups: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for v in 0..g.len() {
        groups.entry(uf.find(v)).or_default().insert(v);
    }
    groups.into_values().collect()
}

struct UnionFind {
    parent: Vec<usize>,
    components: usize,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            components: n,
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        self.components -= 1;
        true
    }

    fn count(&self) -> usize {
        self.components
    }
}
