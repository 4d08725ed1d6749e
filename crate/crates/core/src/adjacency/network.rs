use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Write};

use crate::corpus::{SenseAnnotation, TokenStream};
use crate::error::{Error, Result};

/// Directed, weighted word-adjacency network.
///
/// `w(i, j)` counts how often lemma `i` immediately precedes lemma `j`.
/// Each annotated ambiguous occurrence is its own node, labelled
/// `word#k` where `k` numbers the occurrences of `word` in stream order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WordAdjacencyNetwork {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    weights: BTreeMap<(usize, usize), u64>,
    occurrences: BTreeMap<(String, usize), usize>,
}

impl WordAdjacencyNetwork {
    pub fn build(streams: &[TokenStream], annotations: &[SenseAnnotation]) -> Self {
        let mut by_doc: HashMap<&str, Vec<(usize, &str)>> = HashMap::new();
        for a in annotations {
            by_doc
                .entry(a.document_id.as_str())
                .or_default()
                .push((a.position, a.word.as_str()));
        }
        for v in by_doc.values_mut() {
            v.sort_unstable();
            v.dedup();
        }

        let mut net = WordAdjacencyNetwork::default();
        let mut occurrence_counter: HashMap<String, usize> = HashMap::new();
        for stream in streams {
            let marked: HashMap<usize, &str> = by_doc
                .get(stream.document_id.as_str())
                .map(|v| v.iter().copied().collect())
                .unwrap_or_default();
            let mut prev: Option<usize> = None;
            for (pos, lemma) in stream.lemmas.iter().enumerate() {
                let node = match marked.get(&pos) {
                    Some(word) => {
                        let k = occurrence_counter.entry((*word).to_owned()).or_insert(0);
                        let label = format!("{word}#{k}");
                        *k += 1;
                        let id = net.intern(&label);
                        net.occurrences
                            .insert((stream.document_id.clone(), pos), id);
                        id
                    }
                    None => net.intern(lemma),
                };
                if let Some(p) = prev {
                    *net.weights.entry((p, node)).or_insert(0) += 1;
                }
                prev = Some(node);
            }
        }
        net
    }

    fn intern(&mut self, label: &str) -> usize {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = self.labels.len();
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), id);
        id
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.weights.len()
    }

    pub fn label(&self, node: usize) -> Option<&str> {
        self.labels.get(node).map(String::as_str)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn node(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Node of the annotated occurrence at `position` in `document_id`.
    pub fn occurrence_node(&self, document_id: &str, position: usize) -> Option<usize> {
        self.occurrences
            .get(&(document_id.to_owned(), position))
            .copied()
    }

    /// Weight of the edge `from -> to` by label; 0 when absent.
    pub fn weight(&self, from: &str, to: &str) -> u64 {
        match (self.node(from), self.node(to)) {
            (Some(i), Some(j)) => self.weights.get(&(i, j)).copied().unwrap_or(0),
            _ => 0,
        }
    }

    pub fn total_weight(&self) -> u64 {
        self.weights.values().sum()
    }

    /// Edges as `(from, to, weight)` in node-id order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.weights.iter().map(|(&(i, j), &w)| (i, j, w))
    }

    /// Undirected, unweighted projection without self-loops; neighbor lists
    /// are sorted.
    pub fn undirected_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.labels.len()];
        for &(i, j) in self.weights.keys() {
            if i != j {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    /// Writes `from<TAB>to<TAB>weight` lines using node labels.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        for (i, j, w) in self.edges() {
            writeln!(out, "{}\t{}\t{}", self.labels[i], self.labels[j], w)?;
        }
        Ok(())
    }

    /// Reads the format produced by [`write_edge_list`](Self::write_edge_list).
    /// Occurrence bookkeeping is not part of the format and comes back empty.
    pub fn read_edge_list<R: BufRead>(input: R) -> Result<Self> {
        let mut net = WordAdjacencyNetwork::default();
        for (idx, line) in input.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let bad = || Error::Parse {
                line: idx + 1,
                message: format!("expected `from<TAB>to<TAB>weight`, got `{line}`"),
            };
            if cols.len() != 3 {
                return Err(bad());
            }
            let w: u64 = cols[2].trim().parse().map_err(|_| bad())?;
            if w == 0 {
                return Err(bad());
            }
            let i = net.intern(cols[0]);
            let j = net.intern(cols[1]);
            *net.weights.entry((i, j)).or_insert(0) += w;
        }
        Ok(net)
    }
}
