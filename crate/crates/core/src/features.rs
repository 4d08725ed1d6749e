//! Feature vectors for ambiguous-word occurrences.
//!
//! Two characterizations are supported: *semantic* (counts of the lemmas in
//! a window of nearby content words) and *topological* (measurements of the
//! occurrence's node in the word-adjacency network).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{Read, Write};

use crate::adjacency::{NodeTopology, TopologyAnalyzer, WordAdjacencyNetwork};
use crate::corpus::{SenseAnnotation, TokenStream};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default semantic window sizes.
pub const DEFAULT_WINDOWS: [usize; 3] = [5, 20, 50];

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InstanceId {
    pub document_id: String,
    pub position: usize,
}

impl InstanceId {
    pub fn new(document_id: impl Into<String>, position: usize) -> Self {
        InstanceId {
            document_id: document_id.into(),
            position,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instance<F> {
    pub id: InstanceId,
    pub features: Vec<F>,
    pub label: Option<u32>,
}

impl<F> Instance<F> {
    pub fn new(id: InstanceId, features: Vec<F>, label: Option<u32>) -> Self {
        Instance { id, features, label }
    }
}

/// Instances sharing one feature layout.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset<F> {
    pub instances: Vec<Instance<F>>,
    pub feature_names: Vec<String>,
}

impl<F: Scalar> Dataset<F> {
    pub fn new(feature_names: Vec<String>, instances: Vec<Instance<F>>) -> Result<Self> {
        let d = feature_names.len();
        if let Some(bad) = instances.iter().find(|i| i.features.len() != d) {
            return Err(Error::InvalidDataset(format!(
                "instance {:?} has {} features, expected {d}",
                bad.id,
                bad.features.len()
            )));
        }
        Ok(Dataset {
            instances,
            feature_names,
        })
    }

    /// Unnamed features `f0, f1, ...` with ids `(source, row)`.
    pub fn from_rows(source: &str, rows: Vec<Vec<F>>, labels: Vec<Option<u32>>) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        let names = (0..d).map(|i| format!("f{i}")).collect();
        let instances = rows
            .into_iter()
            .zip(labels)
            .enumerate()
            .map(|(i, (x, y))| Instance::new(InstanceId::new(source, i), x, y))
            .collect();
        Self::new(names, instances)
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.feature_names.len()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[F]> {
        self.instances.iter().map(|i| i.features.as_slice())
    }

    pub fn labels(&self) -> Vec<Option<u32>> {
        self.instances.iter().map(|i| i.label).collect()
    }

    /// Labels of a fully labelled dataset.
    pub fn require_labels(&self) -> Result<Vec<u32>> {
        self.instances
            .iter()
            .map(|i| {
                i.label
                    .ok_or_else(|| Error::InvalidDataset(format!("instance {:?} is unlabeled", i.id)))
            })
            .collect()
    }

    pub fn class_counts(&self) -> BTreeMap<u32, usize> {
        let mut counts = BTreeMap::new();
        for label in self.instances.iter().filter_map(|i| i.label) {
            *counts.entry(label).or_insert(0) += 1;
        }
        counts
    }

    /// Class proportions `p(j)` among labelled instances.
    pub fn priors(&self) -> BTreeMap<u32, F> {
        let counts = self.class_counts();
        let total: usize = counts.values().sum();
        counts
            .into_iter()
            .map(|(c, n)| (c, F::of_usize(n) / F::of_usize(total)))
            .collect()
    }

    pub fn subset(&self, indices: &[usize]) -> Self {
        Dataset {
            instances: indices.iter().map(|&i| self.instances[i].clone()).collect(),
            feature_names: self.feature_names.clone(),
        }
    }

    pub fn select_columns(&self, columns: &[usize]) -> Self {
        Dataset {
            instances: self
                .instances
                .iter()
                .map(|inst| Instance {
                    id: inst.id.clone(),
                    features: columns.iter().map(|&c| inst.features[c]).collect(),
                    label: inst.label,
                })
                .collect(),
            feature_names: columns.iter().map(|&c| self.feature_names[c].clone()).collect(),
        }
    }

    /// Columns that take more than one value.
    pub fn varying_columns(&self) -> Vec<usize> {
        (0..self.dim())
            .filter(|&c| {
                let mut it = self.instances.iter().map(|i| i.features[c]);
                match it.next() {
                    Some(first) => it.any(|v| v != first),
                    None => false,
                }
            })
            .collect()
    }

    pub fn cast<G: Scalar>(&self) -> Dataset<G> {
        Dataset {
            instances: self
                .instances
                .iter()
                .map(|i| Instance {
                    id: i.id.clone(),
                    features: i.features.iter().map(|v| G::of(v.as_f64())).collect(),
                    label: i.label,
                })
                .collect(),
            feature_names: self.feature_names.clone(),
        }
    }

    /// CSV with one column per feature and a trailing `label` column.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = self.feature_names.clone();
        header.push("label".into());
        w.write_record(&header)?;
        for inst in &self.instances {
            let mut row: Vec<String> = inst.features.iter().map(|v| v.to_string()).collect();
            row.push(inst.label.map(|l| l.to_string()).unwrap_or_default());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads [`write_csv`](Self::write_csv) output. Instance ids become
    /// `(source, row index)`.
    pub fn read_csv<R: Read>(input: R, source: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let header = r.headers()?.clone();
        if header.iter().last() != Some("label") {
            return Err(Error::Parse {
                line: 1,
                message: "last column must be `label`".into(),
            });
        }
        let names: Vec<String> = header.iter().take(header.len() - 1).map(str::to_owned).collect();
        let mut instances = Vec::new();
        for (row, rec) in r.records().enumerate() {
            let rec = rec?;
            let line = row + 2;
            let bad = |m: String| Error::Parse { line, message: m };
            if rec.len() != names.len() + 1 {
                return Err(bad(format!("expected {} columns, found {}", names.len() + 1, rec.len())));
            }
            let features = rec
                .iter()
                .take(names.len())
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map(F::of)
                        .map_err(|_| bad(format!("bad number `{v}`")))
                })
                .collect::<Result<Vec<F>>>()?;
            let label = match rec.get(names.len()).unwrap().trim() {
                "" => None,
                s => Some(s.parse().map_err(|_| bad(format!("bad label `{s}`")))?),
            };
            instances.push(Instance::new(InstanceId::new(source, row), features, label));
        }
        Self::new(names, instances)
    }
}

/// Context words around one annotated occurrence.
#[derive(Clone, Debug, PartialEq)]
pub struct ContextWindow {
    pub id: InstanceId,
    pub label: Option<u32>,
    pub words: Vec<String>,
}

/// Indices of the `window` content words nearest `pos` in a stream of `len`.
///
/// The preferred split is `ceil(window/2)` before and `floor(window/2)`
/// after; a side cut short by a document boundary is made up from the other
/// side when it has words to spare.
pub fn window_range(len: usize, pos: usize, window: usize) -> (std::ops::Range<usize>, std::ops::Range<usize>) {
    let avail_before = pos;
    let avail_after = len.saturating_sub(pos + 1);
    let mut before = window.div_ceil(2).min(avail_before);
    let mut after = (window / 2).min(avail_after);
    let mut spare = window - before - after;
    let extra_after = spare.min(avail_after - after);
    after += extra_after;
    spare -= extra_after;
    before += spare.min(avail_before - before);
    (pos - before..pos, pos + 1..pos + 1 + after)
}

/// Collects the context window of every annotation, in annotation order.
/// Annotations pointing outside their stream get an empty window.
pub fn context_windows(
    streams: &[TokenStream],
    annotations: &[SenseAnnotation],
    window: usize,
) -> Vec<ContextWindow> {
    let by_id: HashMap<&str, &TokenStream> =
        streams.iter().map(|s| (s.document_id.as_str(), s)).collect();
    annotations
        .iter()
        .map(|a| {
            let words = match by_id.get(a.document_id.as_str()) {
                Some(s) if a.position < s.len() => {
                    let (before, after) = window_range(s.len(), a.position, window);
                    s.lemmas[before]
                        .iter()
                        .chain(&s.lemmas[after])
                        .cloned()
                        .collect()
                }
                _ => Vec::new(),
            };
            ContextWindow {
                id: InstanceId::new(a.document_id.clone(), a.position),
                label: Some(a.sense_id),
                words,
            }
        })
        .collect()
}

/// Sorted set of context lemmas defining the semantic feature columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn from_windows<'a>(windows: impl IntoIterator<Item = &'a ContextWindow>) -> Self {
        let set: BTreeSet<&str> = windows
            .into_iter()
            .flat_map(|w| w.words.iter().map(String::as_str))
            .collect();
        let words: Vec<String> = set.into_iter().map(str::to_owned).collect();
        let index = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        Vocabulary { words, index }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    /// Count vector of `window`; words outside the vocabulary are dropped.
    pub fn counts<F: Scalar>(&self, window: &ContextWindow) -> Vec<F> {
        let mut v = vec![F::zero(); self.words.len()];
        for w in &window.words {
            if let Some(&i) = self.index.get(w) {
                v[i] = v[i] + F::one();
            }
        }
        v
    }

    pub fn dataset<F: Scalar>(&self, windows: &[ContextWindow]) -> Dataset<F> {
        Dataset {
            instances: windows
                .iter()
                .map(|w| Instance::new(w.id.clone(), self.counts(w), w.label))
                .collect(),
            feature_names: self.words.clone(),
        }
    }
}

/// Semantic characterization with the vocabulary taken from all windows.
///
/// For cross-validation the vocabulary should come from the training fold
/// only; [`crate::eval::cross_validate`] achieves that by dropping columns
/// that are constant on the training fold.
pub fn semantic_features<F: Scalar>(
    streams: &[TokenStream],
    annotations: &[SenseAnnotation],
    window: usize,
) -> Dataset<F> {
    let windows = context_windows(streams, annotations, window);
    Vocabulary::from_windows(&windows).dataset(&windows)
}

/// Topological characterization: one row of [`NodeTopology`] values per
/// annotated occurrence.
pub fn topological_features<F: Scalar>(
    network: &WordAdjacencyNetwork,
    annotations: &[SenseAnnotation],
) -> Result<Dataset<F>> {
    let analyzer = TopologyAnalyzer::new(network);
    let mut instances = Vec::with_capacity(annotations.len());
    for a in annotations {
        let node = network
            .occurrence_node(&a.document_id, a.position)
            .ok_or_else(|| Error::MissingNode(format!("{}:{} ({})", a.document_id, a.position, a.word)))?;
        let topo = analyzer.analyze(node)?;
        instances.push(Instance::new(
            InstanceId::new(a.document_id.clone(), a.position),
            topo.to_features().into_iter().map(F::of).collect(),
            Some(a.sense_id),
        ));
    }
    Dataset::new(NodeTopology::feature_names(analyzer.levels()), instances)
}

/// Per-feature z-scoring with population standard deviation.
#[derive(Clone, Debug, PartialEq)]
pub struct Standardizer<F> {
    pub mean: Vec<F>,
    /// Population standard deviation; zero marks a constant feature.
    pub std: Vec<F>,
}

impl<F: Scalar> Standardizer<F> {
    pub fn fit(data: &Dataset<F>) -> Self {
        let d = data.dim();
        let n = F::of_usize(data.len().max(1));
        let mut mean = vec![F::zero(); d];
        for row in data.rows() {
            for (m, &v) in mean.iter_mut().zip(row) {
                *m = *m + v;
            }
        }
        mean.iter_mut().for_each(|m| *m = *m / n);
        let mut var = vec![F::zero(); d];
        for row in data.rows() {
            for ((s, &v), &m) in var.iter_mut().zip(row).zip(&mean) {
                *s = *s + (v - m) * (v - m);
            }
        }
        let tiny = F::epsilon() * F::of(64.0);
        let std = var
            .into_iter()
            .zip(&mean)
            .map(|(s, &m)| {
                let sd = (s / n).sqrt();
                if sd <= tiny * m.abs().max(F::one()) {
                    F::zero()
                } else {
                    sd
                }
            })
            .collect();
        Standardizer { mean, std }
    }

    pub fn transform_row(&self, row: &[F]) -> Vec<F> {
        row.iter()
            .zip(&self.mean)
            .zip(&self.std)
            .map(|((&v, &m), &s)| if s == F::zero() { F::zero() } else { (v - m) / s })
            .collect()
    }

    pub fn transform(&self, data: &Dataset<F>) -> Dataset<F> {
        Dataset {
            instances: data
                .instances
                .iter()
                .map(|i| Instance::new(i.id.clone(), self.transform_row(&i.features), i.label))
                .collect(),
            feature_names: data.feature_names.clone(),
        }
    }
}

/// Z-scores every feature of `data` with its own statistics.
pub fn standardize<F: Scalar>(data: &Dataset<F>) -> Dataset<F> {
    Standardizer::fit(data).transform(data)
}
