//! Seeded generators for corpora and point sets with known structure.

use std::fmt::Write as _;

use rand::distributions::{Distribution, Uniform};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;

use crate::corpus::{SenseAnnotation, TokenStream};
use crate::features::Dataset;

/// Shape of a generated two-sense corpus.
#[derive(Clone, Debug, PartialEq)]
pub struct CorpusSpec {
    pub target: String,
    pub occurrences_per_sense: usize,
    /// Content words on each side of the target.
    pub context: usize,
    /// Vocabulary size private to each sense, in sense order.
    pub sense_vocabulary: Vec<usize>,
    pub shared_vocabulary: usize,
    /// Probability that a context word comes from the shared vocabulary.
    pub noise: f64,
    pub seed: u64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            target: "ring".into(),
            occurrences_per_sense: 100,
            context: 12,
            sense_vocabulary: vec![6, 30],
            shared_vocabulary: 40,
            noise: 0.1,
            seed: 7,
        }
    }
}

/// Documents of one target occurrence each, with gold senses.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticCorpus {
    pub target: String,
    /// `(document id, raw text)`; the text survives preprocessing unchanged.
    pub texts: Vec<(String, String)>,
    pub streams: Vec<TokenStream>,
    pub annotations: Vec<SenseAnnotation>,
}

impl SyntheticCorpus {
    /// Annotation file contents: `document<TAB>position<TAB>word<TAB>sense`.
    pub fn annotations_tsv(&self) -> String {
        let mut out = String::new();
        for a in &self.annotations {
            let _ = writeln!(out, "{}\t{}\t{}\t{}", a.document_id, a.position, a.word, a.sense_id);
        }
        out
    }
}

/// Context words are digit-suffixed tokens (`a3`, `b17`, `c5`) that the
/// tokenizer, stopword filter and lemmatizer leave alone.
pub fn generate_corpus(spec: &CorpusSpec) -> SyntheticCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let total = spec.occurrences_per_sense * spec.sense_vocabulary.len();
    let mut senses: Vec<u32> = (0..total)
        .map(|i| (i % spec.sense_vocabulary.len()) as u32 + 1)
        .collect();
    senses.shuffle(&mut rng);
    let prefix = |s: u32| char::from(b'a' + (s as u8 - 1) % 24);
    let mut texts = Vec::with_capacity(total);
    let mut streams = Vec::with_capacity(total);
    let mut annotations = Vec::with_capacity(total);
    for (d, &sense) in senses.iter().enumerate() {
        let vocab = spec.sense_vocabulary[sense as usize - 1];
        let word = |rng: &mut ChaCha8Rng| {
            if spec.shared_vocabulary > 0 && rng.gen_bool(spec.noise) {
                format!("z{}", rng.gen_range(0..spec.shared_vocabulary))
            } else {
                format!("{}{}", prefix(sense), rng.gen_range(0..vocab.max(1)))
            }
        };
        let mut words: Vec<String> = (0..spec.context).map(|_| word(&mut rng)).collect();
        words.push(spec.target.clone());
        words.extend((0..spec.context).map(|_| word(&mut rng)));
        let id = format!("doc{d:04}");
        texts.push((id.clone(), words.join(" ")));
        annotations.push(SenseAnnotation::new(id.clone(), spec.context, spec.target.clone(), sense));
        streams.push(TokenStream::new(id, words));
    }
    SyntheticCorpus {
        target: spec.target.clone(),
        texts,
        streams,
        annotations,
    }
}

/// Isotropic Gaussian blobs with unit-spaced centers along the diagonal,
/// labels `1..=classes` assigned round-robin.
pub fn gaussian_blobs(n: usize, classes: usize, dim: usize, spread: f64, seed: u64) -> Dataset<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, spread).expect("positive spread");
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let c = i % classes;
        rows.push((0..dim).map(|_| c as f64 + noise.sample(&mut rng)).collect());
        labels.push(Some(c as u32 + 1));
    }
    Dataset::from_rows("blobs", rows, labels).expect("rows share one width")
}

/// Class 1: a jittered square lattice. Class 2: uniform scatter over a box
/// of the same size beside it. Both have `side * side` points.
pub fn lattice_and_scatter(side: usize, jitter: f64, seed: u64) -> Dataset<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let j = Uniform::new_inclusive(-jitter, jitter);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for r in 0..side {
        for c in 0..side {
            rows.push(vec![c as f64 + j.sample(&mut rng), r as f64 + j.sample(&mut rng)]);
            labels.push(Some(1));
        }
    }
    let span = Uniform::new(0.0, (side - 1) as f64);
    let shift = side as f64 + 2.0;
    for _ in 0..side * side {
        rows.push(vec![shift + span.sample(&mut rng), span.sample(&mut rng)]);
        labels.push(Some(2));
    }
    Dataset::from_rows("lattice", rows, labels).expect("rows share one width")
}
