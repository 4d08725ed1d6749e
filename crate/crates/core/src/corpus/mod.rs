//! Text ingestion: tokenization, stopword removal, lemmatization and sense
//! annotations for ambiguous-word occurrences.

mod annotations;
mod resources;
mod tokenize;

pub use annotations::{
    load_annotations, parse_annotations, validate_annotations, SenseAnnotation, SenseInventory,
};
pub use resources::{LemmaDictionary, StopwordList};
pub use tokenize::{tokenize, Token};

use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// A source text plus its processed tokens.
#[derive(Clone, Debug, PartialEq)]
pub struct Document {
    pub id: String,
    pub raw_text: String,
    pub tokens: Vec<Token>,
}

/// Content lemmas of one document in reading order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenStream {
    pub document_id: String,
    pub lemmas: Vec<String>,
}

impl TokenStream {
    pub fn new(document_id: impl Into<String>, lemmas: Vec<String>) -> Self {
        TokenStream {
            document_id: document_id.into(),
            lemmas,
        }
    }

    /// Builds a stream from whitespace-separated lemmas.
    pub fn from_words(document_id: impl Into<String>, words: &str) -> Self {
        Self::new(
            document_id,
            words.split_whitespace().map(str::to_owned).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.lemmas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lemmas.is_empty()
    }
}

impl Document {
    pub fn content_tokens(&self) -> impl Iterator<Item = &Token> {
        self.tokens.iter().filter(|t| t.is_content)
    }

    pub fn content_count(&self) -> usize {
        self.content_tokens().count()
    }

    pub fn stream(&self) -> TokenStream {
        TokenStream::new(
            self.id.clone(),
            self.content_tokens().map(|t| t.lemma.clone()).collect(),
        )
    }

    /// Lemma of the content token at `position`, if any.
    pub fn lemma_at(&self, position: usize) -> Option<&str> {
        self.content_tokens()
            .find(|t| t.position == Some(position))
            .map(|t| t.lemma.as_str())
    }
}

/// Full text pipeline: tokenize, drop stopwords, lemmatize.
#[derive(Clone, Debug)]
pub struct Preprocessor {
    pub stopwords: StopwordList,
    pub lemmas: LemmaDictionary,
}

impl Preprocessor {
    pub fn new(stopwords: StopwordList, lemmas: LemmaDictionary) -> Self {
        Preprocessor { stopwords, lemmas }
    }

    /// Pipeline over the shipped English resources.
    pub fn english() -> Self {
        Preprocessor::new(StopwordList::english(), LemmaDictionary::english())
    }

    /// Loads resources from files, falling back to the shipped copy for any
    /// path that is `None`.
    pub fn from_paths(stopwords: Option<&Path>, lemmas: Option<&Path>) -> Result<Self> {
        let stopwords = match stopwords {
            Some(p) => StopwordList::load(p)?,
            None => StopwordList::english(),
        };
        let lemmas = match lemmas {
            Some(p) => LemmaDictionary::load(p)?,
            None => LemmaDictionary::english(),
        };
        Ok(Preprocessor::new(stopwords, lemmas))
    }

    pub fn process(&self, id: impl Into<String>, raw_text: impl Into<String>) -> Document {
        let raw_text = raw_text.into();
        let tokens = tokenize(&raw_text);
        let tokens = self.stopwords.remove_stopwords(tokens);
        let tokens = self.lemmas.lemmatize(tokens);
        Document {
            id: id.into(),
            raw_text,
            tokens,
        }
    }

    pub fn process_all(&self, texts: Vec<(String, String)>) -> Vec<Document> {
        texts
            .into_par_iter()
            .map(|(id, text)| self.process(id, text))
            .collect()
    }

    /// Reads every `*.txt` file in `dir` (sorted by name); the document id is
    /// the file stem.
    pub fn process_dir(&self, dir: &Path) -> Result<Vec<Document>> {
        let mut texts = Vec::new();
        for entry in std::fs::read_dir(dir)? {
            let path = entry?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("txt") {
                continue;
            }
            let id = path
                .file_stem()
                .and_then(|s| s.to_str())
                .ok_or_else(|| Error::InvalidDataset(format!("bad file name {}", path.display())))?
                .to_owned();
            texts.push((id, std::fs::read_to_string(&path)?));
        }
        texts.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(self.process_all(texts))
    }
}
