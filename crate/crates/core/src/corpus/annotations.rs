use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

use super::Document;

/// Sense label of one ambiguous-word occurrence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SenseAnnotation {
    pub document_id: String,
    /// Content-word index of the occurrence.
    pub position: usize,
    pub word: String,
    /// 1-based sense number within the word's inventory.
    pub sense_id: u32,
}

impl SenseAnnotation {
    pub fn new(document_id: impl Into<String>, position: usize, word: impl Into<String>, sense_id: u32) -> Self {
        SenseAnnotation {
            document_id: document_id.into(),
            position,
            word: word.into(),
            sense_id,
        }
    }
}

/// Number of senses declared per ambiguous word.
#[derive(Clone, Debug)]
pub struct SenseInventory {
    senses: HashMap<String, u32>,
    permissive: bool,
}

impl Default for SenseInventory {
    /// The ten ambiguous words of the reference dataset.
    fn default() -> Self {
        let senses = [
            ("bear", 3),
            ("jam", 2),
            ("just", 3),
            ("march", 2),
            ("rock", 3),
            ("ring", 2),
            ("save", 2),
            ("present", 2),
            ("close", 2),
            ("note", 2),
        ]
        .into_iter()
        .map(|(w, n)| (w.to_owned(), n))
        .collect();
        SenseInventory {
            senses,
            permissive: false,
        }
    }
}

impl SenseInventory {
    /// Accepts any word with any positive sense id.
    pub fn permissive() -> Self {
        SenseInventory {
            senses: HashMap::new(),
            permissive: true,
        }
    }

    pub fn with_word(mut self, word: impl Into<String>, senses: u32) -> Self {
        self.senses.insert(word.into(), senses);
        self
    }

    pub fn senses(&self, word: &str) -> Option<u32> {
        self.senses.get(word).copied()
    }

    pub fn check(&self, word: &str, sense: u32) -> Result<()> {
        match self.senses.get(word) {
            Some(&n) if sense >= 1 && sense <= n => Ok(()),
            Some(&n) => Err(Error::SenseOutOfRange {
                word: word.to_owned(),
                sense,
                senses: n,
            }),
            None if self.permissive && sense >= 1 => Ok(()),
            None if self.permissive => Err(Error::SenseOutOfRange {
                word: word.to_owned(),
                sense,
                senses: 0,
            }),
            None => Err(Error::UnknownWord(word.to_owned())),
        }
    }
}

/// Parses annotation TSV: `document_id<TAB>position<TAB>word<TAB>sense_id`.
pub fn parse_annotations(text: &str, inventory: &SenseInventory) -> Result<Vec<SenseAnnotation>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let row = raw.trim_end_matches('\r');
        if row.trim().is_empty() || row.trim_start().starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = row.split('\t').collect();
        let parse_err = |message: String| Error::Parse { line, message };
        if cols.len() != 4 {
            return Err(parse_err(format!("expected 4 tab-separated columns, found {}", cols.len())));
        }
        let position: usize = cols[1]
            .trim()
            .parse()
            .map_err(|_| parse_err(format!("bad position `{}`", cols[1])))?;
        let sense_id: u32 = cols[3]
            .trim()
            .parse()
            .map_err(|_| parse_err(format!("bad sense id `{}`", cols[3])))?;
        let word = cols[2].trim().to_lowercase();
        inventory.check(&word, sense_id)?;
        out.push(SenseAnnotation {
            document_id: cols[0].trim().to_owned(),
            position,
            word,
            sense_id,
        });
    }
    Ok(out)
}

/// Checks that every annotation names a content token carrying its word.
pub fn validate_annotations(annotations: &[SenseAnnotation], documents: &[Document]) -> Result<()> {
    let by_id: HashMap<&str, Vec<&str>> = documents
        .iter()
        .map(|d| (d.id.as_str(), d.content_tokens().map(|t| t.lemma.as_str()).collect()))
        .collect();
    for a in annotations {
        let lemmas = by_id
            .get(a.document_id.as_str())
            .ok_or_else(|| Error::UnknownDocument(a.document_id.clone()))?;
        let found = lemmas.get(a.position).copied().unwrap_or("<end of document>");
        if found != a.word {
            return Err(Error::PositionMismatch {
                document: a.document_id.clone(),
                position: a.position,
                expected: a.word.clone(),
                found: found.to_owned(),
            });
        }
    }
    Ok(())
}

/// Reads, parses and validates an annotation file.
pub fn load_annotations(
    path: &Path,
    inventory: &SenseInventory,
    documents: &[Document],
) -> Result<Vec<SenseAnnotation>> {
    let mut text = String::new();
    std::fs::File::open(path)?.read_to_string(&mut text)?;
    let annotations = parse_annotations(&text, inventory)?;
    validate_annotations(&annotations, documents)?;
    Ok(annotations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Preprocessor;

    #[test]
    fn parses_row() {
        let rows = parse_annotations("doc1\t42\tbear\t2\n", &SenseInventory::default()).unwrap();
        assert_eq!(rows, vec![SenseAnnotation::new("doc1", 42, "bear", 2)]);
    }

    #[test]
    fn sense_outside_inventory() {
        let err = parse_annotations("d\t0\tjam\t5", &SenseInventory::default()).unwrap_err();
        assert!(matches!(err, Error::SenseOutOfRange { senses: 2, sense: 5, .. }));
    }

    #[test]
    fn empty_file_and_comments() {
        let inv = SenseInventory::default();
        assert!(parse_annotations("", &inv).unwrap().is_empty());
        assert!(parse_annotations("# header\n\n", &inv).unwrap().is_empty());
    }

    #[test]
    fn bad_rows_report_line() {
        let inv = SenseInventory::default();
        let err = parse_annotations("# c\nd\t1\tbear\t1\nd\tx\tbear\t1\n", &inv).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err = parse_annotations("d\t1\tbear\n", &inv).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn unknown_word_unless_permissive() {
        assert!(matches!(
            parse_annotations("d\t0\tbank\t1", &SenseInventory::default()),
            Err(Error::UnknownWord(_))
        ));
        assert_eq!(
            parse_annotations("d\t0\tbank\t7", &SenseInventory::permissive())
                .unwrap()
                .len(),
            1
        );
    }

    #[test]
    fn validation_against_documents() {
        let docs = vec![Preprocessor::english().process("d", "The bear ate the jam.")];
        let ok = vec![SenseAnnotation::new("d", 0, "bear", 2)];
        validate_annotations(&ok, &docs).unwrap();
        let wrong = vec![SenseAnnotation::new("d", 1, "bear", 2)];
        assert!(matches!(
            validate_annotations(&wrong, &docs),
            Err(Error::PositionMismatch { .. })
        ));
        let past_end = vec![SenseAnnotation::new("d", 9, "bear", 2)];
        assert!(validate_annotations(&past_end, &docs).is_err());
        let other = vec![SenseAnnotation::new("x", 0, "bear", 2)];
        assert!(matches!(
            validate_annotations(&other, &docs),
            Err(Error::UnknownDocument(_))
        ));
    }
}
