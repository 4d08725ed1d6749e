use std::collections::{HashMap, HashSet};
use std::path::Path;

use crate::error::{Error, Result};

use super::Token;

const ENGLISH_STOPWORDS: &str = include_str!("../../data/stopwords.txt");
const ENGLISH_LEMMAS: &str = include_str!("../../data/lemmas.tsv");

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

#[derive(Clone, Debug, Default)]
pub struct StopwordList {
    words: HashSet<String>,
}

impl StopwordList {
    /// The shipped English list.
    pub fn english() -> Self {
        Self::parse(ENGLISH_STOPWORDS)
    }

    pub fn parse(text: &str) -> Self {
        StopwordList {
            words: data_lines(text).map(|(_, w)| w.to_lowercase()).collect(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::MissingStopwordList(format!("{}: {e}", path.display())))?;
        let list = Self::parse(&text);
        if list.words.is_empty() {
            return Err(Error::MissingStopwordList(format!(
                "{} contains no words",
                path.display()
            )));
        }
        Ok(list)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Flags stopwords as non-content and renumbers content positions.
    pub fn remove_stopwords(&self, mut tokens: Vec<Token>) -> Vec<Token> {
        let mut position = 0;
        for token in &mut tokens {
            token.is_content = !self.words.contains(&token.surface.to_lowercase());
            token.position = token.is_content.then(|| {
                position += 1;
                position - 1
            });
        }
        tokens
    }
}

/// Word to lemma lookup backed by a table plus English suffix rules.
#[derive(Clone, Debug, Default)]
pub struct LemmaDictionary {
    table: HashMap<String, String>,
}

impl LemmaDictionary {
    pub fn english() -> Self {
        Self::parse(ENGLISH_LEMMAS).expect("shipped lemma table is well formed")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut table = HashMap::new();
        for (line, row) in data_lines(text) {
            let mut cols = row.split('\t');
            match (cols.next(), cols.next(), cols.next()) {
                (Some(word), Some(lemma), None) if !word.is_empty() && !lemma.is_empty() => {
                    table.insert(word.trim().to_lowercase(), lemma.trim().to_lowercase());
                }
                _ => {
                    return Err(Error::Parse {
                        line,
                        message: format!("expected `word<TAB>lemma`, got `{row}`"),
                    })
                }
            }
        }
        Ok(LemmaDictionary { table })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::MissingLemmaDictionary(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// Canonical form of a single word.
    ///
    /// Table lookup and suffix rules are applied until the word stops
    /// changing, so the result is always a fixed point.
    pub fn lemma(&self, word: &str) -> String {
        let mut current = word.to_lowercase();
        for _ in 0..current.len() + 4 {
            let next = match self.table.get(&current) {
                Some(l) => l.clone(),
                None => suffix_rule(&current).unwrap_or_else(|| current.clone()),
            };
            if next == current {
                break;
            }
            current = next;
        }
        current
    }

    /// Sets the lemma of every content token from its surface form.
    pub fn lemmatize(&self, mut tokens: Vec<Token>) -> Vec<Token> {
        for token in &mut tokens {
            token.lemma = if token.is_content {
                self.lemma(&token.surface)
            } else {
                token.surface.to_lowercase()
            };
        }
        tokens
    }
}

fn has_vowel(s: &str) -> bool {
    s.chars().any(|c| "aeiouy".contains(c))
}

/// Undoes consonant doubling ("runn" -> "run", but "fall" stays).
fn undouble(stem: &str) -> String {
    let b = stem.as_bytes();
    let n = b.len();
    if n >= 3 && b[n - 1] == b[n - 2] && !b"aeioulsz".contains(&b[n - 1]) {
        stem[..n - 1].to_owned()
    } else {
        stem.to_owned()
    }
}

fn suffix_rule(w: &str) -> Option<String> {
    if !w.is_ascii() {
        return None;
    }
    let n = w.len();
    if n > 4 && w.ends_with("ies") {
        return Some(format!("{}y", &w[..n - 3]));
    }
    if n > 4 && ["sses", "ches", "shes", "xes", "zes"].iter().any(|s| w.ends_with(s)) {
        return Some(w[..n - 2].to_owned());
    }
    if n > 3 && w.ends_with('s') && !["ss", "us", "is"].iter().any(|s| w.ends_with(s)) {
        return Some(w[..n - 1].to_owned());
    }
    if n > 4 && w.ends_with("ied") {
        return Some(format!("{}y", &w[..n - 3]));
    }
    if n > 4 && w.ends_with("ed") {
        let stem = &w[..n - 2];
        if has_vowel(stem) && !stem.ends_with('e') {
            return Some(undouble(stem));
        }
    }
    if n > 5 && w.ends_with("ing") {
        let stem = &w[..n - 3];
        if has_vowel(stem) {
            return Some(undouble(stem));
        }
    }
    None
}
