/// One word token of a document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    /// Case-folded surface form.
    pub surface: String,
    /// Canonical form; equals `surface` until lemmatization.
    pub lemma: String,
    /// Byte offset of the token in the raw text.
    pub offset: usize,
    /// Index among content tokens; `None` for stopwords.
    pub position: Option<usize>,
    pub is_content: bool,
}

/// Splits text into lowercase word tokens.
///
/// A word is a maximal run of alphanumeric characters; everything else,
/// hyphens and apostrophes included, separates words.
pub fn tokenize(raw_text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut start: Option<usize> = None;
    let push = |from: usize, to: usize, tokens: &mut Vec<Token>| {
        let surface = raw_text[from..to].to_lowercase();
        let position = Some(tokens.len());
        tokens.push(Token {
            lemma: surface.clone(),
            surface,
            offset: from,
            position,
            is_content: true,
        });
    };
    for (i, ch) in raw_text.char_indices() {
        match (ch.is_alphanumeric(), start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                push(s, i, &mut tokens);
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        push(s, raw_text.len(), &mut tokens);
    }
    tokens
}
