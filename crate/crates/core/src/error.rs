use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("stopword list is missing or empty: {0}")]
    MissingStopwordList(String),

    #[error("lemma dictionary is missing: {0}")]
    MissingLemmaDictionary(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("annotation for document `{document}` at position {position}: expected lemma `{expected}`, found `{found}`")]
    PositionMismatch {
        document: String,
        position: usize,
        expected: String,
        found: String,
    },

    #[error("annotation references unknown document `{0}`")]
    UnknownDocument(String),

    #[error("sense {sense} is outside the inventory of `{word}` ({senses} senses)")]
    SenseOutOfRange { word: String, sense: u32, senses: u32 },

    #[error("word `{0}` has no declared sense inventory")]
    UnknownWord(String),

    #[error("no network node for occurrence `{0}`")]
    MissingNode(String),

    #[error("node index {0} is out of range")]
    NodeOutOfRange(usize),

    #[error("class {class} has {count} training instance(s); at least 2 are required")]
    ClassTooSmall { class: u32, count: usize },

    #[error("vertex {vertex} is not in a component of {len} vertices")]
    VertexNotInComponent { vertex: usize, len: usize },

    #[error("test instance shares no link with any class component")]
    AllViewsEmpty,

    #[error("class {class} has {count} instance(s); cross-validation needs at least 2")]
    InsufficientClassSize { class: u32, count: usize },

    #[error("dataset problem: {0}")]
    InvalidDataset(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
