use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TextError {
    #[error("invalid UTF-8 at byte {0}")]
    Decode(usize),
    #[error("token {index} has inconsistent offsets {start}..{end}")]
    Offsets { index: usize, start: usize, end: usize },
    #[error("unknown label code {0:?}")]
    UnknownLabel(String),
    #[error("two marks for person {0} on one token")]
    DuplicatePerson(u8),
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("corpus is empty")]
    Empty,
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Error)]
pub enum RuleError {
    #[error("rule table line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("duplicate rule id {0}")]
    DuplicateId(String),
    #[error("rules {0} and {1} share priority {2}")]
    DuplicatePriority(String, String, i64),
}

#[derive(Debug, Error)]
pub enum BundleError {
    #[error("missing bundle component {0}")]
    Missing(String),
    #[error("format version {found} does not match reader version {expected}")]
    Version { found: u32, expected: u32 },
    #[error("checksum mismatch for {0}")]
    Checksum(String),
    #[error("malformed {file}: {message}")]
    Malformed { file: String, message: String },
    #[error(transparent)]
    Rules(#[from] RuleError),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RankError {
    #[error("cannot score an empty token sequence")]
    EmptySequence,
}

#[derive(Debug, Error)]
pub enum TranslateError {
    #[error("input is not English; Arabic text bypasses translation")]
    NotEnglish,
    #[error("no translation available for {0:?}")]
    Untranslatable(String),
    #[error("translation backend transport failure: {0}")]
    Transport(String),
}
