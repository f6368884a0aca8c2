use thiserror::Error;

use crate::corpus::CitationEdge;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("duplicate publication id {0:?}")]
    DuplicateId(String),
    #[error("duplicate citation edge {0}")]
    DuplicateEdge(CitationEdge),
    #[error("edge {0} refers to a publication not in the corpus")]
    DanglingEdge(CitationEdge),
    #[error("publication {0:?} cites itself")]
    SelfLoop(String),
    #[error("publication {0:?} has no authors")]
    EmptyAuthors(String),
    #[error("publication {pub_id:?} has year {year} outside 1900..=2100")]
    InvalidYear { pub_id: String, year: i32 },
    #[error("unknown publication id {0:?}")]
    UnknownId(String),
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed header: expected `{expected}`, found `{found}`")]
    MalformedHeader { expected: String, found: String },
    #[error("strict mode: {count} row(s) rejected, first at line {first_line}: {first_message}")]
    Rejected {
        count: usize,
        first_line: u64,
        first_message: String,
    },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("institution {0:?} has no publications")]
    NoPublications(String),
    #[error("target set is empty")]
    EmptyTargetSet,
    #[error("no target publication has a usable FWCI baseline cell")]
    NoCoveredMembers,
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("need at least {needed} cited publications to fit a baseline, found {found}")]
    TooFewPoints { needed: usize, found: usize },
    #[error("degenerate curve: {0}")]
    DegenerateFit(String),
    #[error("hump interval [{lo}, {hi}] exceeds curve length {len}")]
    RankMismatch { lo: usize, hi: usize, len: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid simulation parameters: {0}")]
    InvalidParams(String),
    #[error("infeasible target: {0}")]
    InfeasibleTarget(String),
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("cannot render an empty curve")]
    EmptyCurve,
}
