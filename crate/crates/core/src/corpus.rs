//! Publications, citation edges and the validated, indexed [`Corpus`].

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::CorpusError;

pub const MIN_YEAR: i32 = 1900;
pub const MAX_YEAR: i32 = 2100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DocType {
    Article,
    Review,
    Conference,
    Other,
}

impl DocType {
    pub fn as_str(self) -> &'static str {
        match self {
            DocType::Article => "article",
            DocType::Review => "review",
            DocType::Conference => "conference",
            DocType::Other => "other",
        }
    }
}

impl fmt::Display for DocType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DocType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "article" => Ok(DocType::Article),
            "review" => Ok(DocType::Review),
            "conference" => Ok(DocType::Conference),
            "other" => Ok(DocType::Other),
            other => Err(format!("unknown doc_type {other:?}")),
        }
    }
}

/// One publication. External records are citing documents that live outside
/// the analysed institutions; they carry authors so self-citation can be
/// resolved, but never appear on a rank-citation curve.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicationRecord {
    pub pub_id: String,
    pub inst_id: String,
    pub year: i32,
    pub doc_type: Option<DocType>,
    pub field_code: Option<String>,
    pub author_ids: BTreeSet<String>,
    #[serde(default)]
    pub external: bool,
    #[serde(default)]
    pub title: Option<String>,
}

impl PublicationRecord {
    pub fn new<I, S>(pub_id: &str, inst_id: &str, year: i32, authors: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        PublicationRecord {
            pub_id: pub_id.to_string(),
            inst_id: inst_id.to_string(),
            year,
            doc_type: Some(DocType::Article),
            field_code: Some("1000".to_string()),
            author_ids: authors.into_iter().map(Into::into).collect(),
            external: false,
            title: None,
        }
    }

    pub fn with_cell(mut self, field_code: &str, doc_type: DocType) -> Self {
        self.field_code = Some(field_code.to_string());
        self.doc_type = Some(doc_type);
        self
    }

    pub fn external(mut self) -> Self {
        self.external = true;
        self
    }
}

/// A directed `citing -> cited` link.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CitationEdge {
    pub citing_id: String,
    pub cited_id: String,
}

impl CitationEdge {
    pub fn new(citing: &str, cited: &str) -> Self {
        CitationEdge {
            citing_id: citing.to_string(),
            cited_id: cited.to_string(),
        }
    }
}

impl fmt::Display for CitationEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.citing_id, self.cited_id)
    }
}

/// Validated, immutable set of publications and edges.
///
/// Publications and edges are stored sorted so two corpora built from
/// permutations of the same inputs compare equal.
#[derive(Debug, Clone)]
pub struct Corpus {
    publications: Vec<PublicationRecord>,
    edges: Vec<CitationEdge>,
    by_id: HashMap<String, usize>,
    // cited publication index -> sorted, distinct citing publication indices
    cited_by: Vec<Vec<usize>>,
}

impl PartialEq for Corpus {
    fn eq(&self, other: &Self) -> bool {
        self.publications == other.publications && self.edges == other.edges
    }
}

impl Eq for Corpus {}

impl Corpus {
    /// Validates and indexes records and edges.
    pub fn build(
        mut records: Vec<PublicationRecord>,
        mut edges: Vec<CitationEdge>,
    ) -> Result<Corpus, CorpusError> {
        records.sort_by(|a, b| a.pub_id.cmp(&b.pub_id));
        for pair in records.windows(2) {
            if pair[0].pub_id == pair[1].pub_id {
                return Err(CorpusError::DuplicateId(pair[0].pub_id.clone()));
            }
        }
        for rec in &records {
            if rec.author_ids.is_empty() {
                return Err(CorpusError::EmptyAuthors(rec.pub_id.clone()));
            }
            if !(MIN_YEAR..=MAX_YEAR).contains(&rec.year) {
                return Err(CorpusError::InvalidYear {
                    pub_id: rec.pub_id.clone(),
                    year: rec.year,
                });
            }
        }

        let by_id: HashMap<String, usize> = records
            .iter()
            .enumerate()
            .map(|(i, r)| (r.pub_id.clone(), i))
            .collect();

        edges.sort();
        for pair in edges.windows(2) {
            if pair[0] == pair[1] {
                return Err(CorpusError::DuplicateEdge(pair[0].clone()));
            }
        }

        let mut cited_by = vec![Vec::new(); records.len()];
        for edge in &edges {
            if edge.citing_id == edge.cited_id {
                return Err(CorpusError::SelfLoop(edge.citing_id.clone()));
            }
            let (Some(&citing), Some(&cited)) =
                (by_id.get(&edge.citing_id), by_id.get(&edge.cited_id))
            else {
                return Err(CorpusError::DanglingEdge(edge.clone()));
            };
            cited_by[cited].push(citing);
        }
        for list in &mut cited_by {
            list.sort_unstable();
        }

        Ok(Corpus {
            publications: records,
            edges,
            by_id,
            cited_by,
        })
    }

    pub fn empty() -> Corpus {
        Corpus::build(Vec::new(), Vec::new()).expect("empty corpus is valid")
    }

    pub fn publications(&self) -> &[PublicationRecord] {
        &self.publications
    }

    pub fn edges(&self) -> &[CitationEdge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.publications.len()
    }

    pub fn is_empty(&self) -> bool {
        self.publications.is_empty()
    }

    pub fn get(&self, pub_id: &str) -> Option<&PublicationRecord> {
        self.by_id.get(pub_id).map(|&i| &self.publications[i])
    }

    pub(crate) fn index_of(&self, pub_id: &str) -> Result<usize, CorpusError> {
        self.by_id
            .get(pub_id)
            .copied()
            .ok_or_else(|| CorpusError::UnknownId(pub_id.to_string()))
    }

    pub(crate) fn record(&self, index: usize) -> &PublicationRecord {
        &self.publications[index]
    }

    pub(crate) fn citing_indices(&self, index: usize) -> &[usize] {
        &self.cited_by[index]
    }

    /// Ids of the distinct publications citing `pub_id`, in id order.
    pub fn citing_ids(&self, pub_id: &str) -> Result<BTreeSet<&str>, CorpusError> {
        let idx = self.index_of(pub_id)?;
        Ok(self.cited_by[idx]
            .iter()
            .map(|&i| self.publications[i].pub_id.as_str())
            .collect())
    }

    /// Number of distinct citing publications.
    pub fn citation_count(&self, pub_id: &str) -> Result<usize, CorpusError> {
        self.index_of(pub_id).map(|i| self.cited_by[i].len())
    }

    pub(crate) fn count_at(&self, index: usize) -> usize {
        self.cited_by[index].len()
    }

    /// Distinct institution ids of non-external publications, sorted.
    pub fn institutions(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self
            .publications
            .iter()
            .filter(|p| !p.external)
            .map(|p| p.inst_id.as_str())
            .collect();
        set.into_iter().map(str::to_string).collect()
    }

    /// Indices of the non-external publications of one institution.
    pub(crate) fn institution_indices(&self, inst_id: &str) -> Vec<usize> {
        self.publications
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.external && p.inst_id == inst_id)
            .map(|(i, _)| i)
            .collect()
    }

    /// Set of all edges as `(citing, cited)` string pairs; handy for checks.
    pub fn edge_set(&self) -> HashSet<(&str, &str)> {
        self.edges
            .iter()
            .map(|e| (e.citing_id.as_str(), e.cited_id.as_str()))
            .collect()
    }
}

/// Free-function form of [`Corpus::build`].
pub fn build_corpus(
    records: Vec<PublicationRecord>,
    edges: Vec<CitationEdge>,
) -> Result<Corpus, CorpusError> {
    Corpus::build(records, edges)
}

/// Free-function form of [`Corpus::citation_count`].
pub fn citation_count(corpus: &Corpus, pub_id: &str) -> Result<usize, CorpusError> {
    corpus.citation_count(pub_id)
}
