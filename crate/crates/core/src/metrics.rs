//! Rank-citation curves, h-index, h-core/tail split, self-citation rates and
//! field-weighted citation impact.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, DocType};
use crate::error::MetricsError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveEntry {
    pub rank: usize,
    pub pub_id: String,
    pub citations: u64,
}

/// Publications ordered by citations (descending), ties by ascending id.
/// Ranks are `1..=N`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RankCitationCurve {
    pub entries: Vec<CurveEntry>,
}

impl RankCitationCurve {
    pub fn from_counts<I, S>(counts: I) -> Self
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        let mut items: Vec<(String, u64)> =
            counts.into_iter().map(|(id, c)| (id.into(), c)).collect();
        items.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        RankCitationCurve {
            entries: items
                .into_iter()
                .enumerate()
                .map(|(i, (pub_id, citations))| CurveEntry {
                    rank: i + 1,
                    pub_id,
                    citations,
                })
                .collect(),
        }
    }

    /// Curve over anonymous ids `p000000..` in the given count order.
    pub fn from_citations(counts: &[u64]) -> Self {
        Self::from_counts(
            counts
                .iter()
                .enumerate()
                .map(|(i, &c)| (format!("p{i:06}"), c)),
        )
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn citations(&self) -> Vec<u64> {
        self.entries.iter().map(|e| e.citations).collect()
    }

    /// Citation count at a 1-based rank.
    pub fn at_rank(&self, rank: usize) -> Option<u64> {
        rank.checked_sub(1)
            .and_then(|i| self.entries.get(i))
            .map(|e| e.citations)
    }

    pub fn total_citations(&self) -> u64 {
        self.entries.iter().map(|e| e.citations).sum()
    }
}

/// Builds the curve of one institution's (non-external) publications.
pub fn rank_citation_curve(
    corpus: &Corpus,
    inst_id: &str,
) -> Result<RankCitationCurve, MetricsError> {
    let indices = corpus.institution_indices(inst_id);
    if indices.is_empty() {
        return Err(MetricsError::NoPublications(inst_id.to_string()));
    }
    Ok(RankCitationCurve::from_counts(indices.into_iter().map(
        |i| (corpus.record(i).pub_id.clone(), corpus.count_at(i) as u64),
    )))
}

/// Largest `h` such that `h` entries have at least `h` citations.
pub fn h_index(curve: &RankCitationCurve) -> usize {
    curve
        .entries
        .iter()
        .take_while(|e| e.citations >= e.rank as u64)
        .count()
}

/// h-index of an unsorted multiset of counts.
pub fn h_index_of(counts: &[u64]) -> usize {
    let mut sorted = counts.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    sorted
        .iter()
        .enumerate()
        .take_while(|(i, &c)| c > *i as u64)
        .count()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub papers: usize,
    pub total_citations: u64,
    pub h_index: usize,
    pub h_core_size: usize,
    pub core_citations: u64,
    pub tail_citations: u64,
    /// `None` when the core has no citations.
    pub tail_core_ratio: Option<f64>,
}

/// Splits the curve into the h-core (ranks `1..=h`) and the tail.
pub fn core_tail_split(curve: &RankCitationCurve, h: usize) -> MetricsSummary {
    let h_core_size = h.min(curve.len());
    let core_citations: u64 = curve.entries[..h_core_size]
        .iter()
        .map(|e| e.citations)
        .sum();
    let tail_citations: u64 = curve.entries[h_core_size..]
        .iter()
        .map(|e| e.citations)
        .sum();
    MetricsSummary {
        papers: curve.len(),
        total_citations: core_citations + tail_citations,
        h_index: h,
        h_core_size,
        core_citations,
        tail_citations,
        tail_core_ratio: (core_citations > 0)
            .then(|| tail_citations as f64 / core_citations as f64),
    }
}

pub fn summarize(curve: &RankCitationCurve) -> MetricsSummary {
    core_tail_split(curve, h_index(curve))
}

/// How a citing document is matched against the paper it cites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelfCitationMode {
    /// Shares at least one author id.
    #[default]
    Author,
    /// Has the same institution id.
    Institution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfCitationStats {
    pub target_set: BTreeSet<String>,
    pub citing_docs: usize,
    pub self_citing_docs: usize,
    /// `None` when nothing cites the targets.
    pub rate: Option<f64>,
}

impl SelfCitationStats {
    pub fn rate_display(&self) -> Option<String> {
        self.rate.map(format_percent)
    }
}

/// Percentage with one decimal, e.g. `53.4%`.
pub fn format_percent(rate: f64) -> String {
    format!("{:.1}%", rate * 100.0)
}

/// FWCI with two decimals.
pub fn format_fwci(value: f64) -> String {
    format!("{value:.2}")
}

fn is_self_citation(corpus: &Corpus, citing: usize, cited: usize, mode: SelfCitationMode) -> bool {
    let (a, b) = (corpus.record(citing), corpus.record(cited));
    match mode {
        SelfCitationMode::Author => !a.author_ids.is_disjoint(&b.author_ids),
        SelfCitationMode::Institution => a.inst_id == b.inst_id,
    }
}

/// Counts distinct citing documents of the target set and how many of them
/// are self-citations of at least one target they cite.
pub fn self_citation_stats(
    corpus: &Corpus,
    target_set: &BTreeSet<String>,
    mode: SelfCitationMode,
) -> Result<SelfCitationStats, MetricsError> {
    if target_set.is_empty() {
        return Err(MetricsError::EmptyTargetSet);
    }
    let mut citing: HashMap<usize, bool> = HashMap::new();
    for id in target_set {
        let cited = corpus.index_of(id)?;
        for &doc in corpus.citing_indices(cited) {
            let is_self = is_self_citation(corpus, doc, cited, mode);
            let entry = citing.entry(doc).or_insert(false);
            *entry |= is_self;
        }
    }
    let citing_docs = citing.len();
    let self_citing_docs = citing.values().filter(|&&s| s).count();
    Ok(SelfCitationStats {
        target_set: target_set.clone(),
        citing_docs,
        self_citing_docs,
        rate: (citing_docs > 0).then(|| self_citing_docs as f64 / citing_docs as f64),
    })
}

/// Median per-publication self-citation rate over an institution's cited
/// publications; 0 when none is cited.
pub fn median_self_citation_rate(corpus: &Corpus, inst_id: &str, mode: SelfCitationMode) -> f64 {
    let mut rates: Vec<f64> = corpus
        .institution_indices(inst_id)
        .into_iter()
        .filter_map(|i| {
            let citing = corpus.citing_indices(i);
            if citing.is_empty() {
                return None;
            }
            let selfs = citing
                .iter()
                .filter(|&&d| is_self_citation(corpus, d, i, mode))
                .count();
            Some(selfs as f64 / citing.len() as f64)
        })
        .collect();
    median(&mut rates).unwrap_or(0.0)
}

pub(crate) fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    })
}

/// FWCI normalisation cell.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellKey {
    pub field_code: String,
    pub year: i32,
    pub doc_type: DocType,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellBaseline {
    pub cell: CellKey,
    pub size: usize,
    /// Mean citations per publication in the cell.
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FwciResult {
    pub per_pub: BTreeMap<String, f64>,
    pub set_mean: f64,
    /// Cells touched by the target set, in key order.
    pub baseline_cells: Vec<CellBaseline>,
    pub uncovered: BTreeSet<String>,
}

impl FwciResult {
    pub fn set_mean_display(&self) -> String {
        format_fwci(self.set_mean)
    }
}

/// Corpus-internal FWCI baseline: per (field, year, doc type) cell, the mean
/// citation count over all non-external publications of the corpus.
pub fn fwci_baseline(corpus: &Corpus) -> BTreeMap<CellKey, CellBaseline> {
    let mut sums: BTreeMap<CellKey, (usize, u64)> = BTreeMap::new();
    for (i, rec) in corpus.publications().iter().enumerate() {
        if rec.external {
            continue;
        }
        let (Some(field), Some(doc_type)) = (&rec.field_code, rec.doc_type) else {
            continue;
        };
        let key = CellKey {
            field_code: field.clone(),
            year: rec.year,
            doc_type,
        };
        let slot = sums.entry(key).or_insert((0, 0));
        slot.0 += 1;
        slot.1 += corpus.count_at(i) as u64;
    }
    sums.into_iter()
        .map(|(cell, (size, total))| {
            let expected = total as f64 / size as f64;
            (
                cell.clone(),
                CellBaseline {
                    cell,
                    size,
                    expected,
                },
            )
        })
        .collect()
}

/// Field-weighted citation impact of each target: its citations over the
/// mean of its cell. Targets in cells smaller than `min_cell_size`, with a
/// zero mean, or lacking cell fields, are reported as uncovered.
pub fn fwci(
    corpus: &Corpus,
    target_set: &BTreeSet<String>,
    min_cell_size: usize,
) -> Result<FwciResult, MetricsError> {
    let baseline = fwci_baseline(corpus);
    fwci_with_baseline(corpus, target_set, &baseline, min_cell_size)
}

pub fn fwci_with_baseline(
    corpus: &Corpus,
    target_set: &BTreeSet<String>,
    baseline: &BTreeMap<CellKey, CellBaseline>,
    min_cell_size: usize,
) -> Result<FwciResult, MetricsError> {
    let mut per_pub = BTreeMap::new();
    let mut uncovered = BTreeSet::new();
    let mut touched: BTreeMap<CellKey, CellBaseline> = BTreeMap::new();
    for id in target_set {
        let idx = corpus.index_of(id)?;
        let rec = corpus.record(idx);
        let cell = match (&rec.field_code, rec.doc_type) {
            (Some(field), Some(doc_type)) if !rec.external => baseline.get(&CellKey {
                field_code: field.clone(),
                year: rec.year,
                doc_type,
            }),
            _ => None,
        };
        match cell {
            Some(cell) => {
                touched.insert(cell.cell.clone(), cell.clone());
                if cell.size >= min_cell_size.max(1) && cell.expected > 0.0 {
                    per_pub.insert(id.clone(), corpus.count_at(idx) as f64 / cell.expected);
                } else {
                    uncovered.insert(id.clone());
                }
            }
            None => {
                uncovered.insert(id.clone());
            }
        }
    }
    if per_pub.is_empty() {
        return Err(MetricsError::NoCoveredMembers);
    }
    let set_mean = per_pub.values().sum::<f64>() / per_pub.len() as f64;
    Ok(FwciResult {
        per_pub,
        set_mean,
        baseline_cells: touched.into_values().collect(),
        uncovered,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{CitationEdge, PublicationRecord};

    fn curve(counts: &[u64]) -> RankCitationCurve {
        RankCitationCurve::from_citations(counts)
    }

    fn h_brute(counts: &[u64]) -> usize {
        (0..=counts.len())
            .filter(|&h| counts.iter().filter(|&&c| c >= h as u64).count() >= h)
            .max()
            .unwrap()
    }

    #[test]
    fn curve_sorting_and_ties() {
        let c = RankCitationCurve::from_counts([("C", 0), ("A", 3), ("B", 1)]);
        let got: Vec<_> = c
            .entries
            .iter()
            .map(|e| (e.rank, e.pub_id.as_str(), e.citations))
            .collect();
        assert_eq!(got, vec![(1, "A", 3), (2, "B", 1), (3, "C", 0)]);

        let c = RankCitationCurve::from_counts([("B", 2), ("A", 2)]);
        assert_eq!(c.entries[0].pub_id, "A");
        assert_eq!(c.entries[1].pub_id, "B");
    }

    #[test]
    fn h_index_examples() {
        assert_eq!(h_index(&curve(&[])), 0);
        assert_eq!(h_index(&curve(&[5, 5, 5, 5, 5])), 5);
        let counts = [10, 8, 5, 4, 3];
        assert_eq!(h_brute(&counts), 4);
        assert_eq!(h_index(&curve(&counts)), 4);
        assert_eq!(h_index_of(&[3, 10, 4, 8, 5]), 4);
        assert_eq!(h_index(&curve(&[0, 0, 0])), 0);
    }

    #[test]
    fn core_tail_examples() {
        let s = core_tail_split(&curve(&[3, 2, 1]), 2);
        assert_eq!((s.core_citations, s.tail_citations), (5, 1));
        assert!((s.tail_core_ratio.unwrap() - 0.2).abs() < 1e-12);

        let s = core_tail_split(&curve(&[0, 0]), 0);
        assert_eq!(s.h_core_size, 0);
        assert_eq!(s.tail_core_ratio, None);

        let s = core_tail_split(&curve(&[5, 5, 5, 5, 5]), 5);
        assert_eq!(s.tail_citations, 0);
        assert_eq!(s.tail_core_ratio, Some(0.0));
    }

    fn small_corpus() -> Corpus {
        Corpus::build(
            vec![
                PublicationRecord::new("A", "U", 2010, ["x"]),
                PublicationRecord::new("B", "U", 2011, ["x", "y"]),
                PublicationRecord::new("C", "V", 2011, ["z"]),
            ],
            vec![CitationEdge::new("B", "A"), CitationEdge::new("C", "A")],
        )
        .unwrap()
    }

    #[test]
    fn self_citation_by_author_overlap() {
        let corpus = small_corpus();
        let targets: BTreeSet<String> = ["A".to_string()].into();
        let s = self_citation_stats(&corpus, &targets, SelfCitationMode::Author).unwrap();
        assert_eq!((s.citing_docs, s.self_citing_docs), (2, 1));
        assert_eq!(s.rate, Some(0.5));

        let s = self_citation_stats(&corpus, &targets, SelfCitationMode::Institution).unwrap();
        assert_eq!(s.self_citing_docs, 1);
    }

    #[test]
    fn self_citation_errors_and_absent_rate() {
        let corpus = small_corpus();
        assert_eq!(
            self_citation_stats(&corpus, &BTreeSet::new(), SelfCitationMode::Author),
            Err(MetricsError::EmptyTargetSet)
        );
        let targets: BTreeSet<String> = ["C".to_string()].into();
        let s = self_citation_stats(&corpus, &targets, SelfCitationMode::Author).unwrap();
        assert_eq!(s.citing_docs, 0);
        assert_eq!(s.rate, None);
        let unknown: BTreeSet<String> = ["Q".to_string()].into();
        assert!(matches!(
            self_citation_stats(&corpus, &unknown, SelfCitationMode::Author),
            Err(MetricsError::Corpus(_))
        ));
    }

    #[test]
    fn display_rounding() {
        assert_eq!(format_percent(356.0 / 667.0), "53.4%");
        assert_eq!(format_percent(299.0 / 721.0), "41.5%");
        assert_eq!(format_fwci(3.349999), "3.35");
    }

    /// One cell with citation counts {2, 4, 6} padded to the minimum size
    /// with publications that have the mean (4) citations.
    #[test]
    fn fwci_hand_mean() {
        let mut recs = Vec::new();
        let mut edges = Vec::new();
        let counts = [2u64, 4, 6, 4, 4];
        for (i, &c) in counts.iter().enumerate() {
            let id = format!("P{i}");
            recs.push(PublicationRecord::new(&id, "U", 2015, ["a"]));
            for j in 0..c {
                let cid = format!("X{i}_{j}");
                recs.push(PublicationRecord::new(&cid, "EXT", 2016, ["e"]).external());
                edges.push(CitationEdge::new(&cid, &id));
            }
        }
        let corpus = Corpus::build(recs, edges).unwrap();
        let targets: BTreeSet<String> = ["P2".to_string()].into();
        let r = fwci(&corpus, &targets, 5).unwrap();
        assert!((r.per_pub["P2"] - 1.5).abs() < 1e-12);
        assert_eq!(r.baseline_cells.len(), 1);
        assert_eq!(r.baseline_cells[0].size, 5);

        // raising the minimum cell size leaves nothing covered
        assert_eq!(
            fwci(&corpus, &targets, 6),
            Err(MetricsError::NoCoveredMembers)
        );
    }

    #[test]
    fn fwci_equal_to_cell_mean_is_one() {
        let mut recs = Vec::new();
        let mut edges = Vec::new();
        for i in 0..6 {
            let id = format!("P{i}");
            recs.push(PublicationRecord::new(&id, "U", 2015, ["a"]));
            for j in 0..3 {
                let cid = format!("X{i}_{j}");
                recs.push(PublicationRecord::new(&cid, "EXT", 2016, ["e"]).external());
                edges.push(CitationEdge::new(&cid, &id));
            }
        }
        let corpus = Corpus::build(recs, edges).unwrap();
        let targets: BTreeSet<String> = (0..6).map(|i| format!("P{i}")).collect();
        let r = fwci(&corpus, &targets, 5).unwrap();
        assert!(r.per_pub.values().all(|&v| (v - 1.0).abs() < 1e-12));
        assert!((r.set_mean - 1.0).abs() < 1e-12);
        assert!(r.uncovered.is_empty());
    }
}
