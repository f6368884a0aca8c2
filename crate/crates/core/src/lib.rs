//! Rank-citation curve analysis for spotting h-index anomalies in
//! institutional citation data.
//!
//! The pipeline: ingest publications and citation edges into a [`Corpus`],
//! build an institution's [`RankCitationCurve`], fit a smooth baseline decay,
//! look for a run of excess citations around the h-paper (a "humpback"), and
//! corroborate it with self-citation and FWCI statistics of its members.
//! [`simgen`] produces labelled synthetic corpora for validation.

pub mod anomaly;
pub mod cli;
pub mod config;
pub mod corpus;
pub mod error;
pub mod ingest;
pub mod metrics;
pub mod report;
pub mod simgen;
pub mod svg;

pub use anomaly::{
    analyze, assess, detect_hump, fit_baseline, hump_members, AnomalyVerdict, HumpRegion,
    VerdictLevel,
};
pub use config::AnomalyConfig;
pub use corpus::{build_corpus, citation_count, CitationEdge, Corpus, DocType, PublicationRecord};
pub use metrics::{h_index, rank_citation_curve, RankCitationCurve};
pub use report::{emit_report, AnalysisReport, ReportFormat};
pub use simgen::{generate, GroundTruth, SimParams, Strategy};
pub use svg::render_curve_svg;
