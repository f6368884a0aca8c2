//! Full per-institution pipeline: curve, baseline, hump, corroboration.

use serde::{Deserialize, Serialize};

use super::baseline::{fit_baseline, BaselineFit};
use super::hump::{hump_from_scan, scan_runs, HumpRegion, RunScan};
use crate::config::AnomalyConfig;
use crate::corpus::Corpus;
use crate::error::{FitError, MetricsError};
use crate::metrics::{
    format_fwci, format_percent, fwci, median_self_citation_rate, rank_citation_curve,
    self_citation_stats, summarize, FwciResult, MetricsSummary, RankCitationCurve,
    SelfCitationStats,
};

pub const EXPERT_REVIEW_NOTE: &str = "A flag marks a statistical irregularity in the citation record, \
not a finding of misconduct; any anomaly must be confirmed by expert evaluation of the publications involved.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictLevel {
    NoAnomaly,
    HumpbackDetected,
    AnomalousPattern,
    InsufficientData,
}

impl VerdictLevel {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictLevel::NoAnomaly => "no_anomaly",
            VerdictLevel::HumpbackDetected => "humpback_detected",
            VerdictLevel::AnomalousPattern => "anomalous_pattern",
            VerdictLevel::InsufficientData => "insufficient_data",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnomalyVerdict {
    pub level: VerdictLevel,
    pub hump: Option<HumpRegion>,
    pub self_cite: Option<SelfCitationStats>,
    pub fwci: Option<FwciResult>,
    /// Logistic score in [0, 1].
    pub score: f64,
    pub notes: Vec<String>,
}

/// Everything computed on the way to a verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub inst_id: String,
    pub curve: RankCitationCurve,
    pub summary: MetricsSummary,
    pub fit: Option<BaselineFit>,
    pub scan: Option<RunScan>,
    /// Median per-publication self-citation rate of the institution.
    pub median_self_rate: f64,
    pub verdict: AnomalyVerdict,
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn score(
    cfg: &AnomalyConfig,
    peak_z: f64,
    excess_mass: f64,
    self_rate_excess: f64,
    fwci_mean: f64,
) -> f64 {
    let s = logistic(
        cfg.score_bias
            + cfg.score_peak_z * peak_z.max(0.0)
            + cfg.score_excess_mass * excess_mass.max(0.0)
            + cfg.score_self_cite * self_rate_excess
            + cfg.score_fwci * fwci_mean.max(0.0),
    );
    if s.is_finite() {
        s.clamp(0.0, 1.0)
    } else {
        0.0
    }
}

fn insufficient(
    inst_id: &str,
    curve: RankCitationCurve,
    summary: MetricsSummary,
    median_self_rate: f64,
    err: &FitError,
) -> Analysis {
    Analysis {
        inst_id: inst_id.to_string(),
        curve,
        summary,
        fit: None,
        scan: None,
        median_self_rate,
        verdict: AnomalyVerdict {
            level: VerdictLevel::InsufficientData,
            hump: None,
            self_cite: None,
            fwci: None,
            score: 0.0,
            notes: vec![
                format!("baseline could not be fitted: {err}"),
                EXPERT_REVIEW_NOTE.to_string(),
            ],
        },
    }
}

/// Runs the pipeline for one institution. Only corpus-level problems (an
/// institution without publications) are errors; a curve too small or flat
/// to model yields an `insufficient_data` verdict.
pub fn analyze(
    corpus: &Corpus,
    inst_id: &str,
    cfg: &AnomalyConfig,
) -> Result<Analysis, MetricsError> {
    let curve = rank_citation_curve(corpus, inst_id)?;
    let summary = summarize(&curve);
    let h = summary.h_index;
    let median_self_rate = median_self_citation_rate(corpus, inst_id, cfg.self_citation_mode);

    let fit = match fit_baseline(&curve, cfg) {
        Ok(fit) => fit,
        Err(e) => return Ok(insufficient(inst_id, curve, summary, median_self_rate, &e)),
    };
    let scan = scan_runs(&curve, &fit, h, cfg);
    let hump = hump_from_scan(&curve, &scan, h, cfg);

    let mut notes = Vec::new();
    if let Some(reason) = &fit.fallback_reason {
        notes.push(format!("baseline fell back to convex regression: {reason}"));
    }
    let (near_lo, near_hi) = scan.near_h;
    for run in &scan.runs {
        if run.hi < near_lo || run.lo > near_hi {
            notes.push(format!(
                "residual run at ranks {}-{} (peak z {:.2}) lies outside the h-neighbourhood [{near_lo}, {near_hi}]",
                run.lo, run.hi, run.peak_z
            ));
        }
    }
    if let (None, Some(run)) = (&hump, scan.near_run()) {
        notes.push(format!(
            "residual run at ranks {}-{} touches the h-neighbourhood but is below the length or mass minimum",
            run.lo, run.hi
        ));
    }

    let mut self_cite = None;
    let mut fwci_result = None;
    let level;
    let s;
    match &hump {
        None => {
            level = VerdictLevel::NoAnomaly;
            let near_peak = scan.near_peak.map_or(0.0, |(_, z)| z);
            s = score(cfg, near_peak, 0.0, 0.0, 0.0);
        }
        Some(region) => {
            let stats = self_citation_stats(corpus, &region.member_ids, cfg.self_citation_mode)?;
            match stats.rate {
                Some(rate) => notes.push(format!(
                    "hump members: {} citing documents, {} self-citations ({})",
                    stats.citing_docs,
                    stats.self_citing_docs,
                    format_percent(rate)
                )),
                None => notes.push("hump members have no citing documents".to_string()),
            }
            match fwci(corpus, &region.member_ids, cfg.min_cell_size) {
                Ok(result) => {
                    notes.push(format!("hump member FWCI {}", format_fwci(result.set_mean)));
                    fwci_result = Some(result);
                }
                Err(MetricsError::NoCoveredMembers) => {
                    notes.push("no hump member has a usable FWCI baseline cell".to_string())
                }
                Err(e) => return Err(e),
            }
            let rate = stats.rate;
            self_cite = Some(stats);
            let fwci_mean = fwci_result.as_ref().map(|f| f.set_mean);
            let corroborated = rate.is_some_and(|r| r >= cfg.self_cite_threshold)
                || fwci_mean.is_some_and(|f| f >= cfg.fwci_threshold);
            level = if corroborated {
                VerdictLevel::AnomalousPattern
            } else {
                VerdictLevel::HumpbackDetected
            };
            s = score(
                cfg,
                region.peak_z,
                region.excess_mass,
                rate.map_or(0.0, |r| r - median_self_rate),
                fwci_mean.unwrap_or(0.0),
            );
        }
    }
    notes.push(EXPERT_REVIEW_NOTE.to_string());

    Ok(Analysis {
        inst_id: inst_id.to_string(),
        curve,
        summary,
        fit: Some(fit),
        scan: Some(scan),
        median_self_rate,
        verdict: AnomalyVerdict {
            level,
            hump,
            self_cite,
            fwci: fwci_result,
            score: s,
            notes,
        },
    })
}

pub fn assess(
    corpus: &Corpus,
    inst_id: &str,
    cfg: &AnomalyConfig,
) -> Result<AnomalyVerdict, MetricsError> {
    analyze(corpus, inst_id, cfg).map(|a| a.verdict)
}
