//! Per-institution audit reports in JSON and markdown.
//!
//! JSON output is canonical: object keys sorted, floats in shortest
//! round-trip form, two-space indentation, trailing newline. Only
//! `generated_at` varies between runs on the same inputs.

use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::anomaly::{Analysis, AnomalyVerdict, BaselineFit};
use crate::config::AnomalyConfig;
use crate::metrics::{format_fwci, format_percent, MetricsSummary, RankCitationCurve};
use crate::simgen::SimParams;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Markdown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn of_file(path: &Path) -> std::io::Result<InputDigest> {
        let mut file = std::fs::File::open(path)?;
        let mut hasher = Sha256::new();
        let mut buf = [0u8; 64 * 1024];
        loop {
            let n = file.read(&mut buf)?;
            if n == 0 {
                break;
            }
            hasher.update(&buf[..n]);
        }
        Ok(InputDigest {
            path: path.display().to_string(),
            sha256: hex::encode(hasher.finalize()),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub tool_version: String,
    pub inputs: Vec<InputDigest>,
    /// Seed of a simulated corpus, when known.
    pub seed: Option<u64>,
    pub sim_params: Option<SimParams>,
}

impl Default for Provenance {
    fn default() -> Self {
        Provenance {
            tool: TOOL_NAME.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            inputs: Vec::new(),
            seed: None,
            sim_params: None,
        }
    }
}

impl Provenance {
    pub fn for_files(paths: &[&Path]) -> std::io::Result<Provenance> {
        Ok(Provenance {
            inputs: paths
                .iter()
                .map(|p| InputDigest::of_file(p))
                .collect::<Result<_, _>>()?,
            ..Provenance::default()
        })
    }

    pub fn for_simulation(params: &SimParams) -> Provenance {
        Provenance {
            seed: Some(params.seed),
            sim_params: Some(params.clone()),
            ..Provenance::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub inst_id: String,
    pub metrics: MetricsSummary,
    pub verdict: AnomalyVerdict,
    pub curve: RankCitationCurve,
    pub baseline: Option<BaselineFit>,
    pub median_self_citation_rate: f64,
    pub config_echo: AnomalyConfig,
    pub provenance: Provenance,
    /// RFC 3339 UTC timestamp; `None` for reproducible output.
    pub generated_at: Option<String>,
}

impl AnalysisReport {
    pub fn new(analysis: &Analysis, cfg: &AnomalyConfig, provenance: Provenance) -> AnalysisReport {
        AnalysisReport {
            schema_version: SCHEMA_VERSION,
            inst_id: analysis.inst_id.clone(),
            metrics: analysis.summary.clone(),
            verdict: analysis.verdict.clone(),
            curve: analysis.curve.clone(),
            baseline: analysis.fit.clone(),
            median_self_citation_rate: analysis.median_self_rate,
            config_echo: cfg.clone(),
            provenance,
            generated_at: None,
        }
    }

    pub fn stamped(mut self) -> AnalysisReport {
        self.generated_at =
            Some(chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
        self
    }

    pub fn without_timestamp(&self) -> AnalysisReport {
        AnalysisReport {
            generated_at: None,
            ..self.clone()
        }
    }

    pub fn from_json(text: &str) -> serde_json::Result<AnalysisReport> {
        serde_json::from_str(text)
    }
}

/// Serialises any value as canonical JSON (sorted keys).
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    // serde_json's default map is ordered by key, so a round trip through
    // `Value` sorts every object.
    let value = serde_json::to_value(value).expect("report types serialise to JSON");
    let mut out = serde_json::to_string_pretty(&value).expect("JSON values always print");
    out.push('\n');
    out
}

pub fn emit_report(report: &AnalysisReport, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Json => canonical_json(report).into_bytes(),
        ReportFormat::Markdown => markdown(report).into_bytes(),
    }
}

fn markdown(r: &AnalysisReport) -> String {
    let mut s = String::new();
    let v = &r.verdict;
    let m = &r.metrics;
    let _ = writeln!(s, "# Citation audit: {}\n", r.inst_id);
    let _ = writeln!(s, "- verdict: **{}**", v.level.as_str());
    let _ = writeln!(s, "- score: {:.3}\n", v.score);

    let _ = writeln!(s, "## Metrics\n");
    let _ = writeln!(
        s,
        "| papers | citations | h-index | core citations | tail citations | tail/core |"
    );
    let _ = writeln!(s, "|---:|---:|---:|---:|---:|---:|");
    let ratio = m
        .tail_core_ratio
        .map_or("n/a".to_string(), |x| format!("{x:.3}"));
    let _ = writeln!(
        s,
        "| {} | {} | {} | {} | {} | {} |\n",
        m.papers, m.total_citations, m.h_index, m.core_citations, m.tail_citations, ratio
    );

    let _ = writeln!(s, "## Baseline\n");
    match &r.baseline {
        Some(fit) => {
            let model = match fit.model {
                crate::anomaly::BaselineModel::PowerLaw => "power law",
                crate::anomaly::BaselineModel::IsotonicConvex => "convex non-increasing",
            };
            let _ = writeln!(s, "- model: {model}");
            if let Some(p) = &fit.params {
                let _ = writeln!(
                    s,
                    "- power law: C = {:.3}, beta = {:.4}, R² = {:.4}",
                    p.coefficient, p.exponent, p.r2
                );
            }
            let _ = writeln!(s, "- residual sigma: {:.4}", fit.residual_sigma);
            let _ = writeln!(
                s,
                "- ranks excluded from fitting: {}-{}\n",
                fit.excluded_window.0, fit.excluded_window.1
            );
        }
        None => {
            let _ = writeln!(s, "- not fitted\n");
        }
    }

    let _ = writeln!(s, "## Hump\n");
    match &v.hump {
        Some(h) => {
            let _ = writeln!(s, "- ranks: {}-{}", h.rank_interval.0, h.rank_interval.1);
            let _ = writeln!(
                s,
                "- citation band: {}-{}",
                h.citation_band.0, h.citation_band.1
            );
            let _ = writeln!(s, "- members (rank interval): {}", h.member_ids.len());
            let _ = writeln!(
                s,
                "- publications in citation band: {}",
                h.band_member_count
            );
            let _ = writeln!(
                s,
                "- contains h-paper: {}",
                if h.contains_h { "yes" } else { "no" }
            );
            let _ = writeln!(s, "- peak z: {:.2}", h.peak_z);
            let _ = writeln!(s, "- excess mass: {:.2}", h.excess_mass);
            if let Some(sc) = &v.self_cite {
                match sc.rate {
                    Some(rate) => {
                        let _ = writeln!(
                            s,
                            "- self-citations: {} ({} of {} citing documents)",
                            format_percent(rate),
                            sc.self_citing_docs,
                            sc.citing_docs
                        );
                    }
                    None => {
                        let _ = writeln!(s, "- self-citations: n/a (no citing documents)");
                    }
                }
            }
            match &v.fwci {
                Some(f) => {
                    let _ = writeln!(
                        s,
                        "- FWCI: {} ({} covered, {} uncovered)",
                        format_fwci(f.set_mean),
                        f.per_pub.len(),
                        f.uncovered.len()
                    );
                }
                None => {
                    let _ = writeln!(s, "- FWCI: n/a");
                }
            }
            let _ = writeln!(
                s,
                "- institution median self-citation rate: {}",
                format_percent(r.median_self_citation_rate)
            );
            let _ = writeln!(s);
        }
        None => {
            let _ = writeln!(s, "No humpback around the h-paper.\n");
        }
    }

    let _ = writeln!(s, "## Notes\n");
    for note in &v.notes {
        let _ = writeln!(s, "- {note}");
    }
    let _ = writeln!(s, "\n## Configuration\n\n```");
    s.push_str(&r.config_echo.to_text());
    let _ = writeln!(s, "```\n\n## Provenance\n");
    let p = &r.provenance;
    let _ = writeln!(s, "- tool: {} {}", p.tool, p.tool_version);
    let _ = writeln!(s, "- schema version: {}", r.schema_version);
    for input in &p.inputs {
        let _ = writeln!(s, "- input `{}` sha256 {}", input.path, input.sha256);
    }
    if let Some(seed) = p.seed {
        let _ = writeln!(s, "- simulation seed: {seed}");
    }
    if let Some(at) = &r.generated_at {
        let _ = writeln!(s, "- generated at: {at}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anomaly::{analyze, VerdictLevel};
    use crate::simgen::{generate, SimParams, SIM_INSTITUTION};

    fn fair_report() -> AnalysisReport {
        let params = SimParams {
            n_papers: 400,
            count_scale: Some(1.2),
            seed: 2,
            ..SimParams::default()
        };
        let (corpus, _) = generate(&params).unwrap();
        let cfg = AnomalyConfig::default();
        let analysis = analyze(&corpus, SIM_INSTITUTION, &cfg).unwrap();
        AnalysisReport::new(&analysis, &cfg, Provenance::for_simulation(&params))
    }

    #[test]
    fn no_anomaly_json_has_null_hump() {
        let report = fair_report();
        assert_eq!(report.verdict.level, VerdictLevel::NoAnomaly);
        let json: serde_json::Value =
            serde_json::from_slice(&emit_report(&report, ReportFormat::Json)).unwrap();
        assert_eq!(json["verdict"]["hump"], serde_json::Value::Null);
        assert_eq!(json["verdict"]["level"], "no_anomaly");
        assert_eq!(json["schema_version"], SCHEMA_VERSION);
    }

    #[test]
    fn serialisation_is_stable_and_round_trips() {
        let report = fair_report();
        let a = emit_report(
            &report.clone().stamped().without_timestamp(),
            ReportFormat::Json,
        );
        let b = emit_report(&report, ReportFormat::Json);
        assert_eq!(a, b);
        let back = AnalysisReport::from_json(std::str::from_utf8(&a).unwrap()).unwrap();
        assert_eq!(emit_report(&back, ReportFormat::Json), a);
    }

    #[test]
    fn keys_are_sorted() {
        let text = canonical_json(&serde_json::json!({"b": 1, "a": {"z": 1, "c": 2}}));
        assert!(text.find("\"a\"").unwrap() < text.find("\"b\"").unwrap());
        assert!(text.find("\"c\"").unwrap() < text.find("\"z\"").unwrap());
    }

    #[test]
    fn markdown_mentions_verdict_and_disclaimer() {
        let md = String::from_utf8(emit_report(&fair_report(), ReportFormat::Markdown)).unwrap();
        assert!(md.contains("verdict: **no_anomaly**"));
        assert!(md.contains(crate::anomaly::EXPERT_REVIEW_NOTE));
    }
}
