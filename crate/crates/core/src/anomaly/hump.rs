//! Residual runs and humpback detection around the h-paper.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::baseline::BaselineFit;
use crate::config::AnomalyConfig;
use crate::error::FitError;
use crate::metrics::RankCitationCurve;

/// A maximal run of consecutive ranks with `z >= z_on`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualRun {
    pub lo: usize,
    pub hi: usize,
    pub excess_mass: f64,
    pub peak_z: f64,
}

impl ResidualRun {
    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HumpRegion {
    /// Inclusive 1-based rank interval.
    pub rank_interval: (usize, usize),
    /// `(citations at r_hi, citations at r_lo)`.
    pub citation_band: (u64, u64),
    pub member_ids: BTreeSet<String>,
    /// Summed z over the interval, in robust sigma units.
    pub excess_mass: f64,
    pub peak_z: f64,
    pub contains_h: bool,
    /// Publications whose count lies inside `citation_band`, whatever their
    /// rank. Differs from `member_ids` only through ties at the band edges.
    pub band_member_count: usize,
}

/// Per-rank z-scores and the runs they form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunScan {
    pub z: Vec<f64>,
    pub runs: Vec<ResidualRun>,
    /// Inclusive rank neighbourhood of the h-paper.
    pub near_h: (usize, usize),
    /// Highest z inside the neighbourhood and its rank.
    pub near_peak: Option<(usize, f64)>,
}

impl RunScan {
    /// The run holding the neighbourhood's peak rank, if that peak clears
    /// `z_on`. Every run that touches the neighbourhood has a rank there with
    /// `z >= z_on`, so this exists exactly when some run touches it.
    pub fn near_run(&self) -> Option<&ResidualRun> {
        let (rank, _) = self.near_peak?;
        self.runs.iter().find(|r| r.lo <= rank && rank <= r.hi)
    }
}

/// z-score of each rank against the baseline, on the `log(1 + c)` scale.
pub fn z_scores(curve: &RankCitationCurve, fit: &BaselineFit) -> Vec<f64> {
    curve
        .entries
        .iter()
        .zip(&fit.fitted)
        .map(|(e, &f)| ((e.citations as f64).ln_1p() - f.max(0.0).ln_1p()) / fit.residual_sigma)
        .collect()
}

pub fn scan_runs(
    curve: &RankCitationCurve,
    fit: &BaselineFit,
    h: usize,
    cfg: &AnomalyConfig,
) -> RunScan {
    let z = z_scores(curve, fit);
    let mut runs = Vec::new();
    let mut i = 0;
    while i < z.len() {
        if z[i] >= cfg.z_on {
            let start = i;
            let mut mass = 0.0;
            let mut peak = f64::NEG_INFINITY;
            while i < z.len() && z[i] >= cfg.z_on {
                mass += z[i];
                peak = peak.max(z[i]);
                i += 1;
            }
            runs.push(ResidualRun {
                lo: start + 1,
                hi: i,
                excess_mass: mass,
                peak_z: peak,
            });
        } else {
            i += 1;
        }
    }
    let near_lo = h.saturating_sub(cfg.near_h).max(1);
    let near_hi = (h + cfg.near_h).min(z.len());
    let near_peak = (near_lo..=near_hi)
        .filter(|&r| r >= 1 && r <= z.len())
        .map(|r| (r, z[r - 1]))
        .fold(None, |best: Option<(usize, f64)>, cur| match best {
            Some(b) if b.1 >= cur.1 => Some(b),
            _ => Some(cur),
        });
    RunScan {
        z,
        runs,
        near_h: (near_lo, near_hi),
        near_peak,
    }
}

fn region_from_run(curve: &RankCitationCurve, run: &ResidualRun, h: usize) -> HumpRegion {
    let (lo, hi) = (run.lo, run.hi);
    let band = (
        curve.entries[hi - 1].citations,
        curve.entries[lo - 1].citations,
    );
    HumpRegion {
        rank_interval: (lo, hi),
        citation_band: band,
        member_ids: curve.entries[lo - 1..hi]
            .iter()
            .map(|e| e.pub_id.clone())
            .collect(),
        excess_mass: run.excess_mass,
        peak_z: run.peak_z,
        contains_h: lo <= h && h <= hi,
        band_member_count: curve
            .entries
            .iter()
            .filter(|e| band.0 <= e.citations && e.citations <= band.1)
            .count(),
    }
}

/// Detects a humpback: the residual run through the h-neighbourhood's peak,
/// kept only if it is at least `min_run` ranks long and carries at least
/// `min_mass` sigma units of excess.
pub fn detect_hump(
    curve: &RankCitationCurve,
    fit: &BaselineFit,
    h: usize,
    cfg: &AnomalyConfig,
) -> Option<HumpRegion> {
    let scan = scan_runs(curve, fit, h, cfg);
    hump_from_scan(curve, &scan, h, cfg)
}

pub fn hump_from_scan(
    curve: &RankCitationCurve,
    scan: &RunScan,
    h: usize,
    cfg: &AnomalyConfig,
) -> Option<HumpRegion> {
    let run = scan.near_run()?;
    (run.len() >= cfg.min_run && run.excess_mass >= cfg.min_mass)
        .then(|| region_from_run(curve, run, h))
}

/// Publication ids at the hump's ranks.
pub fn hump_members(
    curve: &RankCitationCurve,
    hump: &HumpRegion,
) -> Result<BTreeSet<String>, FitError> {
    let (lo, hi) = hump.rank_interval;
    if lo == 0 || lo > hi || hi > curve.len() {
        return Err(FitError::RankMismatch {
            lo,
            hi,
            len: curve.len(),
        });
    }
    Ok(curve.entries[lo - 1..hi]
        .iter()
        .map(|e| e.pub_id.clone())
        .collect())
}
