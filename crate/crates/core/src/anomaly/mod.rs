//! Humpback detection on rank-citation curves.

pub mod baseline;
pub mod hump;
pub mod verdict;

pub use baseline::{
    convex_nonincreasing_fit, fit_baseline, BaselineFit, BaselineModel, PowerLawParams,
};
pub use hump::{detect_hump, hump_members, scan_runs, z_scores, HumpRegion, ResidualRun, RunScan};
pub use verdict::{analyze, assess, Analysis, AnomalyVerdict, VerdictLevel, EXPERT_REVIEW_NOTE};
