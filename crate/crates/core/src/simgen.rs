//! Seeded synthetic citation corpora with known ground truth.
//!
//! Fair citation counts follow a discrete power law: `c = floor(X)` with `X`
//! Pareto distributed (minimum `count_scale`, tail index
//! `base_exponent - 1`), truncated by inverse CDF so that `c <= c_cap`. Every
//! fair citation is a separate external stub document with its own author,
//! so fair corpora carry no self-citations at all.
//!
//! On top of that, non-fair strategies let the institution's authors write
//! extra self-citing documents:
//!
//! * `random_self`: each author spends `self_budget` citations on uniformly
//!   random papers of their own.
//! * `strategic_self`: authors push their own papers into the band
//!   `[h - band_below, h + band_above]` around the current h-index. An author
//!   with a paper still short of its chosen target keeps feeding it; otherwise
//!   they pick their highest own paper that the remaining budget can lift to
//!   the band, draw a target inside the band, and start on it. Finished
//!   papers that fall below the band as h rises get a fresh target. h is
//!   recomputed after every single citation.
//!
//! RNG streams are split by purpose (counts, metadata, injection) so that the
//! fair counts of a seed do not depend on anything else, which is what makes
//! per-seed calibration exact.

use std::collections::BTreeSet;
use std::ops::RangeInclusive;
use std::path::Path;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{CitationEdge, Corpus, DocType, PublicationRecord};
use crate::error::SimError;
use crate::ingest::{write_corpus, Format};
use crate::metrics::h_index_of;

pub const SIM_INSTITUTION: &str = "SIM-U";
pub const EXTERNAL_INSTITUTION: &str = "EXT";
const FIELD_CODES: [&str; 3] = ["1700", "2200", "3100"];
const FIRST_YEAR: i32 = 2003;
const LAST_YEAR: i32 = 2022;

const STREAM_COUNTS: u64 = 0;
const STREAM_META: u64 = 1;
const STREAM_INJECT: u64 = 2;

/// Base exponents searched by [`calibrate`], in hundredths: a coarse pass
/// over the whole range, then a fine pass around the coarse winner.
const EXPONENT_RANGE: (u32, u32) = (105, 400);
const COARSE_STEP: u32 = 10;
const FINE_STEP: u32 = 2;
const SCALE_BISECTIONS: usize = 40;
const CITATION_TOLERANCE: f64 = 0.02;
const H_TOLERANCE: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Fair,
    RandomSelf,
    StrategicSelf,
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fair" => Ok(Strategy::Fair),
            "random-self" | "random_self" => Ok(Strategy::RandomSelf),
            "strategic" | "strategic-self" | "strategic_self" => Ok(Strategy::StrategicSelf),
            other => Err(format!(
                "unknown strategy {other:?} (fair, random-self, strategic)"
            )),
        }
    }
}

/// Target `(papers, citations, h)` triple of an institution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Profile {
    pub papers: usize,
    pub citations: u64,
    pub h: usize,
}

impl Profile {
    pub const fn new(papers: usize, citations: u64, h: usize) -> Profile {
        Profile {
            papers,
            citations,
            h,
        }
    }

    /// Whether achieved values are within the calibration tolerance.
    pub fn matches(&self, papers: usize, citations: u64, h: usize) -> bool {
        papers == self.papers
            && (citations as f64 - self.citations as f64).abs()
                <= CITATION_TOLERANCE * self.citations as f64
            && h.abs_diff(self.h) <= H_TOLERANCE
    }
}

impl std::str::FromStr for Profile {
    type Err = String;

    /// Parses `papers,citations,h`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(format!("expected PAPERS,CITATIONS,H, got {s:?}"));
        }
        let bad = |p: &str| format!("invalid number {p:?} in profile {s:?}");
        Ok(Profile {
            papers: parts[0].parse().map_err(|_| bad(parts[0]))?,
            citations: parts[1].parse().map_err(|_| bad(parts[1]))?,
            h: parts[2].parse().map_err(|_| bad(parts[2]))?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub n_papers: usize,
    pub n_authors: usize,
    pub authors_per_paper: RangeInclusive<usize>,
    /// Exponent of the fair count distribution's density, `> 1`.
    pub base_exponent: f64,
    /// Pareto minimum of the fair counts. `None` derives it (and the
    /// exponent) from the targets at generation time.
    pub count_scale: Option<f64>,
    /// Largest fair citation count; `None` means `10 * target_h` (or 1000).
    pub c_cap: Option<u64>,
    pub target_total_citations: Option<u64>,
    pub target_h: Option<usize>,
    pub strategy: Strategy,
    pub self_budget: usize,
    pub band_above: usize,
    pub band_below: usize,
    pub seed: u64,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            n_papers: 1000,
            n_authors: 10,
            authors_per_paper: 1..=3,
            base_exponent: 2.0,
            count_scale: Some(1.0),
            c_cap: None,
            target_total_citations: None,
            target_h: None,
            strategy: Strategy::Fair,
            self_budget: 100,
            band_above: 5,
            band_below: 2,
            seed: 0,
        }
    }
}

impl SimParams {
    fn validate(&self) -> Result<(), SimError> {
        let bad = |m: &str| Err(SimError::InvalidParams(m.to_string()));
        if self.n_papers == 0 {
            return bad("n_papers must be at least 1");
        }
        if self.n_authors == 0 {
            return bad("n_authors must be at least 1");
        }
        let (lo, hi) = (
            *self.authors_per_paper.start(),
            *self.authors_per_paper.end(),
        );
        if lo == 0 || lo > hi || hi > self.n_authors {
            return bad("authors_per_paper must be a nonempty range within 1..=n_authors");
        }
        if !(self.base_exponent > 1.0 && self.base_exponent.is_finite()) {
            return bad("base_exponent must be finite and greater than 1");
        }
        if let Some(s) = self.count_scale {
            if !(s >= 0.0 && s.is_finite()) {
                return bad("count_scale must be finite and non-negative");
            }
        } else if self.target_total_citations.is_none() || self.target_h.is_none() {
            return bad(
                "count_scale is unset, so target_total_citations and target_h are required",
            );
        }
        Ok(())
    }

    pub fn cap(&self) -> u64 {
        self.c_cap
            .unwrap_or_else(|| self.target_h.map_or(1000, |h| 10 * h.max(1) as u64))
    }

    pub fn profile(&self) -> Option<Profile> {
        Some(Profile::new(
            self.n_papers,
            self.target_total_citations?,
            self.target_h?,
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub injected_ids: BTreeSet<String>,
    pub injected_self_edges: BTreeSet<CitationEdge>,
    pub pre_injection_h: usize,
}

/// Counts-level result of a simulation, before documents are materialised.
#[derive(Debug, Clone, PartialEq)]
pub struct Draft {
    pub fair_counts: Vec<u64>,
    pub authors: Vec<Vec<usize>>,
    /// `(paper, author)` per injected self-citation, in injection order.
    pub injections: Vec<(usize, usize)>,
}

impl Draft {
    pub fn final_counts(&self) -> Vec<u64> {
        let mut c = self.fair_counts.clone();
        for &(p, _) in &self.injections {
            c[p] += 1;
        }
        c
    }
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn uniforms(n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed, STREAM_COUNTS);
    (0..n).map(|_| r.gen::<f64>()).collect()
}

/// Truncated discrete Pareto counts for the given uniforms.
fn pareto_counts(u: &[f64], exponent: f64, scale: f64, cap: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(u.len());
    pareto_fill(u, exponent, scale, cap, &mut out);
    out
}

fn pareto_fill(u: &[f64], exponent: f64, scale: f64, cap: u64, out: &mut Vec<u64>) {
    out.clear();
    if scale <= 0.0 {
        out.resize(u.len(), 0);
        return;
    }
    let k = exponent - 1.0;
    let top = cap as f64 + 1.0;
    let smax = if top > scale {
        (top / scale).powf(-k)
    } else {
        1.0
    };
    out.extend(u.iter().map(|&v| {
        let s = smax + (1.0 - smax) * v;
        let x = (scale * s.powf(-1.0 / k)).floor();
        (x.max(0.0) as u64).min(cap)
    }));
}

pub fn fair_counts(params: &SimParams) -> Vec<u64> {
    pareto_counts(
        &uniforms(params.n_papers, params.seed),
        params.base_exponent,
        params.count_scale.unwrap_or(0.0),
        params.cap(),
    )
}

fn check_profile(profile: Profile) -> Result<(), SimError> {
    if profile.papers == 0 {
        return Err(SimError::InvalidParams(
            "profile needs at least one paper".into(),
        ));
    }
    if profile.h > profile.papers {
        return Err(SimError::InfeasibleTarget(format!(
            "h {} exceeds paper count {}",
            profile.h, profile.papers
        )));
    }
    if (profile.h as u64).pow(2) > profile.citations {
        return Err(SimError::InfeasibleTarget(format!(
            "h {} needs at least h^2 = {} citations, profile has {}",
            profile.h,
            (profile.h as u64).pow(2),
            profile.citations
        )));
    }
    if profile.citations > 0 && profile.h == 0 {
        return Err(SimError::InfeasibleTarget(
            "positive citations imply h >= 1".into(),
        ));
    }
    Ok(())
}

/// Bisects the scale for one exponent and records it in `best` if it is
/// closer to the profile (h first, then citations).
fn consider_exponent(
    profile: Profile,
    u: &[f64],
    cap: u64,
    hundredths: u32,
    buf: &mut Vec<u64>,
    best: &mut Option<((usize, f64), f64, f64)>,
) {
    let exponent = f64::from(hundredths) / 100.0;
    let target = profile.citations as f64;
    let (mut lo, mut hi) = (1e-12f64.ln(), (cap as f64 + 1.0).ln());
    for _ in 0..SCALE_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        pareto_fill(u, exponent, mid.exp(), cap, buf);
        if (buf.iter().sum::<u64>() as f64) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // both bracket ends are candidates; keep the closer total
    let mut pick = None;
    for ln_s in [lo, hi] {
        pareto_fill(u, exponent, ln_s.exp(), cap, buf);
        let err = (buf.iter().sum::<u64>() as f64 - target).abs() / target;
        if pick.is_none_or(|(_, e, _)| err < e) {
            pick = Some((ln_s.exp(), err, h_index_of(buf)));
        }
    }
    let (scale, err, h) = pick.expect("two candidates");
    let key = (h.abs_diff(profile.h), err);
    if best.is_none_or(|(b, _, _)| key.0 < b.0 || (key.0 == b.0 && key.1 < b.1)) {
        *best = Some((key, exponent, scale));
    }
}

/// Searches `(base_exponent, count_scale)` so that this seed's fair counts
/// reproduce the profile: papers exactly, citations within 2%, h within 1.
/// Grid over the exponent, bisection (in log space) on the scale; among grid
/// points the one closest in h wins, then the one closest in citations.
fn search_counts(profile: Profile, seed: u64, cap: u64) -> Result<(f64, f64), SimError> {
    check_profile(profile)?;
    if profile.citations == 0 {
        return Ok((2.0, 0.0));
    }
    if profile.citations > profile.papers as u64 * cap {
        return Err(SimError::InfeasibleTarget(format!(
            "{} citations over {} papers exceeds the count cap {cap}",
            profile.citations, profile.papers
        )));
    }
    let u = uniforms(profile.papers, seed);
    let mut buf = Vec::with_capacity(u.len());
    let mut best: Option<((usize, f64), f64, f64)> = None;
    let (lo, hi) = EXPONENT_RANGE;
    for step in (lo..=hi).step_by(COARSE_STEP as usize) {
        consider_exponent(profile, &u, cap, step, &mut buf, &mut best);
    }
    let centre = (best.expect("grid is nonempty").1 * 100.0).round() as u32;
    let fine_lo = centre.saturating_sub(COARSE_STEP).max(lo);
    let fine_hi = (centre + COARSE_STEP).min(hi);
    for step in (fine_lo..=fine_hi).step_by(FINE_STEP as usize) {
        consider_exponent(profile, &u, cap, step, &mut buf, &mut best);
    }
    let ((dh, err), exponent, scale) = best.expect("grid is nonempty");
    if dh > H_TOLERANCE || err > CITATION_TOLERANCE {
        return Err(SimError::InfeasibleTarget(format!(
            "closest fair corpus misses the profile by {dh} in h and {:.1}% in citations",
            err * 100.0
        )));
    }
    Ok((exponent, scale))
}

/// Multiples of the target h tried as the count cap, default first. A lower
/// cap moves citations from the head towards the h-core, which is what
/// profiles with a high h for their citation total need.
const CAP_MULTIPLES: [u64; 6] = [10, 8, 6, 5, 4, 3];

fn search_with_caps(profile: Profile, seed: u64) -> Result<(f64, f64, u64), SimError> {
    let mut last = None;
    for m in CAP_MULTIPLES {
        let cap = m * profile.h.max(1) as u64;
        match search_counts(profile, seed, cap) {
            Ok((exponent, scale)) => return Ok((exponent, scale, cap)),
            Err(e @ SimError::InfeasibleTarget(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one cap tried"))
}

/// Fair-strategy parameters whose corpus for `seed` matches `profile`.
pub fn calibrate(profile: Profile, seed: u64) -> Result<SimParams, SimError> {
    let (base_exponent, scale, cap) = search_with_caps(profile, seed)?;
    Ok(SimParams {
        n_papers: profile.papers,
        base_exponent,
        count_scale: Some(scale),
        c_cap: Some(cap),
        target_total_citations: Some(profile.citations),
        target_h: Some(profile.h),
        seed,
        ..SimParams::default()
    })
}

/// Calibrates the fair phase so that the corpus *after* injection under
/// `template.strategy` lands on `profile`. The pre-injection h is walked
/// down from the target while the pre-injection citation total is corrected
/// for the injected volume; the closest post-injection h wins.
pub fn calibrate_with_strategy(
    profile: Profile,
    template: &SimParams,
) -> Result<SimParams, SimError> {
    check_profile(profile)?;
    let base = SimParams {
        n_papers: profile.papers,
        target_total_citations: Some(profile.citations),
        target_h: Some(profile.h),
        ..template.clone()
    };
    if base.strategy == Strategy::Fair {
        let fair = calibrate(profile, base.seed)?;
        return Ok(SimParams {
            base_exponent: fair.base_exponent,
            count_scale: fair.count_scale,
            c_cap: fair.c_cap,
            ..base
        });
    }
    let mut best: Option<((usize, u64), SimParams)> = None;
    let mut visited = BTreeSet::new();
    let mut c_pre = profile.citations;
    let mut h_pre = profile.h;
    while visited.insert(h_pre) && visited.len() <= 16 {
        let mut last = None;
        for _ in 0..2 {
            let pre = Profile::new(profile.papers, c_pre, h_pre);
            let Ok((exponent, scale, cap)) = search_with_caps(pre, base.seed) else {
                break;
            };
            let params = SimParams {
                base_exponent: exponent,
                count_scale: Some(scale),
                c_cap: Some(cap),
                ..base.clone()
            };
            let counts = draft(&params)?.final_counts();
            let total: u64 = counts.iter().sum();
            let corrected = c_pre as i64 + profile.citations as i64 - total as i64;
            c_pre = corrected.max((h_pre * h_pre) as i64) as u64;
            last = Some((h_index_of(&counts), total, params));
        }
        let Some((h_post, total, params)) = last else {
            h_pre = h_pre.saturating_sub(1).max(1);
            continue;
        };
        let key = (
            h_post.abs_diff(profile.h),
            total.abs_diff(profile.citations),
        );
        if best.as_ref().is_none_or(|(b, _)| key < *b) {
            best = Some((key, params));
        }
        h_pre = match h_post.cmp(&profile.h) {
            std::cmp::Ordering::Equal => break,
            std::cmp::Ordering::Greater => h_pre.saturating_sub(h_post - profile.h).max(1),
            std::cmp::Ordering::Less => (h_pre + 1).min(profile.papers),
        };
    }
    match best {
        Some((_, params)) => Ok(params),
        None => Err(SimError::InfeasibleTarget(format!(
            "no pre-injection profile reaches {profile:?} under {:?}",
            base.strategy
        ))),
    }
}

fn resolve(params: &SimParams) -> Result<SimParams, SimError> {
    params.validate()?;
    if params.count_scale.is_some() {
        return Ok(params.clone());
    }
    let profile = params.profile().expect("validated");
    let fair = calibrate(profile, params.seed)?;
    Ok(SimParams {
        base_exponent: fair.base_exponent,
        count_scale: fair.count_scale,
        c_cap: fair.c_cap,
        ..params.clone()
    })
}

fn assign_authors(params: &SimParams, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    (0..params.n_papers)
        .map(|_| {
            let k = rng.gen_range(params.authors_per_paper.clone());
            let mut a = index::sample(rng, params.n_authors, k).into_vec();
            a.sort_unstable();
            a
        })
        .collect()
}

fn owned_papers(authors: &[Vec<usize>], n_authors: usize) -> Vec<Vec<usize>> {
    let mut own = vec![Vec::new(); n_authors];
    for (p, list) in authors.iter().enumerate() {
        for &a in list {
            own[a].push(p);
        }
    }
    own
}

fn random_self(own: &[Vec<usize>], budget: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (a, papers) in own.iter().enumerate() {
        if papers.is_empty() {
            continue;
        }
        for _ in 0..budget {
            out.push((papers[rng.gen_range(0..papers.len())], a));
        }
    }
    out
}

fn strategic_self(
    counts: &[u64],
    own: &[Vec<usize>],
    params: &SimParams,
    rng: &mut ChaCha8Rng,
) -> Vec<(usize, usize)> {
    let mut c = counts.to_vec();
    let mut h = h_index_of(&c);
    let mut remaining = vec![params.self_budget as i64; own.len()];
    let mut target: Vec<Option<u64>> = vec![None; c.len()];
    let mut out = Vec::new();
    let mut order: Vec<usize> = (0..own.len()).collect();
    for _round in 0..params.self_budget {
        order.shuffle(rng);
        for &a in &order {
            let lo = h.saturating_sub(params.band_below) as u64;
            let hi = (h + params.band_above) as u64;
            // papers that slipped below the band as h rose get a new target
            for &p in &own[a] {
                if target[p].is_some_and(|t| c[p] >= t) && c[p] < lo {
                    target[p] = Some(rng.gen_range(lo..=hi));
                }
            }
            let active: Vec<usize> = own[a]
                .iter()
                .copied()
                .filter(|&p| target[p].is_some_and(|t| c[p] < t))
                .collect();
            let paper = if !active.is_empty() {
                active[rng.gen_range(0..active.len())]
            } else {
                let floor = lo as i64 - remaining[a];
                let reach: Vec<usize> = own[a]
                    .iter()
                    .copied()
                    .filter(|&p| target[p].is_none() && c[p] < lo && c[p] as i64 >= floor)
                    .collect();
                let Some(top) = reach.iter().map(|&p| c[p]).max() else {
                    continue;
                };
                let tied: Vec<usize> = reach.into_iter().filter(|&p| c[p] == top).collect();
                let p = tied[rng.gen_range(0..tied.len())];
                target[p] = Some(rng.gen_range(lo..=hi));
                p
            };
            c[paper] += 1;
            remaining[a] -= 1;
            out.push((paper, a));
            while c.iter().filter(|&&v| v > h as u64).count() > h {
                h += 1;
            }
        }
    }
    out
}

/// Runs the count-level simulation without materialising documents.
pub fn draft(params: &SimParams) -> Result<Draft, SimError> {
    let params = resolve(params)?;
    let fair_counts = fair_counts(&params);
    let mut meta = rng(params.seed, STREAM_META);
    let authors = assign_authors(&params, &mut meta);
    let own = owned_papers(&authors, params.n_authors);
    let mut inject = rng(params.seed, STREAM_INJECT);
    let injections = match params.strategy {
        Strategy::Fair => Vec::new(),
        Strategy::RandomSelf => random_self(&own, params.self_budget, &mut inject),
        Strategy::StrategicSelf => strategic_self(&fair_counts, &own, &params, &mut inject),
    };
    Ok(Draft {
        fair_counts,
        authors,
        injections,
    })
}

fn author_id(a: usize) -> String {
    format!("A{a:04}")
}

pub fn paper_id(p: usize) -> String {
    format!("P{:05}", p + 1)
}

/// Generates a validated corpus and its ground truth.
pub fn generate(params: &SimParams) -> Result<(Corpus, GroundTruth), SimError> {
    let params = resolve(params)?;
    let d = draft(&params)?;
    let mut meta = rng(params.seed, STREAM_META);
    // replay the author draws so metadata follows them on the same stream
    let _ = assign_authors(&params, &mut meta);

    let mut pubs = Vec::with_capacity(params.n_papers);
    for (p, authors) in d.authors.iter().enumerate() {
        let year = meta.gen_range(FIRST_YEAR..=LAST_YEAR);
        let field = FIELD_CODES[meta.gen_range(0..FIELD_CODES.len())];
        let roll: f64 = meta.gen();
        let doc_type = if roll < 0.75 {
            DocType::Article
        } else if roll < 0.80 {
            DocType::Review
        } else {
            DocType::Conference
        };
        pubs.push(
            PublicationRecord::new(
                &paper_id(p),
                SIM_INSTITUTION,
                year,
                authors.iter().map(|&a| author_id(a)),
            )
            .with_cell(field, doc_type),
        );
    }

    let mut edges = Vec::new();
    let mut stubs = Vec::new();
    let mut n_stub = 0usize;
    for (p, &count) in d.fair_counts.iter().enumerate() {
        let cited = &pubs[p];
        for _ in 0..count {
            n_stub += 1;
            let id = format!("X{n_stub:07}");
            let mut stub =
                PublicationRecord::new(&id, EXTERNAL_INSTITUTION, cited.year, [format!("{id}-a")])
                    .external();
            stub.field_code = cited.field_code.clone();
            edges.push(CitationEdge::new(&id, &cited.pub_id));
            stubs.push(stub);
        }
    }
    let mut truth_edges = BTreeSet::new();
    let mut injected_ids = BTreeSet::new();
    for (n, &(p, a)) in d.injections.iter().enumerate() {
        let cited = &pubs[p];
        let id = format!("S{:07}", n + 1);
        let mut stub =
            PublicationRecord::new(&id, SIM_INSTITUTION, cited.year, [author_id(a)]).external();
        stub.field_code = cited.field_code.clone();
        let edge = CitationEdge::new(&id, &cited.pub_id);
        truth_edges.insert(edge.clone());
        injected_ids.insert(cited.pub_id.clone());
        edges.push(edge);
        stubs.push(stub);
    }
    pubs.extend(stubs);
    let corpus = Corpus::build(pubs, edges)
        .map_err(|e| SimError::InvalidParams(format!("generated corpus failed validation: {e}")))?;
    Ok((
        corpus,
        GroundTruth {
            injected_ids,
            injected_self_edges: truth_edges,
            pre_injection_h: h_index_of(&d.fair_counts),
        },
    ))
}

/// Writes `publications.csv`, `citations.csv` and `ground_truth.json`.
pub fn write_simulation(corpus: &Corpus, truth: &GroundTruth, dir: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    write_corpus(corpus, dir, Format::Csv)?;
    let mut json = serde_json::to_string_pretty(truth).map_err(std::io::Error::other)?;
    json.push('\n');
    std::fs::write(dir.join("ground_truth.json"), json)
}
