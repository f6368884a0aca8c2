use std::collections::BTreeSet;

use proptest::prelude::*;
use rankcite::anomaly::{detect_hump, fit_baseline};
use rankcite::corpus::{CitationEdge, Corpus, DocType, PublicationRecord};
use rankcite::ingest::{load_corpus, write_corpus, Format, IngestOptions};
use rankcite::metrics::{core_tail_split, fwci, h_index_of, summarize};
use rankcite::{h_index, AnomalyConfig, RankCitationCurve};

fn brute_h(counts: &[u64]) -> usize {
    (0..=counts.len())
        .rev()
        .find(|&h| counts.iter().filter(|&&c| c >= h as u64).count() >= h)
        .unwrap_or(0)
}

fn sorted_desc(mut v: Vec<u64>) -> Vec<u64> {
    v.sort_unstable_by(|a, b| b.cmp(a));
    v
}

/// Noisy power-law curve, already sorted.
fn power_curve() -> impl Strategy<Value = Vec<u64>> {
    (
        60usize..400,
        50.0f64..2000.0,
        0.6f64..1.6,
        prop::collection::vec(0.7f64..1.3, 400),
    )
        .prop_map(|(n, a, b, noise)| {
            sorted_desc(
                (1..=n)
                    .map(|r| (a * (r as f64).powf(-b) * noise[r - 1]).floor() as u64)
                    .collect(),
            )
        })
}

/// Small random corpus: `U` publications in a few cells, external citers.
fn small_corpus() -> impl Strategy<Value = Corpus> {
    prop::collection::vec((0u8..3, 2015i32..2018, 0u8..3, 1u64..12, 1usize..4), 1..40).prop_map(
        |rows| {
            let mut pubs = Vec::new();
            let mut edges = Vec::new();
            for (i, &(field, year, dt, cites, authors)) in rows.iter().enumerate() {
                let id = format!("P{i:03}");
                let doc_type =
                    [DocType::Article, DocType::Review, DocType::Conference][dt as usize];
                pubs.push(
                    PublicationRecord::new(
                        &id,
                        "U",
                        year,
                        (0..authors).map(|a| format!("a{}", (i + a) % 7)),
                    )
                    .with_cell(&format!("{}", 1000 + field as u32 * 100), doc_type),
                );
                for k in 0..cites {
                    let cid = format!("C{i:03}-{k}");
                    let author = if k % 3 == 0 {
                        format!("a{}", i % 7)
                    } else {
                        format!("x{i}-{k}")
                    };
                    pubs.push(PublicationRecord::new(&cid, "EXT", year + 1, [author]).external());
                    edges.push(CitationEdge::new(&cid, &id));
                }
            }
            Corpus::build(pubs, edges).unwrap()
        },
    )
}

proptest! {
    #[test]
    fn h_matches_oracle(counts in prop::collection::vec(0u64..300, 0..300)) {
        prop_assert_eq!(h_index_of(&counts), brute_h(&counts));
        let curve = RankCitationCurve::from_citations(&counts);
        prop_assert_eq!(h_index(&curve), brute_h(&counts));
    }

    #[test]
    fn adding_citations_never_lowers_h(counts in prop::collection::vec(0u64..100, 1..200), idx in any::<prop::sample::Index>(), extra in 1u64..50) {
        let before = h_index_of(&counts);
        let mut more = counts.clone();
        let i = idx.index(more.len());
        more[i] += extra;
        prop_assert!(h_index_of(&more) >= before);
        more.push(extra);
        prop_assert!(h_index_of(&more) >= before);
    }

    #[test]
    fn h_and_curve_ignore_input_order(counts in prop::collection::vec(0u64..100, 0..200).prop_shuffle()) {
        let sorted = sorted_desc(counts.clone());
        prop_assert_eq!(h_index_of(&counts), h_index_of(&sorted));
        let curve = RankCitationCurve::from_citations(&counts);
        prop_assert_eq!(curve.citations(), sorted);
    }

    #[test]
    fn core_plus_tail_is_total(counts in prop::collection::vec(0u64..500, 0..300)) {
        let curve = RankCitationCurve::from_citations(&counts);
        let s = summarize(&curve);
        prop_assert_eq!(s.core_citations + s.tail_citations, s.total_citations);
        prop_assert_eq!(s.total_citations, counts.iter().sum::<u64>());
        prop_assert_eq!(s.h_core_size, s.h_index);
        let any_h = core_tail_split(&curve, counts.len() / 2);
        prop_assert_eq!(any_h.core_citations + any_h.tail_citations, s.total_citations);
    }

    #[test]
    fn fwci_is_normalized_under_full_coverage(corpus in small_corpus()) {
        let all: BTreeSet<String> = corpus.publications().iter().filter(|p| !p.external).map(|p| p.pub_id.clone()).collect();
        let result = fwci(&corpus, &all, 1).unwrap();
        prop_assert!(result.uncovered.is_empty());
        prop_assert!((result.set_mean - 1.0).abs() <= 1e-9, "mean {}", result.set_mean);
        for cell in &result.baseline_cells {
            prop_assert!(cell.expected > 0.0);
        }
    }

    #[test]
    fn raising_z_on_only_shrinks_the_hump(counts in power_curve(), bump in 5usize..30, lift in 1.2f64..3.0) {
        let mut counts = counts;
        let h = h_index_of(&counts);
        let lo = h.saturating_sub(bump / 2).max(1);
        for c in counts.iter_mut().skip(lo - 1).take(bump) {
            *c = (*c as f64 * lift) as u64;
        }
        let counts = sorted_desc(counts);
        let curve = RankCitationCurve::from_citations(&counts);
        let h = h_index(&curve);
        let cfg = AnomalyConfig::default();
        let Ok(fit) = fit_baseline(&curve, &cfg) else { return Ok(()) };
        let low = detect_hump(&curve, &fit, h, &AnomalyConfig { z_on: 1.5, ..cfg.clone() });
        let high = detect_hump(&curve, &fit, h, &AnomalyConfig { z_on: 2.5, ..cfg.clone() });
        if let Some(hi_hump) = high {
            let lo_hump = low.expect("a hump at a high threshold persists at a lower one");
            prop_assert!(lo_hump.rank_interval.0 <= hi_hump.rank_interval.0);
            prop_assert!(lo_hump.rank_interval.1 >= hi_hump.rank_interval.1);
            prop_assert!(lo_hump.excess_mass >= hi_hump.excess_mass);
        }
    }

    #[test]
    fn fit_ignores_the_excluded_window(counts in power_curve(), seeds in prop::collection::vec(0.0f64..1.0, 41)) {
        let cfg = AnomalyConfig::default();
        let curve = RankCitationCurve::from_citations(&counts);
        let Ok(fit) = fit_baseline(&curve, &cfg) else { return Ok(()) };
        let (wlo, whi) = fit.excluded_window;
        let whi = whi.min(counts.len());
        let h = h_index_of(&counts);
        // resample the window between its neighbours; ranks up to h stay at
        // or above h and the rest at or below it, so h cannot move
        let upper = if wlo > 1 { counts[wlo - 2] } else { counts[0] + 5 };
        let lower = counts.get(whi).copied().unwrap_or(0);
        let pick = |lo: u64, hi: u64, u: f64| lo + ((hi - lo) as f64 * u).round() as u64;
        let mut fresh: Vec<u64> = (wlo..=whi)
            .zip(&seeds)
            .map(|(r, &u)| if r <= h { pick(h as u64, upper, u) } else { pick(lower, h as u64, u) })
            .collect();
        fresh = sorted_desc(fresh);
        let mut changed = counts.clone();
        changed[wlo - 1..whi].copy_from_slice(&fresh);
        prop_assert_eq!(h_index_of(&changed), h);
        prop_assume!(fit.fitted_points >= 2);
        let refit = fit_baseline(&RankCitationCurve::from_citations(&changed), &cfg).unwrap();
        prop_assert_eq!(refit, fit);
    }

    #[test]
    fn corpus_round_trips_through_files(corpus in small_corpus(), jsonl in any::<bool>()) {
        let dir = tempfile::tempdir().unwrap();
        let (format, ext) = if jsonl { (Format::Jsonl, "jsonl") } else { (Format::Csv, "csv") };
        write_corpus(&corpus, dir.path(), format).unwrap();
        let (back, report) = load_corpus(
            &dir.path().join(format!("publications.{ext}")),
            &dir.path().join(format!("citations.{ext}")),
            &IngestOptions { strict: true, ..IngestOptions::default() },
        ).unwrap();
        prop_assert!(report.rejected.is_empty());
        prop_assert_eq!(back, corpus);
    }
}
