#![allow(dead_code)]

use rankcite::corpus::{CitationEdge, Corpus, DocType, PublicationRecord};
use rankcite::simgen::{Profile, SimParams, Strategy};

pub const KREMENCHUK: Profile = Profile {
    papers: 939,
    citations: 6205,
    h: 40,
};
pub const DNIPRO: Profile = Profile {
    papers: 1928,
    citations: 7767,
    h: 36,
};

/// Strategic template aimed at ranks [h, h + 5].
pub fn kremenchuk_strategic(seed: u64) -> SimParams {
    SimParams {
        strategy: Strategy::StrategicSelf,
        n_authors: 6,
        self_budget: 145,
        band_below: 0,
        band_above: 5,
        seed,
        ..SimParams::default()
    }
}

/// Strategic template aimed at ranks [h - 2, h + 5].
pub fn dnipro_strategic(seed: u64) -> SimParams {
    SimParams {
        strategy: Strategy::StrategicSelf,
        n_authors: 10,
        self_budget: 133,
        band_below: 2,
        band_above: 5,
        seed,
        ..SimParams::default()
    }
}

/// `targets` target publications cited by `citing` distinct documents, of
/// which the first `self_docs` share an author with a target they cite.
/// Every third document also cites a second target, so the union over
/// targets is exercised.
pub fn self_citation_fixture(
    targets: usize,
    citing: usize,
    self_docs: usize,
) -> (Corpus, Vec<String>) {
    let target_ids: Vec<String> = (0..targets).map(|t| format!("T{t:03}")).collect();
    let mut pubs: Vec<PublicationRecord> = target_ids
        .iter()
        .enumerate()
        .map(|(t, id)| {
            PublicationRecord::new(id, "U", 2015, [format!("u{}", t % 6), format!("v{t}")])
        })
        .collect();
    let mut edges = Vec::new();
    for k in 0..citing {
        let id = format!("D{k:04}");
        let first = k % targets;
        let author = if k < self_docs {
            format!("u{}", first % 6)
        } else {
            format!("ext{k}")
        };
        pubs.push(PublicationRecord::new(&id, "EXT", 2016, [author]).external());
        edges.push(CitationEdge::new(&id, &target_ids[first]));
        let second = (k * 7 + 1) % targets;
        if k % 3 == 0 && second != first {
            edges.push(CitationEdge::new(&id, &target_ids[second]));
        }
    }
    (Corpus::build(pubs, edges).unwrap(), target_ids)
}

/// One FWCI cell of `cell_size` publications holding `cell_total`
/// citations, `members` of which carry `member_citations` each. Returns the
/// corpus and the member ids.
pub fn fwci_fixture(
    cell_size: usize,
    cell_total: u64,
    members: usize,
    member_citations: u64,
) -> (Corpus, Vec<String>) {
    let others = cell_size - members;
    let rest = cell_total - members as u64 * member_citations;
    let mut counts = vec![member_citations; members];
    counts.extend(
        (0..others).map(|i| rest / others as u64 + u64::from((i as u64) < rest % others as u64)),
    );
    let mut pubs = Vec::new();
    let mut edges = Vec::new();
    let mut ids = Vec::new();
    let mut stub = 0;
    for (p, &c) in counts.iter().enumerate() {
        let id = format!("F{p:03}");
        pubs.push(
            PublicationRecord::new(&id, "U", 2018, [format!("a{p}")])
                .with_cell("2200", DocType::Article),
        );
        for _ in 0..c {
            stub += 1;
            let sid = format!("Y{stub:05}");
            pubs.push(PublicationRecord::new(&sid, "EXT", 2019, [format!("y{stub}")]).external());
            edges.push(CitationEdge::new(&sid, &id));
        }
        if p < members {
            ids.push(id);
        }
    }
    (Corpus::build(pubs, edges).unwrap(), ids)
}
