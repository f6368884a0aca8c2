//! Reading and writing the publication and citation files.
//!
//! Two formats are supported. CSV files have an exact header row and keep
//! author sets in one field joined by `;`. JSONL files carry one object per
//! line with the same field names (`author_ids` may be an array or a
//! `;`-joined string).
//!
//! Bad rows are collected in an [`IngestReport`] with their line number and
//! never dropped silently. In strict mode any rejection fails the whole file.

use std::collections::{BTreeSet, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::corpus::{CitationEdge, Corpus, DocType, PublicationRecord, MAX_YEAR, MIN_YEAR};
use crate::error::IngestError;

pub const PUBLICATIONS_HEADER: [&str; 8] = [
    "pub_id",
    "inst_id",
    "year",
    "doc_type",
    "field_code",
    "author_ids",
    "external",
    "title",
];
pub const CITATIONS_HEADER: [&str; 2] = ["citing_id", "cited_id"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Jsonl,
}

impl Format {
    /// `.jsonl` / `.ndjson` select JSONL, anything else CSV.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("ndjson") => Format::Jsonl,
            _ => Format::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IngestOptions {
    /// Fail on the first rejected row instead of keeping the good ones.
    pub strict: bool,
    /// Reject records missing `doc_type` or `field_code` (needed for FWCI).
    pub require_fwci_fields: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RejectCode {
    MalformedRow,
    EmptyId,
    BadYear,
    BadDocType,
    BadFieldCode,
    BadExternal,
    EmptyAuthors,
    MissingFwciField,
    DuplicateId,
    DuplicateEdge,
    SelfLoop,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rejection {
    pub line: u64,
    pub code: RejectCode,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub records_read: usize,
    pub edges_read: usize,
    pub rejected: Vec<Rejection>,
    pub warnings: Vec<String>,
}

impl IngestReport {
    fn reject(&mut self, line: u64, code: RejectCode, message: impl Into<String>) {
        self.rejected.push(Rejection {
            line,
            code,
            message: message.into(),
        });
    }

    fn merge(&mut self, other: IngestReport) {
        self.records_read += other.records_read;
        self.edges_read += other.edges_read;
        self.rejected.extend(other.rejected);
        self.warnings.extend(other.warnings);
    }

    fn check_strict(&self, opts: &IngestOptions) -> Result<(), IngestError> {
        match self.rejected.first() {
            Some(first) if opts.strict => Err(IngestError::Rejected {
                count: self.rejected.len(),
                first_line: first.line,
                first_message: first.message.clone(),
            }),
            _ => Ok(()),
        }
    }
}

/// Raw field values of one publication row, before validation.
#[derive(Default)]
struct RawPublication {
    pub_id: String,
    inst_id: String,
    year: String,
    doc_type: String,
    field_code: String,
    author_ids: Vec<String>,
    external: String,
    title: String,
}

fn validate_publication(
    raw: RawPublication,
    line: u64,
    opts: &IngestOptions,
    report: &mut IngestReport,
) -> Option<PublicationRecord> {
    let pub_id = raw.pub_id.trim().to_string();
    if pub_id.is_empty() {
        report.reject(line, RejectCode::EmptyId, "empty pub_id");
        return None;
    }
    let inst_id = raw.inst_id.trim().to_string();
    if inst_id.is_empty() {
        report.reject(
            line,
            RejectCode::EmptyId,
            format!("{pub_id}: empty inst_id"),
        );
        return None;
    }
    let year = match raw.year.trim().parse::<i32>() {
        Ok(y) if (MIN_YEAR..=MAX_YEAR).contains(&y) => y,
        _ => {
            report.reject(
                line,
                RejectCode::BadYear,
                format!("{pub_id}: invalid year {:?}", raw.year),
            );
            return None;
        }
    };
    let doc_type = match raw.doc_type.trim() {
        "" => None,
        s => match s.parse::<DocType>() {
            Ok(d) => Some(d),
            Err(e) => {
                report.reject(line, RejectCode::BadDocType, format!("{pub_id}: {e}"));
                return None;
            }
        },
    };
    let field_code = match raw.field_code.trim() {
        "" => None,
        s if s.len() == 4 && s.bytes().all(|b| b.is_ascii_digit()) => Some(s.to_string()),
        s => {
            report.reject(
                line,
                RejectCode::BadFieldCode,
                format!("{pub_id}: field_code {s:?} is not a 4-digit code"),
            );
            return None;
        }
    };
    if doc_type.is_none() || field_code.is_none() {
        if opts.require_fwci_fields {
            report.reject(
                line,
                RejectCode::MissingFwciField,
                format!("{pub_id}: doc_type and field_code are required for FWCI"),
            );
            return None;
        }
        report.warnings.push(format!(
            "line {line}: {pub_id} lacks doc_type or field_code; it will not get an FWCI score"
        ));
    }
    let author_ids: BTreeSet<String> = raw
        .author_ids
        .iter()
        .map(|a| a.trim())
        .filter(|a| !a.is_empty())
        .map(str::to_string)
        .collect();
    if author_ids.is_empty() {
        report.reject(
            line,
            RejectCode::EmptyAuthors,
            format!("{pub_id}: author_ids is empty"),
        );
        return None;
    }
    let external = match raw.external.trim() {
        "" | "false" | "0" => false,
        "true" | "1" => true,
        s => {
            report.reject(
                line,
                RejectCode::BadExternal,
                format!("{pub_id}: external must be true/false, got {s:?}"),
            );
            return None;
        }
    };
    let title = Some(raw.title).filter(|t| !t.is_empty());
    Some(PublicationRecord {
        pub_id,
        inst_id,
        year,
        doc_type,
        field_code,
        author_ids,
        external,
        title,
    })
}

fn check_header(found: &csv::StringRecord, expected: &[&str]) -> Result<(), IngestError> {
    // a zero-byte file has no header and no rows
    let empty = found.iter().all(str::is_empty);
    if empty || found.iter().eq(expected.iter().copied()) {
        Ok(())
    } else {
        Err(IngestError::MalformedHeader {
            expected: expected.join(","),
            found: found.iter().collect::<Vec<_>>().join(","),
        })
    }
}

fn csv_reader<R: Read>(stream: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(stream)
}

/// Pulls the next CSV row, turning per-row decode problems into rejections.
/// Returns `Ok(None)` at end of input.
fn next_csv_row<R: Read>(
    rdr: &mut csv::Reader<R>,
    record: &mut csv::StringRecord,
    expected_len: usize,
    report: &mut IngestReport,
) -> Result<Option<Option<u64>>, IngestError> {
    match rdr.read_record(record) {
        Ok(false) => Ok(None),
        Ok(true) => {
            let line = record.position().map_or(0, |p| p.line());
            if record.len() != expected_len {
                report.reject(
                    line,
                    RejectCode::MalformedRow,
                    format!("expected {expected_len} fields, found {}", record.len()),
                );
                return Ok(Some(None));
            }
            Ok(Some(Some(line)))
        }
        Err(err) => {
            let line = err.position().map_or(0, |p| p.line());
            match err.into_kind() {
                csv::ErrorKind::Io(io) => Err(IngestError::Io(io)),
                other => {
                    report.reject(line, RejectCode::MalformedRow, format!("{other:?}"));
                    Ok(Some(None))
                }
            }
        }
    }
}

fn parse_publications_csv<R: Read>(
    stream: R,
    opts: &IngestOptions,
) -> Result<(Vec<PublicationRecord>, IngestReport), IngestError> {
    let mut rdr = csv_reader(stream);
    let header = match rdr.headers() {
        Ok(h) => h.clone(),
        Err(err) => match err.into_kind() {
            csv::ErrorKind::Io(io) => return Err(IngestError::Io(io)),
            other => {
                return Err(IngestError::MalformedHeader {
                    expected: PUBLICATIONS_HEADER.join(","),
                    found: format!("{other:?}"),
                })
            }
        },
    };
    check_header(&header, &PUBLICATIONS_HEADER)?;

    let mut report = IngestReport::default();
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    let mut row = csv::StringRecord::new();
    while let Some(line) = next_csv_row(&mut rdr, &mut row, PUBLICATIONS_HEADER.len(), &mut report)?
    {
        report.records_read += 1;
        let Some(line) = line else { continue };
        let raw = RawPublication {
            pub_id: row[0].to_string(),
            inst_id: row[1].to_string(),
            year: row[2].to_string(),
            doc_type: row[3].to_string(),
            field_code: row[4].to_string(),
            author_ids: row[5].split(';').map(str::to_string).collect(),
            external: row[6].to_string(),
            title: row[7].to_string(),
        };
        push_publication(raw, line, opts, &mut report, &mut seen, &mut records);
    }
    Ok((records, report))
}

fn push_publication(
    raw: RawPublication,
    line: u64,
    opts: &IngestOptions,
    report: &mut IngestReport,
    seen: &mut HashSet<String>,
    records: &mut Vec<PublicationRecord>,
) {
    if let Some(rec) = validate_publication(raw, line, opts, report) {
        if seen.insert(rec.pub_id.clone()) {
            records.push(rec);
        } else {
            report.reject(
                line,
                RejectCode::DuplicateId,
                format!("duplicate pub_id {:?}", rec.pub_id),
            );
        }
    }
}

fn json_string(obj: &serde_json::Map<String, Value>, key: &str) -> Result<String, String> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(String::new()),
        Some(Value::String(s)) => Ok(s.clone()),
        Some(Value::Number(n)) => Ok(n.to_string()),
        Some(Value::Bool(b)) => Ok(b.to_string()),
        Some(other) => Err(format!("field {key} has unsupported value {other}")),
    }
}

fn parse_publications_jsonl<R: Read>(
    stream: R,
    opts: &IngestOptions,
) -> Result<(Vec<PublicationRecord>, IngestReport), IngestError> {
    let mut report = IngestReport::default();
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in BufReader::new(stream).lines().enumerate() {
        let line_no = idx as u64 + 1;
        let text = line?;
        if text.trim().is_empty() {
            continue;
        }
        report.records_read += 1;
        let obj = match serde_json::from_str::<Value>(&text) {
            Ok(Value::Object(obj)) => obj,
            Ok(_) => {
                report.reject(line_no, RejectCode::MalformedRow, "expected a JSON object");
                continue;
            }
            Err(e) => {
                report.reject(line_no, RejectCode::MalformedRow, e.to_string());
                continue;
            }
        };
        let raw = (|| -> Result<RawPublication, String> {
            let author_ids = match obj.get("author_ids") {
                None | Some(Value::Null) => Vec::new(),
                Some(Value::String(s)) => s.split(';').map(str::to_string).collect(),
                Some(Value::Array(items)) => items
                    .iter()
                    .map(|v| match v {
                        Value::String(s) => Ok(s.clone()),
                        other => Err(format!("author id {other} is not a string")),
                    })
                    .collect::<Result<_, _>>()?,
                Some(other) => return Err(format!("author_ids has unsupported value {other}")),
            };
            Ok(RawPublication {
                pub_id: json_string(&obj, "pub_id")?,
                inst_id: json_string(&obj, "inst_id")?,
                year: json_string(&obj, "year")?,
                doc_type: json_string(&obj, "doc_type")?,
                field_code: json_string(&obj, "field_code")?,
                author_ids,
                external: json_string(&obj, "external")?,
                title: json_string(&obj, "title")?,
            })
        })();
        match raw {
            Ok(raw) => push_publication(raw, line_no, opts, &mut report, &mut seen, &mut records),
            Err(msg) => report.reject(line_no, RejectCode::MalformedRow, msg),
        }
    }
    Ok((records, report))
}

/// Parses a publications file.
pub fn parse_publications<R: Read>(
    stream: R,
    format: Format,
    opts: &IngestOptions,
) -> Result<(Vec<PublicationRecord>, IngestReport), IngestError> {
    let (records, report) = match format {
        Format::Csv => parse_publications_csv(stream, opts)?,
        Format::Jsonl => parse_publications_jsonl(stream, opts)?,
    };
    report.check_strict(opts)?;
    Ok((records, report))
}

struct EdgeCollector {
    edges: Vec<CitationEdge>,
    seen: HashSet<CitationEdge>,
}

impl EdgeCollector {
    fn push(&mut self, citing: &str, cited: &str, line: u64, report: &mut IngestReport) {
        let (citing, cited) = (citing.trim(), cited.trim());
        if citing.is_empty() || cited.is_empty() {
            report.reject(line, RejectCode::EmptyId, "empty citing_id or cited_id");
            return;
        }
        if citing == cited {
            report.reject(line, RejectCode::SelfLoop, format!("{citing} cites itself"));
            return;
        }
        let edge = CitationEdge::new(citing, cited);
        if self.seen.contains(&edge) {
            report.reject(
                line,
                RejectCode::DuplicateEdge,
                format!("duplicate edge {edge}"),
            );
            return;
        }
        self.seen.insert(edge.clone());
        self.edges.push(edge);
    }
}

/// Parses a citations file.
pub fn parse_citations<R: Read>(
    stream: R,
    format: Format,
    opts: &IngestOptions,
) -> Result<(Vec<CitationEdge>, IngestReport), IngestError> {
    let mut report = IngestReport::default();
    let mut out = EdgeCollector {
        edges: Vec::new(),
        seen: HashSet::new(),
    };
    match format {
        Format::Csv => {
            let mut rdr = csv_reader(stream);
            match rdr.headers() {
                Ok(h) => check_header(&h.clone(), &CITATIONS_HEADER)?,
                Err(err) => match err.into_kind() {
                    csv::ErrorKind::Io(io) => return Err(IngestError::Io(io)),
                    other => {
                        return Err(IngestError::MalformedHeader {
                            expected: CITATIONS_HEADER.join(","),
                            found: format!("{other:?}"),
                        })
                    }
                },
            }
            let mut row = csv::StringRecord::new();
            while let Some(line) =
                next_csv_row(&mut rdr, &mut row, CITATIONS_HEADER.len(), &mut report)?
            {
                report.edges_read += 1;
                if let Some(line) = line {
                    out.push(&row[0], &row[1], line, &mut report);
                }
            }
        }
        Format::Jsonl => {
            for (idx, line) in BufReader::new(stream).lines().enumerate() {
                let line_no = idx as u64 + 1;
                let text = line?;
                if text.trim().is_empty() {
                    continue;
                }
                report.edges_read += 1;
                let obj = match serde_json::from_str::<Value>(&text) {
                    Ok(Value::Object(obj)) => obj,
                    Ok(_) => {
                        report.reject(line_no, RejectCode::MalformedRow, "expected a JSON object");
                        continue;
                    }
                    Err(e) => {
                        report.reject(line_no, RejectCode::MalformedRow, e.to_string());
                        continue;
                    }
                };
                match (
                    json_string(&obj, "citing_id"),
                    json_string(&obj, "cited_id"),
                ) {
                    (Ok(a), Ok(b)) => out.push(&a, &b, line_no, &mut report),
                    (Err(m), _) | (_, Err(m)) => {
                        report.reject(line_no, RejectCode::MalformedRow, m)
                    }
                }
            }
        }
    }
    report.check_strict(opts)?;
    Ok((out.edges, report))
}

/// Reads both files and builds a corpus. Structural problems that survive
/// row-level validation (for example an edge pointing at an unknown
/// publication) surface as [`IngestError::Corpus`].
pub fn load_corpus(
    pubs: &Path,
    cites: &Path,
    opts: &IngestOptions,
) -> Result<(Corpus, IngestReport), IngestError> {
    let (records, mut report) =
        parse_publications(File::open(pubs)?, Format::from_path(pubs), opts)?;
    let (edges, edge_report) = parse_citations(File::open(cites)?, Format::from_path(cites), opts)?;
    report.merge(edge_report);
    let corpus = Corpus::build(records, edges)?;
    Ok((corpus, report))
}

fn publication_row(rec: &PublicationRecord) -> [String; 8] {
    [
        rec.pub_id.clone(),
        rec.inst_id.clone(),
        rec.year.to_string(),
        rec.doc_type
            .map(|d| d.as_str().to_string())
            .unwrap_or_default(),
        rec.field_code.clone().unwrap_or_default(),
        rec.author_ids.iter().cloned().collect::<Vec<_>>().join(";"),
        rec.external.to_string(),
        rec.title.clone().unwrap_or_default(),
    ]
}

/// Writes publications in the ingest format. Author ids must not contain `;`
/// when writing CSV.
pub fn write_publications<W: Write>(
    records: &[PublicationRecord],
    out: W,
    format: Format,
) -> std::io::Result<()> {
    match format {
        Format::Csv => {
            let mut wtr = csv::Writer::from_writer(out);
            wtr.write_record(PUBLICATIONS_HEADER)?;
            for rec in records {
                wtr.write_record(publication_row(rec))?;
            }
            wtr.flush()
        }
        Format::Jsonl => {
            let mut out = out;
            for rec in records {
                let v = serde_json::json!({
                    "pub_id": rec.pub_id,
                    "inst_id": rec.inst_id,
                    "year": rec.year,
                    "doc_type": rec.doc_type,
                    "field_code": rec.field_code,
                    "author_ids": rec.author_ids,
                    "external": rec.external,
                    "title": rec.title,
                });
                writeln!(out, "{v}")?;
            }
            out.flush()
        }
    }
}

pub fn write_citations<W: Write>(
    edges: &[CitationEdge],
    out: W,
    format: Format,
) -> std::io::Result<()> {
    match format {
        Format::Csv => {
            let mut wtr = csv::Writer::from_writer(out);
            wtr.write_record(CITATIONS_HEADER)?;
            for e in edges {
                wtr.write_record([&e.citing_id, &e.cited_id])?;
            }
            wtr.flush()
        }
        Format::Jsonl => {
            let mut out = out;
            for e in edges {
                writeln!(
                    out,
                    "{}",
                    serde_json::json!({"citing_id": e.citing_id, "cited_id": e.cited_id})
                )?;
            }
            out.flush()
        }
    }
}

/// Writes `publications.<ext>` and `citations.<ext>` into `dir`.
pub fn write_corpus(corpus: &Corpus, dir: &Path, format: Format) -> std::io::Result<()> {
    let ext = match format {
        Format::Csv => "csv",
        Format::Jsonl => "jsonl",
    };
    std::fs::create_dir_all(dir)?;
    let pubs = std::io::BufWriter::new(File::create(dir.join(format!("publications.{ext}")))?);
    write_publications(corpus.publications(), pubs, format)?;
    let cites = std::io::BufWriter::new(File::create(dir.join(format!("citations.{ext}")))?);
    write_citations(corpus.edges(), cites, format)
}
