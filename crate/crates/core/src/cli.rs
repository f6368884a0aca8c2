//! Command-line front end. Data goes to stdout or files, diagnostics to
//! stderr. Exit codes: 0 success, 1 analysis failure, 2 usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::anomaly::analyze;
use crate::config::AnomalyConfig;
use crate::corpus::Corpus;
use crate::ingest::{load_corpus, IngestOptions};
use crate::metrics::{median_self_citation_rate, rank_citation_curve, summarize};
use crate::report::{canonical_json, emit_report, AnalysisReport, Provenance, ReportFormat};
use crate::simgen::{
    calibrate_with_strategy, generate, write_simulation, Profile, SimParams, Strategy,
};
use crate::svg::{render_curve_svg, SvgOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "rankcite",
    version,
    about = "Rank-citation curve audit of institutional h-indices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the full anomaly pipeline for one or all institutions.
    Analyze(AnalyzeArgs),
    /// Generate a synthetic corpus with ground truth.
    Simulate(SimulateArgs),
    /// Print the h-index and core/tail metrics of an institution.
    Metrics(MetricsArgs),
    /// Redraw the SVG plot from a saved JSON report.
    Render(RenderArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Publications file (.csv or .jsonl).
    #[arg(long)]
    pubs: PathBuf,
    /// Citation edges file (.csv or .jsonl).
    #[arg(long)]
    cites: PathBuf,
    /// Abort on the first malformed row.
    #[arg(long)]
    strict: bool,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(
        long,
        required_unless_present = "all_institutions",
        conflicts_with = "all_institutions"
    )]
    institution: Option<String>,
    /// Analyse every institution in parallel; `--out` names a directory.
    #[arg(long)]
    all_institutions: bool,
    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// JSON report path (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Markdown report path.
    #[arg(long)]
    md: Option<PathBuf>,
    /// SVG plot path.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Logarithmic citation axis in the plot.
    #[arg(long)]
    log_y: bool,
    /// Record this simulation seed in the report's provenance.
    #[arg(long)]
    seed: Option<u64>,
    /// Leave `generated_at` empty so output is byte-reproducible.
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// fair, random-self or strategic.
    #[arg(long, default_value = "fair")]
    strategy: Strategy,
    /// Target profile PAPERS,CITATIONS,H.
    #[arg(long)]
    profile: Profile,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    n_authors: Option<usize>,
    #[arg(long)]
    self_budget: Option<usize>,
    #[arg(long)]
    band_above: Option<usize>,
    #[arg(long)]
    band_below: Option<usize>,
}

#[derive(Debug, Args)]
struct MetricsArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    institution: String,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RenderArgs {
    /// JSON report written by `analyze`.
    #[arg(long)]
    report: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    log_y: bool,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Failure(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Failure(_) => EXIT_FAILURE,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Failure(m) => m,
        }
    }
}

fn fail(e: impl std::fmt::Display) -> CliError {
    CliError::Failure(e.to_string())
}

fn io_fail(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Failure(format!("{}: {e}", path.display()))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Analyze(a) => cmd_analyze(a, stdout, stderr),
        Command::Simulate(a) => cmd_simulate(a, stdout),
        Command::Metrics(a) => cmd_metrics(a, stdout, stderr),
        Command::Render(a) => cmd_render(a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.code()
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<AnomalyConfig, CliError> {
    match path {
        None => Ok(AnomalyConfig::default()),
        Some(p) => AnomalyConfig::from_file(p)
            .map_err(|e| CliError::Usage(format!("{}: {e}", p.display()))),
    }
}

fn load(input: &InputArgs, stderr: &mut dyn Write) -> Result<Corpus, CliError> {
    let opts = IngestOptions {
        strict: input.strict,
        ..IngestOptions::default()
    };
    for path in [&input.pubs, &input.cites] {
        std::fs::metadata(path).map_err(io_fail(path))?;
    }
    let (corpus, report) = load_corpus(&input.pubs, &input.cites, &opts).map_err(fail)?;
    if !report.rejected.is_empty() {
        let _ = writeln!(stderr, "warning: {} rows rejected", report.rejected.len());
        for r in report.rejected.iter().take(10) {
            let _ = writeln!(stderr, "  line {}: {:?}: {}", r.line, r.code, r.message);
        }
    }
    for w in &report.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    Ok(corpus)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(io_fail(path))
}

fn file_stem_for(inst: &str) -> String {
    inst.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "._-".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn build_report(
    corpus: &Corpus,
    inst: &str,
    cfg: &AnomalyConfig,
    provenance: &Provenance,
    stamp: bool,
) -> Result<AnalysisReport, CliError> {
    let analysis = analyze(corpus, inst, cfg).map_err(fail)?;
    let report = AnalysisReport::new(&analysis, cfg, provenance.clone());
    Ok(if stamp { report.stamped() } else { report })
}

fn svg_of(report: &AnalysisReport, log_y: bool) -> Result<String, CliError> {
    let opts = SvgOptions {
        log_y,
        title: Some(report.inst_id.clone()),
        ..SvgOptions::default()
    };
    render_curve_svg(
        &report.curve,
        report.baseline.as_ref(),
        report.verdict.hump.as_ref(),
        &opts,
    )
    .map_err(fail)
}

fn cmd_analyze(
    a: AnalyzeArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let cfg = load_config(a.config.as_deref())?;
    let corpus = load(&a.input, stderr)?;
    let mut provenance = Provenance::for_files(&[&a.input.pubs, &a.input.cites]).map_err(fail)?;
    provenance.seed = a.seed;
    let stamp = !a.no_timestamp;

    if a.all_institutions {
        let dir = a
            .out
            .as_deref()
            .ok_or_else(|| CliError::Usage("--all-institutions needs --out DIR".into()))?;
        std::fs::create_dir_all(dir).map_err(io_fail(dir))?;
        let insts = corpus.institutions();
        let reports: Vec<Result<AnalysisReport, CliError>> = insts
            .par_iter()
            .map(|inst| build_report(&corpus, inst, &cfg, &provenance, stamp))
            .collect();
        let mut failed = 0;
        for (inst, r) in insts.iter().zip(reports) {
            match r {
                Ok(report) => {
                    let stem = dir.join(file_stem_for(inst));
                    write_file(
                        &stem.with_extension("json"),
                        &emit_report(&report, ReportFormat::Json),
                    )?;
                    write_file(
                        &stem.with_extension("md"),
                        &emit_report(&report, ReportFormat::Markdown),
                    )?;
                    write_file(
                        &stem.with_extension("svg"),
                        svg_of(&report, a.log_y)?.as_bytes(),
                    )?;
                    let _ = writeln!(
                        stdout,
                        "{}\t{}\t{}\t{:.3}",
                        inst,
                        report.metrics.h_index,
                        report.verdict.level.as_str(),
                        report.verdict.score
                    );
                }
                Err(e) => {
                    failed += 1;
                    let _ = writeln!(stderr, "error: {inst}: {}", e.message());
                }
            }
        }
        return if failed == 0 {
            Ok(())
        } else {
            Err(CliError::Failure(format!("{failed} institutions failed")))
        };
    }

    let inst = a
        .institution
        .as_deref()
        .expect("clap enforces --institution");
    let report = build_report(&corpus, inst, &cfg, &provenance, stamp)?;
    let json = emit_report(&report, ReportFormat::Json);
    match &a.out {
        Some(path) => write_file(path, &json)?,
        None => stdout.write_all(&json).map_err(fail)?,
    }
    if let Some(path) = &a.md {
        write_file(path, &emit_report(&report, ReportFormat::Markdown))?;
    }
    if let Some(path) = &a.svg {
        write_file(path, svg_of(&report, a.log_y)?.as_bytes())?;
    }
    Ok(())
}

fn cmd_simulate(a: SimulateArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let d = SimParams::default();
    let template = SimParams {
        strategy: a.strategy,
        seed: a.seed,
        n_authors: a.n_authors.unwrap_or(d.n_authors),
        self_budget: a.self_budget.unwrap_or(d.self_budget),
        band_above: a.band_above.unwrap_or(d.band_above),
        band_below: a.band_below.unwrap_or(d.band_below),
        ..d
    };
    let params = calibrate_with_strategy(a.profile, &template).map_err(fail)?;
    let (corpus, truth) = generate(&params).map_err(fail)?;
    write_simulation(&corpus, &truth, &a.out).map_err(io_fail(&a.out))?;
    stdout
        .write_all(canonical_json(&params).as_bytes())
        .map_err(fail)
}

fn cmd_metrics(
    a: MetricsArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let cfg = load_config(a.config.as_deref())?;
    let corpus = load(&a.input, stderr)?;
    let curve = rank_citation_curve(&corpus, &a.institution).map_err(fail)?;
    let out = serde_json::json!({
        "inst_id": a.institution,
        "metrics": summarize(&curve),
        "median_self_citation_rate": median_self_citation_rate(&corpus, &a.institution, cfg.self_citation_mode),
    });
    stdout
        .write_all(canonical_json(&out).as_bytes())
        .map_err(fail)
}

fn cmd_render(a: RenderArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&a.report).map_err(io_fail(&a.report))?;
    let report = AnalysisReport::from_json(&text)
        .map_err(|e| CliError::Failure(format!("{}: not a report: {e}", a.report.display())))?;
    write_file(&a.out, svg_of(&report, a.log_y)?.as_bytes())
}
