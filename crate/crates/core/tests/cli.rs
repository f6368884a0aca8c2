use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rankcite::anomaly::analyze;
use rankcite::report::AnalysisReport;
use rankcite::simgen::{calibrate_with_strategy, generate, Profile, SIM_INSTITUTION};
use rankcite::AnomalyConfig;

const BIN: &str = env!("CARGO_BIN_EXE_rankcite");

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn run(args: &[&str]) -> Output {
    run_in(Path::new("."), args)
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Compares against a golden file, or rewrites it when `UPDATE_GOLDEN` is set.
fn check_golden(name: &str, actual: &[u8]) {
    let path = golden_dir().join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(
        expected == actual,
        "{name} differs from golden copy; rerun with UPDATE_GOLDEN=1 if the change is intended"
    );
}

/// Small strategic corpus used by the golden and pipeline tests.
fn simulate_golden_inputs(out: &Path) -> Output {
    run(&[
        "simulate",
        "--strategy",
        "strategic",
        "--profile",
        "300,1500,18",
        "--seed",
        "1",
        "--n-authors",
        "6",
        "--self-budget",
        "60",
        "--out",
        out.to_str().unwrap(),
    ])
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&run(&[])), 2);
    assert_eq!(code(&run(&["analyze", "--pubs", "a.csv"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(
        code(&run(&["simulate", "--profile", "1,2", "--out", "x"])),
        2
    );
    let o = run(&[
        "analyze",
        "--pubs",
        "a",
        "--cites",
        "b",
        "--institution",
        "U",
        "--all-institutions",
    ]);
    assert_eq!(code(&o), 2);
    assert!(o.stdout.is_empty());
}

#[test]
fn help_and_version_exit_0() {
    let o = run(&["--help"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("analyze"));
    assert_eq!(code(&run(&["--version"])), 0);
}

#[test]
fn bad_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.conf"), "z_on = lots\n").unwrap();
    std::fs::write(dir.path().join("p.csv"), "").unwrap();
    std::fs::write(dir.path().join("c.csv"), "").unwrap();
    let o = run_in(
        dir.path(),
        &[
            "analyze",
            "--pubs",
            "p.csv",
            "--cites",
            "c.csv",
            "--institution",
            "U",
            "--config",
            "bad.conf",
        ],
    );
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}

#[test]
fn analysis_failures_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(
        dir.path(),
        &[
            "analyze",
            "--pubs",
            "missing.csv",
            "--cites",
            "c.csv",
            "--institution",
            "U",
        ],
    );
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("missing.csv"));

    simulate_golden_inputs(dir.path());
    let o = run_in(
        dir.path(),
        &[
            "analyze",
            "--pubs",
            "publications.csv",
            "--cites",
            "citations.csv",
            "--institution",
            "NOPE",
        ],
    );
    assert_eq!(code(&o), 1);
    assert!(o.stdout.is_empty());
    assert!(stderr(&o).contains("NOPE"));

    let o = run_in(
        dir.path(),
        &["render", "--report", "citations.csv", "--out", "x.svg"],
    );
    assert_eq!(code(&o), 1);
}

#[test]
fn strict_mode_rejects_malformed_rows() {
    let dir = tempfile::tempdir().unwrap();
    let pubs = "pub_id,inst_id,year,doc_type,field_code,author_ids,external,title\n\
                A,U,2010,article,1700,a1,false,\n\
                B,U,notayear,article,1700,a2,false,\n\
                X,EXT,2011,,,x1,true,\n";
    std::fs::write(dir.path().join("p.csv"), pubs).unwrap();
    std::fs::write(dir.path().join("c.csv"), "citing_id,cited_id\nX,A\n").unwrap();
    let args = [
        "metrics",
        "--pubs",
        "p.csv",
        "--cites",
        "c.csv",
        "--institution",
        "U",
    ];
    let lenient = run_in(dir.path(), &args);
    assert_eq!(code(&lenient), 0, "{}", stderr(&lenient));
    assert!(stderr(&lenient).contains("1 rows rejected"));
    let json: serde_json::Value = serde_json::from_slice(&lenient.stdout).unwrap();
    assert_eq!(json["metrics"]["papers"], 1);
    assert_eq!(json["metrics"]["h_index"], 1);

    let mut strict = args.to_vec();
    strict.push("--strict");
    assert_eq!(code(&run_in(dir.path(), &strict)), 1);
}

#[test]
fn simulate_then_analyze_matches_in_process_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let o = simulate_golden_inputs(dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for f in ["publications.csv", "citations.csv", "ground_truth.json"] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
    let o = run_in(
        dir.path(),
        &[
            "analyze",
            "--pubs",
            "publications.csv",
            "--cites",
            "citations.csv",
            "--institution",
            SIM_INSTITUTION,
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let from_cli = AnalysisReport::from_json(std::str::from_utf8(&o.stdout).unwrap()).unwrap();
    assert!(from_cli.generated_at.is_some());

    let template = rankcite::SimParams {
        strategy: rankcite::Strategy::StrategicSelf,
        seed: 1,
        n_authors: 6,
        self_budget: 60,
        ..rankcite::SimParams::default()
    };
    let params = calibrate_with_strategy(Profile::new(300, 1500, 18), &template).unwrap();
    let (corpus, _) = generate(&params).unwrap();
    let cfg = AnomalyConfig::default();
    let direct = analyze(&corpus, SIM_INSTITUTION, &cfg).unwrap();
    assert_eq!(from_cli.verdict, direct.verdict);
    assert_eq!(from_cli.curve, direct.curve);
    assert_eq!(from_cli.baseline, direct.fit);
}

#[test]
fn golden_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = simulate_golden_inputs(dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    check_golden(
        "publications.csv",
        &std::fs::read(dir.path().join("publications.csv")).unwrap(),
    );
    check_golden(
        "citations.csv",
        &std::fs::read(dir.path().join("citations.csv")).unwrap(),
    );

    // analyse the checked-in inputs with relative paths so provenance is stable
    let out = tempfile::tempdir().unwrap();
    let md = out.path().join("report.md");
    let svg = out.path().join("curve.svg");
    let o = run_in(
        &golden_dir(),
        &[
            "analyze",
            "--pubs",
            "publications.csv",
            "--cites",
            "citations.csv",
            "--institution",
            SIM_INSTITUTION,
            "--no-timestamp",
            "--md",
            md.to_str().unwrap(),
            "--svg",
            svg.to_str().unwrap(),
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    check_golden("report.json", &o.stdout);
    check_golden("report.md", &std::fs::read(&md).unwrap());
    let svg_bytes = std::fs::read(&svg).unwrap();
    check_golden("curve.svg", &svg_bytes);

    // a second run is byte-identical, and render redraws the same plot
    let again = run_in(
        &golden_dir(),
        &[
            "analyze",
            "--pubs",
            "publications.csv",
            "--cites",
            "citations.csv",
            "--institution",
            SIM_INSTITUTION,
            "--no-timestamp",
        ],
    );
    assert_eq!(again.stdout, o.stdout);
    let report = out.path().join("report.json");
    std::fs::write(&report, &o.stdout).unwrap();
    let redrawn = out.path().join("redrawn.svg");
    let r = run(&[
        "render",
        "--report",
        report.to_str().unwrap(),
        "--out",
        redrawn.to_str().unwrap(),
    ]);
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    assert_eq!(std::fs::read(&redrawn).unwrap(), svg_bytes);
}

#[test]
fn all_institutions_writes_one_report_each() {
    let dir = tempfile::tempdir().unwrap();
    let pubs = "pub_id,inst_id,year,doc_type,field_code,author_ids,external,title\n\
                A,U1,2010,article,1700,a1,false,\n\
                B,U1,2010,article,1700,a2,false,\n\
                C,U/2,2011,review,2200,a3,false,\n\
                X,EXT,2011,,,x1,true,\n";
    std::fs::write(dir.path().join("p.csv"), pubs).unwrap();
    std::fs::write(
        dir.path().join("c.csv"),
        "citing_id,cited_id\nX,A\nX,C\nA,B\n",
    )
    .unwrap();
    let o = run_in(
        dir.path(),
        &[
            "analyze",
            "--pubs",
            "p.csv",
            "--cites",
            "c.csv",
            "--all-institutions",
            "--out",
            "reports",
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 2);
    assert!(stdout.contains("insufficient_data"));
    for stem in ["U1", "U_2"] {
        for ext in ["json", "md", "svg"] {
            assert!(
                dir.path().join(format!("reports/{stem}.{ext}")).exists(),
                "{stem}.{ext}"
            );
        }
    }
}
