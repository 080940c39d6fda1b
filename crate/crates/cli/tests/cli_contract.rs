use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tubegeom_cli::{run_all, Overrides, ReportRecord, Status, Suite};

fn tubegeom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tubegeom"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn records(out: &Output) -> Vec<ReportRecord> {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

#[test]
fn ma_expansion_defaults_pass() {
    let out = tubegeom(&["run", "--suite", "ma-expansion"]);
    assert_eq!(out.status.code(), Some(0));
    let recs = records(&out);
    let ids: Vec<&str> = recs.iter().map(|r| r.case.as_str()).collect();
    assert_eq!(
        ids,
        [
            "quartic-vanishing",
            "quartic-matching",
            "jet-residual-low-degree",
            "residual-slope"
        ]
    );
    assert!(recs.iter().all(|r| r.status == Status::Pass && r.ms == 0));
}

#[test]
fn unknown_suite_exits_two() {
    let out = tubegeom(&["run", "--suite", "no-such-suite"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown suite"));
    assert!(out.stdout.is_empty());
}

#[test]
fn invalid_overrides_exit_two() {
    for args in [
        &[
            "run",
            "--suite",
            "ma-expansion",
            "--tol.quartic-vanishing=0",
        ][..],
        &[
            "run",
            "--suite",
            "ma-expansion",
            "--tol.quartic-vanishing=-1e-3",
        ],
        &["run", "--suite", "ma-expansion", "--tol.not-a-case=1e-3"],
        &["run", "--suite", "nahm-roundtrip", "--sweep.pairs=0"],
        &["run", "--suite", "nahm-gauge", "--grid", "2"],
        &[
            "run",
            "--suite",
            "ma-expansion",
            "--context",
            "so7-nonsense",
        ],
        &["run", "--suite", "ma-expansion", "--format", "xml"],
        &["run"],
    ] {
        assert_eq!(tubegeom(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn tolerance_override_can_force_a_failure() {
    let out = tubegeom(&[
        "run",
        "--suite",
        "nahm-roundtrip",
        "--sweep.pairs=3",
        "--sweep.zero-cases=2",
        "--tol.roundtrip-error=1e-30",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let recs = records(&out);
    let failed: Vec<_> = recs.iter().filter(|r| r.status == Status::Fail).collect();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0].case, "roundtrip-error");
    assert!(failed[0].metric > failed[0].tol);
}

#[test]
fn full_run_is_byte_identical_for_a_fixed_seed() {
    let a = tubegeom(&["run", "--suite", "all", "--seed", "42"]);
    let b = tubegeom(&["run", "--suite", "all", "--seed", "42"]);
    assert_eq!(
        a.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&a.stderr)
    );
    assert_eq!(a.stdout, b.stdout);
    let recs = records(&a);
    let expected: usize = Suite::ALL.iter().map(|s| s.cases().len()).sum();
    assert_eq!(recs.len(), expected);
    let c = tubegeom(&["run", "--suite", "complexify-holomorphy", "--seed", "43"]);
    let same_suite: Vec<_> = recs
        .iter()
        .filter(|r| r.suite == "complexify-holomorphy")
        .cloned()
        .collect();
    assert_ne!(records(&c), same_suite);
}

#[test]
fn report_schema_has_the_documented_fields() {
    let out = tubegeom(&["run", "--suite", "kahler-curvature"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    for rec in v.as_array().unwrap() {
        let obj = rec.as_object().unwrap();
        let mut keys: Vec<&str> = obj.keys().map(String::as_str).collect();
        keys.sort();
        assert_eq!(
            keys,
            ["case", "metric", "ms", "note", "status", "suite", "tol"]
        );
        assert!(obj["metric"].is_f64() && obj["tol"].is_f64() && obj["ms"].is_u64());
    }
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn csv_outputs_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = tubegeom(&[
        "run",
        "--suite",
        "ma-expansion",
        "--suite",
        "kahler-curvature",
        "--format",
        "csv",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = read(&out_dir, "report.csv");
    assert!(report.starts_with("suite,case,status,metric,tol,ms,note\n"));
    assert_eq!(report.lines().count(), 1 + 8);
    assert_eq!(report, String::from_utf8(out.stdout).unwrap());

    let table = read(&out_dir, "curvature_table.csv");
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("i,j,plane,closed_form,oracle,abs_error"));
    assert_eq!(lines.count(), 15);

    let residuals = read(&out_dir, "residual_vs_eps.csv");
    let rows: Vec<(f64, f64)> = residuals
        .lines()
        .skip(1)
        .map(|l| {
            let (e, r) = l.split_once(',').unwrap();
            (e.parse().unwrap(), r.parse().unwrap())
        })
        .collect();
    assert!(residuals.starts_with("eps,sup_residual\n"));
    assert_eq!(rows.len(), 9);
    assert!(rows.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1));
}

#[test]
fn config_file_sections_and_flags_layer() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(
        &path,
        "steps = 1000\n[sweep]\npairs = 2\n\n[suite.nahm-roundtrip]\nseed = 5\n\
         [suite.nahm-roundtrip.sweep]\nzero-cases = 3\n",
    )
    .unwrap();
    let out = tubegeom(&[
        "run",
        "--suite",
        "nahm-roundtrip",
        "--config",
        path.to_str().unwrap(),
        "--sweep.pairs=4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let notes: Vec<String> = records(&out).into_iter().map(|r| r.note).collect();
    assert_eq!(notes[0], "4 pairs, 1000 steps");
    assert_eq!(notes[2], "3 elements");

    std::fs::write(&path, "grid = \"many\"\n").unwrap();
    let bad = tubegeom(&["run", "--suite", "all", "--config", path.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
    let missing = tubegeom(&["run", "--suite", "all", "--config", "/nonexistent/run.toml"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn contexts_without_a_split_skip_coset_cases() {
    let out = tubegeom(&[
        "run",
        "--suite",
        "complexify-holomorphy",
        "--context",
        "su2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let skipped: Vec<String> = records(&out)
        .into_iter()
        .filter(|r| r.status == Status::Skip)
        .map(|r| r.case)
        .collect();
    assert_eq!(
        skipped,
        ["psi-equivariance", "psi-isotropy", "cr-order-coset"]
    );
}

#[test]
fn timing_flag_records_milliseconds() {
    let out = tubegeom(&[
        "run",
        "--suite",
        "nahm-roundtrip",
        "--sweep.pairs=5",
        "--timing",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(records(&out).iter().any(|r| r.ms > 0));
}

#[test]
fn jet_dump_lists_the_sphere_potential() {
    let out = tubegeom(&[
        "jet",
        "--kappa",
        "1",
        "--dimension",
        "2",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rho = tubegeom::jet::RealJet::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(rho.nvars(), 4);
    // Fibre variables are y_k = 2 + k.
    assert_eq!(rho.coefficient_of(&[2, 2]), 1.0);
    assert!((rho.coefficient_of(&[0, 0, 3, 3]) + 1.0 / 3.0).abs() < 1e-15);

    let residual = tubegeom(&["jet", "--dimension", "3", "--residual"]);
    assert_eq!(residual.status.code(), Some(0));
    assert_eq!(
        tubegeom(&["jet", "--dimension", "1"]).status.code(),
        Some(2)
    );
}

#[test]
fn library_runs_match_the_registry() {
    let out = run_all(
        &[Suite::KahlerCurvature],
        None,
        &Overrides::default(),
        false,
    )
    .unwrap();
    let ids: Vec<&str> = out.records.iter().map(|r| r.case.as_str()).collect();
    let registry: Vec<&str> = Suite::KahlerCurvature
        .cases()
        .iter()
        .map(|c| c.id)
        .collect();
    assert_eq!(ids, registry);
    assert!(out.tables.curvature.is_some() && out.tables.residual_vs_eps.is_none());
    for r in &out.records {
        assert_eq!(r.status == Status::Fail, r.metric > r.tol);
    }
}
