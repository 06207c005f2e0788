use std::process::Command;

use proptest::prelude::*;
use supertrace_lab::report::{from_json, to_csv, to_json, to_text};
use supertrace_lab::*;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_supertrace-lab"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn gauss_bonnet_suite_has_seven_passing_cases() {
    let out = run_suite("gauss-bonnet", &Config::default()).unwrap();
    assert_eq!(out.reports.len(), 7);
    assert!(out.reports.iter().all(|r| r.pass), "{:?}", out.reports);
    let mut expected: Vec<i64> = out
        .reports
        .iter()
        .map(|r| match r.expected {
            Expected::Integer(i) => i,
            Expected::Real(x) => panic!("non-integer Euler characteristic {x}"),
        })
        .collect();
    expected.sort_unstable();
    assert_eq!(expected, vec![0, 1, 1, 1, 2, 2, 2]);
    assert!(out.reports.iter().all(|r| r.abs_err <= 1e-8 && r.runtime_ms == 0));
}

#[test]
fn algebra_cases_are_exact() {
    let out = run_suite("algebra", &Config::default()).unwrap();
    assert!(!out.reports.is_empty());
    for r in &out.reports {
        assert!(r.pass && r.abs_err == 0.0, "{r:?}");
    }
}

#[test]
fn contraction_suite_passes() {
    let out = run_suite("contraction", &Config::default()).unwrap();
    assert_eq!(out.reports.len(), 9);
    assert!(out.reports.iter().all(|r| r.pass));
}

#[test]
fn invariance_suite_and_table() {
    let out = run_suite("invariance", &Config::default()).unwrap();
    assert!(out.reports.iter().all(|r| r.pass), "{:?}", out.reports.iter().filter(|r| !r.pass).collect::<Vec<_>>());
    let k42 = out.reports.iter().find(|r| r.case == "kernel/k=4,m=2").unwrap();
    assert_eq!((k42.expected, k42.actual), (Expected::Integer(2), 2.0));
    let table = &out.tables[0];
    assert!(table.lines().next().unwrap().contains("theta_certified"));
    assert_eq!(table.lines().count(), 17);
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let err = run_suite("nope", &Config::default()).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    let (code, _, stderr) = run(&["--suite", "nope"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("unknown suite"));
    assert_eq!(run(&["--bogus"]).0, 2);
    assert_eq!(run(&["--suite", "gauss-bonnet", "--json", "--csv"]).0, 2);
    assert_eq!(run(&["--suite", "gauss-bonnet", "--geometry", "klein"]).0, 2);
    assert_eq!(run(&["--suite", "spectral", "--phi", "x=1"]).0, 2);
    assert_eq!(run(&["--suite", "spectral", "--tmin", "0.5", "--tmax", "0.1"]).0, 2);
}

#[test]
fn unwritable_output_is_an_io_error() {
    let (code, _, stderr) = run(&["--suite", "gauss-bonnet", "--json", "--out", "/nonexistent-dir/report.json"]);
    assert_eq!(code, 3);
    assert!(stderr.contains("i/o"));
}

#[test]
fn failures_exit_with_one() {
    // A coarse grid cannot reproduce the free coefficients to tolerance.
    let (code, stdout, _) = run(&["--suite", "spectral", "--grid", "64", "--text"]);
    assert_eq!(code, 1);
    assert!(stdout.contains("FAIL spectral/free/a0"));
}

#[test]
fn json_output_roundtrips_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let (code, _, _) = run(&["--suite", "heat-crosscheck", "--json", "--seed", "0x1234", "--out", p.to_str().unwrap()]);
        assert!(code == 0 || code == 1);
    }
    let ta = std::fs::read(&a).unwrap();
    assert_eq!(ta, std::fs::read(&b).unwrap());
    let reports = from_json(std::str::from_utf8(&ta).unwrap()).unwrap();
    assert!(reports.iter().all(|r| r.seed == 0x1234));
    assert_eq!(to_json(&reports).unwrap().as_bytes(), &ta[..]);
    let mut sorted = reports.clone();
    sorted.sort_by(|x, y| (&x.suite, &x.case).cmp(&(&y.suite, &y.case)));
    assert_eq!(sorted, reports);
}

#[test]
fn csv_header_and_rows() {
    let (code, stdout, _) = run(&["--suite", "gauss-bonnet", "--csv"]);
    assert_eq!(code, 0);
    let mut lines = stdout.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER);
    assert_eq!(CSV_HEADER, "suite,case,expected,actual,abs_err,rel_err,tolerance,pass,runtime_ms,seed");
    assert_eq!(lines.count(), 7);
    let (_, again, _) = run(&["--suite", "gauss-bonnet", "--csv"]);
    assert_eq!(stdout, again);
}

#[test]
fn text_summary_line() {
    let (code, stdout, _) = run(&["--suite", "contraction"]);
    assert_eq!(code, 0);
    assert_eq!(stdout.lines().last().unwrap(), "9 passed / 9 total");
}

#[test]
fn help_documents_default_seed() {
    let (code, stdout, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("0x00D11A70"));
    assert!(stdout.contains(THREADS_ENV));
    assert_eq!(DEFAULT_SEED, 0x00D1_1A70);
}

#[test]
fn custom_geometry_adds_a_case() {
    let cfg = Config {
        geometry: Some("torus:m=2,side=3".parse().unwrap()),
        ..Config::default()
    };
    let out = run_suite("gauss-bonnet", &cfg).unwrap();
    let r = out.reports.iter().find(|r| r.case.starts_with("custom/")).unwrap();
    assert!(r.pass && r.expected == Expected::Integer(0), "{r:?}");
    for (spec, chi) in [("sphere:m=4,r=2", 2), ("disk:m=3", 1), ("hemisphere", 1), ("circle", 0), ("interval:length=2", 1)] {
        let g: GeometrySpec = spec.parse().unwrap();
        assert_eq!(g.euler_characteristic(), chi);
        let again: GeometrySpec = g.to_string().parse().unwrap();
        assert_eq!(again, g);
    }
    assert!("sphere:m=2,q=1".parse::<GeometrySpec>().is_err());
    assert!("disk:m=two".parse::<GeometrySpec>().is_err());
}

#[test]
fn thread_cap_from_environment() {
    let out = bin().env(THREADS_ENV, "1").args(["--suite", "algebra", "--csv"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let (_, reference, _) = run(&["--suite", "algebra", "--csv"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), reference);
    let bad = bin().env(THREADS_ENV, "zero").args(["--suite", "algebra"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn timings_are_opt_in() {
    let cfg = Config {
        timings: true,
        ..Config::default()
    };
    let out = run_suite("invariance", &cfg).unwrap();
    assert!(out.reports.iter().any(|r| r.runtime_ms > 0));
}

#[test]
fn tolerance_scale_multiplies() {
    let mut cfg = Config {
        tolerance_scale: 10.0,
        ..Config::default()
    };
    let out = run_suite("gauss-bonnet", &cfg).unwrap();
    assert!(out.reports.iter().all(|r| r.tolerance == 1e-7));
    cfg.tolerance_scale = -1.0;
    assert_eq!(run_suite("gauss-bonnet", &cfg).unwrap_err().exit_code(), 2);
}

#[test]
fn empty_reports_are_rejected() {
    assert!(emit_report(&[], &[], Format::Json, None).is_err());
}

fn report_strategy() -> impl Strategy<Value = VerificationReport> {
    (
        "[a-z-]{1,12}",
        "[a-z0-9=/,]{1,16}",
        prop_oneof![any::<i32>().prop_map(|i| Expected::Integer(i as i64)), (-1e6f64..1e6).prop_map(Expected::Real)],
        -1e6f64..1e6,
        0.0f64..1.0,
        prop_oneof![Just(Policy::Absolute), Just(Policy::Relative), Just(Policy::Either)],
        any::<u64>(),
    )
        .prop_map(|(suite, case, expected, actual, tol, policy, seed)| VerificationReport::new(&suite, case, expected, actual, tol, policy, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn pass_matches_policy(r in report_strategy()) {
        let e = r.expected.value();
        prop_assert_eq!(r.abs_err, (r.actual - e).abs());
        prop_assert!(r.pass == (r.abs_err <= r.tolerance) || r.pass == (r.rel_err <= r.tolerance));
        if r.pass {
            prop_assert!(r.abs_err <= r.tolerance || r.rel_err <= r.tolerance);
        }
    }

    #[test]
    fn json_roundtrip(rs in proptest::collection::vec(report_strategy(), 1..8)) {
        let text = to_json(&rs).unwrap();
        prop_assert_eq!(from_json(&text).unwrap(), rs);
    }

    #[test]
    fn csv_and_text_have_one_line_per_report(rs in proptest::collection::vec(report_strategy(), 1..8)) {
        let csv = to_csv(&rs).unwrap();
        let mut reader = csv::Reader::from_reader(csv.as_bytes());
        prop_assert_eq!(reader.records().count(), rs.len());
        let text = to_text(&rs, &[]);
        let passed = rs.iter().filter(|r| r.pass).count();
        let summary = format!("{passed} passed / {} total", rs.len());
        prop_assert_eq!(text.lines().last().unwrap(), summary.as_str());
    }
}
