use std::sync::OnceLock;

use geolen_cli::config::{RunConfig, SuiteConfig};
use geolen_cli::outputs::*;
use geolen_cli::report::RunReport;
use geolen_cli::run_suite;

fn report() -> &'static RunReport {
    static R: OnceLock<RunReport> = OnceLock::new();
    R.get_or_init(|| {
        let mut c = RunConfig::default();
        c.geodesics.words = vec!["A".into(), "AB".into()];
        let mut s = SuiteConfig::all(false);
        s.first_variation = true;
        s.second_variation = true;
        run_suite(&c, &s).unwrap()
    })
}

#[test]
fn csv_has_one_row_per_geodesic_check() {
    let r = report();
    let csv = checks_csv(r);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], CSV_COLUMNS.join(","));
    // Three checks per geodesic.
    assert_eq!(lines.len(), 1 + 2 * 3);
    for l in &lines[1..] {
        let cols: Vec<&str> = l.split(',').collect();
        assert_eq!(cols.len(), CSV_COLUMNS.len());
        assert_eq!(cols[0], "1");
        let l_cl: f64 = cols[4].parse().unwrap();
        let w = r.geodesic(cols[2]).unwrap();
        assert_eq!(l_cl, w.l_classical);
        let mantissa = cols[4].split('e').next().unwrap().replace(['.', '-'], "");
        assert_eq!(mantissa.len(), 17);
    }
}

#[test]
fn empty_report_gives_header_only() {
    let mut r = report().clone();
    r.checks.clear();
    assert_eq!(checks_csv(&r), format!("{}\n", CSV_COLUMNS.join(",")));
}

#[test]
fn outputs_are_written_and_overwritten_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let files = emit_outputs(report(), dir.path()).unwrap();
    let names: Vec<String> = files
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    for n in ["report.json", "checks.csv", "phi_A.svg", "a_profile_AB.svg"] {
        assert!(names.iter().any(|m| m == n), "{n} missing from {names:?}");
    }
    let svg = std::fs::read_to_string(dir.path().join("phi_A.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("</svg>"));
    let p = dir.path().join("checks.csv");
    std::fs::write(&p, "stale and much longer than the replacement").unwrap();
    write_atomic(&p, b"new").unwrap();
    assert_eq!(std::fs::read(&p).unwrap(), b"new");
    let leftovers = std::fs::read_dir(dir.path()).unwrap().count();
    assert_eq!(leftovers, files.len());
}

#[test]
fn json_round_trips() {
    let r = report();
    let back = RunReport::from_json(&r.to_json()).unwrap();
    assert_eq!(&back, r);
    assert!(summary(r).contains("checks, 0 failed"));
}

#[test]
fn scatter_plot_of_the_oracle() {
    let svg = scatter_plot("fd", &[(0.1, 0.1), (-0.6, -0.6)]).unwrap();
    assert_eq!(svg.matches("<circle").count(), 2);
    assert!(line_plot("flat", "t", "y", &[0.0, 1.0], &[2.0, 2.0]).is_ok());
}
