use std::process::Command;

use geolen_cli::config::{RunConfig, SuiteConfig, SurfaceKind};
use geolen_cli::run_suite;
use geolen_cli::suite::{arclength_along_axis, build_surface};
use geolen_core::surface::punctured_torus_from_fn;
use geolen_core::Mobius;

#[test]
fn selection_limits_groups() {
    let mut s = SuiteConfig::all(false);
    s.operators = true;
    let r = run_suite(&RunConfig::default(), &s).unwrap();
    assert!(r.checks.iter().all(|c| c.group == "operators"));
    assert!(r.geodesics.is_empty() && r.resolvent.is_none());
    assert_eq!(r.lengths.len(), 3);
    // The stated upper bound is the single failure.
    let failed: Vec<_> = r.failed().iter().map(|c| c.check.clone()).collect();
    assert_eq!(failed, ["form_upper_stated"]);
    assert!(!r.pass);
    // Groups disabled in the config stay off.
    let mut c = RunConfig::default();
    c.suite.operators = false;
    assert!(run_suite(&c, &s).unwrap().checks.is_empty());
}

#[test]
fn arclength_matches_trace_length() {
    let s = punctured_torus_from_fn(1.3, 0.4).unwrap();
    for m in [s.a, s.b, s.a * s.b, s.a * s.a * s.b.inverse()] {
        let l = 2.0 * (m.trace().abs() / 2.0).acosh();
        assert!((arclength_along_axis(&m).unwrap() - l).abs() < 1e-10 * l);
    }
    let t = Mobius::new_unchecked(2.0, 0.0, 0.0, 0.5);
    assert!((arclength_along_axis(&t).unwrap() - 4f64.ln()).abs() < 1e-13);
    assert!((arclength_along_axis(&Mobius::translation(0.7)).unwrap() - 0.7).abs() < 1e-13);
    assert!(arclength_along_axis(&Mobius::new_unchecked(1.0, 1.0, 0.0, 1.0)).is_err());
}

#[test]
fn fenchel_nielsen_surface_from_config() {
    let mut c = RunConfig::default();
    c.surface.kind = SurfaceKind::FenchelNielsen;
    c.surface.l_alpha = 1.1;
    let s = build_surface(&c).unwrap();
    assert_eq!(s.fn_params, Some((1.1, c.surface.tau)));
    let mut sel = SuiteConfig::all(false);
    sel.first_variation = true;
    let r = run_suite(&c, &sel).unwrap();
    assert!(r.pass, "{:?}", r.failed());
    assert!((r.geodesic("A").unwrap().l_classical - 1.1).abs() < 1e-12);
}

#[test]
fn enumeration_cache_is_written_and_reused() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = RunConfig::default();
    c.truncation.cache = Some(dir.path().join("words.bin"));
    c.truncation.max_word_len = 6;
    let mut sel = SuiteConfig::all(false);
    sel.geometry = true;
    let first = run_suite(&c, &sel).unwrap();
    assert!(dir.path().join("words.bin").exists());
    let second = run_suite(&c, &sel).unwrap();
    assert_eq!(first.without_timings(), second.without_timings());
    assert!(first.pass, "{:?}", first.failed());
}

fn geolen(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_geolen"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let ok = geolen(&["length", "--out", out, "--seed", "3", "--max-word-len", "6"]);
    assert_eq!(
        ok.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&ok.stdout)
    );
    assert!(dir.path().join("report.json").exists());
    let ops = geolen(&["operator-test"]);
    assert_eq!(ops.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&ops.stdout).contains("FAIL operators"));
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[mesh]\ncellz = 3\n").unwrap();
    let bad = geolen(&["suite", "--config", cfg.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("did you mean `mesh.cells`"));
    let conv = geolen(&["length", "--convention", "euclidean"]);
    assert_eq!(conv.status.code(), Some(2));
}

#[test]
fn flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let r = geolen(&[
        "first-variation",
        "--convention",
        "riemannian",
        "--cells",
        "300",
        "--out",
        out,
    ]);
    assert_eq!(
        r.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&r.stdout)
    );
    let json = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    let report = geolen_cli::RunReport::from_json(&json).unwrap();
    assert_eq!(report.config.mesh.cells, 300);
    assert_eq!(report.config.convention.name(), "riemannian");
    assert!(dir.path().join("fd_vs_formula.svg").exists());
}
