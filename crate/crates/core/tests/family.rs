use std::sync::{Arc, OnceLock};

use geolen_core::differentials::*;
use geolen_core::family::*;
use geolen_core::hyperbolic::NormConvention;
use geolen_core::surface::*;
use geolen_core::{Complex64, Error};

struct Fixture {
    l: f64,
    tau: f64,
    surface: Arc<FuchsianSurface>,
    mesh: QuadratureMesh,
    basis: Vec<Arc<dyn QuadDifferential>>,
}

fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let (l, tau) = (2.0 * 1.5f64.acosh(), 0.1);
        let surface = Arc::new(punctured_torus_from_fn(l, tau).unwrap());
        let mesh = surface.build_mesh(400, DEFAULT_Y_MAX).unwrap();
        let basis = basis_quadratic(&surface).unwrap();
        Fixture {
            l,
            tau,
            surface,
            mesh,
            basis,
        }
    })
}

fn word(s: &str) -> Word {
    s.parse().unwrap()
}

fn family(dir: FnDirection, conv: NormConvention) -> FnFamily {
    let f = fixture();
    FnFamily::new(f.l, f.tau, dir, conv).unwrap()
}

fn alpha(conv: NormConvention) -> ClosedGeodesic {
    geodesic_representative(&fixture().surface, &word("A"), 0, conv).unwrap()
}

fn coefficient(a: &HarmonicBeltrami) -> Complex64 {
    a.coefficients()[0]
}

#[test]
fn twist_projection_is_ramp_independent() {
    let f = fixture();
    let al = alpha(NormConvention::Hermitian);
    let w = default_half_width(al.l_cl);
    let project = |ramp| {
        let t = twist_beltrami_with(&f.surface, &al, w, ramp, 1.0).unwrap();
        coefficient(&t.project(&f.mesh, &f.basis).unwrap())
    };
    let (c1, c2) = (project(Ramp::Cosine), project(Ramp::Smootherstep));
    assert!((c1 - c2).norm() < 1e-3 * c1.norm(), "{c1} {c2}");
    // A narrower collar represents the same class.
    let t = twist_beltrami(&f.surface, &al, 0.5 * w).unwrap();
    let c3 = coefficient(&t.project(&f.mesh, &f.basis).unwrap());
    assert!((c1 - c3).norm() < 1e-3 * c1.norm(), "{c1} {c3}");
}

#[test]
fn collar_and_cocycle_agree() {
    let f = fixture();
    let al = alpha(NormConvention::Riemannian);
    let t = twist_beltrami(&f.surface, &al, default_half_width(al.l_cl)).unwrap();
    let collar = coefficient(&t.project(&f.mesh, &f.basis).unwrap());
    let fam = family(FnDirection::Twist, NormConvention::Riemannian);
    let cocycle = coefficient(&family_direction(&fam, &f.surface, &f.mesh, &f.basis).unwrap());
    assert!(
        (collar - cocycle).norm() < 1e-6 * cocycle.norm(),
        "{collar} {cocycle}"
    );
}

#[test]
fn zero_ramp_and_rate_scaling() {
    let f = fixture();
    let al = alpha(NormConvention::Hermitian);
    let w = default_half_width(al.l_cl);
    let zero = twist_beltrami_with(&f.surface, &al, w, Ramp::Zero, 1.0).unwrap();
    assert!(zero.sample.values.iter().all(|v| v.norm() == 0.0));
    assert!(zero.project(&f.mesh, &f.basis).unwrap().coefficients()[0].norm() == 0.0);
    let one = twist_beltrami_with(&f.surface, &al, w, Ramp::Cosine, 1.0).unwrap();
    let k = twist_beltrami_with(&f.surface, &al, w, Ramp::Cosine, -2.5).unwrap();
    let (c1, ck) = (
        coefficient(&one.project(&f.mesh, &f.basis).unwrap()),
        coefficient(&k.project(&f.mesh, &f.basis).unwrap()),
    );
    assert!((ck + 2.5 * c1).norm() < 1e-12 * c1.norm());
}

#[test]
fn collar_support_and_width_limit() {
    let f = fixture();
    let al = alpha(NormConvention::Hermitian);
    let bound = collar_bound(al.l_cl);
    assert!(((bound).sinh() * (al.l_cl / 2.0).sinh() - 1.0).abs() < 1e-12);
    let e = twist_beltrami(&f.surface, &al, 1.01 * bound).unwrap_err();
    assert!(matches!(e, Error::CollarTooWide { .. }));
    assert!(twist_beltrami(&f.surface, &al, 0.0).is_err());
    // Every node lies within the half-width of the axis.
    let w = default_half_width(al.l_cl);
    let t = twist_beltrami(&f.surface, &al, w).unwrap();
    let (e1, e2) = (al.axis.repelling, al.axis.attracting);
    for p in &t.sample.nodes {
        assert!(distance_to_geodesic(e1, e2, p.to_complex()) <= w + 1e-9);
    }
    let area: f64 = t.sample.weights.iter().sum();
    assert!((area - 2.0 * al.l_cl * w.sinh()).abs() < 1e-9 * area);
}

#[test]
fn core_length_derivatives() {
    for conv in [NormConvention::Hermitian, NormConvention::Riemannian] {
        let tw = fd_length_derivative(&family(FnDirection::Twist, conv), &word("A")).unwrap();
        assert!(tw.d1.abs() < 1e-8, "{tw:?}");
        let ln = fd_length_derivative(&family(FnDirection::Length, conv), &word("A")).unwrap();
        let expect = conv.length_from_classical(1.0);
        assert!((ln.d1 - expect).abs() < 1e-8, "{ln:?}");
    }
}

#[test]
fn fd_order_is_two() {
    for (dir, w) in [
        (FnDirection::Twist, "B"),
        (FnDirection::Twist, "AB"),
        (FnDirection::Length, "B"),
        (FnDirection::Length, "AAb"),
    ] {
        let d = fd_length_derivative(&family(dir, NormConvention::Hermitian), &word(w)).unwrap();
        let p = d.order_estimate.unwrap();
        assert!((1.8..=2.2).contains(&p), "{w} {p}");
    }
}

#[test]
fn coarse_steps_are_rejected() {
    let fam = family(FnDirection::Length, NormConvention::Riemannian)
        .with_step(1.5)
        .unwrap();
    assert!(matches!(
        fd_length_derivative(&fam, &word("AAb")),
        Err(Error::NonconvergentFd { .. })
    ));
    assert!(family(FnDirection::Twist, NormConvention::Riemannian)
        .with_step(0.0)
        .is_err());
    assert!(FnFamily::new(-1.0, 0.0, FnDirection::Twist, NormConvention::Hermitian).is_err());
}

#[test]
fn members_are_punctured_tori() {
    let fam = family(FnDirection::Twist, NormConvention::Hermitian);
    let m = fam.members().unwrap();
    assert_eq!(m.len(), 6);
    for (s, surface) in &m {
        assert!((surface.commutator().trace() + 2.0).abs() < 1e-8);
        assert!(fam.length(&word("B"), *s).is_ok());
    }
    let (a, b) = fam.generators(0.0);
    let (fa, fb) = (&fixture().surface.a, &fixture().surface.b);
    assert!(a.approx_eq_projective(fa, 1e-14) && b.approx_eq_projective(fb, 1e-14));
}

#[test]
fn gardiner_holds_in_both_conventions() {
    let f = fixture();
    for conv in [NormConvention::Hermitian, NormConvention::Riemannian] {
        for dir in [FnDirection::Twist, FnDirection::Length] {
            let fam = family(dir, conv);
            let a = family_direction(&fam, &f.surface, &f.mesh, &f.basis).unwrap();
            for w in ["A", "B", "AB", "AAb"] {
                let r = gardiner_check(&fam, &f.surface, &word(w), &a).unwrap();
                assert!(r.pass, "{r:?}");
            }
            if dir == FnDirection::Twist {
                let r = gardiner_check(&fam, &f.surface, &word("A"), &a).unwrap();
                assert!(r.formula.abs() < 1e-6 && r.fd.abs() < 1e-6);
            }
        }
    }
}

#[test]
fn reversing_the_family_flips_both_sides() {
    let f = fixture();
    let fam = family(FnDirection::Twist, NormConvention::Hermitian);
    let rev = fam.reversed();
    let (a, ar) = (
        family_direction(&fam, &f.surface, &f.mesh, &f.basis).unwrap(),
        family_direction(&rev, &f.surface, &f.mesh, &f.basis).unwrap(),
    );
    assert!((coefficient(&a) + coefficient(&ar)).norm() < 1e-9 * coefficient(&a).norm());
    let (r, rr) = (
        gardiner_check(&fam, &f.surface, &word("B"), &a).unwrap(),
        gardiner_check(&rev, &f.surface, &word("B"), &ar).unwrap(),
    );
    assert!((r.fd + rr.fd).abs() < 1e-9 && (r.formula + rr.formula).abs() < 1e-9);
    assert!(rr.pass);
}

#[test]
fn frozen_twist_derivative_on_the_symmetric_torus() {
    let l = 2.0 * 1.5f64.acosh();
    let fam = FnFamily::new(l, 0.0, FnDirection::Twist, NormConvention::Riemannian).unwrap();
    let d = fd_length_derivative(&fam, &word("B")).unwrap();
    assert!((d.d1 + 0.6).abs() < 1e-7, "{d:?}");
    let d_ab = fd_length_derivative(&fam, &word("AB")).unwrap();
    assert!((d_ab.d1 - 0.6).abs() < 1e-7, "{d_ab:?}");
}
