use std::sync::{Arc, OnceLock};

use geolen_core::differentials::*;
use geolen_core::resolvent::*;
use geolen_core::surface::*;
use geolen_core::{Complex64, Error};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

struct Fixture {
    surface: Arc<FuchsianSurface>,
    resolvent: Resolvent,
    a: HarmonicBeltrami,
    chi: SurfaceField,
    phi: SurfaceField,
    probes: Vec<Complex64>,
}

fn modular() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let surface = Arc::new(FuchsianSurface::modular());
        let mesh = Arc::new(surface.build_mesh(400, DEFAULT_Y_MAX).unwrap());
        let resolvent =
            Resolvent::new(surface.clone(), mesh.clone(), ResolventOptions::default()).unwrap();
        let a = HarmonicBeltrami::new(basis_quadratic(&surface).unwrap().remove(0));
        let chi = pointwise_product(&mesh, &a, &a);
        let phi = phi_field(&resolvent, &a, &a).unwrap();
        let probes = core_probes(
            &surface,
            50,
            surface.y_min * 1.05,
            resolvent.cusp_height * 0.95,
            11,
        );
        Fixture {
            surface,
            resolvent,
            a,
            chi,
            phi,
            probes,
        }
    })
}

/// `Q₁(x) = ½∫_{−1}^{1} t/(x − t) dt` by composite Simpson.
fn q1_by_quadrature(x: f64) -> f64 {
    let n = 20000;
    let h = 2.0 / n as f64;
    let f = |t: f64| t / (x - t);
    let mut s = f(-1.0) + f(1.0);
    for i in 1..n {
        let t = -1.0 + h * i as f64;
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(t);
    }
    0.5 * s * h / 3.0
}

#[test]
fn legendre_q1_closed_form() {
    assert!((legendre_q1(2.0) - (3f64.ln() - 1.0)).abs() < 1e-14);
    for x in [1.2, 2.0, 3.5, 4.5, 10.0, 100.0] {
        let q = q1_by_quadrature(x);
        assert!((legendre_q1(x) - q).abs() < 1e-9 * q.abs().max(1e-3), "{x}");
    }
    // Around the switch to the large-argument series.
    for x in [3.999f64, 4.0, 4.001] {
        let exact = x / 2.0 * ((x + 1.0) / (x - 1.0)).ln() - 1.0;
        assert!((legendre_q1(x) - exact).abs() < 1e-13);
    }
}

#[test]
fn free_kernel_shape() {
    let r = free_kernel(10.0).unwrap() / free_kernel(11.0).unwrap();
    assert!((r * (-2f64).exp() - 1.0).abs() < 0.2, "{r}");
    let (k1, k2) = (free_kernel(1e-8).unwrap(), free_kernel(1e-7).unwrap());
    let slope = (k1 - k2) / 10f64.ln();
    let kappa = GreenKernel::default().kappa;
    assert!((slope / kappa - 1.0).abs() < 0.05, "{slope}");
    let mut prev = f64::INFINITY;
    for i in 1..200 {
        let v = free_kernel(0.05 * i as f64).unwrap();
        assert!(v > 0.0 && v < prev);
        prev = v;
    }
    assert_eq!(free_kernel(0.0), Err(Error::NonPositiveDistance(0.0)));
    assert!(free_kernel(-1.0).is_err());
}

#[test]
fn kernel_split_is_a_partition() {
    let k = GreenKernel::default();
    for i in 1..100 {
        let d = 0.06 * i as f64;
        let parts =
            k.eval(d) * (1.0 - k.tau(d)) + k.middle(d) + k.eval(d) * k.tau(d) * (1.0 - k.sigma(d));
        assert!((parts - k.eval(d)).abs() < 1e-14);
    }
    // Total mass of the kernel is 1: it inverts □ + 1 on constants.
    let mid = geolen_core::quadrature::gauss_legendre_on(400, k.near / 2.0, k.cutoff)
        .map(|(d, w)| w * k.middle(d) * 2.0 * std::f64::consts::PI * d.sinh())
        .sum::<f64>();
    assert!((k.near_mass() + mid + k.tail_mass() - 1.0).abs() < 1e-10);
    assert!(GreenKernel::new(2.0, 2.5).is_err());
}

#[test]
fn constants_are_reproduced() {
    let f = modular();
    let one = SurfaceField::constant(&f.resolvent.mesh, c(1.0, 0.0));
    let p = f.resolvent.prepare(&one).unwrap();
    for &z in &f.probes {
        let v = apply_resolvent(&f.resolvent, &one, z).unwrap();
        assert!((v.value - 1.0).norm() < 1e-3, "{z} {}", v.value);
        assert!((p.eval(z).value - v.value).norm() < 1e-15);
    }
    // High in the cusp.
    for y in [3.0, 30.0, 1e3] {
        let z = f.surface.frame.from_frame(c(0.2, y));
        assert!(
            (p.eval(z).value - 1.0).norm() < 1e-3,
            "{y} {}",
            p.eval(z).value
        );
    }
    let res = verify_pde(&p.into_field(), &one, &f.probes[..10], 0.1);
    assert!(res.mean_relative < 1e-2, "{res:?}");
}

#[test]
fn positivity_and_maximum_principle() {
    let f = modular();
    let sup = sup_norm(&f.surface, &f.resolvent.mesh, &f.a);
    let chi_max = f.chi.max_re();
    assert!(f.phi.min_re() > 0.0);
    assert!(f.phi.max_re() <= chi_max * (1.0 + 1e-3));
    assert!(f.phi.max_re() <= sup.value.powi(2) * (1.0 + 1e-3));
    assert!(f.phi.values.iter().all(|v| v.im.abs() < 1e-12 * v.re.abs()));
    // A non-negative bump stays non-negative and below its maximum.
    let bump = SurfaceField::from_fn(&f.resolvent.mesh, {
        let s = f.surface.clone();
        move |z| c((-(s.cusp_height(z) - 1.0).powi(2) * 4.0).exp(), 0.0)
    });
    let r = f.resolvent.prepare(&bump).unwrap().into_field();
    assert!(r.min_re() >= 0.0 && r.max_re() <= bump.max_re());
}

#[test]
fn doubling_cutoff_stays_within_tail_estimate() {
    let f = modular();
    let mut opts = f.resolvent.options;
    opts.kernel = GreenKernel::new(opts.kernel.near, 2.0 * opts.kernel.cutoff).unwrap();
    let r2 = Resolvent::new(f.surface.clone(), f.resolvent.mesh.clone(), opts).unwrap();
    let (p1, p2) = (
        f.resolvent.prepare(&f.chi).unwrap(),
        r2.prepare(&f.chi).unwrap(),
    );
    for &z in f.probes.iter().take(6) {
        let (a, b) = (p1.eval(z), p2.eval(z));
        assert!((a.value - b.value).norm() <= a.tail_estimate, "{z}");
        assert!(a.tail_estimate < 1e-2 * a.value.norm());
    }
}

#[test]
fn cutoff_too_small_is_reported() {
    let f = modular();
    let mut opts = f.resolvent.options;
    opts.tolerance = 1e-9;
    let r = Resolvent::new(f.surface.clone(), f.resolvent.mesh.clone(), opts).unwrap();
    let e = apply_resolvent(&r, &f.chi, f.probes[0]).unwrap_err();
    assert!(matches!(e, Error::CutoffTooSmall { .. }));
}

#[test]
fn pde_residual_is_small_and_detects_perturbations() {
    let f = modular();
    let res = verify_pde(&f.phi, &f.chi, &f.probes, 0.1);
    assert!(res.mean_relative < 1e-2, "{res:?}");
    let z0 = f.probes[3];
    let phi = f.phi.clone();
    let bumped = SurfaceField::new(phi.values.clone(), move |z| {
        let d = (z - z0).norm() / z0.im;
        phi.eval(z) * (1.0 + 0.1 * (-(d / 0.1).powi(2)).exp())
    });
    let r = verify_pde(&bumped, &f.chi, &[z0], 0.1);
    assert!(r.max_relative > 10.0 * res.max_relative, "{r:?}");
}

#[test]
fn resolvent_is_symmetric() {
    let f = modular();
    let mesh = &f.resolvent.mesh;
    let chi2 = SurfaceField::from_fn(mesh, {
        let s = f.surface.clone();
        move |z| {
            c(
                1.0 / (1.0 + s.cusp_height(z).powi(2)),
                0.3 * (-s.cusp_height(z)).exp(),
            )
        }
    });
    let r2 = f.resolvent.prepare(&chi2).unwrap().into_field();
    let pair = |a: &SurfaceField, b: &SurfaceField| -> Complex64 {
        a.values
            .iter()
            .zip(&b.values)
            .zip(&mesh.weights)
            .map(|((x, y), w)| x * y.conj() * w)
            .sum()
    };
    let (lhs, rhs) = (pair(&f.phi, &chi2), pair(&f.chi, &r2));
    assert!((lhs - rhs).norm() < 1e-2 * lhs.norm(), "{lhs} {rhs}");
}

#[test]
fn integral_matches_weil_petersson() {
    let f = modular();
    let mesh = &f.resolvent.mesh;
    let wp = wp_gram(mesh, &f.a, &f.a);
    let int = f.phi.integrate(mesh);
    assert!((int - wp).norm() < 5e-3 * wp.norm(), "{int} {wp}");
    let scaled = f.a.scaled(c(0.0, 2.0));
    let phi = phi_field(&f.resolvent, &scaled, &f.a).unwrap();
    let wp2 = wp_gram(mesh, &scaled, &f.a);
    assert!((phi.integrate(mesh) - wp2).norm() < 5e-3 * wp2.norm());
}

#[test]
fn zero_direction_gives_zero_field() {
    let f = modular();
    let z = phi_field(&f.resolvent, &f.a, &HarmonicBeltrami::zero()).unwrap();
    assert!(z.values.iter().all(|v| *v == c(0.0, 0.0)));
    assert_eq!(z.eval(c(0.1, 1.3)), c(0.0, 0.0));
}

#[test]
fn p1_is_positive_and_monotone_in_the_core() {
    let f = modular();
    let mut prev = 0.0;
    for h in [4.0, 3.0, 2.0, 1.5, 1.0] {
        let p = p1_from_field(&f.resolvent, &f.phi, &f.a, h).unwrap();
        assert!(p > 0.0);
        assert!(p >= prev);
        prev = p;
    }
    let p = p1_from_field(&f.resolvent, &f.phi, &f.a, 2.0).unwrap();
    assert!((p - 0.2).abs() < 0.03, "{p}");
    assert!(p1_from_field(&f.resolvent, &f.phi, &f.a, 0.1).is_err());
}

#[test]
fn generic_torus_reproduces_constants() {
    let surface = Arc::new(punctured_torus_from_fn(1.7, 0.3).unwrap());
    let mesh = Arc::new(surface.build_mesh(400, DEFAULT_Y_MAX).unwrap());
    let r = Resolvent::new(surface.clone(), mesh.clone(), ResolventOptions::default()).unwrap();
    let one = SurfaceField::constant(&mesh, c(1.0, 0.0));
    let p = r.prepare(&one).unwrap();
    for z in core_probes(&surface, 20, surface.y_min * 1.05, r.cusp_height * 0.95, 3) {
        assert!((p.eval(z).value - 1.0).norm() < 1e-3);
    }
}
