use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use geolen_core::differentials::{
    basis_quadratic, sup_norm, wp_gram, HarmonicBeltrami, QuadDifferential, RelativePoincareSeries,
};
use geolen_core::family::{
    default_half_width, family_direction, gardiner_check, twist_beltrami_with, FnDirection,
    FnFamily, Ramp,
};
use geolen_core::geodesic_ops::{
    form_bounds_report, geodesic_integral, line_resolvent, m_operator, m_operator_identity,
    restrict_to_geodesic, PeriodicFunction,
};
use geolen_core::hyperbolic::{hyp_distance, NormConvention};
use geolen_core::quadrature::gauss_legendre_on;
use geolen_core::resolvent::{
    apply_resolvent, core_probes, phi_field, verify_pde, GreenKernel, Resolvent, ResolventOptions,
    SurfaceField,
};
use geolen_core::surface::{
    free_word_count, geodesic_representative, punctured_torus_from_fn, FuchsianSurface, Letter,
    QuadratureMesh, Word, DEFAULT_BUDGET,
};
use geolen_core::variation::{
    first_variation, second_variation_alt_from_parts, second_variation_from_parts,
    sum_log_psh_check, HermitianMatrix, VariationEngine, VariationReport, ORDER_TOLERANCE,
};
use geolen_core::{Complex64, Error, Mobius, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{RunConfig, SuiteConfig, SurfaceKind};
use crate::report::*;

type GroupResult<T> = std::result::Result<T, Error>;

/// Fenchel–Nielsen parameters of the modular torus.
pub fn modular_fn_params() -> (f64, f64) {
    (2.0 * 1.5f64.acosh(), 0.0)
}

pub fn build_surface(config: &RunConfig) -> GroupResult<FuchsianSurface> {
    let s = match config.surface.kind {
        SurfaceKind::Preset => {
            let mut s = FuchsianSurface::modular();
            s.fn_params = Some(modular_fn_params());
            s
        }
        SurfaceKind::FenchelNielsen => {
            punctured_torus_from_fn(config.surface.l_alpha, config.surface.tau)?
        }
    };
    Ok(s.with_enumeration(config.truncation.max_word_len, DEFAULT_BUDGET))
}

fn entries(m: &Mobius) -> [f64; 4] {
    [m.a, m.b, m.c, m.d]
}

fn group_seed(seed: u64, group: &str) -> u64 {
    group.bytes().fold(seed ^ 0x9e37_79b9_7f4a_7c15, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

/// Shared state built on demand.
struct Context<'a> {
    config: &'a RunConfig,
    surface: Arc<FuchsianSurface>,
    mesh: Option<Arc<QuadratureMesh>>,
    basis: Option<Vec<Arc<dyn QuadDifferential>>>,
    resolvent: Option<Resolvent>,
}

impl<'a> Context<'a> {
    fn mesh(&mut self) -> GroupResult<Arc<QuadratureMesh>> {
        if self.mesh.is_none() {
            let m = self
                .surface
                .build_mesh(self.config.mesh.cells, self.config.truncation.y_max)?;
            self.mesh = Some(Arc::new(m));
        }
        Ok(self.mesh.clone().expect("built"))
    }

    fn basis(&mut self) -> GroupResult<Vec<Arc<dyn QuadDifferential>>> {
        if self.basis.is_none() {
            self.basis = Some(basis_quadratic(&self.surface)?);
        }
        Ok(self.basis.clone().expect("built"))
    }

    fn direction(&mut self) -> GroupResult<HarmonicBeltrami> {
        Ok(HarmonicBeltrami::new(self.basis()?.remove(0)))
    }

    fn resolvent(&mut self) -> GroupResult<Resolvent> {
        if self.resolvent.is_none() {
            let mesh = self.mesh()?;
            let mut options = ResolventOptions::default();
            options.kernel =
                GreenKernel::new(options.kernel.near, self.config.truncation.kernel_cutoff)?;
            self.resolvent = Some(Resolvent::new(self.surface.clone(), mesh, options)?);
        }
        Ok(self.resolvent.clone().expect("built"))
    }

    fn geodesic(&self, word: &str) -> GroupResult<geolen_core::surface::ClosedGeodesic> {
        let w: Word = word
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("word {word:?}")))?;
        geodesic_representative(
            &self.surface,
            &w,
            self.config.geodesics.samples,
            self.config.convention,
        )
    }
}

/// Runs the selected groups; failures inside a group are recorded and the
/// remaining groups still run.
pub fn run_suite(config: &RunConfig, selection: &SuiteConfig) -> GroupResult<RunReport> {
    let selected = config.suite.intersect(selection);
    let surface = Arc::new(build_surface(config)?);
    if let Some(path) = &config.truncation.cache {
        surface.table_cached(path)?;
    }
    let mut cx = Context {
        config,
        surface: surface.clone(),
        mesh: None,
        basis: None,
        resolvent: None,
    };
    let mut report = RunReport {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        surface: SurfaceSummary {
            name: match config.surface.kind {
                SurfaceKind::Preset => config.surface.preset.clone(),
                SurfaceKind::FenchelNielsen => "fenchel_nielsen".into(),
            },
            a: entries(&surface.a),
            b: entries(&surface.b),
            fn_params: surface.fn_params,
            cusp_width: surface.frame.width,
            mesh_nodes: 0,
            mesh_area: 0.0,
        },
        lengths: Vec::new(),
        geodesics: Vec::new(),
        operators: None,
        resolvent: None,
        family: None,
        sum_log: None,
        checks: Vec::new(),
        errors: Vec::new(),
        timings: BTreeMap::new(),
        pass: true,
    };

    macro_rules! group {
        ($name:expr, $body:expr) => {{
            let start = Instant::now();
            let r: GroupResult<()> = $body;
            if let Err(e) = r {
                report.errors.push(format!("{}: {e}", $name));
                report.checks.push(CheckRow {
                    group: $name.into(),
                    word: String::new(),
                    check: "completed".into(),
                    value: f64::NAN,
                    bound: 0.0,
                    margin: -1.0,
                    budget: 0.0,
                    pass: false,
                });
            }
            report
                .timings
                .insert($name.into(), start.elapsed().as_secs_f64());
        }};
    }

    group!("lengths", lengths(&cx, &mut report));
    if selected.geometry {
        group!("geometry", geometry(&mut cx, &mut report));
    }
    if selected.operators {
        group!("operators", operators(config, &mut report));
    }
    if selected.resolvent {
        group!("resolvent", resolvent_checks(&mut cx, &mut report));
    }
    if selected.first_variation || selected.second_variation || selected.psh {
        group!("geodesics", geodesics(&mut cx, &selected, &mut report));
    }
    if selected.family {
        group!("family", family(config, &mut report));
    }
    if let Some(m) = &cx.mesh {
        report.surface.mesh_nodes = m.len();
        report.surface.mesh_area = m.area();
    }
    report.pass = report.errors.is_empty() && report.checks.iter().all(|c| c.pass);
    Ok(report)
}

/// Hyperbolic length of the axis segment from `p` to `m(p)` by graded
/// Gauss–Legendre quadrature of `|dz|/y`.
pub fn arclength_along_axis(m: &Mobius) -> GroupResult<f64> {
    if m.trace().abs() <= 2.0 {
        return Err(Error::NotHyperbolic(m.trace()));
    }
    let fixed = m.boundary_fixed_points();
    let rule = |lo: f64, hi: f64, f: &dyn Fn(f64) -> f64| -> f64 {
        // Geometric panels resolve the integrand near the boundary.
        const PANELS: usize = 32;
        let (a, b) = (lo.min(hi), lo.max(hi));
        let ratio = (b / a).powf(1.0 / PANELS as f64);
        (0..PANELS)
            .map(|k| {
                let (x0, x1) = (a * ratio.powi(k as i32), a * ratio.powi(k as i32 + 1));
                gauss_legendre_on(16, x0, x1)
                    .map(|(x, w)| w * f(x))
                    .sum::<f64>()
            })
            .sum()
    };
    match (
        fixed.first().copied().flatten(),
        fixed.get(1).copied().flatten(),
    ) {
        (Some(e1), Some(e2)) => {
            let (c, r) = ((e1 + e2) / 2.0, (e2 - e1).abs() / 2.0);
            let p = Complex64::new(c, r);
            let q = m.apply_complex(p);
            let th = |z: Complex64| (z - c).arg();
            let (t0, t1) = (th(p), th(q));
            // Measure angles from the nearer boundary point so the grading
            // concentrates there.
            let (t0, t1) = if t1 < PI / 2.0 {
                (t0, t1)
            } else {
                (PI - t0, PI - t1)
            };
            Ok(rule(t1, t0, &|t: f64| 1.0 / t.sin()))
        }
        (Some(x), None) | (None, Some(x)) => {
            let p = Complex64::new(x, 1.0);
            let q = m.apply_complex(p);
            Ok(rule(p.im, q.im, &|y: f64| 1.0 / y))
        }
        _ => Err(Error::NotHyperbolic(m.trace())),
    }
}

fn lengths(cx: &Context, report: &mut RunReport) -> GroupResult<()> {
    for w in &cx.config.geodesics.words {
        let g = cx.geodesic(w)?;
        report.lengths.push(LengthRow {
            word: w.clone(),
            trace: g.element.trace(),
            l_classical: g.l_cl,
            l_convention: g.length,
            l_arclength: arclength_along_axis(&g.element)?,
        });
    }
    Ok(())
}

fn random_mobius(rng: &mut ChaCha8Rng) -> Mobius {
    loop {
        let (a, b, c): (f64, f64, f64) = (
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        );
        if a.abs() > 0.2 {
            return Mobius::new_unchecked(a, b, c, (1.0 + b * c) / a);
        }
    }
}

fn random_point(rng: &mut ChaCha8Rng) -> Point {
    Point::new(rng.gen_range(-3.0..3.0), rng.gen_range(-2.0f64..2.0).exp()).expect("y > 0")
}

fn geometry(cx: &mut Context, report: &mut RunReport) -> GroupResult<()> {
    let cfg = cx.config;
    let tol = &cfg.tolerances;
    let surface = cx.surface.clone();
    let table = surface.table()?;
    report.checks.push(CheckRow::at_most(
        "geometry",
        "",
        "enumeration_count",
        (table.len() as f64 - free_word_count(cfg.truncation.max_word_len) as f64).abs(),
        0.5,
    ));
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (w, m) in table.iter() {
        if count == 10 {
            break;
        }
        if w.len() > 4 || m.trace().abs() <= 2.0 + 1e-9 {
            continue;
        }
        let l_tr = 2.0 * (m.trace().abs() / 2.0).acosh();
        let l_arc = arclength_along_axis(m)?;
        worst = worst.max((l_arc - l_tr).abs() / l_tr);
        count += 1;
    }
    if count < 10 {
        return Err(Error::InvalidArgument(format!(
            "only {count} hyperbolic elements of length at most 4 enumerated"
        )));
    }
    report.checks.push(CheckRow::at_most(
        "geometry",
        "",
        "arclength_vs_trace",
        worst,
        tol.arclength,
    ));
    let mut rng = ChaCha8Rng::seed_from_u64(group_seed(cfg.seed, "geometry"));
    let (mut tri, mut iso): (f64, f64) = (f64::INFINITY, 0.0);
    for _ in 0..1000 {
        let (p, q, r) = (
            random_point(&mut rng),
            random_point(&mut rng),
            random_point(&mut rng),
        );
        let (dpq, dqr, dpr) = (
            hyp_distance(&p, &q),
            hyp_distance(&q, &r),
            hyp_distance(&p, &r),
        );
        tri = tri.min((dpq + dqr - dpr) + 1e-12 * (dpq + dqr));
        let g = random_mobius(&mut rng);
        let d = hyp_distance(&g.apply(&p), &g.apply(&q));
        iso = iso.max((d - dpq).abs() / dpq.max(1e-3));
    }
    report.checks.push(CheckRow::with_budget(
        "geometry",
        "",
        "triangle_inequality",
        tri,
        0.0,
        tri,
        0.0,
    ));
    report.checks.push(CheckRow::at_most(
        "geometry",
        "",
        "isometry_invariance",
        iso,
        1e-9,
    ));
    let mesh = cx.mesh()?;
    report.checks.push(CheckRow::at_most(
        "geometry",
        "",
        "gauss_bonnet_area",
        (mesh.area() - 2.0 * PI).abs(),
        tol.area,
    ));
    // The relative Poincaré series of the first geodesic is a multiple of
    // the cusp form.
    let q = cx.basis()?.remove(0);
    let gamma = cx.geodesic(&cfg.geodesics.words[0])?;
    let series = RelativePoincareSeries::new(&cx.surface, &gamma, cfg.truncation.coset_radius)?;
    let probes = core_probes(
        &cx.surface,
        8,
        cx.surface.y_min * 1.05,
        2.0 * cx.surface.y_min.max(1.0),
        group_seed(cfg.seed, "poincare"),
    );
    let mut ratios = Vec::new();
    let mut tail: f64 = 0.0;
    for z in probes {
        let (v, t) = series.eval_with_tail(z);
        ratios.push(v / q.eval(z));
        tail = tail.max(t / v.norm());
    }
    let spread = ratios
        .iter()
        .map(|r| (r - ratios[0]).norm() / ratios[0].norm())
        .fold(0.0, f64::max);
    report.checks.push(CheckRow::at_most(
        "geometry",
        &cfg.geodesics.words[0],
        "poincare_proportional",
        spread,
        2.0 * tail + q.residual_bound() + 1e-9,
    ));
    Ok(())
}

fn random_band_limited(rng: &mut ChaCha8Rng, n: usize) -> PeriodicFunction {
    let period = rng.gen_range(0.5..8.0);
    let count = rng.gen_range(1..=6);
    let modes: Vec<(i64, Complex64)> = (0..count)
        .map(|_| {
            (
                rng.gen_range(-20i64..=20),
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            )
        })
        .collect();
    PeriodicFunction::from_fn(period, n, |t| {
        modes
            .iter()
            .map(|&(nu, a)| a * Complex64::from_polar(1.0, 2.0 * PI * nu as f64 * t / period))
            .sum()
    })
    .expect("power-of-two sample count")
}

fn operators(config: &RunConfig, report: &mut RunReport) -> GroupResult<()> {
    let tol = &config.tolerances;
    let mut rng = ChaCha8Rng::seed_from_u64(group_seed(config.seed, "operators"));
    let mut identity: f64 = 0.0;
    let mut roundtrip: f64 = 0.0;
    for _ in 0..50 {
        let f = random_band_limited(&mut rng, 128);
        identity = identity.max(m_operator(&f).max_abs_diff(&m_operator_identity(&f)));
        let c = rng.gen_range(0.1..3.0);
        let r = line_resolvent(&f, c)?;
        // Re-applying `c − D²` amplifies rounding by the condition number.
        let lambda_max = f.eigenvalue(f.len() / 2);
        let scale = (c + lambda_max) / c * f.samples.iter().map(|v| v.norm()).fold(0.0, f64::max);
        roundtrip = roundtrip.max(r.forward_operator(c).max_abs_diff(&f) / scale);
    }
    report.checks.push(CheckRow::at_most(
        "operators",
        "",
        "m_identity",
        identity,
        tol.operator_identity,
    ));
    report.checks.push(CheckRow::at_most(
        "operators",
        "",
        "line_resolvent_roundtrip",
        roundtrip,
        tol.operator_identity,
    ));
    let reports: Vec<_> = (0..100)
        .map(|_| form_bounds_report(&random_band_limited(&mut rng, 128)))
        .collect();
    let scale = |r: &geolen_core::geodesic_ops::FormBoundsReport| {
        tol.operator_inequality * r.variance.max(1.0)
    };
    let lower = reports
        .iter()
        .map(|r| r.mid + scale(r))
        .fold(f64::INFINITY, f64::min);
    let upper = reports
        .iter()
        .map(|r| r.rhs + scale(r) - r.mid)
        .fold(f64::INFINITY, f64::min);
    let sharp = reports
        .iter()
        .map(|r| (r.mid - r.rhs + scale(r)).min(r.variance + scale(r) - r.mid))
        .fold(f64::INFINITY, f64::min);
    let mut constant_mid = Vec::new();
    for _ in 0..10 {
        let c = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let f = PeriodicFunction::constant(rng.gen_range(0.5..8.0), 128, c)?;
        constant_mid.push(form_bounds_report(&f).mid);
    }
    let constant_worst = constant_mid.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let push = |report: &mut RunReport, name: &str, margin: f64| {
        report.checks.push(CheckRow::with_budget(
            "operators",
            "",
            name,
            margin,
            0.0,
            margin,
            0.0,
        ));
    };
    push(report, "form_lower", lower);
    push(report, "form_upper_stated", upper);
    push(report, "form_sharp", sharp);
    report.checks.push(CheckRow::at_most(
        "operators",
        "",
        "form_constants_zero",
        constant_worst,
        f64::MIN_POSITIVE,
    ));
    report.operators = Some(OperatorResults {
        identity_max_error: identity,
        line_resolvent_max_error: roundtrip,
        form_bounds: reports,
        form_constant_values: constant_mid,
    });
    Ok(())
}

fn resolvent_checks(cx: &mut Context, report: &mut RunReport) -> GroupResult<()> {
    let cfg = cx.config;
    let tol = &cfg.tolerances;
    let r = cx.resolvent()?;
    let mesh = cx.mesh()?;
    let probes = core_probes(
        &cx.surface,
        50,
        cx.surface.y_min * 1.05,
        r.cusp_height * 0.95,
        group_seed(cfg.seed, "probes"),
    );
    let one = SurfaceField::constant(&mesh, Complex64::new(1.0, 0.0));
    let mut constant_err: f64 = 0.0;
    for &z in &probes {
        constant_err = constant_err.max((apply_resolvent(&r, &one, z)?.value - 1.0).norm());
    }
    report.checks.push(CheckRow::at_most(
        "resolvent",
        "",
        "constant_reproduction",
        constant_err,
        tol.constant_reproduction,
    ));
    let a = cx.direction()?;
    let phi = phi_field(&r, &a, &a)?;
    let chi = geolen_core::differentials::pointwise_product(&mesh, &a, &a);
    let pde = verify_pde(&phi, &chi, &probes, 0.1);
    report.checks.push(CheckRow::at_most(
        "resolvent",
        "",
        "pde_mean_residual",
        pde.mean_relative,
        tol.pde_mean,
    ));
    let integral = phi.integrate(&mesh);
    let wp = wp_gram(&mesh, &a, &a);
    report.checks.push(CheckRow::at_most(
        "resolvent",
        "",
        "integral_equals_wp",
        (integral - wp).norm() / wp.norm(),
        tol.wp_integral,
    ));
    let sup = sup_norm(&cx.surface, &mesh, &a).value;
    let phi_max = phi.max_re();
    report.checks.push(CheckRow::at_most(
        "resolvent",
        "",
        "maximum_principle",
        phi_max,
        sup * sup * (1.0 + tol.max_principle),
    ));
    report.resolvent = Some(ResolventResults {
        constant_max_error: constant_err,
        pde,
        phi_integral: integral,
        wp_norm: wp,
        phi_max,
        sup_norm: sup,
    });
    Ok(())
}

fn downsample(f: &PeriodicFunction, map: impl Fn(Complex64) -> f64) -> (Vec<f64>, Vec<f64>) {
    let stride = (f.len() / 256).max(1);
    let t = f.times();
    (0..f.len())
        .step_by(stride)
        .map(|k| (t[k], map(f.samples[k])))
        .unzip()
}

fn geodesics(cx: &mut Context, selected: &SuiteConfig, report: &mut RunReport) -> GroupResult<()> {
    let cfg = cx.config;
    let a = cx.direction()?;
    let engine = if selected.second_variation || selected.psh {
        let mut e = VariationEngine::new(cx.resolvent()?, cfg.convention);
        e.samples = cfg.geodesics.samples;
        Some(e)
    } else {
        None
    };
    let mut psh_reports: Vec<VariationReport> = Vec::new();
    for w in &cfg.geodesics.words {
        let gamma = cx.geodesic(w)?;
        let dl = first_variation(&gamma, &a)?;
        let mut result = GeodesicResult {
            word: w.clone(),
            l_classical: gamma.l_cl,
            l_convention: gamma.length,
            first_variation: dl,
            h: None,
            h_alt: None,
            h_uncertainty: None,
            variation: None,
            profile: None,
        };
        if selected.first_variation {
            let n = gamma.samples;
            let fine =
                0.5 * geodesic_integral(&restrict_to_geodesic(&a, &gamma, 2 * n, cfg.convention)?);
            report.checks.push(CheckRow::at_most(
                "first_variation",
                w,
                "sampling_converged",
                (fine - dl).norm() / dl.norm().max(1e-300),
                1e-10,
            ));
        }
        if let Some(engine) = &engine {
            if selected.second_variation {
                let p = engine.parts(&gamma, &a, &a)?;
                let h = second_variation_from_parts(&p.phi, &p.a_i, &p.a_j)?;
                let h_alt = second_variation_alt_from_parts(&p.phi, &p.a_i, &p.a_j)?;
                let unc = p.phi_budget.total() + p.line_budget.total();
                report.checks.push(CheckRow::at_most(
                    "second_variation",
                    w,
                    "dual_route",
                    (h - h_alt).norm() / h.norm(),
                    cfg.tolerances.dual_route,
                ));
                report.checks.push(CheckRow::at_most(
                    "second_variation",
                    w,
                    "diagonal_real",
                    h.im.abs() / h.norm(),
                    ORDER_TOLERANCE,
                ));
                let (t, phi) = downsample(&p.phi, |v| v.re);
                let (_, a_abs) = downsample(&p.a_i, |v| v.norm());
                result.h = Some(h);
                result.h_alt = Some(h_alt);
                result.h_uncertainty = Some(unc);
                result.profile = Some(Profile { t, phi, a_abs });
            }
            if selected.psh {
                let v = engine.bounds_report(&gamma, std::slice::from_ref(&a))?;
                for c in &v.checks {
                    let mut row =
                        CheckRow::with_budget("psh", w, &c.name, c.margin, 0.0, c.margin, c.budget);
                    row.pass = c.pass;
                    report.checks.push(row);
                }
                if result.h.is_none() {
                    result.h = Some(v.h[0][0]);
                    result.h_alt = Some(v.h_alt[0][0]);
                    result.h_uncertainty = Some(v.budget.total());
                }
                psh_reports.push(v.clone());
                result.variation = Some(v);
            }
        }
        report.geodesics.push(result);
    }
    if psh_reports.len() >= 2 {
        let lengths: Vec<f64> = psh_reports.iter().map(|r| r.length).collect();
        let grads: Vec<Vec<Complex64>> = psh_reports.iter().map(|r| r.dl.clone()).collect();
        let hess: Vec<HermitianMatrix> = psh_reports
            .iter()
            .map(|r| HermitianMatrix::from_fn(1, 1, |i, j| r.h[i][j]))
            .collect();
        let s = sum_log_psh_check(&lengths, &grads, &hess)?;
        let scale = s.lhs.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
        let words: Vec<&str> = psh_reports.iter().map(|r| r.word.as_str()).collect();
        report.checks.push(CheckRow::with_budget(
            "psh",
            &words.join("+"),
            "sum_log_order",
            s.margin,
            0.0,
            s.margin,
            ORDER_TOLERANCE * scale.max(1.0),
        ));
        report.sum_log = Some(s);
    }
    Ok(())
}

fn family(config: &RunConfig, report: &mut RunReport) -> GroupResult<()> {
    let (l, tau) = match config.surface.kind {
        SurfaceKind::Preset => modular_fn_params(),
        SurfaceKind::FenchelNielsen => (config.surface.l_alpha, config.surface.tau),
    };
    let tol = &config.tolerances;
    let surface = punctured_torus_from_fn(l, tau)?;
    let mesh = surface.build_mesh(config.mesh.cells, config.truncation.y_max)?;
    let basis = basis_quadratic(&surface)?;
    let mut checks = Vec::new();
    let mut cocycle_coefficient = Complex64::new(0.0, 0.0);
    for dir in [FnDirection::Twist, FnDirection::Length] {
        let fam = FnFamily::new(l, tau, dir, config.convention)?;
        let a = family_direction(&fam, &surface, &mesh, &basis)?;
        if dir == FnDirection::Twist {
            cocycle_coefficient = a.coefficients()[0];
        }
        for w in &config.geodesics.words {
            let word: Word = w
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("word {w:?}")))?;
            let r = gardiner_check(&fam, &surface, &word, &a)?;
            let row = if r.fd.abs() < tol.gardiner_abs {
                CheckRow::at_most(
                    "family",
                    w,
                    &format!("gardiner_{}_abs", dir.name()),
                    r.abs_error,
                    tol.gardiner_abs,
                )
            } else {
                CheckRow::at_most(
                    "family",
                    w,
                    &format!("gardiner_{}", dir.name()),
                    r.rel_error,
                    tol.gardiner_rel,
                )
            };
            report.checks.push(row);
            checks.push(r);
        }
    }
    let alpha = geodesic_representative(&surface, &Word::new([Letter::A]), 0, config.convention)?;
    let width = default_half_width(alpha.l_cl);
    let mut collar = Vec::new();
    for ramp in [Ramp::Cosine, Ramp::Smootherstep] {
        let t = twist_beltrami_with(&surface, &alpha, width, ramp, 1.0)?;
        collar.push(t.project(&mesh, &basis)?.coefficients()[0]);
    }
    let rel = |x: Complex64, y: Complex64| (x - y).norm() / y.norm();
    report.checks.push(CheckRow::at_most(
        "family",
        "A",
        "collar_ramp_invariance",
        rel(collar[0], collar[1]),
        1e-3,
    ));
    report.checks.push(CheckRow::at_most(
        "family",
        "A",
        "collar_matches_cocycle",
        rel(collar[0], cocycle_coefficient),
        1e-3,
    ));
    report.family = Some(FamilyResults {
        l_alpha: l,
        tau,
        checks,
        collar_coefficients: collar,
        cocycle_coefficient,
    });
    Ok(())
}

/// Classical lengths `2 arccosh(|tr|/2)` in a convention.
pub fn convention_length(m: &Mobius, convention: NormConvention) -> f64 {
    convention.length_from_classical(2.0 * (m.trace().abs() / 2.0).acosh())
}
