use geolen_core::hyperbolic::*;
use geolen_core::{Error, Mobius, Point};
use proptest::prelude::*;

fn point() -> impl Strategy<Value = Point> {
    (-5.0f64..5.0, -3.0f64..3.0).prop_map(|(x, ly)| Point::new(x, ly.exp()).unwrap())
}

/// `SL(2, R)` element from the Iwasawa decomposition `n(x) a(y) k(θ)`.
fn element() -> impl Strategy<Value = Mobius> {
    (-3.0f64..3.0, -2.0f64..2.0, 0.0f64..std::f64::consts::TAU).prop_map(|(x, ly, th)| {
        let n = Mobius::new(1.0, x, 0.0, 1.0).unwrap();
        let a = Mobius::translation(ly);
        let (s, c) = (th / 2.0).sin_cos();
        let k = Mobius::new(c, s, -s, c).unwrap();
        n * a * k
    })
}

fn hyperbolic() -> impl Strategy<Value = Mobius> {
    (element(), 0.1f64..4.0).prop_map(|(g, l)| g * Mobius::translation(l) * g.inverse())
}

proptest! {
    #[test]
    fn distance_is_a_metric(p in point(), q in point(), r in point()) {
        let (pq, qr, pr) = (hyp_distance(&p, &q), hyp_distance(&q, &r), hyp_distance(&p, &r));
        prop_assert!(pq >= 0.0 && hyp_distance(&p, &p).abs() < 1e-7);
        prop_assert!((pq - hyp_distance(&q, &p)).abs() <= 1e-12 * pq.max(1.0));
        prop_assert!(pr <= pq + qr + 1e-9 * (pq + qr).max(1.0));
    }

    #[test]
    fn isometries_preserve_distance(g in element(), p in point(), q in point()) {
        let d = hyp_distance(&p, &q);
        let dg = hyp_distance(&g.apply(&p), &g.apply(&q));
        prop_assert!((d - dg).abs() <= 1e-8 * d.max(1e-2), "{d} {dg}");
        prop_assert!((g.det() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn action_is_a_group_action(g in element(), h in element(), p in point()) {
        let a = (g * h).apply(&p);
        let b = g.apply(&h.apply(&p));
        prop_assert!(hyp_distance(&a, &b) < 1e-8);
        let back = g.inverse().apply(&g.apply(&p));
        prop_assert!(hyp_distance(&back, &p) < 1e-8);
        prop_assert!(g.apply(&p).y > 0.0);
    }

    #[test]
    fn trace_length_is_the_minimal_displacement(m in hyperbolic(), t in -2.0f64..2.0, p in point()) {
        let axis = axis_standardize(&m).unwrap();
        let l = m.classify().unwrap().length;
        prop_assert!((l - axis.l_cl).abs() < 1e-9 * l.max(1.0));
        let on = axis.unit_speed_point(t, NormConvention::Riemannian).point;
        prop_assert!((hyp_distance(&on, &m.apply(&on)) - l).abs() < 1e-7 * l.max(1.0));
        prop_assert!(hyp_distance(&p, &m.apply(&p)) >= l - 1e-7 * l.max(1.0));
    }

    #[test]
    fn unit_speed_parametrization(m in hyperbolic(), t in -1.0f64..1.0) {
        let axis = axis_standardize(&m).unwrap();
        for conv in [NormConvention::Hermitian, NormConvention::Riemannian] {
            let period = axis.period(conv);
            let u0 = axis.unit_speed_point(t, conv);
            let u1 = axis.unit_speed_point(t + period, conv);
            prop_assert!(hyp_distance(&u1.point, &m.apply(&u0.point)) < 1e-7);
            // Classical distance is `k` times the convention distance.
            let h = 1e-3;
            let d = hyp_distance(&u0.point, &axis.unit_speed_point(t + h, conv).point);
            let k: f64 = conv.speed_factor();
            prop_assert!((d - k * h).abs() < 1e-9);
            prop_assert!((u0.velocity.norm() - k * u0.point.y).abs() < 1e-9 * u0.point.y.max(1.0));
        }
    }
}

#[test]
fn classification_boundaries() {
    let par = Mobius::new(1.0, 3.0, 0.0, 1.0).unwrap();
    assert_eq!(par.classify().unwrap().kind, ElementKind::Parabolic);
    assert!(matches!(
        axis_standardize(&par),
        Err(Error::NotHyperbolic(_))
    ));
    let (s, c) = 0.3f64.sin_cos();
    let rot = Mobius::new(c, s, -s, c).unwrap();
    assert_eq!(rot.classify().unwrap().kind, ElementKind::Elliptic);
    assert!(Mobius::new(1.0, 1.0, 1.0, 1.0).is_err());
    assert!(Point::new(0.0, 0.0).is_err());
    assert!(Point::new(0.0, -1.0).is_err());
}

#[test]
fn conventions_scale_lengths() {
    let l = 2.0 * 1.5f64.acosh();
    let h = NormConvention::Hermitian.length_from_classical(l);
    assert!((h * 2f64.sqrt() - l).abs() < 1e-15);
    assert_eq!(NormConvention::Riemannian.length_from_classical(l), l);
    for c in [NormConvention::Hermitian, NormConvention::Riemannian] {
        assert_eq!(c.name().parse::<NormConvention>().unwrap(), c);
    }
    assert!("euclidean".parse::<NormConvention>().is_err());
    let p = Point::new(0.3, 2.0).unwrap();
    let g = MetricDensity.g(&p);
    assert!((g - 1.0 / 8.0).abs() < 1e-16);
    assert_eq!(NormConvention::Riemannian.lowering(&p), 2.0 * g);
    assert!(MetricDensity.curvature_defect(&p, 1e-3) < 1e-5);
}

#[test]
fn single_precision_agrees() {
    let p = HPoint::<f32>::new(0.25, 0.5).unwrap();
    let q = HPoint::<f32>::new(-1.0, 2.0).unwrap();
    let (p64, q64) = (
        Point::new(0.25, 0.5).unwrap(),
        Point::new(-1.0, 2.0).unwrap(),
    );
    let d32 = hyp_distance(&p, &q) as f64;
    assert!((d32 - hyp_distance(&p64, &q64)).abs() < 1e-5);
    let m = MobiusTransform::<f32>::new(2.0, 1.0, 1.0, 1.0).unwrap();
    let l = m.classify().unwrap().length as f64;
    assert!((l - 2.0 * 1.5f64.acosh()).abs() < 1e-5);
}
