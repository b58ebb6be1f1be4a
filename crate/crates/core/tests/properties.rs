use compactify_core::product_space::ProductMetric;
use compactify_core::{
    cap_metric, chebyshev_expand, check_ball_cylinder_inclusions, product_distance, tail_bound,
    FunctionDescriptor as F, ProductPoint, ProductSpace,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn descriptor() -> impl Strategy<Value = F> {
    let leaf = prop_oneof![
        (-20.0..20.0f64, -50.0..50.0f64).prop_map(|(a, b)| F::tanh(a, b)),
        (-20.0..20.0f64, -50.0..50.0f64).prop_map(|(a, b)| F::cos(a, b)),
        Just(F::StereoX),
        Just(F::StereoY),
        (-3.0..3.0f64).prop_map(|c| F::Const { c }),
    ];
    leaf.prop_recursive(3, 12, 1, |inner| {
        prop_oneof![
            (1u32..=12, inner.clone()).prop_map(|(n, f)| F::cheb(n, f)),
            (inner, -5.0..5.0f64, -5.0..5.0f64).prop_map(|(f, s, t)| F::affine(f, s, t)),
        ]
    })
    .prop_filter("range must be finite", |f| f.validate().is_ok())
}

fn cube_point(rng: &mut ChaCha8Rng, dim: usize) -> ProductPoint {
    ProductPoint::new((0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn values_stay_in_range(f in descriptor(), xs in prop::collection::vec(-1e3..1e3f64, 64)) {
        let range = f.range_interval();
        prop_assert!(range.lo <= range.hi);
        for x in xs {
            let v = f.evaluate(x);
            prop_assert!(range.contains(v), "{f} at {x}: {v} outside [{}, {}]", range.lo, range.hi);
        }
    }

    #[test]
    fn cos_is_even_in_frequency(a in -30.0..30.0f64, x in -1e3..1e3f64) {
        prop_assert_eq!(F::cos(a, 0.0).evaluate(x), F::cos(-a, 0.0).evaluate(x));
    }

    #[test]
    fn canonical_form_evaluates_alike(f in descriptor(), x in -50.0..50.0f64) {
        let g = f.canonical();
        let (u, v) = (f.evaluate(x), g.evaluate(x));
        prop_assert!((u - v).abs() <= 1e-6 * u.abs().max(1.0), "{f} vs {g} at {x}");
    }

    #[test]
    fn descriptors_round_trip_through_json(f in descriptor()) {
        let json = serde_json::to_string(&f).unwrap();
        let back: F = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn cap_triangle(u in -5.0..5.0f64, v in -5.0..5.0f64, w in -5.0..5.0f64) {
        prop_assert!(cap_metric(u, w) <= cap_metric(u, v) + cap_metric(v, w));
    }

    #[test]
    fn truncation_within_tail_bound(
        n in 1usize..12,
        extra in 1usize..10,
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = n + extra;
        let x = cube_point(&mut rng, m);
        let y = cube_point(&mut rng, m);
        let full = product_distance(&x, &y).unwrap();
        let cut = product_distance(
            &ProductPoint::new(x.coords()[..n].to_vec()),
            &ProductPoint::new(y.coords()[..n].to_vec()),
        )
        .unwrap();
        prop_assert!(cut <= full);
        prop_assert!(full - cut <= tail_bound(n));
    }
}

#[test]
fn overflowing_chebyshev_towers_are_rejected() {
    let tower = F::cheb(10, F::cheb(10, F::cheb(8, F::Const { c: 1.7 })));
    assert!(tower.validate().is_err());
    assert!(F::cheb(10, F::cheb(10, F::cos(1.0, 0.0)))
        .validate()
        .is_ok());
}

#[test]
fn range_containment_on_dense_grid() {
    let fs = [
        F::tanh(1.0, 0.0),
        F::tanh(-3.0, 7.0),
        F::cos(1.0, 0.0),
        F::cos(2f64.sqrt(), 0.5),
        F::StereoX,
        F::StereoY,
        F::Const { c: 0.5 },
        chebyshev_expand(7).unwrap(),
        F::cheb(3, F::StereoX),
        F::affine(F::cheb(2, F::tanh(0.5, 0.0)), -2.0, 1.0),
    ];
    for f in &fs {
        let range = f.range_interval();
        for i in 0..100_000 {
            let x = -1e3 + i as f64 * 0.02;
            assert!(range.contains(f.evaluate(x)), "{f} at {x}");
        }
    }
}

#[test]
fn chebyshev_identity_up_to_twelve() {
    for n in 1..=12u32 {
        let f = chebyshev_expand(n).unwrap();
        let worst = (0..10_000)
            .map(|i| -50.0 + 100.0 * i as f64 / 9_999.0)
            .map(|x: f64| (f.evaluate(x) - (n as f64 * x).cos()).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-9, "n={n}: {worst}");
    }
}

#[test]
fn tanh_is_injective_on_random_pairs() {
    // tanh saturates to ±1 in double precision beyond |x| ≈ 19, so pairs are
    // drawn where it is still strictly increasing as computed.
    let f = F::tanh(1.0, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10_000 {
        let x: f64 = rng.random_range(-15.0..15.0);
        let y: f64 = rng.random_range(-15.0..15.0);
        if x != y {
            assert_ne!(f.evaluate(x), f.evaluate(y), "{x} {y}");
            assert_eq!(f.evaluate(x) < f.evaluate(y), x < y);
        }
    }
}

#[test]
fn metric_axioms_on_random_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let metric = ProductMetric::new(5);
    for _ in 0..10_000 {
        let x = cube_point(&mut rng, 5);
        let y = cube_point(&mut rng, 5);
        let z = cube_point(&mut rng, 5);
        let dxy = metric.distance(&x, &y).unwrap();
        let dyx = metric.distance(&y, &x).unwrap();
        let dyz = metric.distance(&y, &z).unwrap();
        let dxz = metric.distance(&x, &z).unwrap();
        assert!(dxy >= 0.0 && dxy < metric.diameter_bound() + 1e-15);
        assert_eq!(dxy, dyx);
        assert_eq!(metric.distance(&x, &x).unwrap(), 0.0);
        assert_eq!(dxy == 0.0, x == y);
        assert!(dxz <= dxy + dyz + 1e-12);
    }
}

#[test]
fn distinct_points_have_positive_distance() {
    let x = ProductPoint::new(vec![0.0, 0.0, 0.0, 0.0, 0.0]);
    let mut c = x.coords().to_vec();
    c[4] = f64::MIN_POSITIVE;
    let y = ProductPoint::new(c);
    assert!(product_distance(&x, &y).unwrap() > 0.0);
}

#[test]
fn cap_triangle_by_case() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut small, mut large) = (0, 0);
    for _ in 0..20_000 {
        let u: f64 = rng.random_range(-3.0..3.0);
        let v: f64 = rng.random_range(-3.0..3.0);
        let w: f64 = rng.random_range(-3.0..3.0);
        let (a, b) = ((u - v).abs(), (v - w).abs());
        if a <= 1.0 && b <= 1.0 {
            small += 1;
            assert!(cap_metric(u, w) <= (u - w).abs().min(a + b));
        } else {
            large += 1;
            assert!(cap_metric(u, w) <= 1.0);
            assert!(cap_metric(u, v) + cap_metric(v, w) >= 1.0);
        }
    }
    assert!(small > 1000 && large > 1000);
}

#[test]
fn tail_bound_halves() {
    assert_eq!(tail_bound(1), 1.0);
    assert_eq!(tail_bound(3), 0.25);
    for n in 1..60 {
        assert_eq!(tail_bound(n + 1), tail_bound(n) / 2.0);
    }
}

#[test]
fn padded_truncation_from_three_to_twenty() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..10_000 {
        let x = cube_point(&mut rng, 20);
        let y = cube_point(&mut rng, 20);
        let d20 = product_distance(&x, &y).unwrap();
        let d3 = product_distance(
            &ProductPoint::new(x.coords()[..3].to_vec()),
            &ProductPoint::new(y.coords()[..3].to_vec()),
        )
        .unwrap();
        assert!((d20 - d3).abs() <= tail_bound(3));
    }
}

#[test]
fn ball_cylinder_inclusions_at_several_radii() {
    let space = ProductSpace::cube(5);
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let pairs: Vec<_> = (0..10_000)
        .map(|_| {
            let x = cube_point(&mut rng, 5);
            // Mix far and near pairs so both premises are exercised.
            let scale = [1.0, 0.1, 0.01][rng.random_range(0..3)];
            let y = ProductPoint::new(
                x.coords()
                    .iter()
                    .map(|v| (v + scale * rng.random_range(-1.0..1.0)).clamp(-1.0, 1.0))
                    .collect(),
            );
            (x, y)
        })
        .collect();
    for r in [0.05, 0.1, 0.3, 0.7, 1.5] {
        let report = check_ball_cylinder_inclusions(&space, &pairs, r).unwrap();
        assert!(
            report.violations.is_empty(),
            "r={r}: {:?}",
            report.violations.first()
        );
        assert!(
            report.projection_premises > 0 && report.cylinder_premises > 0,
            "r={r}"
        );
    }
}
