use nystrom_bench::{sample_interior_points, BenchError, SplitMix64, INTERIOR_BAND};
use nystrom_core::laplace_bie::BoundaryCurve;

#[test]
fn unit_circle_point_respects_band() {
    let circle = BoundaryCurve::unit_circle().unwrap();
    let p = sample_interior_points(&circle, 1, 42).unwrap()[0];
    assert!(p[0].hypot(p[1]) <= 0.9 + 1e-6, "{p:?}");
}

#[test]
fn same_seed_same_points() {
    let curve = BoundaryCurve::amoeba().unwrap();
    let a = sample_interior_points(&curve, 100, 7).unwrap();
    let b = sample_interior_points(&curve, 100, 7).unwrap();
    assert_eq!(a, b);
    let c = sample_interior_points(&curve, 100, 8).unwrap();
    assert_ne!(a, c);
}

#[test]
fn ellipse_points_are_inside_and_away_from_the_boundary() {
    let ellipse = BoundaryCurve::ellipse(1.0, 2.0).unwrap();
    let points = sample_interior_points(&ellipse, 600, 42).unwrap();
    assert_eq!(points.len(), 600);
    for p in points {
        assert!(p[0] * p[0] + p[1] * p[1] / 4.0 < 1.0, "{p:?}");
        assert!(ellipse.distance(p) >= INTERIOR_BAND);
    }
}

#[test]
fn first_point_is_the_first_accepted_draw() {
    // reproduce the sampler by hand: x then y from the bounding box
    let ellipse = BoundaryCurve::ellipse(1.0, 2.0).unwrap();
    let [x0, y0, x1, y1] = ellipse.bounding_box();
    let mut rng = SplitMix64::new(42);
    let expected = loop {
        let p = [x0 + (x1 - x0) * rng.next_f64(), y0 + (y1 - y0) * rng.next_f64()];
        if ellipse.contains(p) && ellipse.distance(p) >= INTERIOR_BAND {
            break p;
        }
    };
    assert_eq!(sample_interior_points(&ellipse, 1, 42).unwrap()[0], expected);
}

#[test]
fn band_wider_than_the_curve_exhausts_the_budget() {
    let tiny = BoundaryCurve::ellipse(0.05, 0.05).unwrap();
    match sample_interior_points(&tiny, 1, 1) {
        Err(BenchError::SamplingBudget { draws, found, wanted }) => {
            assert_eq!((draws, found, wanted), (1_000_000, 0, 1));
        }
        other => panic!("expected budget exhaustion, got {other:?}"),
    }
}

#[test]
fn zero_points_is_rejected() {
    let circle = BoundaryCurve::unit_circle().unwrap();
    assert!(sample_interior_points(&circle, 0, 1).is_err());
}
