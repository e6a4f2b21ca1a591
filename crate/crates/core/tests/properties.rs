use polya_cert::bounds::{self, convex_bound, VerifyOptions};
use polya_cert::geometry::{ConvexPolygon, Point};
use polya_cert::lattice::{count_in_domain, packing_points, TriangularLattice};
use polya_cert::special_functions::{bessel_j, bessel_zero, lemma21_gap, weighted_derivative};
use polya_cert::spectrum::{pairs_for_lambda, NeumannSpectrum};
use polya_cert::test_functions::{certified_upper_bound, TestFunctionPack, TestProfile};
use proptest::prelude::*;

/// Convex hull of 3 to 9 points in `[0, 2]²`, rejected when too thin.
fn polygon() -> impl Strategy<Value = ConvexPolygon> {
    prop::collection::vec((0.0f64..2.0, 0.0f64..2.0), 3..10)
        .prop_filter_map("degenerate hull", |pts| {
            let pts: Vec<Point> = pts.into_iter().map(|(x, y)| Point::new(x, y)).collect();
            ConvexPolygon::convex_hull(&pts).ok().filter(|p| p.area() > 0.3)
        })
}

fn interior_point(p: &ConvexPolygon, u: f64, v: f64) -> Point {
    // Barycentric mix of the centroid and two vertices stays inside.
    let vs = p.vertices();
    let a = vs[(u * vs.len() as f64) as usize % vs.len()];
    let c = p.centroid();
    c + (a - c) * (0.95 * v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bessel_positive_before_first_zero(nu in 0.0f64..5.0, u in 0.001f64..0.999) {
        let jn = bessel_zero(nu).unwrap();
        let t = u * jn;
        prop_assert!(bessel_j(nu, t).unwrap().0 > 0.0);
        prop_assert!(weighted_derivative(nu, t).unwrap() < 0.0);
    }

    #[test]
    fn bessel_negative_just_past_first_zero(nu in 0.0f64..5.0, u in 0.01f64..1.0) {
        let jn = bessel_zero(nu).unwrap();
        prop_assert!(bessel_j(nu, jn + u).unwrap().0 < 0.0);
    }

    #[test]
    fn lemma_inequality(nu in 0.0f64..3.0, u in 0.0f64..=1.0) {
        let s = u * bessel_zero(nu).unwrap();
        let g = lemma21_gap(nu, s).unwrap();
        prop_assert!(g.holds(1e-9), "{g:?}");
    }

    #[test]
    fn radial_cap_is_within_the_radius(p in polygon(), u in 0.0f64..1.0, v in 0.0f64..1.0, r in 0.01f64..3.0) {
        let x = interior_point(&p, u, v);
        prop_assume!(p.signed_distance(x) > 1e-9);
        let cap = p.radial_cap(x, r, 64).unwrap();
        for (omega, rr) in cap.samples {
            prop_assert!(rr > 0.0 && rr <= r);
            let y = x + Point::from_angle(omega) * (rr * (1.0 - 1e-9));
            prop_assert!(p.signed_distance(y) >= -1e-9);
        }
    }

    #[test]
    fn count_is_translation_invariant(p in polygon(), r in 0.05f64..0.5, bx in -1.0f64..1.0, by in -1.0f64..1.0,
                                      vx in -3.0f64..3.0, vy in -3.0f64..3.0) {
        let lat = TriangularLattice::new(r).unwrap();
        let (b, v) = (Point::new(bx, by), Point::new(vx, vy));
        prop_assert_eq!(count_in_domain(&lat, &p, b), count_in_domain(&lat, &p.translate(v), b + v));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    /// The packing meets the averaging bound and every test function has
    /// quotient at most `λ`.
    #[test]
    fn pipeline_consistency(p in polygon(), lambda in 5.0f64..120.0) {
        let r = polya_cert::special_functions::j0_zero() / lambda.sqrt();
        let packing = packing_points(&p, r).unwrap();
        let l = packing.len();
        prop_assert!(l as f64 >= convex_bound(p.area(), lambda).unwrap() - 1e-9);
        prop_assume!(l > 0);
        let pack = TestFunctionPack::build(TestProfile::planar(r).unwrap(), &p, packing.points, 256, 128).unwrap();
        let cert = certified_upper_bound(&pack).unwrap();
        prop_assert!(cert <= lambda * (1.0 + 1e-8), "certificate {cert} > λ = {lambda}");
    }
}

#[test]
fn theorem_holds_on_fem_test_domains() {
    let domains = [
        ("equilateral triangle", ConvexPolygon::equilateral_triangle(1.5).unwrap()),
        ("hexagon", ConvexPolygon::hexagon(1.0).unwrap()),
        ("256-gon disk", ConvexPolygon::disk(1.0, 256).unwrap()),
        ("2x1 rectangle", ConvexPolygon::rectangle(2.0, 1.0).unwrap()),
    ];
    let opts = VerifyOptions::default();
    let lambdas = [10.0, 40.0, 120.0];
    for (name, p) in domains {
        let top = 120.0 * (1.0 + opts.fem_lambda_slack);
        let fem = NeumannSpectrum::fem(&p, 0.04, pairs_for_lambda(&p, top)).unwrap();
        for lambda in lambdas {
            let report = bounds::verify_main_theorem(&p, lambda, &fem, &opts).unwrap();
            assert!(report.pass, "{name} at λ = {lambda}: {report:?}");
            assert!(report.n_n >= report.packing_l, "{name} at λ = {lambda}: {report:?}");
        }
    }
}

#[test]
fn theorem_holds_on_analytic_rectangles() {
    for (a, b) in [(1.0, 1.0), (2.0, 1.0), (3.0, 0.5), (0.7, 0.7)] {
        let p = ConvexPolygon::rectangle(a, b).unwrap();
        let s = NeumannSpectrum::rectangle_analytic(a, b, 700.0).unwrap();
        for lambda in [1.0, 7.5, 33.0, 150.0, 600.0] {
            let report = bounds::verify_main_theorem(&p, lambda, &s, &VerifyOptions::default()).unwrap();
            assert!(report.pass && report.n_n >= report.packing_l, "{a}×{b} at λ = {lambda}: {report:?}");
        }
    }
}
