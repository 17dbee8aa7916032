use proptest::prelude::*;

use ifs_shadow::catalog::Example;
use ifs_shadow::orbit::{validate_errors, PseudoOrbit, ValidationMode};
use ifs_shadow::shadow::{error_bound, tail_statistic};
use ifs_shadow::spaces::BinarySeq;
use ifs_shadow::{Point, Space, SymbolWord};

fn bits(max: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..=1, 0..max)
}

fn seq() -> impl Strategy<Value = BinarySeq> {
    (bits(12), prop::collection::vec(0u8..=1, 1..4)).prop_map(|(p, t)| BinarySeq::new(&p, &t).unwrap())
}

fn triangle_point() -> impl Strategy<Value = Point> {
    (0.0..=1.0f64, 0.0..=1.0f64).prop_map(|(u, v)| {
        let (u, v) = if u + v > 1.0 { (1.0 - u, 1.0 - v) } else { (u, v) };
        let h = 3f64.sqrt() / 2.0;
        Point::Pair(u + 0.5 * v, h * v)
    })
}

fn check_metric(space: &Space, a: &Point, b: &Point, c: &Point) -> Result<(), TestCaseError> {
    let d = |p, q| space.distance(p, q).unwrap();
    prop_assert_eq!(d(a, a), 0.0);
    prop_assert!(d(a, b) >= 0.0);
    prop_assert_eq!(d(a, b), d(b, a));
    prop_assert!(d(a, c) <= d(a, b) + d(b, c) + 1e-12);
    Ok(())
}

proptest! {
    #[test]
    fn circle_metric(a in 0.0..1.0f64, b in 0.0..1.0f64, c in 0.0..1.0f64) {
        let s = Space::Circle;
        check_metric(&s, &Point::Real(a), &Point::Real(b), &Point::Real(c))?;
        prop_assert!(s.dist(&Point::Real(a), &Point::Real(b)) <= 0.5);
    }

    #[test]
    fn sigma2_metric(a in seq(), b in seq(), c in seq()) {
        check_metric(&Space::Sigma2, &Point::Seq(a), &Point::Seq(b), &Point::Seq(c))?;
    }

    #[test]
    fn plane_metric(a in triangle_point(), b in triangle_point(), c in triangle_point()) {
        let sys = Example::Sierpinski.make().unwrap();
        check_metric(sys.space(), &a, &b, &c)?;
    }

    #[test]
    fn product_metric_is_max(a in 0.0..1.0f64, b in 0.0..1.0f64, s in seq(), t in seq()) {
        let space = Space::product(Space::Circle, Space::Sigma2);
        let p = Point::pair(Point::Real(a), Point::Seq(s.clone()));
        let q = Point::pair(Point::Real(b), Point::Seq(t.clone()));
        let expect = Space::Circle.dist(&Point::Real(a), &Point::Real(b))
            .max(Space::Sigma2.dist(&Point::Seq(s), &Point::Seq(t)));
        prop_assert_eq!(space.dist(&p, &q), expect);
    }

    #[test]
    fn prepend_halves_distance(a in seq(), b in seq(), bit in 0u8..=1) {
        let d = Space::Sigma2.dist(&Point::Seq(a.clone()), &Point::Seq(b.clone()));
        let e = Space::Sigma2.dist(&Point::Seq(a.prepend(bit)), &Point::Seq(b.prepend(bit)));
        prop_assert_eq!(e, d / 2.0);
    }

    #[test]
    fn shift_undoes_prepend(a in seq(), bit in 0u8..=1) {
        prop_assert_eq!(a.prepend(bit).shift(), a);
    }

    #[test]
    fn compose_of_concatenation(
        u in prop::collection::vec(0usize..3, 0..8),
        v in prop::collection::vec(0usize..3, 0..8),
        p in triangle_point(),
    ) {
        let sys = Example::Sierpinski.make().unwrap();
        let (u, v) = (SymbolWord::new(u), SymbolWord::new(v));
        let direct = sys.compose_apply(&u.concat(&v), &p).unwrap();
        let staged = sys.compose_apply(&v, &sys.compose_apply(&u, &p).unwrap()).unwrap();
        prop_assert!(sys.space().dist(&direct, &staged) < 1e-12);
    }

    #[test]
    fn contraction_holds(s in 0usize..2, a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let sys = Example::MinimalPair(0.125).make().unwrap();
        let (lo, hi) = match sys.space() { Space::Interval { lo, hi } => (*lo, *hi), _ => unreachable!() };
        let (x, y) = (Point::Real(lo + a * (hi - lo)), Point::Real(lo + b * (hi - lo)));
        let before = sys.space().dist(&x, &y);
        let after = sys.space().dist(&sys.apply(s, &x).unwrap(), &sys.apply(s, &y).unwrap());
        prop_assert!(after <= 0.75 * before + 1e-12);
    }

    #[test]
    fn average_validation_is_monotone_in_delta(
        errors in prop::collection::vec(0.0..1.0f64, 1..60),
        d1 in 0.01..1.0f64,
        d2 in 0.01..1.0f64,
    ) {
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        let a = validate_errors(&errors, lo, ValidationMode::Average).unwrap();
        let b = validate_errors(&errors, hi, ValidationMode::Average).unwrap();
        if let (Some(n_lo), Some(n_hi)) = (a.first_index(), b.first_index()) {
            prop_assert!(n_hi <= n_lo);
        }
        prop_assert!(!a.passed() || b.passed());
    }

    #[test]
    fn shifted_mode_is_stricter(errors in prop::collection::vec(0.0..1.0f64, 1..40), delta in 0.05..1.0f64) {
        let plain = validate_errors(&errors, delta, ValidationMode::Average).unwrap();
        let shifted = validate_errors(&errors, delta, ValidationMode::AverageShifted).unwrap();
        prop_assert!(!shifted.passed() || plain.passed());
    }

    #[test]
    fn error_bound_dominates_true_orbit(
        steps in prop::collection::vec((0usize..2, 0.0..1.0f64), 1..30),
        x0 in 0.0..1.0f64,
    ) {
        // An arbitrary point sequence on the invariant interval, shadowed from x0.
        let sys = Example::MinimalPair(0.125).make().unwrap();
        let (lo, hi) = match sys.space() { Space::Interval { lo, hi } => (*lo, *hi), _ => unreachable!() };
        let at = |t: f64| Point::Real(lo + t * (hi - lo));
        let mut points = vec![at(x0)];
        points.extend(steps.iter().map(|&(_, t)| at(t)));
        let symbols: Vec<usize> = steps.iter().map(|&(s, _)| s).collect();
        let orbit = PseudoOrbit::from_points(&sys, points, symbols.clone()).unwrap();
        let mut y = orbit.points()[0].clone();
        for i in 0..=orbit.horizon() {
            let d = sys.space().dist(&y, &orbit.points()[i]);
            prop_assert!(d <= error_bound(orbit.errors(), 0.75, 0.0, i).unwrap() + 1e-12);
            if i < symbols.len() {
                y = sys.apply(symbols[i], &y).unwrap();
            }
        }
    }

    #[test]
    fn tail_is_within_profile_range(profile in prop::collection::vec(0.0..1.0f64, 1..100), w in 0.01..=1.0f64) {
        let t = tail_statistic(&profile, w).unwrap();
        let max = profile.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(t <= max);
        prop_assert!(t >= *profile.last().unwrap());
    }

    #[test]
    fn coordinates_round_trip(s in seq(), a in 0.0..1.0f64) {
        let space = Space::product(Space::Circle, Space::Sigma2);
        let p = Point::pair(Point::Real(a), Point::Seq(s));
        let text = space.coordinates(&p).unwrap();
        let fields: Vec<&str> = text.iter().map(String::as_str).collect();
        prop_assert_eq!(space.parse_coordinates(&fields).unwrap(), p);
    }
}
