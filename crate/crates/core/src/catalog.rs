//! Ready-made systems: finite permutation systems, the Sierpiński IFS, a
//! minimal contracting pair on an interval, the Σ₂ prepend maps and two
//! circle systems built from interval homeomorphisms.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ifs::Ifs;
use crate::spaces::{wrap_unit, BinarySeq, BoxCover, PlaneRegion, Point, Space};

const SQRT3_4: f64 = 0.433_012_701_892_219_3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Example {
    /// All permutations of an n-point discrete space, `1 ≤ n ≤ 4`.
    FiniteSet(usize),
    Sierpinski,
    /// `(1/2 + 2α)x − α` and `(1/2 + 2α)x + 1/2 − α`, `0 < α < 1/4`.
    MinimalPair(f64),
    Sigma2Shift,
    /// Circle system whose lifts fix `0`, `a` and `1`.
    CircleCounterexample(f64),
    /// Circle system whose lifts fix `0`, `1/2` and `1`, one of them pulling
    /// the upper half back to `1/2`.
    CircleHalfpoint,
}

/// Documented properties of a catalog entry.
#[derive(Clone, Debug, PartialEq)]
pub struct ExampleInfo {
    pub name: &'static str,
    pub parameters: String,
    pub has_average_shadowing: bool,
    pub ratio: Option<f64>,
    pub fixed_points: Vec<Point>,
    pub note: &'static str,
}

impl fmt::Display for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Example::FiniteSet(n) => write!(f, "finite_set(n={n})"),
            Example::Sierpinski => f.write_str("sierpinski"),
            Example::MinimalPair(a) => write!(f, "minimal_pair(alpha={a})"),
            Example::Sigma2Shift => f.write_str("sigma2_shift"),
            Example::CircleCounterexample(a) => write!(f, "circle_counterexample(a={a})"),
            Example::CircleHalfpoint => f.write_str("circle_halfpoint"),
        }
    }
}

/// The six catalog entries with their default parameters.
pub fn catalog() -> Vec<Example> {
    vec![
        Example::FiniteSet(3),
        Example::Sierpinski,
        Example::MinimalPair(0.125),
        Example::Sigma2Shift,
        Example::CircleCounterexample(0.5),
        Example::CircleHalfpoint,
    ]
}

impl Example {
    /// Parses a catalog name with an optional numeric parameter.
    pub fn parse(name: &str, param: Option<f64>) -> Result<Self> {
        let e = match name {
            "finite_set" => {
                let n = param.unwrap_or(3.0);
                if n.fract() != 0.0 || n < 0.0 {
                    return Err(Error::InvalidParameter(format!("finite_set size {n}")));
                }
                Example::FiniteSet(n as usize)
            }
            "sierpinski" => Example::Sierpinski,
            "minimal_pair" => Example::MinimalPair(param.unwrap_or(0.125)),
            "sigma2_shift" => Example::Sigma2Shift,
            "circle_counterexample" => Example::CircleCounterexample(param.unwrap_or(0.5)),
            "circle_halfpoint" => Example::CircleHalfpoint,
            other => return Err(Error::InvalidParameter(format!("unknown example {other:?}"))),
        };
        e.validate()?;
        Ok(e)
    }

    pub fn key(&self) -> &'static str {
        match self {
            Example::FiniteSet(_) => "finite_set",
            Example::Sierpinski => "sierpinski",
            Example::MinimalPair(_) => "minimal_pair",
            Example::Sigma2Shift => "sigma2_shift",
            Example::CircleCounterexample(_) => "circle_counterexample",
            Example::CircleHalfpoint => "circle_halfpoint",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        match *self {
            Example::FiniteSet(n) if !(1..=4).contains(&n) => bad(format!("finite_set needs 1 ≤ n ≤ 4, got {n}")),
            Example::MinimalPair(a) if !(a > 0.0 && a < 0.25) => {
                bad(format!("minimal_pair needs 0 < α < 1/4, got {a}"))
            }
            Example::CircleCounterexample(a) if !(a > 0.0 && a < 1.0) => {
                bad(format!("circle_counterexample needs 0 < a < 1, got {a}"))
            }
            _ => Ok(()),
        }
    }

    pub fn info(&self) -> ExampleInfo {
        match *self {
            Example::FiniteSet(n) => ExampleInfo {
                name: "finite_set",
                parameters: format!("n={n}"),
                has_average_shadowing: true,
                ratio: None,
                fixed_points: vec![],
                note: "all permutations of a discrete n-point space; every sequence is an exact orbit",
            },
            Example::Sierpinski => ExampleInfo {
                name: "sierpinski",
                parameters: String::new(),
                has_average_shadowing: true,
                ratio: Some(0.5),
                fixed_points: vec![
                    Point::Pair(0.0, 0.0),
                    Point::Pair(1.0, 0.0),
                    Point::Pair(0.5, 2.0 * SQRT3_4),
                ],
                note: "three ratio-1/2 similarities of the filled triangle",
            },
            Example::MinimalPair(a) => ExampleInfo {
                name: "minimal_pair",
                parameters: format!("alpha={a}"),
                has_average_shadowing: true,
                ratio: Some(0.5 + 2.0 * a),
                fixed_points: vec![
                    Point::Real(-a / (0.5 - 2.0 * a)),
                    Point::Real((0.5 - a) / (0.5 - 2.0 * a)),
                ],
                note: "uniformly contracting pair restricted to its invariant interval",
            },
            Example::Sigma2Shift => ExampleInfo {
                name: "sigma2_shift",
                parameters: String::new(),
                has_average_shadowing: true,
                ratio: Some(0.5),
                fixed_points: vec![Point::Seq(BinarySeq::constant(0)), Point::Seq(BinarySeq::constant(1))],
                note: "prepend maps f0(s) = 0s, f1(s) = 1s",
            },
            Example::CircleCounterexample(a) => ExampleInfo {
                name: "circle_counterexample",
                parameters: format!("a={a}"),
                has_average_shadowing: false,
                ratio: None,
                fixed_points: vec![Point::Real(0.0), Point::Real(a)],
                note: "both lifts push every non-fixed point upward; every point is chain recurrent",
            },
            Example::CircleHalfpoint => ExampleInfo {
                name: "circle_halfpoint",
                parameters: String::new(),
                has_average_shadowing: false,
                ratio: None,
                fixed_points: vec![Point::Real(0.0), Point::Real(0.5)],
                note: "f1 attracts both halves to 1/2; with f2 the whole circle is one chain component",
            },
        }
    }

    pub fn make(&self) -> Result<Ifs> {
        self.validate()?;
        match *self {
            Example::FiniteSet(n) => finite_set(n),
            Example::Sierpinski => sierpinski(),
            Example::MinimalPair(a) => minimal_pair(a),
            Example::Sigma2Shift => sigma2_shift(),
            Example::CircleCounterexample(a) => circle_system(
                "circle_counterexample",
                [Lift::new(LiftKind::Up1, a), Lift::new(LiftKind::Up2, a)],
            ),
            Example::CircleHalfpoint => circle_system(
                "circle_halfpoint",
                [Lift::new(LiftKind::Half1, 0.5), Lift::new(LiftKind::Half2, 0.5)],
            ),
        }
    }
}

fn real(p: &Point) -> f64 {
    p.as_real().expect("real coordinate")
}

fn pair(p: &Point) -> (f64, f64) {
    p.as_pair().expect("planar point")
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

fn finite_set(n: usize) -> Result<Ifs> {
    let mut b = Ifs::builder(format!("finite_set({n})"), Space::Finite(n)).surjective(true);
    for perm in permutations(n) {
        let mut inv = vec![0; n];
        for (i, &j) in perm.iter().enumerate() {
            inv[j] = i;
        }
        let label = format!("{perm:?}");
        b = b.map_with_inverse(
            label,
            move |p| match p {
                Point::Index(i) => Point::Index(perm[*i]),
                other => other.clone(),
            },
            move |p| match p {
                Point::Index(i) => Point::Index(inv[*i]),
                other => other.clone(),
            },
        );
    }
    b.build()
}

/// The filled triangle with vertices `(0,0)`, `(1,0)`, `(1/2, √3/2)`.
pub fn sierpinski_triangle() -> Space {
    Space::Plane(PlaneRegion::triangle([[0.0, 0.0], [1.0, 0.0], [0.5, 2.0 * SQRT3_4]]).expect("triangle"))
}

const SIERPINSKI_SHIFTS: [(f64, f64); 3] = [(0.0, 0.0), (0.5, 0.0), (0.25, SQRT3_4)];

fn sierpinski() -> Result<Ifs> {
    let mut b = Ifs::builder("sierpinski", sierpinski_triangle()).ratio(0.5);
    for (k, (tx, ty)) in SIERPINSKI_SHIFTS.into_iter().enumerate() {
        b = b.map_with_inverse(
            format!("f{}", k + 1),
            move |p| {
                let (x, y) = pair(p);
                Point::Pair(0.5 * x + tx, 0.5 * y + ty)
            },
            move |p| {
                let (x, y) = pair(p);
                Point::Pair(2.0 * (x - tx), 2.0 * (y - ty))
            },
        );
    }
    b.build()
}

/// Point of the Sierpiński gasket `f_{a₀} ∘ f_{a₁} ∘ … ∘ f_{aₘ₋₁}(base)`,
/// together with its backward chain: entry `i` is the point reached after
/// dropping the first `i + 1` address symbols, paired with the symbol that
/// maps it onto entry `i − 1` (or onto the returned point for `i = 0`).
pub fn sierpinski_address_point(address: &[usize], base: &Point) -> (Point, Vec<(Point, usize)>) {
    let sys = sierpinski().expect("catalog system");
    let mut tail = base.clone();
    let mut chain = Vec::with_capacity(address.len());
    for &s in address.iter().rev() {
        chain.push((tail.clone(), s));
        tail = sys.apply(s, &tail).expect("address symbol in 0..3");
    }
    chain.reverse();
    (tail, chain)
}

/// Hull iteration of `[0, 1]` under the pair, widened by the contraction
/// error bound so that the result contains the invariant interval.
pub fn minimal_pair_interval(alpha: f64) -> (f64, f64) {
    let beta = 0.5 + 2.0 * alpha;
    let f1 = |x: f64| beta * x - alpha;
    let f2 = |x: f64| beta * x + 0.5 - alpha;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    loop {
        let nlo = f1(lo).min(f2(lo)).min(lo);
        let nhi = f1(hi).max(f2(hi)).max(hi);
        let step = (nlo - lo).abs().max((nhi - hi).abs());
        lo = nlo;
        hi = nhi;
        if step < 1e-9 {
            let pad = step / (1.0 - beta) + 1e-12;
            return (lo - pad, hi + pad);
        }
    }
}

fn minimal_pair(alpha: f64) -> Result<Ifs> {
    let beta = 0.5 + 2.0 * alpha;
    let (lo, hi) = minimal_pair_interval(alpha);
    Ifs::builder(format!("minimal_pair({alpha})"), Space::interval(lo, hi)?)
        .map_with_inverse(
            "f1",
            move |p| Point::Real(beta * real(p) - alpha),
            move |p| Point::Real((real(p) + alpha) / beta),
        )
        .map_with_inverse(
            "f2",
            move |p| Point::Real(beta * real(p) + 0.5 - alpha),
            move |p| Point::Real((real(p) - 0.5 + alpha) / beta),
        )
        .ratio(beta)
        .build()
}

fn seq(p: &Point) -> &BinarySeq {
    match p {
        Point::Seq(s) => s,
        other => panic!("expected a Σ₂ point, got {other}"),
    }
}

fn sigma2_shift() -> Result<Ifs> {
    let mut b = Ifs::builder("sigma2_shift", Space::Sigma2).ratio(0.5);
    for bit in 0..=1u8 {
        b = b.map_with_inverse(
            format!("f{bit}"),
            move |p| Point::Seq(seq(p).prepend(bit)),
            |p| Point::Seq(seq(p).shift()),
        );
    }
    b.build()
}

/// Two halves on the unit interval, `x/2` and `x/2 + 1/2`.
pub fn interval_halves() -> Ifs {
    Ifs::builder("interval_halves", Space::unit_interval())
        .map_with_inverse("h0", |p| Point::Real(real(p) / 2.0), |p| Point::Real(2.0 * real(p)))
        .map_with_inverse(
            "h1",
            |p| Point::Real(real(p) / 2.0 + 0.5),
            |p| Point::Real(2.0 * real(p) - 1.0),
        )
        .ratio(0.5)
        .build()
        .expect("two maps")
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LiftKind {
    /// `t + (a−t)t` on `[0,a]`, `t + (1−t)(t−a)` on `[a,1]`.
    Up1,
    /// `t + (a−t)t²` on `[0,a]`, `t + (1−t²)(t−a)` on `[a,1]`.
    Up2,
    /// `t + (1/2−t)t` on `[0,1/2]`, `t − (t−1/2)(1−t)` on `[1/2,1]`.
    Half1,
    /// `t + (1/2−t)t` on `[0,1/2]`, `t + (1−t)(t−1/2)` on `[1/2,1]`.
    Half2,
}

/// A piecewise-polynomial homeomorphism of `[0,1]` fixing `0`, `a`, `1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lift {
    pub kind: LiftKind,
    pub a: f64,
}

impl Lift {
    pub fn new(kind: LiftKind, a: f64) -> Self {
        Self { kind, a }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let a = self.a;
        let lower = t <= a;
        match (self.kind, lower) {
            (LiftKind::Up1 | LiftKind::Half1 | LiftKind::Half2, true) => t + (a - t) * t,
            (LiftKind::Up2, true) => t + (a - t) * t * t,
            (LiftKind::Up1 | LiftKind::Half2, false) => t + (1.0 - t) * (t - a),
            (LiftKind::Up2, false) => t + (1.0 - t * t) * (t - a),
            (LiftKind::Half1, false) => t - (t - a) * (1.0 - t),
        }
    }

    /// Polynomial coefficients `c₀ + c₁t + c₂t² + c₃t³` of the branch.
    fn coefficients(&self, lower: bool) -> [f64; 4] {
        let a = self.a;
        match (self.kind, lower) {
            (LiftKind::Up1 | LiftKind::Half1 | LiftKind::Half2, true) => [0.0, 1.0 + a, -1.0, 0.0],
            (LiftKind::Up2, true) => [0.0, 1.0, a, -1.0],
            (LiftKind::Up1 | LiftKind::Half2, false) => [-a, 2.0 + a, -1.0, 0.0],
            (LiftKind::Up2, false) => [-a, 2.0, a, -1.0],
            (LiftKind::Half1, false) => [a, -a, 1.0, 0.0],
        }
    }

    /// Whether the lift is strictly increasing on `[0,1]`. Only `Up2` with
    /// `a < 1/2` fails: its upper branch overshoots 1 near `t = 1`.
    pub fn is_homeomorphism(&self) -> bool {
        !(self.kind == LiftKind::Up2 && self.a < 0.5)
    }

    /// Inverse on `[0,1]`: quadratic branches in closed form, cubic branches
    /// by bisection to machine precision.
    pub fn invert(&self, v: f64) -> f64 {
        let v = v.clamp(0.0, 1.0);
        let lower = v <= self.a;
        let (lo, hi) = if lower { (0.0, self.a) } else { (self.a, 1.0) };
        let c = self.coefficients(lower);
        if c[3] == 0.0 {
            let t = solve_quadratic_in(c[2], c[1], c[0] - v, lo, hi);
            return t.clamp(lo, hi);
        }
        let (mut a, mut b) = (lo, hi);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if self.eval(m) < v {
                a = m;
            } else {
                b = m;
            }
        }
        if (self.eval(a) - v).abs() <= (self.eval(b) - v).abs() {
            a
        } else {
            b
        }
    }
}

/// Root of `qt² + lt + k = 0` closest to `[lo, hi]`.
fn solve_quadratic_in(q: f64, l: f64, k: f64, lo: f64, hi: f64) -> f64 {
    let disc = (l * l - 4.0 * q * k).max(0.0).sqrt();
    // numerically stable pair of roots
    let s = -0.5 * (l + l.signum() * disc);
    let mut roots = vec![];
    if s != 0.0 {
        roots.push(k / s);
    }
    if q != 0.0 {
        roots.push(s / q);
    }
    let outside = |t: f64| (lo - t).max(t - hi).max(0.0);
    roots
        .into_iter()
        .min_by(|x, y| outside(*x).total_cmp(&outside(*y)))
        .unwrap_or(lo)
}

fn circle_system(name: &str, lifts: [Lift; 2]) -> Result<Ifs> {
    let homeo = lifts.iter().all(Lift::is_homeomorphism);
    let mut b = Ifs::builder(name, Space::Circle).surjective(homeo);
    for (k, lift) in lifts.into_iter().enumerate() {
        let f = move |p: &Point| Point::Real(wrap_unit(lift.eval(real(p))));
        if lift.is_homeomorphism() {
            b = b.map_with_inverse(format!("f{}", k + 1), f, move |p| {
                Point::Real(wrap_unit(lift.invert(real(p))))
            });
        } else {
            b = b.map(format!("f{}", k + 1), f);
        }
    }
    b.build()
}

/// The two lifts of a circle example, if it has them.
pub fn circle_lifts(example: &Example) -> Option<[Lift; 2]> {
    match *example {
        Example::CircleCounterexample(a) => Some([Lift::new(LiftKind::Up1, a), Lift::new(LiftKind::Up2, a)]),
        Example::CircleHalfpoint => Some([Lift::new(LiftKind::Half1, 0.5), Lift::new(LiftKind::Half2, 0.5)]),
        _ => None,
    }
}

/// Fraction of boxes visited by random compositions started at `start`.
///
/// The first tenth of the iterations (at most 1000) is discarded as burn-in.
/// Only boxes meeting the space count toward the total. This is density
/// evidence at one resolution, not a proof of minimality.
pub fn minimality_probe(ifs: &Ifs, start: &Point, iterations: usize, resolution: usize, seed: u64) -> Result<f64> {
    if iterations == 0 {
        return Err(Error::InvalidParameter("iterations must be positive".into()));
    }
    ifs.space().check(start)?;
    let cover = BoxCover::new(ifs.space(), resolution)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let burn = (iterations / 10).min(1000);
    let mut visited = vec![false; cover.len()];
    let mut x = start.clone();
    for i in 0..iterations {
        x = ifs.apply(rng.gen_range(0..ifs.len()), &x)?;
        if i >= burn {
            visited[cover.locate(&x)?] = true;
        }
    }
    let (mut hit, mut total) = (0usize, 0usize);
    for (i, v) in visited.iter().enumerate() {
        if cover.meets_space(i) {
            total += 1;
            hit += usize::from(*v);
        }
    }
    Ok(hit as f64 / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sierpinski_maps() {
        let s = Example::Sierpinski.make().unwrap();
        assert_eq!(s.apply(0, &Point::Pair(1.0, 0.0)).unwrap(), Point::Pair(0.5, 0.0));
        assert_eq!(s.apply(1, &Point::Pair(0.0, 0.0)).unwrap(), Point::Pair(0.5, 0.0));
        let (x, y) = s.apply(2, &Point::Pair(0.0, 0.0)).unwrap().as_pair().unwrap();
        assert_eq!(x, 0.25);
        assert!((y - 3f64.sqrt() / 4.0).abs() < 1e-16);
    }

    #[test]
    fn counterexample_values() {
        let up1 = Lift::new(LiftKind::Up1, 0.5);
        assert_eq!(up1.eval(0.25), 5.0 / 16.0);
        for a in [0.2, 0.5, 0.7] {
            for kind in [LiftKind::Up1, LiftKind::Up2] {
                let l = Lift::new(kind, a);
                assert_eq!(l.eval(0.0), 0.0);
                assert_eq!(l.eval(a), a);
                assert_eq!(l.eval(1.0), 1.0);
            }
        }
    }

    #[test]
    fn halfpoint_lifts_fix_the_midpoint() {
        for kind in [LiftKind::Half1, LiftKind::Half2] {
            let l = Lift::new(kind, 0.5);
            assert_eq!(l.eval(0.5), 0.5);
            assert_eq!(l.eval(1.0), 1.0);
        }
        // f1 pulls the upper half down toward 1/2
        assert!(Lift::new(LiftKind::Half1, 0.5).eval(0.8) < 0.8);
        assert!(Lift::new(LiftKind::Half2, 0.5).eval(0.8) > 0.8);
    }

    #[test]
    fn lift_inverses() {
        for (kind, a) in [
            (LiftKind::Up1, 0.5),
            (LiftKind::Up2, 0.5),
            (LiftKind::Up1, 0.3),
            (LiftKind::Up2, 0.8),
            (LiftKind::Half1, 0.5),
            (LiftKind::Half2, 0.5),
        ] {
            let l = Lift::new(kind, a);
            for i in 0..=1000 {
                let t = i as f64 / 1000.0;
                let v = l.eval(t);
                let back = l.invert(v);
                // the Up2 branch is flat at t = 1 when a = 1/2, so compare residuals
                assert!((l.eval(back) - v).abs() < 1e-14, "{kind:?} a={a} t={t} back={back}");
                if t < 0.99 {
                    assert!((back - t).abs() < 1e-10, "{kind:?} a={a} t={t} back={back}");
                }
            }
        }
    }

    #[test]
    fn monotone_growth_hypothesis() {
        for a in [0.5, 0.3, 0.75] {
            for kind in [LiftKind::Up1, LiftKind::Up2] {
                let l = Lift::new(kind, a);
                for i in 1..1000 {
                    let t = i as f64 / 1000.0;
                    if (t - a).abs() > 1e-12 {
                        assert!(l.eval(t) > t, "{kind:?} a={a} t={t}");
                    }
                }
            }
        }
    }

    #[test]
    fn circle_maps_commute_with_projection() {
        let tau = std::f64::consts::TAU;
        for ex in [Example::CircleCounterexample(0.5), Example::CircleHalfpoint] {
            let sys = ex.make().unwrap();
            let lifts = circle_lifts(&ex).unwrap();
            for (k, lift) in lifts.iter().enumerate() {
                for i in 0..=1000 {
                    let t = i as f64 / 1000.0;
                    let via_lift = lift.eval(t);
                    let via_circle = real(&sys.apply(k, &Point::Real(wrap_unit(t))).unwrap());
                    assert!(((tau * via_lift).cos() - (tau * via_circle).cos()).abs() < 1e-12);
                    assert!(((tau * via_lift).sin() - (tau * via_circle).sin()).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn parameters_out_of_range() {
        assert!(Example::MinimalPair(0.25).make().is_err());
        assert!(Example::MinimalPair(0.0).make().is_err());
        assert!(Example::CircleCounterexample(1.0).make().is_err());
        assert!(Example::FiniteSet(5).make().is_err());
        assert!(Example::parse("nope", None).is_err());
    }

    #[test]
    fn catalog_systems_pass_ratio_and_range_checks() {
        for ex in catalog() {
            let sys = ex.make().unwrap();
            sys.verify_range(2000, 11).unwrap();
            if sys.ratio().is_some() {
                sys.verify_ratio(10_000, 12).unwrap();
            }
            assert_eq!(sys.ratio(), ex.info().ratio);
        }
        assert_eq!(catalog().len(), 6);
    }

    #[test]
    fn fixed_points_are_fixed() {
        for ex in catalog() {
            let sys = ex.make().unwrap();
            let info = ex.info();
            for p in &info.fixed_points {
                let fixed_by_some = (0..sys.len()).any(|s| sys.space().dist(&sys.apply(s, p).unwrap(), p) < 1e-12);
                assert!(fixed_by_some, "{ex}: {p}");
            }
        }
    }

    #[test]
    fn finite_set_counts_permutations() {
        assert_eq!(Example::FiniteSet(3).make().unwrap().len(), 6);
        assert_eq!(Example::FiniteSet(4).make().unwrap().len(), 24);
    }

    #[test]
    fn minimal_pair_interval_contains_attractor() {
        let (lo, hi) = minimal_pair_interval(0.125);
        assert!(lo <= -0.5 && lo > -0.5 - 1e-7);
        assert!((1.5..1.5 + 1e-7).contains(&hi));
    }

    #[test]
    fn sigma2_power_prepends_two_symbols() {
        let f = Example::Sigma2Shift.make().unwrap();
        let g = crate::ifs::power_ifs(&f, 2).unwrap();
        let s = Point::Seq(BinarySeq::constant(1));
        let out = g.apply(1, &s).unwrap();
        assert_eq!(out, Point::Seq(BinarySeq::new(&[1, 0], &[1]).unwrap()));
    }

    #[test]
    fn address_chain_maps_forward_exactly() {
        let sys = Example::Sierpinski.make().unwrap();
        let (y, chain) = sierpinski_address_point(&[0, 2, 1, 1], &Point::Pair(0.3, 0.2));
        let mut target = y.clone();
        for (p, s) in &chain {
            assert_eq!(sys.apply(*s, p).unwrap(), target);
            target = p.clone();
        }
    }

    #[test]
    fn constant_map_coverage() {
        let sys = Ifs::builder("const", Space::unit_interval())
            .map("c", |_| Point::Real(0.3))
            .build()
            .unwrap();
        let c = minimality_probe(&sys, &Point::Real(0.9), 500, 64, 1).unwrap();
        assert_eq!(c, 1.0 / 64.0);
    }

    #[test]
    fn minimality_probe_regressions() {
        let pair = Example::MinimalPair(0.125).make().unwrap();
        let c = minimality_probe(&pair, &Point::Real(0.5), 100_000, 256, 7).unwrap();
        // the two end boxes on each side need ~19 equal symbols in a row
        assert_eq!(c, 253.0 / 256.0);
        let gasket = Example::Sierpinski.make().unwrap();
        let c = minimality_probe(&gasket, &Point::Pair(0.0, 0.0), 100_000, 64, 7).unwrap();
        assert_eq!(c, 0.44710211591536336);
    }
}
