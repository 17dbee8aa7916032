//! Metric spaces carrying the iterated function systems: the unit interval
//! (or any compact interval), the circle, plane regions, Σ₂, finite discrete
//! spaces and max-metric products of these.

mod cover;
mod sigma2;

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};

pub use cover::{BoxCover, Cell};
pub use sigma2::BinarySeq;

/// Slack used by membership tests on closed regions.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    Rectangle,
    Triangle([[f64; 2]; 3]),
}

/// A compact region of the Euclidean plane: bounding rectangle plus shape.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneRegion {
    pub min: [f64; 2],
    pub max: [f64; 2],
    pub shape: Shape,
}

impl PlaneRegion {
    pub fn rectangle(min: [f64; 2], max: [f64; 2]) -> Result<Self> {
        if !(min[0] < max[0] && min[1] < max[1]) {
            return Err(Error::InvalidParameter(format!(
                "degenerate rectangle {min:?}..{max:?}"
            )));
        }
        Ok(Self {
            min,
            max,
            shape: Shape::Rectangle,
        })
    }

    pub fn triangle(v: [[f64; 2]; 3]) -> Result<Self> {
        let area = cross(v[0], v[1], v[2]);
        if area.abs() < 1e-15 {
            return Err(Error::InvalidParameter("degenerate triangle".into()));
        }
        let min = [v[0][0].min(v[1][0]).min(v[2][0]), v[0][1].min(v[1][1]).min(v[2][1])];
        let max = [v[0][0].max(v[1][0]).max(v[2][0]), v[0][1].max(v[1][1]).max(v[2][1])];
        Ok(Self {
            min,
            max,
            shape: Shape::Triangle(v),
        })
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        match &self.shape {
            Shape::Rectangle => {
                x >= self.min[0] - MEMBERSHIP_TOL
                    && x <= self.max[0] + MEMBERSHIP_TOL
                    && y >= self.min[1] - MEMBERSHIP_TOL
                    && y <= self.max[1] + MEMBERSHIP_TOL
            }
            Shape::Triangle(v) => {
                let p = [x, y];
                let s = cross(v[0], v[1], v[2]).signum();
                (0..3).all(|i| s * cross(v[i], v[(i + 1) % 3], p) >= -MEMBERSHIP_TOL)
            }
        }
    }

    /// Whether the closed axis-aligned box `[lo, hi]` meets the region.
    pub fn meets_box(&self, lo: [f64; 2], hi: [f64; 2]) -> bool {
        match &self.shape {
            Shape::Rectangle => {
                lo[0] <= self.max[0] && hi[0] >= self.min[0] && lo[1] <= self.max[1] && hi[1] >= self.min[1]
            }
            Shape::Triangle(v) => {
                // separating axis test: box axes, then the three edge normals
                if hi[0] < self.min[0] || lo[0] > self.max[0] || hi[1] < self.min[1] || lo[1] > self.max[1] {
                    return false;
                }
                let corners = [lo, [hi[0], lo[1]], hi, [lo[0], hi[1]]];
                for i in 0..3 {
                    let a = v[i];
                    let b = v[(i + 1) % 3];
                    let n = [a[1] - b[1], b[0] - a[0]];
                    let proj = |p: [f64; 2]| n[0] * p[0] + n[1] * p[1];
                    let tri: Vec<f64> = v.iter().map(|&p| proj(p)).collect();
                    let (tmin, tmax) = minmax(&tri);
                    let bx: Vec<f64> = corners.iter().map(|&p| proj(p)).collect();
                    let (bmin, bmax) = minmax(&bx);
                    if bmax < tmin - MEMBERSHIP_TOL || bmin > tmax + MEMBERSHIP_TOL {
                        return false;
                    }
                }
                true
            }
        }
    }

    fn diameter(&self) -> f64 {
        match &self.shape {
            Shape::Rectangle => (self.max[0] - self.min[0]).hypot(self.max[1] - self.min[1]),
            // a convex polygon attains its diameter between vertices
            Shape::Triangle(v) => (0..3).map(|i| euclid(v[i], v[(i + 1) % 3])).fold(0.0, f64::max),
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        match &self.shape {
            Shape::Rectangle => (
                rng.gen_range(self.min[0]..=self.max[0]),
                rng.gen_range(self.min[1]..=self.max[1]),
            ),
            Shape::Triangle(v) => {
                let (mut r1, mut r2): (f64, f64) = (rng.gen(), rng.gen());
                if r1 + r2 > 1.0 {
                    r1 = 1.0 - r1;
                    r2 = 1.0 - r2;
                }
                (
                    v[0][0] + r1 * (v[1][0] - v[0][0]) + r2 * (v[2][0] - v[0][0]),
                    v[0][1] + r1 * (v[1][1] - v[0][1]) + r2 * (v[2][1] - v[0][1]),
                )
            }
        }
    }
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn euclid(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn minmax(xs: &[f64]) -> (f64, f64) {
    xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
        (lo.min(x), hi.max(x))
    })
}

/// The metric spaces the library works on.
#[derive(Clone, Debug, PartialEq)]
pub enum Space {
    /// Compact interval `[lo, hi]` with the usual distance.
    Interval {
        lo: f64,
        hi: f64,
    },
    /// Coordinate `x ∈ [0, 1)` with the wrap-around metric.
    Circle,
    Plane(PlaneRegion),
    /// One-sided binary sequences, `d(s, t) = 1/2^(k-1)` with `k` the first
    /// disagreeing position counted from 1.
    Sigma2,
    /// `n` points with the discrete metric.
    Finite(usize),
    /// Max-metric product.
    Product(Box<Space>, Box<Space>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Point {
    /// Interval or circle coordinate.
    Real(f64),
    Pair(f64, f64),
    Seq(BinarySeq),
    Index(usize),
    Product(Box<Point>, Box<Point>),
}

impl Point {
    pub fn pair(a: Point, b: Point) -> Self {
        Point::Product(Box::new(a), Box::new(b))
    }

    pub fn as_real(&self) -> Option<f64> {
        match self {
            Point::Real(x) => Some(*x),
            _ => None,
        }
    }

    pub fn as_pair(&self) -> Option<(f64, f64)> {
        match self {
            Point::Pair(x, y) => Some((*x, *y)),
            _ => None,
        }
    }

    pub fn components(&self) -> Option<(&Point, &Point)> {
        match self {
            Point::Product(a, b) => Some((a, b)),
            _ => None,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Real(x) => write!(f, "{x}"),
            Point::Pair(x, y) => write!(f, "({x}, {y})"),
            Point::Seq(s) => write!(f, "{s}"),
            Point::Index(i) => write!(f, "#{i}"),
            Point::Product(a, b) => write!(f, "[{a}; {b}]"),
        }
    }
}

/// Wraps a real number into the circle coordinate range `[0, 1)`.
pub fn wrap_unit(x: f64) -> f64 {
    let y = x.rem_euclid(1.0);
    // rem_euclid can round up to exactly 1.0 for tiny negative inputs
    if y >= 1.0 {
        0.0
    } else {
        y
    }
}

impl Space {
    pub fn unit_interval() -> Self {
        Space::Interval { lo: 0.0, hi: 1.0 }
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidParameter(format!("interval [{lo}, {hi}]")));
        }
        Ok(Space::Interval { lo, hi })
    }

    pub fn product(a: Space, b: Space) -> Self {
        Space::Product(Box::new(a), Box::new(b))
    }

    pub fn name(&self) -> String {
        match self {
            Space::Interval { lo, hi } => format!("interval[{lo},{hi}]"),
            Space::Circle => "circle".into(),
            Space::Plane(r) => match r.shape {
                Shape::Rectangle => "plane(rectangle)".into(),
                Shape::Triangle(_) => "plane(triangle)".into(),
            },
            Space::Sigma2 => "sigma2".into(),
            Space::Finite(n) => format!("finite({n})"),
            Space::Product(a, b) => format!("product({},{})", a.name(), b.name()),
        }
    }

    /// Number of real coordinates used by the columnar text format.
    pub fn coordinate_count(&self) -> usize {
        match self {
            Space::Interval { .. } | Space::Circle | Space::Sigma2 | Space::Finite(_) => 1,
            Space::Plane(_) => 2,
            Space::Product(a, b) => a.coordinate_count() + b.coordinate_count(),
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        match (self, p) {
            (Space::Interval { lo, hi }, Point::Real(x)) => *x >= lo - MEMBERSHIP_TOL && *x <= hi + MEMBERSHIP_TOL,
            (Space::Circle, Point::Real(x)) => (0.0..1.0).contains(x),
            (Space::Plane(r), Point::Pair(x, y)) => r.contains(*x, *y),
            (Space::Sigma2, Point::Seq(_)) => true,
            (Space::Finite(n), Point::Index(i)) => i < n,
            (Space::Product(a, b), Point::Product(p, q)) => a.contains(p) && b.contains(q),
            _ => false,
        }
    }

    pub fn check(&self, p: &Point) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(self.mismatch(p))
        }
    }

    fn mismatch(&self, p: &Point) -> Error {
        Error::SpaceMismatch {
            space: self.name(),
            point: p.to_string(),
        }
    }

    /// Metric value between two points of this space.
    pub fn distance(&self, p: &Point, q: &Point) -> Result<f64> {
        Ok(match (self, p, q) {
            (Space::Interval { .. }, Point::Real(x), Point::Real(y)) => (x - y).abs(),
            (Space::Circle, Point::Real(x), Point::Real(y)) => {
                let d = (x - y).abs().rem_euclid(1.0);
                d.min(1.0 - d)
            }
            (Space::Plane(_), Point::Pair(a, b), Point::Pair(c, d)) => (a - c).hypot(b - d),
            (Space::Sigma2, Point::Seq(s), Point::Seq(t)) => match s.first_disagreement(t) {
                None => 0.0,
                Some(i) => sigma2_weight(i),
            },
            (Space::Finite(_), Point::Index(i), Point::Index(j)) => {
                if i == j {
                    0.0
                } else {
                    1.0
                }
            }
            (Space::Product(a, b), Point::Product(p1, p2), Point::Product(q1, q2)) => {
                a.distance(p1, q1)?.max(b.distance(p2, q2)?)
            }
            _ => {
                return Err(if self.contains(p) {
                    self.mismatch(q)
                } else {
                    self.mismatch(p)
                })
            }
        })
    }

    /// Distance for points already known to belong to the space.
    ///
    /// Panics on a kind mismatch.
    pub fn dist(&self, p: &Point, q: &Point) -> f64 {
        match self.distance(p, q) {
            Ok(d) => d,
            Err(e) => panic!("{e}"),
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Space::Interval { lo, hi } => hi - lo,
            Space::Circle => 0.5,
            Space::Plane(r) => r.diameter(),
            Space::Sigma2 => 1.0,
            Space::Finite(n) => {
                if *n >= 2 {
                    1.0
                } else {
                    0.0
                }
            }
            Space::Product(a, b) => a.diameter().max(b.diameter()),
        }
    }

    /// A random point of the space. Σ₂ samples carry a random prefix of up to
    /// 24 symbols and a random period of length 1 to 4.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match self {
            Space::Interval { lo, hi } => Point::Real(rng.gen_range(*lo..=*hi)),
            Space::Circle => Point::Real(rng.gen_range(0.0..1.0)),
            Space::Plane(r) => {
                let (x, y) = r.sample(rng);
                Point::Pair(x, y)
            }
            Space::Sigma2 => {
                let plen = rng.gen_range(0..=24);
                let per = rng.gen_range(1..=4);
                let prefix: Vec<u8> = (0..plen).map(|_| rng.gen_range(0..=1)).collect();
                let period: Vec<u8> = (0..per).map(|_| rng.gen_range(0..=1)).collect();
                Point::Seq(BinarySeq::new(&prefix, &period).expect("valid bits"))
            }
            Space::Finite(n) => Point::Index(rng.gen_range(0..*n)),
            Space::Product(a, b) => Point::pair(a.sample(rng), b.sample(rng)),
        }
    }

    /// Moves `p` to a nearby point of the space at distance at most `size`,
    /// aiming for a displacement close to `size`.
    ///
    /// Interval moves are clamped to the interval and plane moves that would
    /// leave the region are retried, falling back to `p` itself. On Σ₂ the
    /// symbol at the first position whose weight is at most `size` is flipped;
    /// on a finite space `p` jumps to another point only when `size ≥ 1`.
    pub fn displace<R: Rng + ?Sized>(&self, p: &Point, size: f64, rng: &mut R) -> Point {
        if size <= 0.0 {
            return p.clone();
        }
        match (self, p) {
            (Space::Interval { lo, hi }, Point::Real(x)) => {
                let up = rng.gen_bool(0.5);
                let first = if up { x + size } else { x - size };
                let moved = if (*lo..=*hi).contains(&first) {
                    first
                } else if up {
                    x - size
                } else {
                    x + size
                };
                Point::Real(moved.clamp(*lo, *hi))
            }
            (Space::Circle, Point::Real(x)) => {
                let s = if rng.gen_bool(0.5) { size } else { -size };
                Point::Real(wrap_unit(x + s))
            }
            (Space::Plane(r), Point::Pair(x, y)) => {
                for _ in 0..64 {
                    let theta = rng.gen_range(0.0..std::f64::consts::TAU);
                    let (nx, ny) = (x + size * theta.cos(), y + size * theta.sin());
                    if r.contains(nx, ny) {
                        return Point::Pair(nx, ny);
                    }
                }
                p.clone()
            }
            (Space::Sigma2, Point::Seq(s)) => Point::Seq(s.flip(sigma2_position_within(size))),
            (Space::Finite(n), Point::Index(i)) => {
                if size >= 1.0 && *n >= 2 {
                    let j = rng.gen_range(0..n - 1);
                    Point::Index(if j >= *i { j + 1 } else { j })
                } else {
                    p.clone()
                }
            }
            (Space::Product(a, b), Point::Product(p1, p2)) => {
                Point::pair(a.displace(p1, size, rng), b.displace(p2, size, rng))
            }
            _ => p.clone(),
        }
    }

    /// Columnar text coordinates of a point.
    pub fn coordinates(&self, p: &Point) -> Result<Vec<String>> {
        self.check(p)?;
        let mut out = Vec::with_capacity(self.coordinate_count());
        push_coordinates(p, &mut out);
        Ok(out)
    }

    /// Inverse of [`Space::coordinates`].
    pub fn parse_coordinates(&self, fields: &[&str]) -> Result<Point> {
        if fields.len() != self.coordinate_count() {
            return Err(Error::Parse(format!(
                "{} expects {} coordinates, got {}",
                self.name(),
                self.coordinate_count(),
                fields.len()
            )));
        }
        let real =
            |s: &str| -> Result<f64> { s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{s:?}: {e}"))) };
        let p = match self {
            Space::Interval { .. } | Space::Circle => Point::Real(real(fields[0])?),
            Space::Plane(_) => Point::Pair(real(fields[0])?, real(fields[1])?),
            Space::Sigma2 => Point::Seq(BinarySeq::decode(fields[0].trim())?),
            Space::Finite(_) => Point::Index(
                fields[0]
                    .trim()
                    .parse()
                    .map_err(|e| Error::Parse(format!("{:?}: {e}", fields[0])))?,
            ),
            Space::Product(a, b) => {
                let k = a.coordinate_count();
                Point::pair(a.parse_coordinates(&fields[..k])?, b.parse_coordinates(&fields[k..])?)
            }
        };
        self.check(&p)?;
        Ok(p)
    }
}

fn push_coordinates(p: &Point, out: &mut Vec<String>) {
    match p {
        Point::Real(x) => out.push(x.to_string()),
        Point::Pair(x, y) => {
            out.push(x.to_string());
            out.push(y.to_string());
        }
        Point::Seq(s) => out.push(s.encode()),
        Point::Index(i) => out.push(i.to_string()),
        Point::Product(a, b) => {
            push_coordinates(a, out);
            push_coordinates(b, out);
        }
    }
}

/// Σ₂ distance of two sequences whose first disagreement is at 0-based
/// position `i`.
pub fn sigma2_weight(i: usize) -> f64 {
    0.5f64.powi(i.min(i32::MAX as usize) as i32)
}

/// Smallest 0-based position whose weight does not exceed `size`.
fn sigma2_position_within(size: f64) -> usize {
    let mut i = 0;
    while sigma2_weight(i) > size {
        i += 1;
    }
    i
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn seq(prefix: &[u8], period: &[u8]) -> Point {
        Point::Seq(BinarySeq::new(prefix, period).unwrap())
    }

    fn sierpinski_region() -> Space {
        Space::Plane(PlaneRegion::triangle([[0.0, 0.0], [1.0, 0.0], [0.5, 3f64.sqrt() / 2.0]]).unwrap())
    }

    #[test]
    fn circle_wraps() {
        let d = Space::Circle.distance(&Point::Real(0.9), &Point::Real(0.2)).unwrap();
        assert!((d - 0.3).abs() < 1e-15);
    }

    #[test]
    fn sigma2_distances() {
        let s = seq(&[], &[0]);
        assert_eq!(Space::Sigma2.distance(&s, &s).unwrap(), 0.0);
        // first disagreement at position 3 counted from 1
        let t = seq(&[0, 0, 1], &[0]);
        assert_eq!(Space::Sigma2.distance(&t, &s).unwrap(), 0.25);
        let u = seq(&[1], &[0]);
        assert_eq!(Space::Sigma2.distance(&u, &s).unwrap(), 1.0);
    }

    #[test]
    fn mismatched_kinds_are_rejected() {
        let e = Space::Circle.distance(&Point::Real(0.1), &Point::Pair(0.0, 0.0));
        assert!(matches!(e, Err(Error::SpaceMismatch { .. })));
        assert!(Space::Circle.check(&Point::Real(1.0)).is_err());
        assert!(Space::unit_interval().check(&Point::Real(1.0)).is_ok());
    }

    #[test]
    fn diameters() {
        assert_eq!(Space::unit_interval().diameter(), 1.0);
        assert_eq!(Space::Circle.diameter(), 0.5);
        assert_eq!(Space::product(Space::Circle, Space::Circle).diameter(), 0.5);
        assert_eq!(Space::Sigma2.diameter(), 1.0);
        assert!((sierpinski_region().diameter() - 1.0).abs() < 1e-15);
        let rect = Space::Plane(PlaneRegion::rectangle([0.0, 0.0], [3.0, 4.0]).unwrap());
        assert_eq!(rect.diameter(), 5.0);
    }

    #[test]
    fn product_uses_max_metric() {
        let s = Space::product(Space::unit_interval(), Space::Circle);
        let p = Point::pair(Point::Real(0.1), Point::Real(0.95));
        let q = Point::pair(Point::Real(0.3), Point::Real(0.05));
        assert!((s.distance(&p, &q).unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn diameter_bounds_sampled_distances() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for space in [
            Space::unit_interval(),
            Space::Circle,
            sierpinski_region(),
            Space::Sigma2,
            Space::Finite(3),
            Space::product(Space::Circle, sierpinski_region()),
        ] {
            for _ in 0..2000 {
                let p = space.sample(&mut rng);
                let q = space.sample(&mut rng);
                assert!(space.contains(&p));
                assert!(space.dist(&p, &q) <= space.diameter() + 1e-12);
            }
        }
    }

    #[test]
    fn displace_stays_within_size() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for space in [
            Space::unit_interval(),
            Space::Circle,
            sierpinski_region(),
            Space::Sigma2,
            Space::product(Space::Sigma2, Space::Circle),
        ] {
            for k in 0..500 {
                let p = space.sample(&mut rng);
                let size = 0.001 + (k as f64) / 600.0;
                let q = space.displace(&p, size, &mut rng);
                assert!(space.contains(&q), "{q} outside {}", space.name());
                assert!(space.dist(&p, &q) <= size + 1e-15);
            }
        }
    }

    #[test]
    fn sigma2_displacement_hits_the_largest_allowed_weight() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = seq(&[], &[1, 0]);
        let q = Space::Sigma2.displace(&p, 0.3, &mut rng);
        assert_eq!(Space::Sigma2.dist(&p, &q), 0.25);
    }

    #[test]
    fn triangle_box_intersection() {
        let Space::Plane(r) = sierpinski_region() else {
            unreachable!()
        };
        assert!(r.meets_box([0.4, 0.4], [0.6, 0.6]));
        // above-left of the left edge
        assert!(!r.meets_box([0.0, 0.7], [0.05, 0.8]));
        assert!(r.meets_box([-1.0, -1.0], [2.0, 2.0]));
    }

    #[test]
    fn coordinates_round_trip() {
        let s = Space::product(sierpinski_region(), Space::Sigma2);
        let p = Point::pair(Point::Pair(0.25, 0.1), seq(&[1, 0], &[0, 1]));
        let coords = s.coordinates(&p).unwrap();
        let fields: Vec<&str> = coords.iter().map(String::as_str).collect();
        assert_eq!(s.parse_coordinates(&fields).unwrap(), p);
        assert!(s.parse_coordinates(&fields[..2]).is_err());
    }
}
