//! Uniform box covers used to discretize ε-chains.
//!
//! Geometric boxes are half-open along every axis except the last box of
//! each axis, which is closed, so every point lies in exactly one box. On Σ₂
//! the boxes are the cylinders of a fixed word length.

use rand::Rng;

use super::{sigma2_weight, wrap_unit, BinarySeq, PlaneRegion, Point, Space};
use crate::error::{Error, Result};

/// Largest cylinder length accepted for Σ₂ covers.
pub const MAX_CYLINDER_LEN: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub index: usize,
    /// Grid coordinates per axis; for Σ₂ factors, the symbols of the cylinder word.
    pub coords: Vec<usize>,
    /// Lower corner per real axis (absent for Σ₂ and finite factors).
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Largest distance from the cell center to a point of the cell.
    pub radius: f64,
}

#[derive(Clone, Debug)]
enum Factor {
    Interval {
        lo: f64,
        width: f64,
        n: usize,
    },
    Circle {
        n: usize,
    },
    Plane {
        region: PlaneRegion,
        width: [f64; 2],
        n: usize,
    },
    Cylinders {
        len: usize,
    },
    Finite {
        n: usize,
    },
}

impl Factor {
    fn new(space: &Space, resolution: usize) -> Result<Self> {
        Ok(match space {
            Space::Interval { lo, hi } => Factor::Interval {
                lo: *lo,
                width: (hi - lo) / resolution as f64,
                n: resolution,
            },
            Space::Circle => Factor::Circle { n: resolution },
            Space::Plane(region) => Factor::Plane {
                width: [
                    (region.max[0] - region.min[0]) / resolution as f64,
                    (region.max[1] - region.min[1]) / resolution as f64,
                ],
                region: region.clone(),
                n: resolution,
            },
            Space::Sigma2 => {
                if resolution > MAX_CYLINDER_LEN {
                    return Err(Error::InvalidParameter(format!(
                        "cylinder length {resolution} exceeds {MAX_CYLINDER_LEN}"
                    )));
                }
                Factor::Cylinders { len: resolution }
            }
            Space::Finite(n) => Factor::Finite { n: *n },
            Space::Product(..) => unreachable!("products are flattened by the caller"),
        })
    }

    fn len(&self) -> usize {
        match self {
            Factor::Interval { n, .. } | Factor::Circle { n } | Factor::Finite { n } => *n,
            Factor::Plane { n, .. } => n * n,
            Factor::Cylinders { len } => 1 << len,
        }
    }

    fn radius(&self) -> f64 {
        match self {
            Factor::Interval { width, .. } => width / 2.0,
            Factor::Circle { n } => 0.5 / *n as f64,
            Factor::Plane { width, .. } => width[0].hypot(width[1]) / 2.0,
            // points of one cylinder agree on the first `len` symbols
            Factor::Cylinders { len } => sigma2_weight(*len),
            Factor::Finite { .. } => 0.0,
        }
    }

    fn cell(&self, i: usize) -> (Vec<usize>, Vec<f64>, Vec<f64>) {
        match self {
            Factor::Interval { lo, width, n } => {
                let a = lo + i as f64 * width;
                let b = if i + 1 == *n { lo + *n as f64 * width } else { a + width };
                (vec![i], vec![a], vec![b])
            }
            Factor::Circle { n } => (vec![i], vec![i as f64 / *n as f64], vec![(i + 1) as f64 / *n as f64]),
            Factor::Plane { region, width, n } => {
                let (ix, iy) = (i % n, i / n);
                let lo = [
                    region.min[0] + ix as f64 * width[0],
                    region.min[1] + iy as f64 * width[1],
                ];
                (vec![ix, iy], lo.to_vec(), vec![lo[0] + width[0], lo[1] + width[1]])
            }
            Factor::Cylinders { len } => (
                cylinder_word(i, *len).into_iter().map(usize::from).collect(),
                vec![],
                vec![],
            ),
            Factor::Finite { .. } => (vec![i], vec![], vec![]),
        }
    }

    fn locate(&self, p: &Point) -> Option<usize> {
        match (self, p) {
            (Factor::Interval { lo, width, n }, Point::Real(x)) => Some(grid_index(*x, *lo, *width, *n)),
            (Factor::Circle { n }, Point::Real(x)) => Some(grid_index(*x, 0.0, 1.0 / *n as f64, *n)),
            (Factor::Plane { region, width, n }, Point::Pair(x, y)) => {
                let ix = grid_index(*x, region.min[0], width[0], *n);
                let iy = grid_index(*y, region.min[1], width[1], *n);
                Some(iy * n + ix)
            }
            (Factor::Cylinders { len }, Point::Seq(s)) => {
                Some((0..*len).fold(0, |acc, k| (acc << 1) | usize::from(s.get(k))))
            }
            (Factor::Finite { n }, Point::Index(i)) if i < n => Some(*i),
            _ => None,
        }
    }

    fn center(&self, i: usize) -> Point {
        match self {
            Factor::Interval { lo, width, .. } => Point::Real(lo + (i as f64 + 0.5) * width),
            Factor::Circle { n } => Point::Real((i as f64 + 0.5) / *n as f64),
            Factor::Plane { region, width, n } => Point::Pair(
                region.min[0] + ((i % n) as f64 + 0.5) * width[0],
                region.min[1] + ((i / n) as f64 + 0.5) * width[1],
            ),
            Factor::Cylinders { len } => Point::Seq(BinarySeq::new(&cylinder_word(i, *len), &[0]).expect("bits")),
            Factor::Finite { .. } => Point::Index(i),
        }
    }

    fn corners(&self, i: usize) -> Vec<Point> {
        match self {
            Factor::Interval { .. } | Factor::Circle { .. } => {
                let (_, lo, hi) = self.cell(i);
                let wrap = matches!(self, Factor::Circle { .. });
                let up = if wrap { wrap_unit(hi[0]) } else { hi[0] };
                vec![Point::Real(lo[0]), Point::Real(up)]
            }
            Factor::Plane { .. } => {
                let (_, lo, hi) = self.cell(i);
                vec![
                    Point::Pair(lo[0], lo[1]),
                    Point::Pair(hi[0], lo[1]),
                    Point::Pair(lo[0], hi[1]),
                    Point::Pair(hi[0], hi[1]),
                ]
            }
            Factor::Cylinders { len } => {
                let w = cylinder_word(i, *len);
                [[1u8].as_slice(), &[0, 1], &[1, 0]]
                    .iter()
                    .map(|tail| Point::Seq(BinarySeq::new(&w, tail).expect("bits")))
                    .collect()
            }
            Factor::Finite { .. } => vec![],
        }
    }

    fn random_in<R: Rng + ?Sized>(&self, i: usize, rng: &mut R) -> Point {
        match self {
            Factor::Interval { .. } | Factor::Circle { .. } => {
                let (_, lo, hi) = self.cell(i);
                Point::Real(rng.gen_range(lo[0]..hi[0]))
            }
            Factor::Plane { .. } => {
                let (_, lo, hi) = self.cell(i);
                Point::Pair(rng.gen_range(lo[0]..hi[0]), rng.gen_range(lo[1]..hi[1]))
            }
            Factor::Cylinders { len } => {
                let mut w = cylinder_word(i, *len);
                w.extend((0..rng.gen_range(0..8)).map(|_| rng.gen_range(0..=1u8)));
                let period: Vec<u8> = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(0..=1)).collect();
                Point::Seq(BinarySeq::new(&w, &period).expect("bits"))
            }
            Factor::Finite { .. } => Point::Index(i),
        }
    }

    /// Cells meeting the edge rule for image point `y` at scale `eps`:
    /// geometric cells whose center lies within `eps + radius`, Σ₂ cylinders
    /// and finite points whose exact set distance is at most `eps`.
    fn near(&self, y: &Point, eps: f64) -> Vec<usize> {
        let r = self.radius();
        match (self, y) {
            (Factor::Interval { lo, width, n }, Point::Real(x)) => {
                let reach = eps + r;
                let a = ((x - reach - lo) / width).floor().max(0.0) as usize;
                let b = (((x + reach - lo) / width).floor().max(0.0) as usize).min(n - 1);
                (a..=b)
                    .filter(|&i| (x - (lo + (i as f64 + 0.5) * width)).abs() <= reach)
                    .collect()
            }
            (Factor::Circle { n }, Point::Real(x)) => {
                let reach = eps + r;
                let w = 1.0 / *n as f64;
                let a = ((x - reach) / w).floor() as i64;
                let b = ((x + reach) / w).floor() as i64;
                let mut out: Vec<usize> = if b - a + 1 >= *n as i64 {
                    (0..*n).collect()
                } else {
                    (a..=b).map(|k| k.rem_euclid(*n as i64) as usize).collect()
                };
                out.retain(|&i| Space::Circle.dist(y, &Point::Real((i as f64 + 0.5) * w)) <= reach);
                out.sort_unstable();
                out.dedup();
                out
            }
            (Factor::Plane { region, width, n }, Point::Pair(x, yy)) => {
                let reach = eps + r;
                let span = |v: f64, lo: f64, w: f64| {
                    let a = ((v - reach - lo) / w).floor().max(0.0) as usize;
                    let b = (((v + reach - lo) / w).floor().max(0.0) as usize).min(n - 1);
                    a..=b
                };
                let mut out = Vec::new();
                for iy in span(*yy, region.min[1], width[1]) {
                    for ix in span(*x, region.min[0], width[0]) {
                        let cx = region.min[0] + (ix as f64 + 0.5) * width[0];
                        let cy = region.min[1] + (iy as f64 + 0.5) * width[1];
                        if (x - cx).hypot(yy - cy) <= reach {
                            out.push(iy * n + ix);
                        }
                    }
                }
                out
            }
            (Factor::Cylinders { len }, Point::Seq(_)) => {
                let own = self.locate(y).expect("sigma2 point");
                // cylinders at set distance ≤ eps agree with s before the
                // first position whose weight is ≤ eps
                let mut m = 0;
                while m < *len && sigma2_weight(m) > eps {
                    m += 1;
                }
                let free = len - m;
                let base = own >> free << free;
                (0..1usize << free).map(|k| base | k).collect()
            }
            (Factor::Finite { n }, Point::Index(i)) => {
                if eps >= 1.0 {
                    (0..*n).collect()
                } else {
                    vec![*i]
                }
            }
            _ => vec![],
        }
    }
}

fn grid_index(x: f64, lo: f64, width: f64, n: usize) -> usize {
    let k = ((x - lo) / width).floor();
    if k < 0.0 {
        0
    } else {
        (k as usize).min(n - 1)
    }
}

fn cylinder_word(i: usize, len: usize) -> Vec<u8> {
    (0..len).map(|k| ((i >> (len - 1 - k)) & 1) as u8).collect()
}

fn flatten(space: &Space, out: &mut Vec<Space>) {
    match space {
        Space::Product(a, b) => {
            flatten(a, out);
            flatten(b, out);
        }
        other => out.push(other.clone()),
    }
}

/// Splits a product point into its factor points, in flattening order.
fn split<'a>(p: &'a Point, out: &mut Vec<&'a Point>) {
    match p {
        Point::Product(a, b) => {
            split(a, out);
            split(b, out);
        }
        other => out.push(other),
    }
}

/// Reassembles factor points following the product nesting of `space`.
fn assemble(space: &Space, parts: &mut impl Iterator<Item = Point>) -> Point {
    match space {
        Space::Product(a, b) => {
            let pa = assemble(a, parts);
            let pb = assemble(b, parts);
            Point::pair(pa, pb)
        }
        _ => parts.next().expect("one point per factor"),
    }
}

/// A disjoint uniform cover of a space by boxes (cylinders on Σ₂).
#[derive(Clone, Debug)]
pub struct BoxCover {
    space: Space,
    resolution: usize,
    factors: Vec<Factor>,
    strides: Vec<usize>,
    len: usize,
}

impl BoxCover {
    /// `resolution` boxes per axis; on Σ₂ the cylinder word length.
    pub fn new(space: &Space, resolution: usize) -> Result<Self> {
        if resolution == 0 {
            return Err(Error::InvalidParameter("cover resolution must be positive".into()));
        }
        let mut parts = Vec::new();
        flatten(space, &mut parts);
        let factors = parts
            .iter()
            .map(|s| Factor::new(s, resolution))
            .collect::<Result<Vec<_>>>()?;
        let mut strides = vec![1; factors.len()];
        for k in (0..factors.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * factors[k + 1].len();
        }
        let len = factors.iter().map(Factor::len).product();
        Ok(Self {
            space: space.clone(),
            resolution,
            factors,
            strides,
            len,
        })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Largest cell radius; paths in a chain graph realize chains whose
    /// per-step error is at most `eps + 2 * max_radius()`.
    pub fn max_radius(&self) -> f64 {
        self.factors.iter().map(Factor::radius).fold(0.0, f64::max)
    }

    fn factor_indices(&self, index: usize) -> Vec<usize> {
        self.factors
            .iter()
            .zip(&self.strides)
            .map(|(f, s)| (index / s) % f.len())
            .collect()
    }

    fn combine(&self, parts: &[usize]) -> usize {
        parts.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn cell(&self, index: usize) -> Cell {
        let mut cell = Cell {
            index,
            coords: vec![],
            lower: vec![],
            upper: vec![],
            radius: self.max_radius(),
        };
        for (f, i) in self.factors.iter().zip(self.factor_indices(index)) {
            let (c, lo, hi) = f.cell(i);
            cell.coords.extend(c);
            cell.lower.extend(lo);
            cell.upper.extend(hi);
        }
        cell
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.len).map(|i| self.cell(i))
    }

    /// Index of the unique box containing `p`.
    pub fn locate(&self, p: &Point) -> Result<usize> {
        self.space.check(p)?;
        let mut parts = Vec::new();
        split(p, &mut parts);
        let idx = self
            .factors
            .iter()
            .zip(parts)
            .map(|(f, q)| f.locate(q))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::SpaceMismatch {
                space: self.space.name(),
                point: p.to_string(),
            })?;
        Ok(self.combine(&idx))
    }

    pub fn center(&self, index: usize) -> Point {
        let parts = self.factor_indices(index);
        let mut pts = self.factors.iter().zip(parts).map(|(f, i)| f.center(i));
        assemble(&self.space, &mut pts)
    }

    /// Corners, center, then seeded random interior points up to `count`
    /// in total. Points outside the space (plane regions) are dropped.
    pub fn samples<R: Rng + ?Sized>(&self, index: usize, count: usize, rng: &mut R) -> Vec<Point> {
        let parts = self.factor_indices(index);
        let mut corner_sets: Vec<Vec<Point>> = Vec::new();
        for (f, &i) in self.factors.iter().zip(&parts) {
            let mut c = f.corners(i);
            if c.is_empty() {
                c.push(f.center(i));
            }
            corner_sets.push(c);
        }
        let mut out = Vec::with_capacity(count);
        for combo in cartesian(&corner_sets) {
            out.push(assemble(&self.space, &mut combo.into_iter()));
        }
        out.push(self.center(index));
        let mut attempts = 0;
        while out.len() < count && attempts < 16 * count {
            attempts += 1;
            let mut pts = self.factors.iter().zip(&parts).map(|(f, &i)| f.random_in(i, rng));
            out.push(assemble(&self.space, &mut pts));
            if !self.space.contains(out.last().expect("pushed")) {
                out.pop();
            }
        }
        out.retain(|p| self.space.contains(p));
        out
    }

    /// Boxes satisfying the edge rule for an image point `y` at scale `eps`.
    pub fn near(&self, y: &Point, eps: f64) -> Vec<usize> {
        let mut parts = Vec::new();
        split(y, &mut parts);
        if parts.len() != self.factors.len() {
            return vec![];
        }
        let lists: Vec<Vec<usize>> = self.factors.iter().zip(parts).map(|(f, q)| f.near(q, eps)).collect();
        let mut out: Vec<usize> = cartesian(&lists).into_iter().map(|c| self.combine(&c)).collect();
        out.sort_unstable();
        out
    }

    /// Whether box `index` meets the space (always true except for plane
    /// regions that do not fill their bounding rectangle).
    pub fn meets_space(&self, index: usize) -> bool {
        self.factors
            .iter()
            .zip(self.factor_indices(index))
            .all(|(f, i)| match f {
                Factor::Plane { region, .. } => {
                    let (_, lo, hi) = f.cell(i);
                    region.meets_box([lo[0], lo[1]], [hi[0], hi[1]])
                }
                _ => true,
            })
    }
}

fn cartesian<T: Clone>(lists: &[Vec<T>]) -> Vec<Vec<T>> {
    lists.iter().fold(vec![vec![]], |acc, list| {
        acc.iter()
            .flat_map(|prefix| {
                list.iter().map(move |x| {
                    let mut v = prefix.clone();
                    v.push(x.clone());
                    v
                })
            })
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unit_interval_quarters() {
        let cover = BoxCover::new(&Space::unit_interval(), 4).unwrap();
        let bounds: Vec<(f64, f64)> = cover.cells().map(|c| (c.lower[0], c.upper[0])).collect();
        assert_eq!(bounds, vec![(0.0, 0.25), (0.25, 0.5), (0.5, 0.75), (0.75, 1.0)]);
        assert_eq!(cover.locate(&Point::Real(0.25)).unwrap(), 1);
        assert_eq!(cover.locate(&Point::Real(1.0)).unwrap(), 3);
        assert_eq!(cover.locate(&Point::Real(0.0)).unwrap(), 0);
    }

    #[test]
    fn sigma2_cylinders() {
        let cover = BoxCover::new(&Space::Sigma2, 2).unwrap();
        let words: Vec<Vec<usize>> = cover.cells().map(|c| c.coords).collect();
        assert_eq!(words, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        let s = Point::Seq(BinarySeq::new(&[1, 0, 1], &[1]).unwrap());
        assert_eq!(cover.locate(&s).unwrap(), 2);
    }

    #[test]
    fn circle_arcs() {
        let cover = BoxCover::new(&Space::Circle, 256).unwrap();
        assert_eq!(cover.len(), 256);
        for c in cover.cells() {
            assert!((c.upper[0] - c.lower[0] - 1.0 / 256.0).abs() < 1e-15);
        }
        // near wraps around 0
        let near = cover.near(&Point::Real(0.999), 0.004);
        assert!(near.contains(&0) && near.contains(&255));
    }

    #[test]
    fn zero_resolution_is_rejected() {
        assert!(BoxCover::new(&Space::Circle, 0).is_err());
    }

    #[test]
    fn centers_locate_to_their_box() {
        let tri = Space::Plane(PlaneRegion::triangle([[0.0, 0.0], [1.0, 0.0], [0.5, 0.8]]).unwrap());
        for space in [
            Space::unit_interval(),
            Space::Circle,
            Space::Sigma2,
            Space::Plane(PlaneRegion::rectangle([0.0, 0.0], [2.0, 1.0]).unwrap()),
            Space::product(Space::Circle, Space::unit_interval()),
            Space::product(Space::Sigma2, Space::Circle),
        ] {
            let cover = BoxCover::new(&space, 5).unwrap();
            for i in 0..cover.len() {
                assert_eq!(cover.locate(&cover.center(i)).unwrap(), i, "{}", space.name());
            }
        }
        let cover = BoxCover::new(&tri, 8).unwrap();
        for i in 0..cover.len() {
            let c = cover.center(i);
            if tri.contains(&c) {
                assert_eq!(cover.locate(&c).unwrap(), i);
            }
        }
    }

    #[test]
    fn samples_lie_in_their_box() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for space in [
            Space::unit_interval(),
            Space::Sigma2,
            Space::product(Space::unit_interval(), Space::Circle),
        ] {
            let cover = BoxCover::new(&space, 6).unwrap();
            for i in 0..cover.len() {
                let pts = cover.samples(i, 9, &mut rng);
                assert!(pts.len() >= 3);
                for p in &pts {
                    let d = space.dist(p, &cover.center(i));
                    assert!(d <= cover.max_radius() + 1e-12, "{} {p}", space.name());
                }
            }
        }
    }

    #[test]
    fn product_cover_is_cartesian() {
        let space = Space::product(Space::unit_interval(), Space::Sigma2);
        let cover = BoxCover::new(&space, 3).unwrap();
        assert_eq!(cover.len(), 3 * 8);
        let p = Point::pair(Point::Real(0.5), Point::Seq(BinarySeq::new(&[1, 1, 0], &[0]).unwrap()));
        let idx = cover.locate(&p).unwrap();
        assert_eq!(cover.cell(idx).coords, vec![1, 1, 1, 0]);
    }
}
