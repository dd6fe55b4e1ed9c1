//! Prefractals `f^k(S)` and nearest-point queries against them.

use super::{step, validate_weight, Point, VertexSet};
use crate::error::{Error, Result};

/// Default cap on the number of enumerated prefractal points.
pub const DEFAULT_PREFRACTAL_CAP: usize = 10_000_000;

/// All images `f_{j1} ∘ … ∘ f_{jk}(s)` for words of length `depth` and seeds `s`.
pub fn prefractal_points(
    vertices: &VertexSet,
    w: f64,
    depth: u32,
    seeds: &[Point],
) -> Result<Vec<Point>> {
    prefractal_points_capped(vertices, w, depth, seeds, DEFAULT_PREFRACTAL_CAP)
}

pub fn prefractal_points_capped(
    vertices: &VertexSet,
    w: f64,
    depth: u32,
    seeds: &[Point],
    cap: usize,
) -> Result<Vec<Point>> {
    validate_weight(w)?;
    if seeds.is_empty() {
        return Err(Error::input("prefractal needs at least one seed point"));
    }
    let m = vertices.len();
    let total = m
        .checked_pow(depth)
        .and_then(|c| c.checked_mul(seeds.len()))
        .filter(|&c| c <= cap)
        .ok_or_else(|| Error::Resource {
            what: "prefractal enumeration".into(),
            required: format!("{m}^{depth} x {} points", seeds.len()),
            cap: format!("{cap} points"),
        })?;

    let mut cur = seeds.to_vec();
    for _ in 0..depth {
        let mut next = Vec::with_capacity(cur.len() * m);
        for &b in vertices.points() {
            next.extend(cur.iter().map(|&x| step(x, b, w)));
        }
        cur = next;
    }
    debug_assert_eq!(cur.len(), total);
    Ok(cur)
}

/// Distance from `p` to the depth-`depth` prefractal generated from the vertices.
///
/// Points of the attractor lie within `diameter * (1 - w)^depth` of that set.
pub fn attractor_distance(p: Point, vertices: &VertexSet, w: f64, depth: u32) -> Result<f64> {
    Ok(AttractorIndex::new(vertices, w, depth)?.distance(p))
}

/// Bucket grid over a prefractal for repeated nearest-point queries.
#[derive(Debug, Clone)]
pub struct AttractorIndex {
    origin: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    starts: Vec<usize>,
    points: Vec<Point>,
    tolerance: f64,
}

impl AttractorIndex {
    pub fn new(vertices: &VertexSet, w: f64, depth: u32) -> Result<Self> {
        if depth == 0 {
            return Err(Error::input("attractor distance needs depth >= 1"));
        }
        let pts = prefractal_points(vertices, w, depth, vertices.points())?;
        let tolerance = vertices.diameter() * (1.0 - w).powi(depth as i32);
        Ok(Self::from_points(pts, tolerance))
    }

    fn from_points(pts: Vec<Point>, tolerance: f64) -> Self {
        let (mut lo, mut hi) = (pts[0], pts[0]);
        for p in &pts {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-12);
        // about four points per occupied cell for 2d sets
        let per_side = ((pts.len() as f64 / 4.0).sqrt().ceil() as usize).clamp(1, 4096);
        let cell = span / per_side as f64;
        let nx = (((hi.x - lo.x) / cell) as usize + 1).max(1);
        let ny = (((hi.y - lo.y) / cell) as usize + 1).max(1);

        let key = |p: &Point| {
            let i = (((p.x - lo.x) / cell) as usize).min(nx - 1);
            let j = (((p.y - lo.y) / cell) as usize).min(ny - 1);
            j * nx + i
        };
        let mut counts = vec![0usize; nx * ny + 1];
        for p in &pts {
            counts[key(p) + 1] += 1;
        }
        for c in 1..counts.len() {
            counts[c] += counts[c - 1];
        }
        let mut fill = counts.clone();
        let mut sorted = vec![Point::default(); pts.len()];
        for p in &pts {
            let k = key(p);
            sorted[fill[k]] = *p;
            fill[k] += 1;
        }
        Self {
            origin: lo,
            cell,
            nx,
            ny,
            starts: counts,
            points: sorted,
            tolerance,
        }
    }

    /// `diameter * (1 - w)^depth`, the covering radius of the prefractal.
    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn distance(&self, p: Point) -> f64 {
        let ci = ((p.x - self.origin.x) / self.cell).floor() as i64;
        let cj = ((p.y - self.origin.y) / self.cell).floor() as i64;
        let (nx, ny) = (self.nx as i64, self.ny as i64);
        let outside = |c: i64, n: i64| {
            if c < 0 {
                -c
            } else if c >= n {
                c - n + 1
            } else {
                0
            }
        };
        let first = outside(ci, nx).max(outside(cj, ny));
        let last = first + nx.max(ny) + 1;

        let mut best = f64::INFINITY;
        for r in first..=last {
            // cells at ring r are at least (r - 1) cells away
            if best <= (r - 1).max(0) as f64 * self.cell {
                break;
            }
            for j in (cj - r).max(0)..=(cj + r).min(ny - 1) {
                let edge_row = j == cj - r || j == cj + r;
                let mut i = (ci - r).max(0);
                while i <= (ci + r).min(nx - 1) {
                    let k = (j * nx + i) as usize;
                    for q in &self.points[self.starts[k]..self.starts[k + 1]] {
                        best = best.min(p.dist(*q));
                    }
                    if edge_row || i == ci + r {
                        i += 1;
                    } else {
                        i = ci + r;
                    }
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(p: Point, pts: &[Point]) -> f64 {
        pts.iter().map(|q| p.dist(*q)).fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn depth_zero_is_identity() {
        let seeds = vec![Point::new(0.2, 0.1), Point::new(3.0, 4.0)];
        let out = prefractal_points(&VertexSet::unit_interval(), 0.5, 0, &seeds).unwrap();
        assert_eq!(out, seeds);
    }

    #[test]
    fn cantor_first_level() {
        let seeds = [Point::on_line(0.0), Point::on_line(1.0)];
        let mut xs: Vec<f64> = prefractal_points(&VertexSet::unit_interval(), 2.0 / 3.0, 1, &seeds)
            .unwrap()
            .iter()
            .map(|p| p.x)
            .collect();
        xs.sort_by(f64::total_cmp);
        let want = [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0];
        for (a, b) in xs.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn triangle_depth_eight_inside_hull() {
        let tri = VertexSet::regular_polygon(3).unwrap();
        let b = tri.points();
        let pts = prefractal_points(&tri, 0.5, 8, &b[..1]).unwrap();
        assert_eq!(pts.len(), 6561);
        let cross = |o: Point, a: Point, p: Point| (a.x - o.x) * (p.y - o.y) - (a.y - o.y) * (p.x - o.x);
        for p in pts {
            for k in 0..3 {
                assert!(cross(b[k], b[(k + 1) % 3], p) >= -1e-12);
            }
        }
    }

    #[test]
    fn resource_cap() {
        let tri = VertexSet::regular_polygon(3).unwrap();
        let err = prefractal_points_capped(&tri, 0.5, 10, tri.points(), 1000).unwrap_err();
        assert!(matches!(err, Error::Resource { .. }));
        assert!(prefractal_points(&tri, 0.5, 40, tri.points()).is_err());
    }

    #[test]
    fn distance_examples() {
        let line = VertexSet::unit_interval();
        let b0 = line.points()[0];
        assert_eq!(attractor_distance(b0, &line, 2.0 / 3.0, 3).unwrap(), 0.0);
        for k in 1..8 {
            assert!(attractor_distance(Point::on_line(0.5), &line, 2.0 / 3.0, k).unwrap() >= 1.0 / 6.0 - 1e-15);
        }
        let tri = VertexSet::regular_polygon(3).unwrap();
        let b = tri.points();
        let p = step(step(b[0], b[1], 0.5), b[0], 0.5);
        assert!(attractor_distance(p, &tri, 0.5, 2).unwrap() < 1e-15);
        assert!(attractor_distance(p, &tri, 0.5, 5).unwrap() < 1e-15);
        assert!(attractor_distance(b0, &line, 0.5, 0).is_err());
    }

    #[test]
    fn index_matches_brute_force() {
        let tri = VertexSet::regular_polygon(3).unwrap();
        let idx = AttractorIndex::new(&tri, 0.5, 5).unwrap();
        let pts = prefractal_points(&tri, 0.5, 5, tri.points()).unwrap();
        let queries = [
            Point::new(0.0, 0.0),
            Point::new(0.31, -0.2),
            Point::new(5.0, 7.0),
            Point::new(-3.0, 0.1),
            Point::new(0.9, 0.05),
            Point::new(-0.5, 0.8),
        ];
        for q in queries {
            assert!((idx.distance(q) - brute(q, &pts)).abs() < 1e-14, "{q:?}");
        }
        let line = VertexSet::unit_interval();
        let idx = AttractorIndex::new(&line, 0.7, 6).unwrap();
        let pts = prefractal_points(&line, 0.7, 6, line.points()).unwrap();
        for x in [-1.0, 0.0, 0.2, 0.5, 0.77, 1.0, 2.5] {
            let q = Point::new(x, 0.3);
            assert!((idx.distance(q) - brute(q, &pts)).abs() < 1e-14, "{q:?}");
        }
    }
}
