//! The classical chaos game on an M-gon.
//!
//! Each step picks a vertex `b` uniformly at random and moves the current
//! point to `(1 - w) x + w b`. The 1d game is the `y = 0` slice of the 2d one.

mod prefractal;
mod stream;

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use prefractal::{
    attractor_distance, prefractal_points, prefractal_points_capped, AttractorIndex,
    DEFAULT_PREFRACTAL_CAP,
};
pub use stream::{shard_stream, vertex_stream, VertexStream};

/// A point in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// A point on the real axis.
    pub const fn on_line(x: f64) -> Self {
        Self { x, y: 0.0 }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<Point> for f64 {
    type Output = Point;
    fn mul(self, p: Point) -> Point {
        Point::new(self * p.x, self * p.y)
    }
}

/// The vertices `b_0 .. b_{M-1}` of the game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexSet {
    points: Vec<Point>,
}

impl VertexSet {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::config("vertex set must contain at least one point"));
        }
        if let Some(p) = points.iter().find(|p| !p.is_finite()) {
            return Err(Error::config(format!("non-finite vertex {p:?}")));
        }
        Ok(Self { points })
    }

    /// The two-vertex game on `{0, 1}`.
    pub fn unit_interval() -> Self {
        Self {
            points: vec![Point::on_line(0.0), Point::on_line(1.0)],
        }
    }

    /// Regular polygon inscribed in the unit circle, `b_j = (cos 2πj/M, sin 2πj/M)`.
    pub fn regular_polygon(m: usize) -> Result<Self> {
        let pts = (0..m)
            .map(|j| {
                let t = std::f64::consts::TAU * j as f64 / m as f64;
                Point::new(t.cos(), t.sin())
            })
            .collect();
        Self::new(pts)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest pairwise distance between vertices; the attractor has the same diameter.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[i + 1..] {
                d = d.max(a.dist(*b));
            }
        }
        d
    }
}

/// Parameters of one classical game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalConfig {
    pub vertices: VertexSet,
    pub w: f64,
    pub x0: Point,
    pub seed: u64,
    pub stream: u64,
}

impl ClassicalConfig {
    pub fn validate(&self) -> Result<()> {
        validate_weight(self.w)?;
        if !self.x0.is_finite() {
            return Err(Error::config("start point must be finite"));
        }
        Ok(())
    }
}

pub(crate) fn validate_weight(w: f64) -> Result<()> {
    if w > 0.0 && w < 1.0 {
        Ok(())
    } else {
        Err(Error::config(format!("weight w must lie in (0, 1), got {w}")))
    }
}

/// A run of the game: `values[0]` is the start and `values[k + 1]` is reached
/// from `values[k]` with label `gammas[k]`, so `values.len() == gammas.len() + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<V> {
    pub gammas: Vec<u32>,
    pub values: Vec<V>,
}

impl<V> Trajectory<V> {
    /// Number of steps taken.
    pub fn steps(&self) -> usize {
        self.gammas.len()
    }
}

/// One application of the contraction `f_b(x) = (1 - w) x + w b`.
#[inline]
pub fn step(x: Point, b: Point, w: f64) -> Point {
    Point::new((1.0 - w) * x.x + w * b.x, (1.0 - w) * x.y + w * b.y)
}

/// Plays `n` steps with labels drawn from the configured stream.
pub fn run_game(cfg: &ClassicalConfig, n: usize) -> Result<Trajectory<Point>> {
    cfg.validate()?;
    let labels = VertexStream::new(cfg.seed, cfg.stream, cfg.vertices.len())?.take(n);
    play(cfg, labels)
}

/// Plays the game with an explicit label sequence instead of the RNG.
pub fn run_game_forced(cfg: &ClassicalConfig, gammas: &[u32]) -> Result<Trajectory<Point>> {
    cfg.validate()?;
    let m = cfg.vertices.len();
    if let Some(g) = gammas.iter().find(|&&g| g as usize >= m) {
        return Err(Error::input(format!("label {g} out of range for M = {m}")));
    }
    play(cfg, gammas.iter().copied())
}

fn play(cfg: &ClassicalConfig, labels: impl Iterator<Item = u32>) -> Result<Trajectory<Point>> {
    let verts = cfg.vertices.points();
    let (lo, _) = labels.size_hint();
    let mut gammas = Vec::with_capacity(lo);
    let mut values = Vec::with_capacity(lo + 1);
    let mut x = cfg.x0;
    values.push(x);
    for g in labels {
        x = step(x, verts[g as usize], cfg.w);
        gammas.push(g);
        values.push(x);
    }
    Ok(Trajectory { gammas, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn line_cfg(w: f64, x0: f64, seed: u64) -> ClassicalConfig {
        ClassicalConfig {
            vertices: VertexSet::unit_interval(),
            w,
            x0: Point::on_line(x0),
            seed,
            stream: 0,
        }
    }

    #[test]
    fn step_examples() {
        let b = Point::on_line(1.0);
        assert_eq!(step(b, b, 0.3), b);
        assert_eq!(step(Point::on_line(0.0), b, 0.5).x, 0.5);
        assert!((step(Point::on_line(0.5), b, 2.0 / 3.0).x - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn forced_labels() {
        let t = run_game_forced(&line_cfg(0.5, 0.0, 0), &[1, 1]).unwrap();
        let xs: Vec<f64> = t.values.iter().map(|p| p.x).collect();
        assert_eq!(xs, vec![0.0, 0.5, 0.75]);
        assert!(run_game_forced(&line_cfg(0.5, 0.0, 0), &[2]).is_err());
    }

    #[test]
    fn single_vertex_contracts_to_it() {
        let b = Point::new(0.3, -1.2);
        let cfg = ClassicalConfig {
            vertices: VertexSet::new(vec![b]).unwrap(),
            w: 0.25,
            x0: Point::new(10.0, 10.0),
            seed: 3,
            stream: 0,
        };
        let t = run_game(&cfg, 200).unwrap();
        assert!(t.values.last().unwrap().dist(b) < 1e-14);
        assert!(t.gammas.iter().all(|&g| g == 0));
    }

    #[test]
    fn invalid_weight() {
        assert!(run_game(&line_cfg(1.2, 0.0, 0), 3).is_err());
        assert!(run_game(&line_cfg(0.0, 0.0, 0), 3).is_err());
        assert!(VertexSet::new(vec![]).is_err());
    }

    #[test]
    fn deterministic_runs() {
        let cfg = line_cfg(0.4, 0.2, 11);
        assert_eq!(run_game(&cfg, 1000).unwrap(), run_game(&cfg, 1000).unwrap());
    }

    proptest! {
        #[test]
        fn contraction(x in -10.0..10.0f64, y in -10.0..10.0f64, bx in -5.0..5.0f64, w in 0.01..0.99f64) {
            let b = Point::on_line(bx);
            let d = (step(Point::on_line(x), b, w).x - step(Point::on_line(y), b, w).x).abs();
            let expected = (1.0 - w) * (x - y).abs();
            prop_assert!((d - expected).abs() <= 1e-12 * (1.0 + expected));
        }

        #[test]
        fn gap_avoidance(w in 0.51..0.99f64, x0 in 0.0..=1.0f64, seed in any::<u64>()) {
            let t = run_game(&line_cfg(w, x0, seed), 300).unwrap();
            for p in &t.values[1..] {
                prop_assert!(p.x <= 1.0 - w + 1e-12 || p.x >= w - 1e-12);
                prop_assert!((0.0..=1.0).contains(&p.x));
            }
        }
    }

    #[test]
    fn cantor_images_for_two_thirds() {
        let t = run_game(&line_cfg(2.0 / 3.0, 0.37, 5), 5000).unwrap();
        for p in &t.values[1..] {
            assert!(p.x <= 1.0 / 3.0 + 1e-12 || p.x >= 2.0 / 3.0 - 1e-12);
        }
    }
}
