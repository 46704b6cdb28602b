//! Planar points, segments and axis-aligned rectangles.

use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// A point (or vector) in the plane.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn normalized(self) -> Point2 {
        let n = self.norm();
        Point2::new(self.x / n, self.y / n)
    }

    /// Counter-clockwise rotation by a right angle.
    pub fn perp(self) -> Point2 {
        Point2::new(-self.y, self.x)
    }

    pub fn lerp(self, other: Point2, t: f64) -> Point2 {
        self + (other - self) * t
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Point2 {
    fn add_assign(&mut self, o: Point2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// Closed straight segment `[a, b]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point2,
    pub b: Point2,
}

impl Segment {
    pub const fn new(a: Point2, b: Point2) -> Self {
        Self { a, b }
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    pub fn direction(&self) -> Point2 {
        (self.b - self.a).normalized()
    }

    pub fn midpoint(&self) -> Point2 {
        self.a.lerp(self.b, 0.5)
    }

    /// Arc-length coordinate of the orthogonal projection of `p`, measured from `a`.
    pub fn project(&self, p: Point2) -> f64 {
        (p - self.a).dot(self.direction())
    }

    /// Euclidean distance from `p` to the closed segment.
    pub fn distance(&self, p: Point2) -> f64 {
        let len = self.length();
        let s = self.project(p).clamp(0.0, len);
        p.dist(self.a + self.direction() * s)
    }
}

/// Axis-aligned rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: Point2,
    pub max: Point2,
}

impl Rect {
    pub const fn new(min: Point2, max: Point2) -> Self {
        Self { min, max }
    }

    pub fn from_points(points: &[Point2]) -> Self {
        let mut min = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        Self { min, max }
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> Point2 {
        self.min.lerp(self.max, 0.5)
    }

    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        p.x >= self.min.x - tol
            && p.x <= self.max.x + tol
            && p.y >= self.min.y - tol
            && p.y <= self.max.y + tol
    }

    /// Which side of the rectangle `p` lies on, if any.
    pub fn side_of(&self, p: Point2, tol: f64) -> Option<Side> {
        if !self.contains(p, tol) {
            return None;
        }
        if (p.x - self.min.x).abs() <= tol {
            Some(Side::Left)
        } else if (p.x - self.max.x).abs() <= tol {
            Some(Side::Right)
        } else if (p.y - self.min.y).abs() <= tol {
            Some(Side::Bottom)
        } else if (p.y - self.max.y).abs() <= tol {
            Some(Side::Top)
        } else {
            None
        }
    }

    pub fn on_boundary(&self, p: Point2, tol: f64) -> bool {
        self.side_of(p, tol).is_some()
    }
}

/// One side of a rectangular domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

impl Side {
    /// True when `p` lies on this side of `rect`.
    pub fn contains(self, rect: &Rect, p: Point2, tol: f64) -> bool {
        if !rect.contains(p, tol) {
            return false;
        }
        match self {
            Side::Left => (p.x - rect.min.x).abs() <= tol,
            Side::Right => (p.x - rect.max.x).abs() <= tol,
            Side::Bottom => (p.y - rect.min.y).abs() <= tol,
            Side::Top => (p.y - rect.max.y).abs() <= tol,
        }
    }
}

/// Signed area of a polygon (positive for counter-clockwise ordering).
pub fn signed_area(vertices: &[Point2]) -> f64 {
    let n = vertices.len();
    let mut acc = 0.0;
    for i in 0..n {
        acc += vertices[i].cross(vertices[(i + 1) % n]);
    }
    0.5 * acc
}

/// Area centroid of a simple polygon.
pub fn polygon_centroid(vertices: &[Point2]) -> Point2 {
    let n = vertices.len();
    let mut a = 0.0;
    let mut c = Point2::default();
    for i in 0..n {
        let p = vertices[i];
        let q = vertices[(i + 1) % n];
        let w = p.cross(q);
        a += w;
        c += (p + q) * w;
    }
    c * (1.0 / (3.0 * a))
}

/// Largest pairwise vertex distance.
pub fn polygon_diameter(vertices: &[Point2]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, p) in vertices.iter().enumerate() {
        for q in &vertices[i + 1..] {
            d = d.max(p.dist(*q));
        }
    }
    d
}

/// True when every turn of the closed polyline is non-negative (collinear vertices allowed).
pub fn is_convex_ccw(vertices: &[Point2], tol: f64) -> bool {
    let n = vertices.len();
    (0..n).all(|i| {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        let c = vertices[(i + 2) % n];
        (b - a).cross(c - b) >= -tol
    })
}
