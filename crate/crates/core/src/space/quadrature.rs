//! Gauss–Legendre rules on segments and collapsed-square rules on polygons.

use crate::geometry::{polygon_centroid, Point2};

#[derive(Clone, Debug, Default)]
pub struct QuadratureRule {
    pub points: Vec<Point2>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(Point2) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&p, &w)| w * f(p)).sum()
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [−1, 1], ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                dp = legendre_with_derivative(n, z).1;
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// `P_n(z)` and `P_n'(z)` by the three-term recurrence.
pub fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = if (1.0 - z * z).abs() < 1e-300 {
        let s = if z > 0.0 || n % 2 == 1 { 1.0 } else { -1.0 };
        s * (n * (n + 1)) as f64 / 2.0
    } else {
        n as f64 * (z * p1 - p0) / (z * z - 1.0)
    };
    (p1, dp)
}

/// Number of Gauss points integrating polynomials of degree `order` exactly.
pub fn gauss_points_for(order: usize) -> usize {
    (order + 2) / 2
}

/// Gauss–Legendre rule on `[s0, s1]`, returned as (parameters, weights).
pub fn interval_rule(s0: f64, s1: f64, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(gauss_points_for(order));
    let half = 0.5 * (s1 - s0);
    let mid = 0.5 * (s0 + s1);
    (x.iter().map(|&t| mid + half * t).collect(), w.iter().map(|&wi| half * wi).collect())
}

/// Gauss–Legendre rule on the straight segment `[a, b]`.
pub fn segment_quadrature(a: Point2, b: Point2, order: usize) -> QuadratureRule {
    let (t, w) = interval_rule(0.0, 1.0, order);
    let len = a.dist(b);
    QuadratureRule { points: t.iter().map(|&s| a.lerp(b, s)).collect(), weights: w.iter().map(|&wi| wi * len).collect() }
}

/// Rule on the triangle `(a, b, c)` from a tensor Gauss rule on the unit square
/// collapsed onto the triangle; weights are positive.
pub fn triangle_quadrature(a: Point2, b: Point2, c: Point2, order: usize, out: &mut QuadratureRule) {
    // the collapse Jacobian is linear in u
    let (u, wu) = interval_rule(0.0, 1.0, order + 1);
    let (v, wv) = interval_rule(0.0, 1.0, order);
    let area2 = (b - a).cross(c - a).abs();
    for (&ui, &wi) in u.iter().zip(&wu) {
        for (&vj, &wj) in v.iter().zip(&wv) {
            out.points.push(a + (b - a) * ui + (c - b) * (ui * vj));
            out.weights.push(wi * wj * ui * area2);
        }
    }
}

/// Centroid-fan rule on a convex polygon, exact for total degree `order`.
pub fn polygon_quadrature(vertices: &[Point2], order: usize) -> QuadratureRule {
    let c = polygon_centroid(vertices);
    let mut rule = QuadratureRule::default();
    let n = vertices.len();
    for i in 0..n {
        triangle_quadrature(c, vertices[i], vertices[(i + 1) % n], order, &mut rule);
    }
    rule
}
