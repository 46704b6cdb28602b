//! Orthonormal modal bases on polygons and on fracture faces.

use super::quadrature::{legendre_with_derivative, QuadratureRule};
use crate::geometry::{Point2, Rect};

pub fn polygon_dim(k: usize) -> usize {
    (k + 1) * (k + 2) / 2
}

/// Exponents `(a, b)` of the scaled monomials, grouped by total degree.
pub fn monomial_exponents(k: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(polygon_dim(k));
    for total in 0..=k {
        for b in 0..=total {
            out.push((total - b, b));
        }
    }
    out
}

/// `φ_i = Σ_j C_ij m_j` with `m_j` monomials in bounding-box coordinates and `C`
/// lower triangular, so that the mass matrix is the identity.
#[derive(Clone, Debug)]
pub struct ElementBasis {
    pub degree: usize,
    center: Point2,
    inv_half: Point2,
    exponents: Vec<(usize, usize)>,
    coef: Vec<f64>,
}

impl ElementBasis {
    /// Orthonormalizes against `rule`, which must integrate degree `2k` exactly.
    pub fn new(bbox: &Rect, degree: usize, rule: &QuadratureRule) -> Self {
        let exponents = monomial_exponents(degree);
        let n = exponents.len();
        let mut identity = vec![0.0; n * n];
        for i in 0..n {
            identity[i * n + i] = 1.0;
        }
        let mut basis = Self {
            degree,
            center: bbox.center(),
            inv_half: Point2::new(2.0 / bbox.width(), 2.0 / bbox.height()),
            exponents,
            coef: identity,
        };
        // the second pass removes the roundoff left by the first
        for _ in 0..2 {
            let gram = basis.mass_matrix(rule);
            let linv = inverse_cholesky_factor(&gram, n);
            basis.coef = mat_mul(&linv, &basis.coef, n);
        }
        basis
    }

    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    fn monomials(&self, p: Point2, powx: &mut [f64], powy: &mut [f64]) {
        let x = (p.x - self.center.x) * self.inv_half.x;
        let y = (p.y - self.center.y) * self.inv_half.y;
        powx[0] = 1.0;
        powy[0] = 1.0;
        for i in 1..=self.degree {
            powx[i] = powx[i - 1] * x;
            powy[i] = powy[i - 1] * y;
        }
    }

    pub fn eval_into(&self, p: Point2, out: &mut [f64]) {
        let mut px = [0.0; 16];
        let mut py = [0.0; 16];
        self.monomials(p, &mut px, &mut py);
        let n = self.dim();
        for i in 0..n {
            let row = &self.coef[i * n..i * n + i + 1];
            out[i] = row.iter().zip(&self.exponents).map(|(c, &(a, b))| c * px[a] * py[b]).sum();
        }
    }

    pub fn eval_grad_into(&self, p: Point2, out: &mut [Point2]) {
        let mut px = [0.0; 16];
        let mut py = [0.0; 16];
        self.monomials(p, &mut px, &mut py);
        let n = self.dim();
        for i in 0..n {
            let mut g = Point2::default();
            for (j, &(a, b)) in self.exponents.iter().enumerate().take(i + 1) {
                let c = self.coef[i * n + j];
                if a > 0 {
                    g.x += c * a as f64 * px[a - 1] * py[b] * self.inv_half.x;
                }
                if b > 0 {
                    g.y += c * b as f64 * px[a] * py[b - 1] * self.inv_half.y;
                }
            }
            out[i] = g;
        }
    }

    pub fn eval(&self, p: Point2) -> Vec<f64> {
        let mut v = vec![0.0; self.dim()];
        self.eval_into(p, &mut v);
        v
    }

    pub fn eval_grad(&self, p: Point2) -> Vec<Point2> {
        let mut g = vec![Point2::default(); self.dim()];
        self.eval_grad_into(p, &mut g);
        g
    }

    /// Value of `Σ c_i φ_i` at `p`.
    pub fn evaluate(&self, coeffs: &[f64], p: Point2) -> f64 {
        self.eval(p).iter().zip(coeffs).map(|(a, b)| a * b).sum()
    }

    pub fn evaluate_grad(&self, coeffs: &[f64], p: Point2) -> Point2 {
        self.eval_grad(p).iter().zip(coeffs).fold(Point2::default(), |acc, (g, &c)| acc + *g * c)
    }

    /// Row-major mass matrix under `rule`.
    pub fn mass_matrix(&self, rule: &QuadratureRule) -> Vec<f64> {
        let n = self.dim();
        let mut m = vec![0.0; n * n];
        let mut v = vec![0.0; n];
        for (&p, &w) in rule.points.iter().zip(&rule.weights) {
            self.eval_into(p, &mut v);
            for i in 0..n {
                for j in 0..n {
                    m[i * n + j] += w * v[i] * v[j];
                }
            }
        }
        m
    }

    /// L2 projection of `f`; the basis is orthonormal, so it is a moment vector.
    pub fn l2_project(&self, rule: &QuadratureRule, f: impl Fn(Point2) -> f64) -> Vec<f64> {
        let n = self.dim();
        let mut c = vec![0.0; n];
        let mut v = vec![0.0; n];
        for (&p, &w) in rule.points.iter().zip(&rule.weights) {
            self.eval_into(p, &mut v);
            let fw = f(p) * w;
            for i in 0..n {
                c[i] += fw * v[i];
            }
        }
        c
    }
}

/// Normalized Legendre polynomials `sqrt((2i+1)/h) P_i` on `[s0, s1]`.
#[derive(Clone, Copy, Debug)]
pub struct FaceBasis {
    pub degree: usize,
    pub s0: f64,
    pub h: f64,
}

impl FaceBasis {
    pub fn new(s0: f64, s1: f64, degree: usize) -> Self {
        Self { degree, s0, h: s1 - s0 }
    }

    pub fn dim(&self) -> usize {
        self.degree + 1
    }

    fn reference(&self, s: f64) -> f64 {
        (2.0 * (s - self.s0) / self.h - 1.0).clamp(-1.0, 1.0)
    }

    pub fn eval_into(&self, s: f64, out: &mut [f64]) {
        let z = self.reference(s);
        for (i, o) in out.iter_mut().enumerate().take(self.dim()) {
            *o = ((2 * i + 1) as f64 / self.h).sqrt() * legendre_with_derivative(i, z).0;
        }
    }

    /// Derivatives with respect to the arc coordinate.
    pub fn eval_deriv_into(&self, s: f64, out: &mut [f64]) {
        let z = self.reference(s);
        for (i, o) in out.iter_mut().enumerate().take(self.dim()) {
            *o = ((2 * i + 1) as f64 / self.h).sqrt() * legendre_with_derivative(i, z).1 * 2.0 / self.h;
        }
    }

    pub fn eval(&self, s: f64) -> Vec<f64> {
        let mut v = vec![0.0; self.dim()];
        self.eval_into(s, &mut v);
        v
    }

    pub fn eval_deriv(&self, s: f64) -> Vec<f64> {
        let mut v = vec![0.0; self.dim()];
        self.eval_deriv_into(s, &mut v);
        v
    }

    pub fn evaluate(&self, coeffs: &[f64], s: f64) -> f64 {
        self.eval(s).iter().zip(coeffs).map(|(a, b)| a * b).sum()
    }

    pub fn evaluate_deriv(&self, coeffs: &[f64], s: f64) -> f64 {
        self.eval_deriv(s).iter().zip(coeffs).map(|(a, b)| a * b).sum()
    }

    pub fn l2_project(&self, params: &[f64], weights: &[f64], f: impl Fn(f64) -> f64) -> Vec<f64> {
        let mut c = vec![0.0; self.dim()];
        let mut v = vec![0.0; self.dim()];
        for (&s, &w) in params.iter().zip(weights) {
            self.eval_into(s, &mut v);
            let fw = f(s) * w;
            for (ci, vi) in c.iter_mut().zip(&v) {
                *ci += fw * vi;
            }
        }
        c
    }
}

/// `L⁻¹` for the Cholesky factor of an SPD row-major matrix.
fn inverse_cholesky_factor(a: &[f64], n: usize) -> Vec<f64> {
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        let d = d.sqrt();
        l[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / d;
        }
    }
    let mut inv = vec![0.0; n * n];
    for col in 0..n {
        for i in col..n {
            let mut s = if i == col { 1.0 } else { 0.0 };
            for k in col..i {
                s -= l[i * n + k] * inv[k * n + col];
            }
            inv[i * n + col] = s / l[i * n + i];
        }
    }
    inv
}

fn mat_mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                c[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    c
}
