//! Sparse direct and preconditioned conjugate-gradient solvers for SPD systems.

mod cholesky;

pub use cholesky::SparseCholesky;

use crate::sparse::CsrMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SolverError {
    #[error("matrix is not positive definite: pivot {pivot:e} at row {column}")]
    NotPositiveDefinite { column: usize, pivot: f64 },
    #[error("CG did not converge in {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("CG met non-positive curvature {curvature:e} at iteration {iteration}")]
    Indefinite { iteration: usize, curvature: f64 },
    #[error("non-finite value encountered in the solve")]
    NonFinite,
    #[error("right-hand side has length {got}, matrix has dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("fill-reducing ordering failed: {0}")]
    Ordering(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Cg,
    #[serde(alias = "chol")]
    Cholesky,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preconditioner {
    None,
    Jacobi,
    BlockJacobi,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// `None` picks Cholesky up to `n = 64` subdivisions and block-Jacobi CG beyond.
    pub method: Option<Method>,
    pub tol: f64,
    /// Defaults to `20·√dim`.
    pub max_iter: Option<usize>,
    pub preconditioner: Preconditioner,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { method: None, tol: 1e-12, max_iter: None, preconditioner: Preconditioner::BlockJacobi }
    }
}

/// Largest mesh resolution solved directly under the automatic policy.
pub const DIRECT_SOLVE_MAX_N: usize = 64;

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(SolverError::InvalidConfig(format!("tolerance {} must lie in (0, 1)", self.tol)));
        }
        if self.max_iter == Some(0) {
            return Err(SolverError::InvalidConfig("max iterations must be at least 1".into()));
        }
        Ok(())
    }

    pub fn method_for(&self, n: usize) -> Method {
        self.method.unwrap_or(if n <= DIRECT_SOLVE_MAX_N { Method::Cholesky } else { Method::Cg })
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolveReport {
    pub method: Option<Method>,
    pub iterations: usize,
    /// `‖b − Ax‖₂ / ‖b‖₂` of the returned solution.
    pub residual: f64,
    pub min_pivot: Option<f64>,
    /// `½xᵀAx − bᵀx` after each CG iteration.
    pub energy: Vec<f64>,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn relative_residual(a: &CsrMatrix, x: &[f64], b: &[f64]) -> f64 {
    let ax = a.mul_vec(x);
    let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let nb = norm(b);
    if nb == 0.0 {
        norm(&r)
    } else {
        norm(&r) / nb
    }
}

/// Solves `A x = b`; `blocks` lists the start offsets of the diagonal blocks used by
/// the block-Jacobi preconditioner (a trailing end offset is implied).
pub fn solve(
    a: &CsrMatrix,
    b: &[f64],
    blocks: &[usize],
    method: Method,
    config: &SolverConfig,
) -> Result<(Vec<f64>, SolveReport), SolverError> {
    config.validate()?;
    if b.len() != a.n {
        return Err(SolverError::DimensionMismatch { expected: a.n, got: b.len() });
    }
    if b.iter().any(|v| !v.is_finite()) || a.values.iter().any(|v| !v.is_finite()) {
        return Err(SolverError::NonFinite);
    }
    let (x, mut report) = match method {
        Method::Cholesky => {
            let chol = SparseCholesky::factor(a)?;
            let x = chol.solve(b);
            (x, SolveReport { min_pivot: Some(chol.min_pivot), ..Default::default() })
        }
        Method::Cg => conjugate_gradient(a, b, blocks, config)?,
    };
    if x.iter().any(|v| !v.is_finite()) {
        return Err(SolverError::NonFinite);
    }
    report.method = Some(method);
    report.residual = relative_residual(a, &x, b);
    Ok((x, report))
}

enum Precond {
    Identity,
    Diagonal(Vec<f64>),
    /// (start, size, inverse Cholesky factor of the block, row-major)
    Blocks(Vec<(usize, usize, Vec<f64>)>),
}

impl Precond {
    fn build(a: &CsrMatrix, kind: Preconditioner, blocks: &[usize]) -> Result<Self, SolverError> {
        Ok(match kind {
            Preconditioner::None => Precond::Identity,
            Preconditioner::Jacobi => {
                let d = a.diagonal();
                if let Some(i) = d.iter().position(|&v| !(v > 0.0)) {
                    return Err(SolverError::NotPositiveDefinite { column: i, pivot: d[i] });
                }
                Precond::Diagonal(d.iter().map(|v| 1.0 / v).collect())
            }
            Preconditioner::BlockJacobi => {
                let mut starts: Vec<usize> = blocks.to_vec();
                if starts.first() != Some(&0) {
                    starts.insert(0, 0);
                }
                starts.push(a.n);
                starts.dedup();
                let mut out = Vec::with_capacity(starts.len());
                for w in starts.windows(2) {
                    let (s, m) = (w[0], w[1] - w[0]);
                    let mut block = vec![0.0; m * m];
                    for i in 0..m {
                        for (j, v) in a.row(s + i) {
                            if j >= s && j < s + m {
                                block[i * m + (j - s)] = v;
                            }
                        }
                    }
                    let l = dense_cholesky(&block, m).map_err(|(i, pivot)| SolverError::NotPositiveDefinite {
                        column: s + i,
                        pivot,
                    })?;
                    out.push((s, m, l));
                }
                Precond::Blocks(out)
            }
        })
    }

    fn apply(&self, r: &[f64], z: &mut [f64]) {
        match self {
            Precond::Identity => z.copy_from_slice(r),
            Precond::Diagonal(d) => {
                for i in 0..r.len() {
                    z[i] = d[i] * r[i];
                }
            }
            Precond::Blocks(blocks) => {
                for (s, m, l) in blocks {
                    let (s, m) = (*s, *m);
                    let zb = &mut z[s..s + m];
                    zb.copy_from_slice(&r[s..s + m]);
                    for i in 0..m {
                        let mut v = zb[i];
                        for k in 0..i {
                            v -= l[i * m + k] * zb[k];
                        }
                        zb[i] = v / l[i * m + i];
                    }
                    for i in (0..m).rev() {
                        let mut v = zb[i];
                        for k in i + 1..m {
                            v -= l[k * m + i] * zb[k];
                        }
                        zb[i] = v / l[i * m + i];
                    }
                }
            }
        }
    }
}

/// Lower Cholesky factor of a dense row-major SPD matrix, or the failing pivot.
fn dense_cholesky(a: &[f64], n: usize) -> Result<Vec<f64>, (usize, f64)> {
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > 0.0) {
            return Err((j, d));
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
    Ok(l)
}

fn conjugate_gradient(
    a: &CsrMatrix,
    b: &[f64],
    blocks: &[usize],
    config: &SolverConfig,
) -> Result<(Vec<f64>, SolveReport), SolverError> {
    let n = a.n;
    let max_iter = config.max_iter.unwrap_or_else(|| ((20.0 * (n as f64).sqrt()).ceil() as usize).max(1));
    let precond = Precond::build(a, config.preconditioner, blocks)?;
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let nb = norm(b);
    let mut report = SolveReport::default();
    if nb == 0.0 {
        return Ok((x, report));
    }
    let mut z = vec![0.0; n];
    precond.apply(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 1..=max_iter {
        a.mul_vec_into(&p, &mut ap);
        let curvature = dot(&p, &ap);
        if !curvature.is_finite() {
            return Err(SolverError::NonFinite);
        }
        if curvature <= 0.0 {
            return Err(SolverError::Indefinite { iteration: it, curvature });
        }
        let alpha = rz / curvature;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        // ½xᵀAx − bᵀx = −½ bᵀx − ½ rᵀx with r = b − Ax
        report.energy.push(-0.5 * (dot(b, &x) + dot(&r, &x)));
        report.iterations = it;
        if norm(&r) <= config.tol * nb {
            // confirm against the true residual to guard against drift
            if relative_residual(a, &x, b) <= config.tol {
                return Ok((x, report));
            }
            a.mul_vec_into(&x, &mut ap);
            for i in 0..n {
                r[i] = b[i] - ap[i];
            }
        }
        precond.apply(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(SolverError::NoConvergence { iterations: report.iterations, residual: relative_residual(a, &x, b) })
}
