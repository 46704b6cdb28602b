//! Manufactured-solution cases, error norms and convergence studies.

pub mod cases;
pub mod consistency;
pub mod convergence;
pub mod errors;
pub mod expr;

pub use cases::{CaseError, CaseId, CaseOverrides, ManufacturedCase, Variant};
pub use consistency::{check_consistency, ConsistencyReport};
pub use convergence::{rate, run_convergence, solve_case, ConvergenceFailure, ConvergenceTable, Norm, Solution, StudyOptions};
pub use errors::{compute_errors, ErrorReport};

use crate::assembly::AssemblyError;
use crate::geometry::Point2;
use crate::mesh::MeshError;
use crate::solver::SolverError;
use thiserror::Error;

/// Exact bulk and fracture fields; bulk fields are indexed by subdomain tag.
pub trait ExactSolution: Sync {
    fn bulk(&self, subdomain: usize, p: Point2) -> f64;
    fn bulk_grad(&self, subdomain: usize, p: Point2) -> Point2;
    fn fracture(&self, k: usize, p: Point2) -> f64;
    /// Derivative along the fracture tangent `p0 → p1`.
    fn fracture_ds(&self, k: usize, p: Point2) -> f64;
}

/// Zero exact fields, so that error norms measure the discrete function itself.
#[derive(Clone, Copy, Debug, Default)]
pub struct Zero;

impl ExactSolution for Zero {
    fn bulk(&self, _: usize, _: Point2) -> f64 {
        0.0
    }
    fn bulk_grad(&self, _: usize, _: Point2) -> Point2 {
        Point2::default()
    }
    fn fracture(&self, _: usize, _: Point2) -> f64 {
        0.0
    }
    fn fracture_ds(&self, _: usize, _: Point2) -> f64 {
        0.0
    }
}

#[derive(Debug, Error)]
pub enum VerificationError {
    #[error(transparent)]
    Case(#[from] CaseError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("a convergence study needs at least 2 levels, got {0}")]
    TooFewLevels(usize),
}
