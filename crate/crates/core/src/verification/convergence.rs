//! Solves a manufactured case on a sequence of meshes and tabulates observed rates.

use super::cases::ManufacturedCase;
use super::errors::{compute_errors, ErrorReport};
use super::VerificationError;
use crate::assembly::{assemble_system, AssembledSystem, AssemblyOptions, FormData};
use crate::mesh::PolygonalMesh;
use crate::solver::{solve, SolveReport, SolverConfig};
use crate::space::DgSpace;
use std::fmt::Write;

/// Errors below this are treated as roundoff when picking the pair that defines a rate.
pub const ERROR_FLOOR: f64 = 1e-10;

pub const CSV_HEADER: &str = "n,h,dofs_bulk,dofs_frac,err_bulk_dg,err_bulk_l2,err_frac_dg,err_frac_l2,err_coupling,\
rate_bulk_dg,rate_bulk_l2,rate_frac_dg,rate_frac_l2";

#[derive(Clone, Debug, PartialEq)]
pub struct StudyOptions {
    pub degree: usize,
    pub assembly: AssemblyOptions,
    pub solver: SolverConfig,
}

impl Default for StudyOptions {
    fn default() -> Self {
        Self { degree: 2, assembly: AssemblyOptions::default(), solver: SolverConfig::default() }
    }
}

/// Everything produced by one solve, kept for output and inspection.
#[derive(Clone, Debug)]
pub struct Solution {
    pub mesh: PolygonalMesh,
    pub space: DgSpace,
    pub system: AssembledSystem,
    pub form: FormData,
    pub x: Vec<f64>,
    pub solve: SolveReport,
    pub errors: ErrorReport,
}

pub fn solve_case(case: &ManufacturedCase, n: usize, opts: &StudyOptions) -> Result<Solution, VerificationError> {
    let mesh = case.mesh(n, opts.degree)?;
    let space = DgSpace::new(&mesh);
    let assembly = AssemblyOptions { xi: case.xi, ..opts.assembly };
    let (system, form) = assemble_system(&mesh, &space, &case.network, case, &assembly)?;
    let method = opts.solver.method_for(n);
    let (x, solve) = solve(&system.matrix, &system.rhs, &system.blocks, method, &opts.solver)?;
    let errors = compute_errors(&mesh, &space, &case.network, &form, case, &x);
    Ok(Solution { mesh, space, system, form, x, solve, errors })
}

/// `log(e₀/e₁) / log(h₀/h₁)`, defined only for positive finite errors and distinct sizes.
pub fn rate(e0: f64, e1: f64, h0: f64, h1: f64) -> Option<f64> {
    let ok = |v: f64| v > 0.0 && v.is_finite();
    if ok(e0) && ok(e1) && ok(h0) && ok(h1) && h0 != h1 {
        Some((e0 / e1).ln() / (h0 / h1).ln())
    } else {
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Norm {
    BulkDg,
    BulkL2,
    FracDg,
    FracL2,
    Coupling,
}

impl Norm {
    pub const RATED: [Norm; 4] = [Norm::BulkDg, Norm::BulkL2, Norm::FracDg, Norm::FracL2];

    pub fn of(self, r: &ErrorReport) -> f64 {
        match self {
            Norm::BulkDg => r.err_bulk_dg,
            Norm::BulkL2 => r.err_bulk_l2,
            Norm::FracDg => r.err_frac_dg,
            Norm::FracL2 => r.err_frac_l2,
            Norm::Coupling => r.err_coupling,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Norm::BulkDg => "bulk_dg",
            Norm::BulkL2 => "bulk_l2",
            Norm::FracDg => "frac_dg",
            Norm::FracL2 => "frac_l2",
            Norm::Coupling => "coupling",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConvergenceTable {
    pub case: String,
    pub rows: Vec<ErrorReport>,
}

impl ConvergenceTable {
    /// Rate between rows `i-1` and `i`.
    pub fn rate(&self, norm: Norm, i: usize) -> Option<f64> {
        if i == 0 || i >= self.rows.len() {
            return None;
        }
        let (a, b) = (&self.rows[i - 1], &self.rows[i]);
        rate(norm.of(a), norm.of(b), a.h, b.h)
    }

    /// Rate of the last pair whose finer error is above [`ERROR_FLOOR`].
    pub fn final_rate(&self, norm: Norm) -> Option<f64> {
        let last = (1..self.rows.len()).rev().find(|&i| norm.of(&self.rows[i]) >= ERROR_FLOOR)?;
        self.rate(norm, last)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for (i, r) in self.rows.iter().enumerate() {
            let _ = write!(
                out,
                "{},{:.6e},{},{},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e}",
                r.n, r.h, r.dofs_bulk, r.dofs_frac, r.err_bulk_dg, r.err_bulk_l2, r.err_frac_dg, r.err_frac_l2, r.err_coupling
            );
            for norm in Norm::RATED {
                match self.rate(norm, i) {
                    Some(v) => {
                        let _ = write!(out, ",{v:.4}");
                    }
                    None => out.push_str(",nan"),
                }
            }
            out.push('\n');
        }
        out
    }
}

/// The study stops at the first failing level; the error carries the rows completed so far.
#[derive(Debug)]
pub struct ConvergenceFailure {
    pub partial: ConvergenceTable,
    pub level: usize,
    pub error: VerificationError,
}

pub fn run_convergence(
    case: &ManufacturedCase,
    levels: &[usize],
    opts: &StudyOptions,
) -> Result<ConvergenceTable, ConvergenceFailure> {
    let mut table = ConvergenceTable { case: case.name.clone(), rows: Vec::new() };
    if levels.len() < 2 {
        return Err(ConvergenceFailure {
            partial: table,
            level: levels.first().copied().unwrap_or(0),
            error: VerificationError::TooFewLevels(levels.len()),
        });
    }
    for &n in levels {
        match solve_case(case, n, opts) {
            Ok(s) => table.rows.push(s.errors),
            Err(error) => return Err(ConvergenceFailure { partial: table, level: n, error }),
        }
    }
    Ok(table)
}
