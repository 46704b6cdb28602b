//! Discontinuous polynomial spaces on the bulk mesh and the fracture meshes.

mod basis;
pub mod quadrature;

pub use basis::{monomial_exponents, polygon_dim, ElementBasis, FaceBasis};
pub use quadrature::{polygon_quadrature, segment_quadrature, QuadratureRule};

use crate::mesh::PolygonalMesh;
use rayon::prelude::*;

/// Quadrature order used for every form integral of a degree-`k` space.
pub fn form_order(k: usize) -> usize {
    2 * k + 2
}

/// Global numbering: all bulk DOFs (element-major), then fracture DOFs
/// (fracture-major, face-major).
#[derive(Clone, Debug)]
pub struct DofMap {
    bulk_offsets: Vec<usize>,
    frac_offsets: Vec<Vec<usize>>,
    pub n_bulk: usize,
    pub n_frac: usize,
}

impl DofMap {
    pub fn element(&self, e: usize) -> usize {
        self.bulk_offsets[e]
    }

    pub fn fracture_face(&self, k: usize, j: usize) -> usize {
        self.frac_offsets[k][j]
    }

    pub fn total(&self) -> usize {
        self.n_bulk + self.n_frac
    }
}

#[derive(Clone, Debug)]
pub struct DgSpace {
    pub bulk: Vec<ElementBasis>,
    /// Quadrature of order [`form_order`] on every element.
    pub element_rules: Vec<QuadratureRule>,
    pub fracture: Vec<Vec<FaceBasis>>,
    pub dofs: DofMap,
}

impl DgSpace {
    pub fn new(mesh: &PolygonalMesh) -> Self {
        let (bulk, element_rules): (Vec<_>, Vec<_>) = mesh
            .elements
            .par_iter()
            .map(|e| {
                let rule = polygon_quadrature(&e.points, form_order(e.degree));
                (ElementBasis::new(&e.bbox, e.degree, &rule), rule)
            })
            .unzip();
        let fracture: Vec<Vec<FaceBasis>> = mesh
            .fractures
            .iter()
            .map(|faces| faces.iter().map(|f| FaceBasis::new(f.s0, f.s1, f.degree)).collect())
            .collect();
        let mut next = 0;
        let bulk_offsets = bulk
            .iter()
            .map(|b| {
                let o = next;
                next += b.dim();
                o
            })
            .collect();
        let n_bulk = next;
        let frac_offsets = fracture
            .iter()
            .map(|faces| {
                faces
                    .iter()
                    .map(|b| {
                        let o = next;
                        next += b.dim();
                        o
                    })
                    .collect()
            })
            .collect();
        let dofs = DofMap { bulk_offsets, frac_offsets, n_bulk, n_frac: next - n_bulk };
        Self { bulk, element_rules, fracture, dofs }
    }

    /// Bulk coefficients of element `e` within a global vector.
    pub fn element_coeffs<'a>(&self, x: &'a [f64], e: usize) -> &'a [f64] {
        let o = self.dofs.element(e);
        &x[o..o + self.bulk[e].dim()]
    }

    pub fn face_coeffs<'a>(&self, x: &'a [f64], k: usize, j: usize) -> &'a [f64] {
        let o = self.dofs.fracture_face(k, j);
        &x[o..o + self.fracture[k][j].dim()]
    }
}
