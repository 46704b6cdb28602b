#![allow(dead_code)]

use fracdg::mesh::PolygonalMesh;
use fracdg::space::{form_order, quadrature::interval_rule, DgSpace};
use fracdg::verification::ExactSolution;

/// Elementwise and facewise L2 projection of an exact solution into the DG space.
pub fn project(mesh: &PolygonalMesh, space: &DgSpace, exact: &dyn ExactSolution) -> Vec<f64> {
    let mut x = vec![0.0; space.dofs.total()];
    for (e, el) in mesh.elements.iter().enumerate() {
        let c = space.bulk[e].l2_project(&space.element_rules[e], |p| exact.bulk(el.subdomain, p));
        let o = space.dofs.element(e);
        x[o..o + c.len()].copy_from_slice(&c);
    }
    for (k, faces) in mesh.fractures.iter().enumerate() {
        for (j, f) in faces.iter().enumerate() {
            let basis = &space.fracture[k][j];
            let (s, w) = interval_rule(f.s0, f.s1, form_order(f.degree) + 4);
            let c = basis.l2_project(&s, &w, |s| exact.fracture(k, f.point_at(s)));
            let o = space.dofs.fracture_face(k, j);
            x[o..o + c.len()].copy_from_slice(&c);
        }
    }
    x
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
