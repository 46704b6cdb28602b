//! Discretization errors in the energy norm, split into its bulk, fracture and
//! coupling parts, plus L2 errors.

use super::ExactSolution;
use crate::assembly::{apply_tensor, FormData};
use crate::geometry::Point2;
use crate::mesh::{EdgeKind, FaceClass, PolygonalMesh};
use crate::network::{jump_cap_scalar, FractureNetwork};
use crate::space::{form_order, quadrature::interval_rule, segment_quadrature, DgSpace};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ErrorReport {
    pub n: usize,
    pub h: f64,
    pub dofs_bulk: usize,
    pub dofs_frac: usize,
    pub err_bulk_dg: f64,
    pub err_bulk_l2: f64,
    pub err_frac_dg: f64,
    pub err_frac_l2: f64,
    pub err_coupling: f64,
    /// `‖(σ^∩)^½ ⟦p_Γ,h⟧_∩‖` per intersection, in mesh edge order.
    pub intersection_jumps: Vec<f64>,
    /// `‖p_Γ‖_{L2(Γ)}` of the exact fracture pressure.
    pub exact_frac_l2: f64,
}

impl ErrorReport {
    pub fn energy(&self) -> f64 {
        (self.err_bulk_dg.powi(2) + self.err_frac_dg.powi(2) + self.err_coupling.powi(2)).sqrt()
    }
}

/// Squared contributions; summed in a fixed order for reproducibility.
#[derive(Clone, Copy, Default)]
struct Parts {
    bulk_grad: f64,
    bulk_jump: f64,
    bulk_l2: f64,
}

pub fn compute_errors(
    mesh: &PolygonalMesh,
    space: &DgSpace,
    network: &FractureNetwork,
    form: &FormData,
    exact: &dyn ExactSolution,
    solution: &[f64],
) -> ErrorReport {
    let bulk: Vec<Parts> =
        (0..mesh.elements.len()).into_par_iter().map(|e| bulk_element(mesh, space, form, exact, solution, e)).collect();
    let (mut grad, mut jump, mut l2) = (0.0, 0.0, 0.0);
    for p in &bulk {
        grad += p.bulk_grad;
        jump += p.bulk_jump;
        l2 += p.bulk_l2;
    }

    let faces: Vec<(usize, usize)> =
        mesh.fractures.iter().enumerate().flat_map(|(k, fs)| (0..fs.len()).map(move |j| (k, j))).collect();
    let per_face: Vec<[f64; 4]> =
        faces.par_iter().map(|&(k, j)| fracture_face(mesh, space, network, form, exact, solution, k, j)).collect();
    let (mut fgrad, mut fl2, mut coupling, mut exact_l2) = (0.0, 0.0, 0.0, 0.0);
    for v in &per_face {
        fgrad += v[0];
        fl2 += v[1];
        coupling += v[2];
        exact_l2 += v[3];
    }

    let trace = |k: usize, j: usize, outward: f64| -> (f64, f64) {
        let face = &mesh.fractures[k][j];
        let s = if outward > 0.0 { face.s1 } else { face.s0 };
        let ph = space.fracture[k][j].evaluate(space.face_coeffs(solution, k, j), s);
        (exact.fracture(k, face.point_at(s)), ph)
    };
    let mut fjump = 0.0;
    let mut intersection_jumps = Vec::new();
    for (i, edge) in mesh.edges.iter().enumerate() {
        let sigma = form.edge_sigma[i];
        match edge.kind {
            EdgeKind::Interior => {
                let e: f64 = edge
                    .sides
                    .iter()
                    .map(|s| {
                        let (p, ph) = trace(s.fracture, s.face, s.outward);
                        s.outward * (p - ph)
                    })
                    .sum();
                fjump += sigma * e * e;
            }
            EdgeKind::DirichletTip => {
                let s = edge.sides[0];
                let (p, ph) = trace(s.fracture, s.face, s.outward);
                fjump += sigma * (p - ph).powi(2);
            }
            EdgeKind::Intersection(_) => {
                let (errs, discrete): (Vec<f64>, Vec<f64>) = edge
                    .sides
                    .iter()
                    .map(|s| {
                        let (p, ph) = trace(s.fracture, s.face, s.outward);
                        (p - ph, ph)
                    })
                    .unzip();
                let sq = |v: &[f64]| -> f64 {
                    jump_cap_scalar(v).expect("intersection has at least two sides").iter().map(|j| j * j).sum()
                };
                fjump += sigma * sq(&errs);
                intersection_jumps.push((sigma * sq(&discrete)).sqrt());
            }
            EdgeKind::NeumannTip | EdgeKind::ImmersedTip => {}
        }
    }

    ErrorReport {
        n: mesh.n,
        h: mesh.h(),
        dofs_bulk: space.dofs.n_bulk,
        dofs_frac: space.dofs.n_frac,
        err_bulk_dg: (grad + jump).sqrt(),
        err_bulk_l2: l2.sqrt(),
        err_frac_dg: (fgrad + fjump).sqrt(),
        err_frac_l2: fl2.sqrt(),
        err_coupling: coupling.sqrt(),
        intersection_jumps,
        exact_frac_l2: exact_l2.sqrt(),
    }
}

fn bulk_element(
    mesh: &PolygonalMesh,
    space: &DgSpace,
    form: &FormData,
    exact: &dyn ExactSolution,
    x: &[f64],
    e: usize,
) -> Parts {
    let el = &mesh.elements[e];
    let basis = &space.bulk[e];
    let coeffs = space.element_coeffs(x, e);
    let nu = &form.nu[e];
    let mut out = Parts::default();
    let rule = &space.element_rules[e];
    for (&p, &w) in rule.points.iter().zip(&rule.weights) {
        let err = exact.bulk(el.subdomain, p) - basis.evaluate(coeffs, p);
        let g: Point2 = exact.bulk_grad(el.subdomain, p) - basis.evaluate_grad(coeffs, p);
        out.bulk_grad += w * apply_tensor(nu, g).dot(g);
        out.bulk_l2 += w * err * err;
    }
    for &fid in &el.faces {
        let face = &mesh.faces[fid];
        let own_err = |p: Point2| exact.bulk(el.subdomain, p) - basis.evaluate(coeffs, p);
        match face.class {
            FaceClass::Interior if face.twin.is_some_and(|t| t > fid) => {
                let e2 = face.neighbor.expect("interior face without neighbour");
                let (el2, b2) = (&mesh.elements[e2], &space.bulk[e2]);
                let c2 = space.element_coeffs(x, e2);
                let rule = segment_quadrature(face.a, face.b, form_order(basis.degree.max(b2.degree)));
                for (&p, &w) in rule.points.iter().zip(&rule.weights) {
                    let j = own_err(p) - (exact.bulk(el2.subdomain, p) - b2.evaluate(c2, p));
                    out.bulk_jump += w * form.face_sigma[fid] * j * j;
                }
            }
            FaceClass::Dirichlet => {
                let rule = segment_quadrature(face.a, face.b, form_order(basis.degree));
                for (&p, &w) in rule.points.iter().zip(&rule.weights) {
                    out.bulk_jump += w * form.face_sigma[fid] * own_err(p).powi(2);
                }
            }
            _ => {}
        }
    }
    out
}

/// `[∫ν^τℓ(∂_s e)², ∫e², coupling², ∫p_Γ²]` on one fracture face.
#[allow(clippy::too_many_arguments)]
fn fracture_face(
    mesh: &PolygonalMesh,
    space: &DgSpace,
    network: &FractureNetwork,
    form: &FormData,
    exact: &dyn ExactSolution,
    x: &[f64],
    k: usize,
    j: usize,
) -> [f64; 4] {
    let ff = &mesh.fractures[k][j];
    let kappa = network.fractures[k].tangential_conductivity();
    let cc = form.coupling[k];
    let bf = &space.fracture[k][j];
    let cf = space.face_coeffs(x, k, j);
    let (ep, em) = (mesh.faces[ff.plus].owner, mesh.faces[ff.minus].owner);
    let (bp, bm) = (&space.bulk[ep], &space.bulk[em]);
    let (cp, cm) = (space.element_coeffs(x, ep), space.element_coeffs(x, em));
    let (sp, sm) = (mesh.elements[ep].subdomain, mesh.elements[em].subdomain);
    let order = form_order(bp.degree.max(bm.degree).max(bf.degree));
    let (s, ws) = interval_rule(ff.s0, ff.s1, order);
    let mut out = [0.0; 4];
    for (&si, &w) in s.iter().zip(&ws) {
        let p = ff.point_at(si);
        let pg = exact.fracture(k, p);
        let eg = pg - bf.evaluate(cf, si);
        let dg = exact.fracture_ds(k, p) - bf.evaluate_deriv(cf, si);
        let eplus = exact.bulk(sp, p) - bp.evaluate(cp, p);
        let eminus = exact.bulk(sm, p) - bm.evaluate(cm, p);
        out[0] += w * kappa * dg * dg;
        out[1] += w * eg * eg;
        out[2] += w * (cc.beta * (eplus - eminus).powi(2) + cc.alpha * (0.5 * (eplus + eminus) - eg).powi(2));
        out[3] += w * pg * pg;
    }
    out
}
