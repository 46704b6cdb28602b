//! Assembly of the coupled bulk/fracture SIP-DG system.

mod penalty;

pub use penalty::{nu_bar, sigma_bulk, sigma_bulk_value, sigma_fracture, sigma_fracture_value};

use crate::geometry::Point2;
use crate::mesh::{EdgeKind, FaceClass, PolygonalMesh};
use crate::network::{
    average_cap_flux, average_cap_scalar, coupling_coefficients, jump_cap_scalar, CouplingCoefficients,
    FractureNetwork, NetworkError,
};
use crate::space::{form_order, quadrature::interval_rule, segment_quadrature, DgSpace};
use crate::sparse::CsrMatrix;
use rayon::prelude::*;
use thiserror::Error;

pub type Tensor2 = [[f64; 2]; 2];

pub fn apply_tensor(t: &Tensor2, v: Point2) -> Point2 {
    Point2::new(t[0][0] * v.x + t[0][1] * v.y, t[1][0] * v.x + t[1][1] * v.y)
}

/// Coefficients and data of a coupled problem. Bulk quantities are indexed by the
/// element's subdomain tag, fracture quantities by fracture id.
pub trait ProblemData: Sync {
    /// Bulk permeability; evaluated once per element, at its centroid.
    fn permeability(&self, _subdomain: usize, _p: Point2) -> Tensor2 {
        [[1.0, 0.0], [0.0, 1.0]]
    }
    fn bulk_source(&self, subdomain: usize, p: Point2) -> f64;
    /// Dirichlet value of the bulk pressure seen from `subdomain`.
    fn dirichlet(&self, subdomain: usize, p: Point2) -> Option<f64>;
    /// `f_Γ` on fracture `k`; the assembled source is `ℓ f_Γ`.
    fn fracture_source(&self, k: usize, p: Point2) -> f64;
    fn fracture_dirichlet(&self, k: usize, p: Point2) -> Option<f64>;
    /// Prescribed total outflow `Σ_k ν^τ_k ℓ_k ∂_s p_k τ_k` at intersection `i`.
    fn intersection_flux(&self, i: usize, location: Point2) -> Option<f64>;
}

#[derive(Debug, Error, PartialEq)]
pub enum AssemblyError {
    #[error("penalty parameter {name} = {value} must be positive")]
    InvalidPenalty { name: &'static str, value: f64 },
    #[error("permeability on element {element} is not symmetric positive definite")]
    InvalidPermeability { element: usize },
    #[error("no Dirichlet value at ({x}, {y}) on face {face}")]
    MissingDirichlet { face: usize, x: f64, y: f64 },
    #[error("no Dirichlet value for fracture {fracture} at tip ({x}, {y})")]
    MissingFractureDirichlet { fracture: usize, x: f64, y: f64 },
    #[error("intersection flux requested but not provided at intersection {0}")]
    MissingIntersectionFlux(usize),
    #[error("bulk penalty is undefined on {class} face {face}")]
    NoBulkPenalty { face: usize, class: &'static str },
    #[error("fracture penalty is undefined on {kind} edge {edge}")]
    NoFracturePenalty { edge: usize, kind: &'static str },
    #[error(transparent)]
    Network(#[from] NetworkError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AssemblyOptions {
    pub sigma0: f64,
    pub sigma0_gamma: f64,
    pub xi: f64,
    /// Add the prescribed intersection flux jump to the fracture right-hand side.
    pub intersection_flux: bool,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        Self { sigma0: 10.0, sigma0_gamma: 10.0, xi: 0.75, intersection_flux: true }
    }
}

/// Per-element, per-face and per-edge coefficients shared by assembly and error norms.
#[derive(Clone, Debug)]
pub struct FormData {
    pub nu: Vec<Tensor2>,
    /// Penalty per half-face (both halves of an interface carry the same value);
    /// zero on Neumann and fracture faces.
    pub face_sigma: Vec<f64>,
    /// Penalty per fracture edge; zero on Neumann and immersed tips.
    pub edge_sigma: Vec<f64>,
    pub coupling: Vec<CouplingCoefficients>,
}

impl FormData {
    pub fn new(
        mesh: &PolygonalMesh,
        network: &FractureNetwork,
        data: &dyn ProblemData,
        opts: &AssemblyOptions,
    ) -> Result<Self, AssemblyError> {
        for (name, value) in [("sigma0", opts.sigma0), ("sigma0_gamma", opts.sigma0_gamma)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(AssemblyError::InvalidPenalty { name, value });
            }
        }
        let coupling = network
            .fractures
            .iter()
            .map(|f| coupling_coefficients(f, opts.xi))
            .collect::<Result<Vec<_>, _>>()?;
        let mut nu = Vec::with_capacity(mesh.elements.len());
        for (id, e) in mesh.elements.iter().enumerate() {
            let t = data.permeability(e.subdomain, e.centroid);
            let det = t[0][0] * t[1][1] - t[0][1] * t[1][0];
            if !(t[0][0] > 0.0 && det > 0.0 && t[0][1] == t[1][0] && det.is_finite()) {
                return Err(AssemblyError::InvalidPermeability { element: id });
            }
            nu.push(t);
        }
        let nu_bars: Vec<f64> = nu.iter().map(nu_bar).collect();
        let face_sigma = (0..mesh.faces.len())
            .map(|f| match mesh.faces[f].class {
                FaceClass::Interior | FaceClass::Dirichlet => sigma_bulk(mesh, f, &nu_bars, opts.sigma0),
                _ => Ok(0.0),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let edge_sigma = (0..mesh.edges.len())
            .map(|i| match mesh.edges[i].kind {
                EdgeKind::NeumannTip | EdgeKind::ImmersedTip => Ok(0.0),
                _ => sigma_fracture(mesh, network, i, opts.sigma0_gamma),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { nu, face_sigma, edge_sigma, coupling })
    }
}

/// Triplets and right-hand-side entries produced by one family of terms.
#[derive(Clone, Debug, Default)]
pub struct Contribution {
    pub triplets: Vec<(usize, usize, f64)>,
    pub rhs: Vec<(usize, f64)>,
}

impl Contribution {
    fn add_block(&mut self, dofs: &[usize], m: &[f64]) {
        let n = dofs.len();
        for (i, &r) in dofs.iter().enumerate() {
            for (j, &c) in dofs.iter().enumerate() {
                let v = m[i * n + j];
                if v != 0.0 {
                    self.triplets.push((r, c, v));
                }
            }
        }
    }

    fn add_rhs(&mut self, dofs: &[usize], r: &[f64]) {
        for (&i, &v) in dofs.iter().zip(r) {
            if v != 0.0 {
                self.rhs.push((i, v));
            }
        }
    }

    fn concat(parts: Vec<Contribution>) -> Contribution {
        let mut out = Contribution {
            triplets: Vec::with_capacity(parts.iter().map(|p| p.triplets.len()).sum()),
            rhs: Vec::with_capacity(parts.iter().map(|p| p.rhs.len()).sum()),
        };
        for p in parts {
            out.triplets.extend(p.triplets);
            out.rhs.extend(p.rhs);
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct AssembledSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    /// Start offsets of the element and fracture-face blocks.
    pub blocks: Vec<usize>,
}

fn range(start: usize, len: usize) -> Vec<usize> {
    (start..start + len).collect()
}

/// Volume, interior-face and Dirichlet-face terms of the bulk SIP form, one work item per element.
pub fn assemble_bulk(
    mesh: &PolygonalMesh,
    space: &DgSpace,
    data: &dyn ProblemData,
    form: &FormData,
) -> Result<Contribution, AssemblyError> {
    let parts = (0..mesh.elements.len())
        .into_par_iter()
        .map(|e| bulk_element(mesh, space, data, form, e))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Contribution::concat(parts))
}

fn bulk_element(
    mesh: &PolygonalMesh,
    space: &DgSpace,
    data: &dyn ProblemData,
    form: &FormData,
    e: usize,
) -> Result<Contribution, AssemblyError> {
    let mut out = Contribution::default();
    let el = &mesh.elements[e];
    let basis = &space.bulk[e];
    let n = basis.dim();
    let dofs = range(space.dofs.element(e), n);
    let nu = &form.nu[e];
    let mut m = vec![0.0; n * n];
    let mut r = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut g = vec![Point2::default(); n];
    let rule = &space.element_rules[e];
    for (&p, &w) in rule.points.iter().zip(&rule.weights) {
        basis.eval_into(p, &mut v);
        basis.eval_grad_into(p, &mut g);
        let ng: Vec<Point2> = g.iter().map(|&gi| apply_tensor(nu, gi)).collect();
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] += w * ng[j].dot(g[i]);
            }
        }
        let f = data.bulk_source(el.subdomain, p);
        for i in 0..n {
            r[i] += w * f * v[i];
        }
    }
    out.add_block(&dofs, &m);
    out.add_rhs(&dofs, &r);

    for &fid in &el.faces {
        let face = &mesh.faces[fid];
        match face.class {
            FaceClass::Interior if face.twin.is_some_and(|t| t > fid) => {
                let e2 = face.neighbor.expect("interior face without neighbour");
                let b2 = &space.bulk[e2];
                let n2 = b2.dim();
                let nt = n + n2;
                let mut all = dofs.clone();
                all.extend(range(space.dofs.element(e2), n2));
                let nu2 = &form.nu[e2];
                let sigma = form.face_sigma[fid];
                let rule = segment_quadrature(face.a, face.b, form_order(basis.degree.max(b2.degree)));
                let mut mf = vec![0.0; nt * nt];
                let mut v2 = vec![0.0; n2];
                let mut g2 = vec![Point2::default(); n2];
                let mut jump = vec![0.0; nt];
                let mut avg = vec![0.0; nt];
                for (&p, &w) in rule.points.iter().zip(&rule.weights) {
                    basis.eval_into(p, &mut v);
                    basis.eval_grad_into(p, &mut g);
                    b2.eval_into(p, &mut v2);
                    b2.eval_grad_into(p, &mut g2);
                    for i in 0..n {
                        jump[i] = v[i];
                        avg[i] = 0.5 * apply_tensor(nu, g[i]).dot(face.normal);
                    }
                    for i in 0..n2 {
                        jump[n + i] = -v2[i];
                        avg[n + i] = 0.5 * apply_tensor(nu2, g2[i]).dot(face.normal);
                    }
                    sip_block(&mut mf, &jump, &avg, sigma, w);
                }
                out.add_block(&all, &mf);
            }
            FaceClass::Dirichlet => {
                let sigma = form.face_sigma[fid];
                let rule = segment_quadrature(face.a, face.b, form_order(basis.degree));
                let mut mf = vec![0.0; n * n];
                let mut rf = vec![0.0; n];
                let mut avg = vec![0.0; n];
                for (&p, &w) in rule.points.iter().zip(&rule.weights) {
                    basis.eval_into(p, &mut v);
                    basis.eval_grad_into(p, &mut g);
                    for i in 0..n {
                        avg[i] = apply_tensor(nu, g[i]).dot(face.normal);
                    }
                    sip_block(&mut mf, &v, &avg, sigma, w);
                    let gd = data
                        .dirichlet(el.subdomain, p)
                        .ok_or(AssemblyError::MissingDirichlet { face: fid, x: p.x, y: p.y })?;
                    for i in 0..n {
                        rf[i] += w * gd * (sigma * v[i] - avg[i]);
                    }
                }
                out.add_block(&dofs, &mf);
                out.add_rhs(&dofs, &rf);
            }
            _ => {}
        }
    }
    Ok(out)
}

/// `m_ij += w (−avg_j jump_i − avg_i jump_j + σ jump_i jump_j)` (row = test, column = trial).
fn sip_block(m: &mut [f64], jump: &[f64], avg: &[f64], sigma: f64, w: f64) {
    let n = jump.len();
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] += w * (-avg[j] * jump[i] - avg[i] * jump[j] + sigma * jump[i] * jump[j]);
        }
    }
}

/// Tangential stiffness, sources, interior-edge, Dirichlet-tip and intersection terms
/// of the fracture SIP form.
pub fn assemble_fracture(
    mesh: &PolygonalMesh,
    space: &DgSpace,
    network: &FractureNetwork,
    data: &dyn ProblemData,
    form: &FormData,
) -> Result<Contribution, AssemblyError> {
    let faces: Vec<(usize, usize)> =
        mesh.fractures.iter().enumerate().flat_map(|(k, fs)| (0..fs.len()).map(move |j| (k, j))).collect();
    let mut parts: Vec<Contribution> = faces
        .par_iter()
        .map(|&(k, j)| {
            let fracture = &network.fractures[k];
            let kappa = fracture.tangential_conductivity();
            let face = &mesh.fractures[k][j];
            let basis = &space.fracture[k][j];
            let n = basis.dim();
            let dofs = range(space.dofs.fracture_face(k, j), n);
            let (s, ws) = interval_rule(face.s0, face.s1, form_order(basis.degree));
            let mut m = vec![0.0; n * n];
            let mut r = vec![0.0; n];
            let mut v = vec![0.0; n];
            let mut d = vec![0.0; n];
            for (&si, &w) in s.iter().zip(&ws) {
                basis.eval_into(si, &mut v);
                basis.eval_deriv_into(si, &mut d);
                let f = fracture.aperture * data.fracture_source(k, face.point_at(si));
                for a in 0..n {
                    for b in 0..n {
                        m[a * n + b] += w * kappa * d[a] * d[b];
                    }
                    r[a] += w * f * v[a];
                }
            }
            let mut out = Contribution::default();
            out.add_block(&dofs, &m);
            out.add_rhs(&dofs, &r);
            out
        })
        .collect();
    let edges = (0..mesh.edges.len())
        .into_par_iter()
        .map(|i| fracture_edge(mesh, space, network, data, form, i))
        .collect::<Result<Vec<_>, _>>()?;
    parts.extend(edges);
    Ok(Contribution::concat(parts))
}

/// Values and arc derivatives of the fracture basis at the edge end of a face.
fn end_trace(mesh: &PolygonalMesh, space: &DgSpace, k: usize, j: usize, outward: f64) -> (Vec<f64>, Vec<f64>) {
    let face = &mesh.fractures[k][j];
    let s = if outward > 0.0 { face.s1 } else { face.s0 };
    let basis = &space.fracture[k][j];
    (basis.eval(s), basis.eval_deriv(s))
}

fn fracture_edge(
    mesh: &PolygonalMesh,
    space: &DgSpace,
    network: &FractureNetwork,
    data: &dyn ProblemData,
    form: &FormData,
    i: usize,
) -> Result<Contribution, AssemblyError> {
    let edge = &mesh.edges[i];
    let sigma = form.edge_sigma[i];
    let mut out = Contribution::default();
    match edge.kind {
        EdgeKind::Interior => {
            let mut dofs = Vec::new();
            let mut jump = Vec::new();
            let mut avg = Vec::new();
            for side in &edge.sides {
                let kappa = network.fractures[side.fracture].tangential_conductivity();
                let (v, d) = end_trace(mesh, space, side.fracture, side.face, side.outward);
                dofs.extend(range(space.dofs.fracture_face(side.fracture, side.face), v.len()));
                jump.extend(v.iter().map(|x| side.outward * x));
                avg.extend(d.iter().map(|x| 0.5 * kappa * x));
            }
            let n = dofs.len();
            let mut m = vec![0.0; n * n];
            sip_block(&mut m, &jump, &avg, sigma, 1.0);
            out.add_block(&dofs, &m);
        }
        EdgeKind::DirichletTip => {
            let side = edge.sides[0];
            let kappa = network.fractures[side.fracture].tangential_conductivity();
            let (v, d) = end_trace(mesh, space, side.fracture, side.face, side.outward);
            let n = v.len();
            let dofs = range(space.dofs.fracture_face(side.fracture, side.face), n);
            let avg: Vec<f64> = d.iter().map(|x| kappa * x * side.outward).collect();
            let mut m = vec![0.0; n * n];
            sip_block(&mut m, &v, &avg, sigma, 1.0);
            let g = data.fracture_dirichlet(side.fracture, edge.location).ok_or(
                AssemblyError::MissingFractureDirichlet { fracture: side.fracture, x: edge.location.x, y: edge.location.y },
            )?;
            let r: Vec<f64> = (0..n).map(|a| g * (sigma * v[a] - avg[a])).collect();
            out.add_block(&dofs, &m);
            out.add_rhs(&dofs, &r);
        }
        EdgeKind::Intersection(_) => {
            let (dofs, jumps, avgs) = intersection_traces(mesh, space, network, i)?;
            let n = dofs.len();
            let mut m = vec![0.0; n * n];
            for a in 0..n {
                for b in 0..n {
                    m[b * n + a] = -dot(&avgs[a], &jumps[b]) - dot(&avgs[b], &jumps[a]) + sigma * dot(&jumps[a], &jumps[b]);
                }
            }
            out.add_block(&dofs, &m);
        }
        EdgeKind::NeumannTip | EdgeKind::ImmersedTip => {}
    }
    Ok(out)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

type IntersectionTraces = (Vec<usize>, Vec<Vec<f64>>, Vec<Vec<f64>>);

/// For every basis function touching the intersection edge `i`: its global DOF, its
/// ⟦·⟧_∩ vector and the {ν^τℓ ∂_s ·}_∩ vector of its flux.
fn intersection_traces(
    mesh: &PolygonalMesh,
    space: &DgSpace,
    network: &FractureNetwork,
    i: usize,
) -> Result<IntersectionTraces, AssemblyError> {
    let edge = &mesh.edges[i];
    let count = edge.sides.len();
    let mut dofs = Vec::new();
    let mut jumps = Vec::new();
    let mut avgs = Vec::new();
    for (m, side) in edge.sides.iter().enumerate() {
        let kappa = network.fractures[side.fracture].tangential_conductivity();
        let (v, d) = end_trace(mesh, space, side.fracture, side.face, side.outward);
        let offset = space.dofs.fracture_face(side.fracture, side.face);
        for a in 0..v.len() {
            let mut traces = vec![0.0; count];
            traces[m] = v[a];
            let mut fluxes = vec![0.0; count];
            fluxes[m] = kappa * d[a] * side.outward;
            dofs.push(offset + a);
            jumps.push(jump_cap_scalar(&traces)?);
            avgs.push(average_cap_flux(&fluxes)?);
        }
    }
    Ok((dofs, jumps, avgs))
}

/// `Σ_∩ J_∩ {q_Γ}_∩`, the right-hand side completing the intersection flux balance.
pub fn assemble_intersection_flux_rhs(
    mesh: &PolygonalMesh,
    space: &DgSpace,
    data: &dyn ProblemData,
) -> Result<Contribution, AssemblyError> {
    let mut out = Contribution::default();
    for edge in &mesh.edges {
        let EdgeKind::Intersection(i) = edge.kind else { continue };
        let flux = data.intersection_flux(i, edge.location).ok_or(AssemblyError::MissingIntersectionFlux(i))?;
        if flux == 0.0 {
            continue;
        }
        let count = edge.sides.len();
        for (m, side) in edge.sides.iter().enumerate() {
            let (v, _) = end_trace(mesh, space, side.fracture, side.face, side.outward);
            let offset = space.dofs.fracture_face(side.fracture, side.face);
            for (a, &va) in v.iter().enumerate() {
                let mut traces = vec![0.0; count];
                traces[m] = va;
                out.rhs.push((offset + a, flux * average_cap_scalar(&traces)?));
            }
        }
    }
    Ok(out)
}

/// `∫ β ⟦p⟧·⟦q⟧ + ∫ α ({p} − p_Γ)({q} − q_Γ)` over every fracture face.
pub fn assemble_coupling(mesh: &PolygonalMesh, space: &DgSpace, form: &FormData) -> Contribution {
    let faces: Vec<(usize, usize)> =
        mesh.fractures.iter().enumerate().flat_map(|(k, fs)| (0..fs.len()).map(move |j| (k, j))).collect();
    let parts = faces
        .par_iter()
        .map(|&(k, j)| {
            let ff = &mesh.fractures[k][j];
            let c = form.coupling[k];
            let (ep, em) = (mesh.faces[ff.plus].owner, mesh.faces[ff.minus].owner);
            let (bp, bm, bf) = (&space.bulk[ep], &space.bulk[em], &space.fracture[k][j]);
            let (np, nm, nf) = (bp.dim(), bm.dim(), bf.dim());
            let nt = np + nm + nf;
            let mut dofs = range(space.dofs.element(ep), np);
            dofs.extend(range(space.dofs.element(em), nm));
            dofs.extend(range(space.dofs.fracture_face(k, j), nf));
            let order = form_order(bp.degree.max(bm.degree).max(bf.degree));
            let (s, ws) = interval_rule(ff.s0, ff.s1, order);
            let mut m = vec![0.0; nt * nt];
            let mut jump = vec![0.0; nt];
            let mut gap = vec![0.0; nt];
            for (&si, &w) in s.iter().zip(&ws) {
                let p = ff.point_at(si);
                let (vp, vm, vf) = (bp.eval(p), bm.eval(p), bf.eval(si));
                for a in 0..np {
                    jump[a] = vp[a];
                    gap[a] = 0.5 * vp[a];
                }
                for a in 0..nm {
                    jump[np + a] = -vm[a];
                    gap[np + a] = 0.5 * vm[a];
                }
                for a in 0..nf {
                    jump[np + nm + a] = 0.0;
                    gap[np + nm + a] = -vf[a];
                }
                for a in 0..nt {
                    for b in 0..nt {
                        m[a * nt + b] += w * (c.beta * jump[a] * jump[b] + c.alpha * gap[a] * gap[b]);
                    }
                }
            }
            let mut out = Contribution::default();
            out.add_block(&dofs, &m);
            out
        })
        .collect();
    Contribution::concat(parts)
}

/// The full system `A_b + A_Γ + C`, `L_b + L_Γ` (plus the intersection flux term when enabled).
pub fn assemble_system(
    mesh: &PolygonalMesh,
    space: &DgSpace,
    network: &FractureNetwork,
    data: &dyn ProblemData,
    opts: &AssemblyOptions,
) -> Result<(AssembledSystem, FormData), AssemblyError> {
    let form = FormData::new(mesh, network, data, opts)?;
    let mut parts = vec![
        assemble_bulk(mesh, space, data, &form)?,
        assemble_fracture(mesh, space, network, data, &form)?,
        assemble_coupling(mesh, space, &form),
    ];
    if opts.intersection_flux {
        parts.push(assemble_intersection_flux_rhs(mesh, space, data)?);
    }
    let all = Contribution::concat(parts);
    let n = space.dofs.total();
    let mut rhs = vec![0.0; n];
    for (i, v) in all.rhs {
        rhs[i] += v;
    }
    let matrix = CsrMatrix::from_triplets(n, all.triplets);
    let mut blocks: Vec<usize> = (0..mesh.elements.len()).map(|e| space.dofs.element(e)).collect();
    for (k, faces) in mesh.fractures.iter().enumerate() {
        blocks.extend((0..faces.len()).map(|j| space.dofs.fracture_face(k, j)));
    }
    Ok((AssembledSystem { matrix, rhs, blocks }, form))
}
