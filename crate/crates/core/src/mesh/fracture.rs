//! One-dimensional fracture meshes induced by the bulk mesh, and their edges.

use super::{Face, MeshError};
use crate::geometry::{Point2, Rect, Side};
use crate::network::{FractureNetwork, IntersectionPoint, TipCondition};

#[derive(Clone, Debug)]
pub struct FractureFace {
    pub fracture: usize,
    pub a: Point2,
    pub b: Point2,
    /// Arc coordinates of `a` and `b`, `s0 < s1`.
    pub s0: f64,
    pub s1: f64,
    pub h: f64,
    pub degree: usize,
    /// Bulk half-face on the side the fracture normal points out of.
    pub plus: usize,
    pub minus: usize,
}

impl FractureFace {
    pub fn point_at(&self, s: f64) -> Point2 {
        let t = (s - self.s0) / self.h;
        self.a.lerp(self.b, t)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeKind {
    Interior,
    DirichletTip,
    NeumannTip,
    ImmersedTip,
    /// Index into [`super::PolygonalMesh::intersections`].
    Intersection(usize),
}

impl EdgeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::Interior => "interior",
            EdgeKind::DirichletTip => "dirichlet",
            EdgeKind::NeumannTip => "neumann",
            EdgeKind::ImmersedTip => "immersed",
            EdgeKind::Intersection(_) => "intersection",
        }
    }
}

/// A fracture face touching an edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeSide {
    pub fracture: usize,
    /// Position in the fracture's face list.
    pub face: usize,
    /// +1 when the edge is the `s1` end of the face, −1 for the `s0` end.
    pub outward: f64,
}

#[derive(Clone, Debug)]
pub struct FractureEdge {
    pub location: Point2,
    pub kind: EdgeKind,
    /// Interior edges: the face before the edge, then the face after it.
    /// Intersections: one side per incident fracture, in the intersection's order.
    pub sides: Vec<EdgeSide>,
}

/// Ordered faces covering fracture `k`, each linked to its two coincident bulk half-faces.
pub fn induced_fracture_mesh(
    faces: &[Face],
    network: &FractureNetwork,
    k: usize,
    degree: usize,
    tol: f64,
) -> Result<Vec<FractureFace>, MeshError> {
    let fracture = &network.fractures[k];
    let normal = fracture.normal();
    let err = |reason: String| MeshError::FractureMesh { fracture: k, reason };
    let mut out = Vec::new();
    for (id, f) in faces.iter().enumerate() {
        if f.fracture != Some(k) || f.normal.dot(normal) <= 0.0 {
            continue;
        }
        let minus = f.twin.ok_or_else(|| err(format!("bulk face {id} has no coincident face")))?;
        let (sa, sb) = (fracture.arc_coordinate(f.a), fracture.arc_coordinate(f.b));
        let (a, b, s0, s1) = if sa <= sb { (f.a, f.b, sa, sb) } else { (f.b, f.a, sb, sa) };
        out.push(FractureFace { fracture: k, a, b, s0, s1, h: a.dist(b), degree, plus: id, minus });
    }
    out.sort_by(|x, y| x.s0.total_cmp(&y.s0));
    let length = fracture.length();
    let mut cursor = 0.0;
    for face in &mut out {
        if (face.s0 - cursor).abs() > tol {
            return Err(err(format!("gap or overlap at arc coordinate {cursor}")));
        }
        // make consecutive faces share their end coordinate exactly
        face.s0 = cursor;
        cursor = face.s1;
    }
    if out.is_empty() || (cursor - length).abs() > tol {
        return Err(err(format!("faces cover [0, {cursor}] instead of [0, {length}]")));
    }
    if let Some(last) = out.last_mut() {
        last.s1 = length;
    }
    for face in &mut out {
        face.h = face.s1 - face.s0;
    }
    Ok(out)
}

/// Classifies every endpoint of every fracture face exactly once.
pub fn classify_fracture_edges(
    domain: &Rect,
    neumann_sides: &[Side],
    network: &FractureNetwork,
    fractures: &[Vec<FractureFace>],
    intersections: &[IntersectionPoint],
    tol: f64,
) -> Result<Vec<FractureEdge>, MeshError> {
    let mut edges = Vec::new();
    for (k, faces) in fractures.iter().enumerate() {
        let fracture = &network.fractures[k];
        let tips = [(fracture.p0, 0usize, -1.0), (fracture.p1, faces.len() - 1, 1.0)];
        for (end, &(p, face, outward)) in tips.iter().enumerate() {
            if intersections.iter().any(|ip| ip.position_of(k).is_some() && ip.location.dist(p) <= tol) {
                continue;
            }
            if !p.is_finite() {
                return Err(MeshError::UnclassifiedTip { fracture: k, x: p.x, y: p.y });
            }
            let kind = match (domain.side_of(p, tol), fracture.bc[end]) {
                (_, TipCondition::Dirichlet) => EdgeKind::DirichletTip,
                (Some(_), TipCondition::Neumann) => EdgeKind::NeumannTip,
                (None, _) => EdgeKind::ImmersedTip,
                (Some(side), TipCondition::Auto) => {
                    // a tip on a corner is Neumann only if both adjacent sides are
                    let sides: Vec<Side> = [Side::Left, Side::Right, Side::Bottom, Side::Top]
                        .into_iter()
                        .filter(|s| s.contains(domain, p, tol))
                        .collect();
                    debug_assert!(sides.contains(&side));
                    if sides.iter().all(|s| neumann_sides.contains(s)) {
                        EdgeKind::NeumannTip
                    } else {
                        EdgeKind::DirichletTip
                    }
                }
            };
            edges.push(FractureEdge { location: p, kind, sides: vec![EdgeSide { fracture: k, face, outward }] });
        }
        for j in 1..faces.len() {
            edges.push(FractureEdge {
                location: faces[j].a,
                kind: EdgeKind::Interior,
                sides: vec![
                    EdgeSide { fracture: k, face: j - 1, outward: 1.0 },
                    EdgeSide { fracture: k, face: j, outward: -1.0 },
                ],
            });
        }
    }
    for (i, ip) in intersections.iter().enumerate() {
        let sides = ip
            .incident
            .iter()
            .map(|&(k, _)| {
                let f = &network.fractures[k];
                if f.p1.dist(ip.location) <= tol {
                    EdgeSide { fracture: k, face: fractures[k].len() - 1, outward: 1.0 }
                } else {
                    EdgeSide { fracture: k, face: 0, outward: -1.0 }
                }
            })
            .collect();
        edges.push(FractureEdge { location: ip.location, kind: EdgeKind::Intersection(i), sides });
    }
    Ok(edges)
}
