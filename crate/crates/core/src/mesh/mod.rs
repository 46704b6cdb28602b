//! Fracture-aligned polygonal meshes of a rectangle.
//!
//! A uniform `n × n` Cartesian grid is cut along every fracture and prolongation
//! segment, so that no element is crossed by the network. Points lying on an edge of
//! a neighbouring polygon (hanging nodes, fracture tips) are inserted as extra,
//! collinear vertices; after this every face is shared by exactly one or two
//! elements. Faces are stored per element (half-faces): an interior interface is
//! represented by two faces with opposite normals, linked through `twin`.

mod cut;
mod fracture;
mod io;

pub use fracture::{classify_fracture_edges, induced_fracture_mesh, EdgeKind, EdgeSide, FractureEdge, FractureFace};
pub use io::{write_dump, write_vtk};

use crate::geometry::{is_convex_ccw, polygon_centroid, polygon_diameter, signed_area, Point2, Rect, Side};
use crate::network::{FractureNetwork, IntersectionPoint, NetworkError};
use cut::{group_cut_lines, split_polygon, Split};
use std::collections::HashMap;
use thiserror::Error;

/// Relative geometric tolerance (scaled by the domain diameter).
pub const GEOMETRIC_TOLERANCE: f64 = 1e-10;
/// Pieces smaller than this fraction of their grid cell are rejected.
pub const SLIVER_FRACTION: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("number of subdivisions must be at least 1")]
    NoSubdivisions,
    #[error("degree must be at least 1")]
    InvalidDegree,
    #[error("fracture or prolongation segment ends strictly inside cell ({i}, {j}) at ({x}, {y}); add a prolongation")]
    EndpointInsideCell { i: usize, j: usize, x: f64, y: f64 },
    #[error("cutting cell ({i}, {j}) produced a sliver of relative area {relative_area:e}")]
    DegenerateCut { i: usize, j: usize, relative_area: f64 },
    #[error("segment from ({0}, {1}) to ({2}, {3}) leaves the domain")]
    OutsideDomain(f64, f64, f64, f64),
    #[error("face between vertices {0} and {1} has no neighbour but is not on the domain boundary")]
    UnmatchedFace(usize, usize),
    #[error("face between vertices {0} and {1} is shared by more than two elements")]
    OverlappingFaces(usize, usize),
    #[error("fracture {fracture}: {reason}")]
    FractureMesh { fracture: usize, reason: String },
    #[error("fracture {fracture}: tip at ({x}, {y}) matches no edge category")]
    UnclassifiedTip { fracture: usize, x: f64, y: f64 },
    #[error(transparent)]
    Network(#[from] NetworkError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FaceClass {
    Interior,
    Dirichlet,
    Neumann,
    Fracture,
}

impl FaceClass {
    pub fn as_str(self) -> &'static str {
        match self {
            FaceClass::Interior => "interior",
            FaceClass::Dirichlet => "dirichlet",
            FaceClass::Neumann => "neumann",
            FaceClass::Fracture => "fracture",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Element {
    /// Global vertex ids, counter-clockwise.
    pub vertices: Vec<usize>,
    pub points: Vec<Point2>,
    pub subdomain: usize,
    pub degree: usize,
    pub diameter: f64,
    pub area: f64,
    pub centroid: Point2,
    pub bbox: Rect,
    /// Half-face ids in the same order as the polygon edges.
    pub faces: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Face {
    pub vertices: [usize; 2],
    pub a: Point2,
    pub b: Point2,
    pub length: f64,
    /// Unit normal pointing out of `owner`.
    pub normal: Point2,
    pub owner: usize,
    pub neighbor: Option<usize>,
    /// The coincident face of `neighbor`.
    pub twin: Option<usize>,
    pub class: FaceClass,
    pub fracture: Option<usize>,
}

impl Face {
    pub fn midpoint(&self) -> Point2 {
        self.a.lerp(self.b, 0.5)
    }
}

/// How element subdomain tags are assigned.
#[derive(Clone, Copy)]
pub enum SubdomainRule<'a> {
    /// Tag by the pattern of sides of every fracture/prolongation line.
    SidePattern,
    Custom(&'a (dyn Fn(Point2) -> usize + Sync)),
}

#[derive(Clone, Copy)]
pub struct MeshOptions<'a> {
    pub degree: usize,
    pub fracture_degree: usize,
    pub neumann_sides: &'a [Side],
    pub subdomains: SubdomainRule<'a>,
}

impl Default for MeshOptions<'_> {
    fn default() -> Self {
        Self { degree: 2, fracture_degree: 2, neumann_sides: &[], subdomains: SubdomainRule::SidePattern }
    }
}

#[derive(Clone, Debug)]
pub struct PolygonalMesh {
    pub domain: Rect,
    pub n: usize,
    pub tol: f64,
    pub vertices: Vec<Point2>,
    pub elements: Vec<Element>,
    pub faces: Vec<Face>,
    /// Induced fracture meshes, one ordered face list per fracture.
    pub fractures: Vec<Vec<FractureFace>>,
    pub edges: Vec<FractureEdge>,
    pub intersections: Vec<IntersectionPoint>,
    pub neumann_sides: Vec<Side>,
}

/// Element and face counts per class.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MeshCounts {
    pub elements: usize,
    /// Interfaces are counted once; boundary faces once.
    pub interior: usize,
    pub dirichlet: usize,
    pub neumann: usize,
    pub fracture: usize,
    pub fracture_faces: usize,
    pub edges_interior: usize,
    pub edges_dirichlet: usize,
    pub edges_neumann: usize,
    pub edges_immersed: usize,
    pub edges_intersection: usize,
}

struct VertexPool {
    points: Vec<Point2>,
    buckets: HashMap<(i64, i64), Vec<usize>>,
    tol: f64,
}

impl VertexPool {
    fn key(&self, p: Point2) -> (i64, i64) {
        ((p.x / self.tol).floor() as i64, (p.y / self.tol).floor() as i64)
    }

    fn insert(&mut self, p: Point2) -> usize {
        let (kx, ky) = self.key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = self.buckets.get(&(kx + dx, ky + dy)) {
                    if let Some(&id) = ids.iter().find(|&&id| self.points[id].dist(p) <= self.tol) {
                        return id;
                    }
                }
            }
        }
        let id = self.points.len();
        self.points.push(p);
        self.buckets.entry((kx, ky)).or_default().push(id);
        id
    }
}

/// Builds the fracture-aligned mesh of `domain` from an `n × n` grid.
pub fn build_cut_mesh(
    domain: Rect,
    network: &FractureNetwork,
    n: usize,
    options: &MeshOptions<'_>,
) -> Result<PolygonalMesh, MeshError> {
    if n == 0 {
        return Err(MeshError::NoSubdivisions);
    }
    if options.degree == 0 || options.fracture_degree == 0 {
        return Err(MeshError::InvalidDegree);
    }
    let tol = GEOMETRIC_TOLERANCE * domain.diameter();
    network.validate(tol)?;
    let segments = network.cut_segments();
    for s in &segments {
        if !domain.contains(s.a, tol) || !domain.contains(s.b, tol) {
            return Err(MeshError::OutsideDomain(s.a.x, s.a.y, s.b.x, s.b.y));
        }
    }
    let lines = group_cut_lines(&segments, tol);
    let hx = domain.width() / n as f64;
    let hy = domain.height() / n as f64;
    let grid = |i: usize, j: usize| {
        let x = if i == n { domain.max.x } else { domain.min.x + i as f64 * hx };
        let y = if j == n { domain.max.y } else { domain.min.y + j as f64 * hy };
        Point2::new(x, y)
    };

    // cut every cell; row-major over (j, i) for a stable element order
    let mut pieces: Vec<Vec<Point2>> = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let cell = vec![grid(i, j), grid(i + 1, j), grid(i + 1, j + 1), grid(i, j + 1)];
            let cell_area = signed_area(&cell);
            let mut current = vec![cell];
            for line in &lines {
                let mut next = Vec::with_capacity(current.len() + 1);
                for poly in current {
                    match split_polygon(&poly, line, tol) {
                        Split::Untouched => next.push(poly),
                        Split::Pieces(a, b) => {
                            for piece in [a, b] {
                                let rel = signed_area(&piece) / cell_area;
                                if rel < SLIVER_FRACTION {
                                    return Err(MeshError::DegenerateCut { i, j, relative_area: rel });
                                }
                                next.push(piece);
                            }
                        }
                        Split::Dangling(p) => return Err(MeshError::EndpointInsideCell { i, j, x: p.x, y: p.y }),
                    }
                }
                current = next;
            }
            pieces.extend(current);
        }
    }

    // shared vertex numbering; fracture tips first so they survive as mesh vertices
    let mut pool = VertexPool { points: Vec::new(), buckets: HashMap::new(), tol };
    for f in &network.fractures {
        pool.insert(f.p0);
        pool.insert(f.p1);
    }
    let mut polys: Vec<Vec<usize>> = pieces
        .iter()
        .map(|poly| {
            let mut ids: Vec<usize> = poly.iter().map(|&p| pool.insert(p)).collect();
            ids.dedup();
            while ids.len() > 1 && ids.first() == ids.last() {
                ids.pop();
            }
            ids
        })
        .collect();
    let points = pool.points;

    // insert vertices lying inside polygon edges
    let mut grid_buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let cell_of = |p: Point2| {
        (
            (((p.x - domain.min.x) / hx).floor() as i64).clamp(0, n as i64 - 1),
            (((p.y - domain.min.y) / hy).floor() as i64).clamp(0, n as i64 - 1),
        )
    };
    for (id, &p) in points.iter().enumerate() {
        grid_buckets.entry(cell_of(p)).or_default().push(id);
    }
    for poly in &mut polys {
        let m = poly.len();
        let mut refined = Vec::with_capacity(m + 2);
        for e in 0..m {
            let (u, v) = (poly[e], poly[(e + 1) % m]);
            refined.push(u);
            let (pu, pv) = (points[u], points[v]);
            let len = pu.dist(pv);
            let dir = (pv - pu) * (1.0 / len);
            let mid = cell_of(pu.lerp(pv, 0.5));
            let mut inner: Vec<(f64, usize)> = Vec::new();
            for dx in -1..=1 {
                for dy in -1..=1 {
                    let Some(ids) = grid_buckets.get(&(mid.0 + dx, mid.1 + dy)) else { continue };
                    for &w in ids {
                        if w == u || w == v {
                            continue;
                        }
                        let t = (points[w] - pu).dot(dir);
                        if t > tol && t < len - tol && dir.cross(points[w] - pu).abs() <= tol {
                            inner.push((t, w));
                        }
                    }
                }
            }
            inner.sort_by(|a, b| a.0.total_cmp(&b.0));
            inner.dedup_by_key(|x| x.1);
            refined.extend(inner.into_iter().map(|x| x.1));
        }
        *poly = refined;
    }

    // elements
    let side_pattern_lines = group_cut_lines(&segments, tol);
    let mut pattern_ids: HashMap<Vec<bool>, usize> = HashMap::new();
    let mut elements = Vec::with_capacity(polys.len());
    for poly in polys {
        let pts: Vec<Point2> = poly.iter().map(|&v| points[v]).collect();
        let area = signed_area(&pts);
        debug_assert!(area > 0.0 && is_convex_ccw(&pts, tol * domain.diameter()));
        let centroid = polygon_centroid(&pts);
        let subdomain = match options.subdomains {
            SubdomainRule::Custom(f) => f(centroid),
            SubdomainRule::SidePattern => {
                let pattern: Vec<bool> =
                    side_pattern_lines.iter().map(|l| l.dir.cross(centroid - l.origin) > 0.0).collect();
                let next = pattern_ids.len();
                *pattern_ids.entry(pattern).or_insert(next)
            }
        };
        elements.push(Element {
            diameter: polygon_diameter(&pts),
            bbox: Rect::from_points(&pts),
            vertices: poly,
            points: pts,
            subdomain,
            degree: options.degree,
            area,
            centroid,
            faces: Vec::new(),
        });
    }

    // half-faces and their pairing
    let mut faces = Vec::new();
    let mut by_key: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (e, el) in elements.iter_mut().enumerate() {
        let m = el.vertices.len();
        for k in 0..m {
            let (u, v) = (el.vertices[k], el.vertices[(k + 1) % m]);
            let (a, b) = (points[u], points[v]);
            let length = a.dist(b);
            let t = (b - a) * (1.0 / length);
            let id = faces.len();
            faces.push(Face {
                vertices: [u, v],
                a,
                b,
                length,
                normal: Point2::new(t.y, -t.x),
                owner: e,
                neighbor: None,
                twin: None,
                class: FaceClass::Interior,
                fracture: None,
            });
            el.faces.push(id);
            by_key.entry((u.min(v), u.max(v))).or_default().push(id);
        }
    }
    for id in 0..faces.len() {
        let [u, v] = faces[id].vertices;
        let group = &by_key[&(u.min(v), u.max(v))];
        match group.len() {
            1 => {
                let f = &mut faces[id];
                let side_a = domain.side_of(f.a, tol);
                let mid = f.midpoint();
                let side = domain.side_of(mid, tol);
                if side_a.is_none() || side.is_none() || !side.unwrap().contains(&domain, f.b, tol) {
                    return Err(MeshError::UnmatchedFace(u, v));
                }
                f.class = if options.neumann_sides.contains(&side.unwrap()) {
                    FaceClass::Neumann
                } else {
                    FaceClass::Dirichlet
                };
            }
            2 => {
                let other = if group[0] == id { group[1] } else { group[0] };
                let neighbor = faces[other].owner;
                let f = &mut faces[id];
                f.twin = Some(other);
                f.neighbor = Some(neighbor);
                let fracture = network.fractures.iter().position(|fr| {
                    let s = fr.segment();
                    s.distance(f.a) <= tol && s.distance(f.b) <= tol
                });
                if let Some(k) = fracture {
                    f.class = FaceClass::Fracture;
                    f.fracture = Some(k);
                }
            }
            _ => return Err(MeshError::OverlappingFaces(u, v)),
        }
    }
    // the two halves of an interface share the geometry of the lower-numbered one
    for id in 0..faces.len() {
        if let Some(t) = faces[id].twin {
            if t < id {
                faces[id].normal = -faces[t].normal;
            }
        }
    }

    let intersections = network.intersections(tol)?;
    let fractures = (0..network.len())
        .map(|k| induced_fracture_mesh(&faces, network, k, options.fracture_degree, tol))
        .collect::<Result<Vec<_>, _>>()?;
    let edges = classify_fracture_edges(&domain, options.neumann_sides, network, &fractures, &intersections, tol)?;

    Ok(PolygonalMesh {
        domain,
        n,
        tol,
        vertices: points,
        elements,
        faces,
        fractures,
        edges,
        intersections,
        neumann_sides: options.neumann_sides.to_vec(),
    })
}

impl PolygonalMesh {
    pub fn counts(&self) -> MeshCounts {
        let mut c = MeshCounts { elements: self.elements.len(), ..Default::default() };
        for (id, f) in self.faces.iter().enumerate() {
            if f.twin.is_some_and(|t| t < id) {
                continue;
            }
            match f.class {
                FaceClass::Interior => c.interior += 1,
                FaceClass::Dirichlet => c.dirichlet += 1,
                FaceClass::Neumann => c.neumann += 1,
                FaceClass::Fracture => c.fracture += 1,
            }
        }
        c.fracture_faces = self.fractures.iter().map(Vec::len).sum();
        for e in &self.edges {
            match e.kind {
                EdgeKind::Interior => c.edges_interior += 1,
                EdgeKind::DirichletTip => c.edges_dirichlet += 1,
                EdgeKind::NeumannTip => c.edges_neumann += 1,
                EdgeKind::ImmersedTip => c.edges_immersed += 1,
                EdgeKind::Intersection(_) => c.edges_intersection += 1,
            }
        }
        c
    }

    /// Largest element diameter.
    pub fn h(&self) -> f64 {
        self.elements.iter().map(|e| e.diameter).fold(0.0, f64::max)
    }

    /// `min |triangle(F, centroid)| / (h_E |F|)` over all elements and faces.
    pub fn regularity_constant(&self) -> f64 {
        let mut c = f64::INFINITY;
        for el in &self.elements {
            for &f in &el.faces {
                let face = &self.faces[f];
                let tri = 0.5 * (face.b - face.a).cross(el.centroid - face.a).abs();
                c = c.min(tri / (el.diameter * face.length));
            }
        }
        c
    }

    pub fn n_fracture_faces(&self) -> usize {
        self.fractures.iter().map(Vec::len).sum()
    }
}

#[cfg(test)]
mod tests;
