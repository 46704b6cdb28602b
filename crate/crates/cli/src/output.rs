//! File outputs. Every file is written to a temporary sibling and renamed into place.

use fracdg::mesh::PolygonalMesh;
use fracdg::space::DgSpace;
use fracdg::verification::ErrorReport;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Every element fanned into triangles around its centroid; points are duplicated per
/// element so the discontinuous `p_h` is carried as point data.
pub fn solution_vtk(mesh: &PolygonalMesh, space: &DgSpace, x: &[f64]) -> String {
    let mut points = String::new();
    let mut cells = String::new();
    let mut values = String::new();
    let mut tags = String::new();
    let (mut np, mut nc) = (0usize, 0usize);
    for (e, el) in mesh.elements.iter().enumerate() {
        let coeffs = space.element_coeffs(x, e);
        let base = np;
        for &p in el.points.iter().chain(std::iter::once(&el.centroid)) {
            let _ = writeln!(points, "{:e} {:e} 0", p.x, p.y);
            let _ = writeln!(values, "{:e}", space.bulk[e].evaluate(coeffs, p));
            np += 1;
        }
        let m = el.points.len();
        for i in 0..m {
            let _ = writeln!(cells, "3 {} {} {}", base + i, base + (i + 1) % m, base + m);
            let _ = writeln!(tags, "{}", el.subdomain);
            nc += 1;
        }
    }
    let mut out = String::new();
    let _ = writeln!(out, "# vtk DataFile Version 3.0\nbulk pressure\nASCII\nDATASET POLYDATA");
    let _ = write!(out, "POINTS {np} double\n{points}");
    let _ = write!(out, "POLYGONS {nc} {}\n{cells}", 4 * nc);
    let _ = write!(out, "POINT_DATA {np}\nSCALARS p double 1\nLOOKUP_TABLE default\n{values}");
    let _ = write!(out, "CELL_DATA {nc}\nSCALARS subdomain int 1\nLOOKUP_TABLE default\n{tags}");
    out
}

/// Samples per fracture face, end points included.
const FACE_SAMPLES: usize = 5;

pub fn fracture_csv(mesh: &PolygonalMesh, space: &DgSpace, x: &[f64]) -> String {
    let mut out = String::from("fracture,s,x,y,p\n");
    for (k, faces) in mesh.fractures.iter().enumerate() {
        for (j, face) in faces.iter().enumerate() {
            let coeffs = space.face_coeffs(x, k, j);
            for i in 0..FACE_SAMPLES {
                let s = face.s0 + (face.s1 - face.s0) * i as f64 / (FACE_SAMPLES - 1) as f64;
                let p = face.point_at(s);
                let v = space.fracture[k][j].evaluate(coeffs, s);
                let _ = writeln!(out, "{k},{s:.12e},{:.12e},{:.12e},{v:.12e}", p.x, p.y);
            }
        }
    }
    out
}

pub fn errors_csv(r: &ErrorReport) -> String {
    format!(
        "n,h,dofs_bulk,dofs_frac,err_bulk_dg,err_bulk_l2,err_frac_dg,err_frac_l2,err_coupling,err_energy\n\
         {},{:.6e},{},{},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e}\n",
        r.n,
        r.h,
        r.dofs_bulk,
        r.dofs_frac,
        r.err_bulk_dg,
        r.err_bulk_l2,
        r.err_frac_dg,
        r.err_frac_l2,
        r.err_coupling,
        r.energy()
    )
}

pub fn counts_text(mesh: &PolygonalMesh) -> String {
    let c = mesh.counts();
    let rows = [
        ("elements", c.elements),
        ("faces_interior", c.interior),
        ("faces_dirichlet", c.dirichlet),
        ("faces_neumann", c.neumann),
        ("faces_fracture", c.fracture),
        ("fracture_faces", c.fracture_faces),
        ("edges_interior", c.edges_interior),
        ("edges_dirichlet", c.edges_dirichlet),
        ("edges_neumann", c.edges_neumann),
        ("edges_immersed", c.edges_immersed),
        ("edges_intersection", c.edges_intersection),
    ];
    rows.iter().map(|(k, v)| format!("{k} {v}\n")).collect()
}
