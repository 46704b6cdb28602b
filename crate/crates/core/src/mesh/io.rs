//! Legacy VTK and plain-text mesh export.

use super::PolygonalMesh;
use std::io::{self, Write};

/// ASCII POLYDATA with one polygon per element and the subdomain tag as cell data.
pub fn write_vtk<W: Write>(mesh: &PolygonalMesh, mut w: W) -> io::Result<()> {
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "fracture-aligned polygonal mesh")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET POLYDATA")?;
    writeln!(w, "POINTS {} double", mesh.vertices.len())?;
    for p in &mesh.vertices {
        writeln!(w, "{:e} {:e} 0", p.x, p.y)?;
    }
    let size: usize = mesh.elements.iter().map(|e| e.vertices.len() + 1).sum();
    writeln!(w, "POLYGONS {} {}", mesh.elements.len(), size)?;
    for e in &mesh.elements {
        write!(w, "{}", e.vertices.len())?;
        for v in &e.vertices {
            write!(w, " {v}")?;
        }
        writeln!(w)?;
    }
    writeln!(w, "CELL_DATA {}", mesh.elements.len())?;
    writeln!(w, "SCALARS subdomain int 1")?;
    writeln!(w, "LOOKUP_TABLE default")?;
    for e in &mesh.elements {
        writeln!(w, "{}", e.subdomain)?;
    }
    Ok(())
}

/// `v x y`, `e i1 ... tag` and `f a b owner neighbor class fid` lines; every
/// interface appears once, `-1` marks a missing neighbour or fracture.
pub fn write_dump<W: Write>(mesh: &PolygonalMesh, mut w: W) -> io::Result<()> {
    for p in &mesh.vertices {
        writeln!(w, "v {:e} {:e}", p.x, p.y)?;
    }
    for e in &mesh.elements {
        write!(w, "e")?;
        for v in &e.vertices {
            write!(w, " {v}")?;
        }
        writeln!(w, " {}", e.subdomain)?;
    }
    for (id, f) in mesh.faces.iter().enumerate() {
        if f.twin.is_some_and(|t| t < id) {
            continue;
        }
        let neighbor = f.neighbor.map_or(-1, |n| n as i64);
        let fid = f.fracture.map_or(-1, |k| k as i64);
        writeln!(w, "f {} {} {} {} {} {}", f.vertices[0], f.vertices[1], f.owner, neighbor, f.class.as_str(), fid)?;
    }
    Ok(())
}
