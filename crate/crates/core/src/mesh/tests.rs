use super::*;
use crate::network::Fracture;

fn unit() -> Rect {
    Rect::new(Point2::new(0.0, 0.0), Point2::new(1.0, 1.0))
}

fn vertical_network() -> FractureNetwork {
    let p = |y: f64| Point2::new(0.5, y);
    FractureNetwork::new(vec![
        Fracture::new(p(0.0), p(0.5), 1.0, 1.0, 4.0),
        Fracture::new(p(0.5), p(0.75), 1.0, 1.0, 4.0),
        Fracture::new(p(0.75), p(1.0), 1.0, 1.0, 4.0),
    ])
}

#[test]
fn uncut_grid_counts() {
    let mesh = build_cut_mesh(unit(), &FractureNetwork::default(), 2, &MeshOptions::default()).unwrap();
    let c = mesh.counts();
    assert_eq!((c.elements, c.interior, c.dirichlet, c.fracture), (4, 4, 8, 0));
    for e in &mesh.elements {
        assert!((e.area - 0.25).abs() < 1e-15);
    }
}

#[test]
fn aligned_fracture_faces_are_classified() {
    let mesh = build_cut_mesh(unit(), &vertical_network(), 2, &MeshOptions::default()).unwrap();
    let c = mesh.counts();
    assert_eq!((c.elements, c.interior, c.fracture), (4, 2, 3));
    for f in mesh.faces.iter().filter(|f| f.class == FaceClass::Fracture) {
        let ymid = f.midpoint().y;
        let expect = if ymid < 0.5 { 0 } else if ymid < 0.75 { 1 } else { 2 };
        assert_eq!(f.fracture, Some(expect));
    }
    // the right cell of the upper row carries the hanging node at y = 0.75
    assert!(mesh.elements.iter().any(|e| e.vertices.len() == 5));
}

#[test]
fn induced_mesh_of_short_fracture() {
    let mesh = build_cut_mesh(unit(), &vertical_network(), 4, &MeshOptions::default()).unwrap();
    assert_eq!(mesh.fractures[1].len(), 1);
    assert!((mesh.fractures[1][0].h - 0.25).abs() < 1e-15);
    for (k, faces) in mesh.fractures.iter().enumerate() {
        let total: f64 = faces.iter().map(|f| f.h).sum();
        assert!((total - vertical_network().fractures[k].length()).abs() < 1e-12);
        for f in faces {
            let plus = &mesh.faces[f.plus];
            let minus = &mesh.faces[f.minus];
            assert!(plus.normal.dot(vertical_network().fractures[k].normal()) > 0.0);
            assert_eq!(plus.normal, -minus.normal);
            // n_k = (-1, 0) points out of the plus side, which is therefore x > 0.5
            assert!(mesh.elements[plus.owner].centroid.x > 0.5);
        }
    }
}

#[test]
fn edge_classes_for_split_line() {
    let mesh = build_cut_mesh(unit(), &vertical_network(), 4, &MeshOptions::default()).unwrap();
    let c = mesh.counts();
    assert_eq!(c.edges_dirichlet, 2);
    assert_eq!(c.edges_intersection, 2);
    assert_eq!(c.edges_interior, 1);
    let locs: Vec<Point2> =
        mesh.edges.iter().filter(|e| matches!(e.kind, EdgeKind::Intersection(_))).map(|e| e.location).collect();
    assert_eq!(locs, vec![Point2::new(0.5, 0.5), Point2::new(0.5, 0.75)]);
}

#[test]
fn diagonal_cut_invariants() {
    let f = Fracture::new(Point2::new(0.0, 0.0), Point2::new(1.0, 1.0), 0.1, 1.0, 1.0);
    let mesh = build_cut_mesh(unit(), &FractureNetwork::new(vec![f]), 5, &MeshOptions::default()).unwrap();
    assert_eq!(mesh.elements.len(), 30);
    let area: f64 = mesh.elements.iter().map(|e| e.area).sum();
    assert!((area - 1.0).abs() < 1e-12);
    for (id, face) in mesh.faces.iter().enumerate() {
        if let Some(t) = face.twin {
            assert_eq!(mesh.faces[t].twin, Some(id));
            assert_eq!(face.normal, -mesh.faces[t].normal);
        }
    }
    assert!(mesh.regularity_constant() > 0.08);
    assert_eq!(mesh.elements.iter().map(|e| e.subdomain).max(), Some(1));
}

#[test]
fn dangling_tip_is_rejected() {
    let f = Fracture::new(Point2::new(0.0, 0.3), Point2::new(0.6, 0.3), 0.1, 1.0, 1.0);
    let err = build_cut_mesh(unit(), &FractureNetwork::new(vec![f]), 2, &MeshOptions::default()).unwrap_err();
    assert!(matches!(err, MeshError::EndpointInsideCell { .. }));
}

#[test]
fn sliver_is_rejected() {
    // clips a corner triangle of area 5e-15
    let f = Fracture::new(Point2::new(0.0, 1e-7), Point2::new(1e-7, 0.0), 0.1, 1.0, 1.0);
    let opts = MeshOptions::default();
    let err = build_cut_mesh(unit(), &FractureNetwork::new(vec![f]), 1, &opts);
    assert!(matches!(err, Err(MeshError::DegenerateCut { .. })), "{err:?}");
}

#[test]
fn neumann_sides_and_tips() {
    let f = Fracture::new(Point2::new(0.0, 0.5), Point2::new(1.0, 0.5), 0.1, 1.0, 1.0);
    let opts = MeshOptions { neumann_sides: &[Side::Right], ..Default::default() };
    let mesh = build_cut_mesh(unit(), &FractureNetwork::new(vec![f]), 2, &opts).unwrap();
    let c = mesh.counts();
    assert_eq!((c.neumann, c.dirichlet, c.edges_neumann, c.edges_dirichlet), (2, 6, 1, 1));
}
