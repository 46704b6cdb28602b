//! Facewise bulk and edgewise fracture penalty parameters.

use super::{AssemblyError, Tensor2};
use crate::mesh::{EdgeKind, FaceClass, PolygonalMesh};
use crate::network::FractureNetwork;

/// Largest eigenvalue of a symmetric 2×2 tensor, i.e. `|√ν|₂²`.
pub fn nu_bar(t: &Tensor2) -> f64 {
    let (a, b, d) = (t[0][0], t[0][1], t[1][1]);
    let mean = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    mean + rad
}

/// `σ₀ · max ν̄_E (k_E+1)(k_E+2)/h_E` over `(ν̄_E, k_E, h_E)` of the adjacent elements.
pub fn sigma_bulk_value(sigma0: f64, sides: &[(f64, usize, f64)]) -> f64 {
    sides.iter().map(|&(nu, k, h)| sigma0 * nu * ((k + 1) * (k + 2)) as f64 / h).fold(0.0, f64::max)
}

/// `σ₀^Γ · max ν^τℓ (k_F+1)(k_F+1)/h_F` over `(ν^τℓ, k_F, h_F)` of the incident fracture faces.
pub fn sigma_fracture_value(sigma0_gamma: f64, sides: &[(f64, usize, f64)]) -> f64 {
    sides.iter().map(|&(kappa, k, h)| sigma0_gamma * kappa * ((k + 1) * (k + 1)) as f64 / h).fold(0.0, f64::max)
}

pub fn sigma_bulk(mesh: &PolygonalMesh, face: usize, nu_bars: &[f64], sigma0: f64) -> Result<f64, AssemblyError> {
    let f = &mesh.faces[face];
    let side = |e: usize| (nu_bars[e], mesh.elements[e].degree, mesh.elements[e].diameter);
    match f.class {
        FaceClass::Interior => {
            Ok(sigma_bulk_value(sigma0, &[side(f.owner), side(f.neighbor.expect("interior face has a neighbour"))]))
        }
        FaceClass::Dirichlet => Ok(sigma_bulk_value(sigma0, &[side(f.owner)])),
        class => Err(AssemblyError::NoBulkPenalty { face, class: class.as_str() }),
    }
}

pub fn sigma_fracture(
    mesh: &PolygonalMesh,
    network: &FractureNetwork,
    edge: usize,
    sigma0_gamma: f64,
) -> Result<f64, AssemblyError> {
    let e = &mesh.edges[edge];
    match e.kind {
        EdgeKind::NeumannTip | EdgeKind::ImmersedTip => {
            Err(AssemblyError::NoFracturePenalty { edge, kind: e.kind.as_str() })
        }
        _ => {
            let sides: Vec<(f64, usize, f64)> = e
                .sides
                .iter()
                .map(|s| {
                    let face = &mesh.fractures[s.fracture][s.face];
                    (network.fractures[s.fracture].tangential_conductivity(), face.degree, face.h)
                })
                .collect();
            Ok(sigma_fracture_value(sigma0_gamma, &sides))
        }
    }
}
