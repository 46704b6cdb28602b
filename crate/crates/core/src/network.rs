//! Fracture network: geometry, physical coefficients, intersection detection and
//! the jump/average operators at points where several fractures meet.
//!
//! Fracture ids are zero-based positions in [`FractureNetwork::fractures`].
//! At an intersection the incident fractures are listed in increasing id order and
//! pair vectors use the lexicographic order `(0,1), (0,2), …, (N-2,N-1)` over the
//! local positions.

use crate::geometry::{Point2, Segment};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum NetworkError {
    #[error("closure parameter xi = {0} must satisfy xi > 1/2")]
    ClosureParameter(f64),
    #[error("fracture {id}: {what} must be positive (got {value})")]
    NonPositive { id: usize, what: &'static str, value: f64 },
    #[error("fracture {0} has zero length")]
    Degenerate(usize),
    #[error("expected {expected} values at the intersection, got {got}")]
    CountMismatch { expected: usize, got: usize },
    #[error("an intersection needs at least two fractures, got {0}")]
    TooFewFractures(usize),
    #[error("endpoint of fracture {tip} lies inside fracture {host}; split the host fracture at that point")]
    TJunction { tip: usize, host: usize },
    #[error("fracture {0} meets itself at an intersection")]
    SelfIntersection(usize),
}

/// Boundary condition requested for a fracture tip that lies on the domain boundary.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TipCondition {
    /// Inherit the bulk boundary condition at the tip location.
    #[default]
    Auto,
    Dirichlet,
    Neumann,
}

/// A straight fracture with constant aperture and permeabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct Fracture {
    pub p0: Point2,
    pub p1: Point2,
    /// Aperture ℓ.
    pub aperture: f64,
    /// Tangential permeability ν^τ.
    pub nu_tau: f64,
    /// Normal permeability ν^n.
    pub nu_n: f64,
    pub bc: [TipCondition; 2],
}

impl Fracture {
    pub fn new(p0: Point2, p1: Point2, aperture: f64, nu_tau: f64, nu_n: f64) -> Self {
        Self { p0, p1, aperture, nu_tau, nu_n, bc: [TipCondition::Auto; 2] }
    }

    pub fn segment(&self) -> Segment {
        Segment::new(self.p0, self.p1)
    }

    pub fn length(&self) -> f64 {
        self.p0.dist(self.p1)
    }

    /// Unit tangent from `p0` to `p1`.
    pub fn tangent(&self) -> Point2 {
        (self.p1 - self.p0).normalized()
    }

    /// Unit normal n_k, the tangent rotated counter-clockwise.
    pub fn normal(&self) -> Point2 {
        self.tangent().perp()
    }

    pub fn point_at(&self, s: f64) -> Point2 {
        self.p0 + self.tangent() * s
    }

    pub fn arc_coordinate(&self, p: Point2) -> f64 {
        (p - self.p0).dot(self.tangent())
    }

    /// Effective tangential conductivity ν^τ ℓ.
    pub fn tangential_conductivity(&self) -> f64 {
        self.nu_tau * self.aperture
    }

    fn validate(&self, id: usize) -> Result<(), NetworkError> {
        for (what, value) in [("aperture", self.aperture), ("nu_tau", self.nu_tau), ("nu_n", self.nu_n)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(NetworkError::NonPositive { id, what, value });
            }
        }
        if self.length() <= 0.0 {
            return Err(NetworkError::Degenerate(id));
        }
        Ok(())
    }
}

/// Fracture-to-bulk transfer coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CouplingCoefficients {
    pub eta: f64,
    pub alpha: f64,
    pub beta: f64,
}

/// η = ℓ/ν^n, β = 1/(2η), α = 2/(η(2ξ−1)).
pub fn coupling_coefficients(fracture: &Fracture, xi: f64) -> Result<CouplingCoefficients, NetworkError> {
    if !(xi > 0.5) {
        return Err(NetworkError::ClosureParameter(xi));
    }
    fracture.validate(0)?;
    let eta = fracture.aperture / fracture.nu_n;
    Ok(CouplingCoefficients { eta, alpha: 2.0 / (eta * (2.0 * xi - 1.0)), beta: 1.0 / (2.0 * eta) })
}

/// Point shared by the tips of two or more fractures.
#[derive(Clone, Debug, PartialEq)]
pub struct IntersectionPoint {
    pub location: Point2,
    /// `(fracture id, τ_k)` in increasing id order; τ_k is the unit tangent of
    /// fracture k pointing out of the fracture through this tip.
    pub incident: Vec<(usize, Point2)>,
}

impl IntersectionPoint {
    pub fn len(&self) -> usize {
        self.incident.len()
    }

    pub fn is_empty(&self) -> bool {
        self.incident.is_empty()
    }

    /// Local index pairs `(i, k)`, `i < k`, in lexicographic order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        pair_indices(self.len())
    }

    pub fn tangents(&self) -> Vec<Point2> {
        self.incident.iter().map(|&(_, t)| t).collect()
    }

    pub fn position_of(&self, fracture: usize) -> Option<usize> {
        self.incident.iter().position(|&(k, _)| k == fracture)
    }

    fn check(&self, got: usize) -> Result<(), NetworkError> {
        if got != self.len() {
            return Err(NetworkError::CountMismatch { expected: self.len(), got });
        }
        Ok(())
    }

    pub fn jump_scalar(&self, values: &[f64]) -> Result<Vec<f64>, NetworkError> {
        self.check(values.len())?;
        jump_cap_scalar(values)
    }

    pub fn average_scalar(&self, values: &[f64]) -> Result<f64, NetworkError> {
        self.check(values.len())?;
        average_cap_scalar(values)
    }

    pub fn jump_vector(&self, vectors: &[Point2]) -> Result<f64, NetworkError> {
        self.check(vectors.len())?;
        jump_cap_vector(vectors, &self.tangents())
    }

    pub fn average_vector(&self, vectors: &[Point2]) -> Result<Vec<f64>, NetworkError> {
        self.check(vectors.len())?;
        average_cap_vector(vectors, &self.tangents())
    }
}

/// Lexicographic list of index pairs `(i, k)` with `i < k < n`.
pub fn pair_indices(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for k in i + 1..n {
            out.push((i, k));
        }
    }
    out
}

fn require_two(n: usize) -> Result<(), NetworkError> {
    if n < 2 {
        return Err(NetworkError::TooFewFractures(n));
    }
    Ok(())
}

/// ⟦b⟧_∩: the vector of pairwise differences `b_i − b_k`, `i < k`.
pub fn jump_cap_scalar(values: &[f64]) -> Result<Vec<f64>, NetworkError> {
    require_two(values.len())?;
    Ok(pair_indices(values.len()).into_iter().map(|(i, k)| values[i] - values[k]).collect())
}

/// {b}_∩: arithmetic mean of the traces.
pub fn average_cap_scalar(values: &[f64]) -> Result<f64, NetworkError> {
    require_two(values.len())?;
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// ⟦a⟧_∩ = Σ a_k·τ_k, the total flux leaving the fractures through the intersection.
pub fn jump_cap_vector(vectors: &[Point2], tangents: &[Point2]) -> Result<f64, NetworkError> {
    if vectors.len() != tangents.len() {
        return Err(NetworkError::CountMismatch { expected: tangents.len(), got: vectors.len() });
    }
    require_two(vectors.len())?;
    Ok(vectors.iter().zip(tangents).map(|(a, t)| a.dot(*t)).sum())
}

/// {a}_∩: the vector of `(a_i·τ_i − a_k·τ_k)/N`, `i < k`.
pub fn average_cap_vector(vectors: &[Point2], tangents: &[Point2]) -> Result<Vec<f64>, NetworkError> {
    if vectors.len() != tangents.len() {
        return Err(NetworkError::CountMismatch { expected: tangents.len(), got: vectors.len() });
    }
    let fluxes: Vec<f64> = vectors.iter().zip(tangents).map(|(a, t)| a.dot(*t)).collect();
    average_cap_flux(&fluxes)
}

/// {a}_∩ expressed directly through the outward fluxes `a_k·τ_k`.
pub fn average_cap_flux(fluxes: &[f64]) -> Result<Vec<f64>, NetworkError> {
    require_two(fluxes.len())?;
    let n = fluxes.len() as f64;
    Ok(pair_indices(fluxes.len()).into_iter().map(|(i, k)| (fluxes[i] - fluxes[k]) / n).collect())
}

/// Fractures plus optional extra segments (prolongations) that complete the
/// partition of the domain into subdomains.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FractureNetwork {
    pub fractures: Vec<Fracture>,
    pub prolongations: Vec<Segment>,
}

impl FractureNetwork {
    pub fn new(fractures: Vec<Fracture>) -> Self {
        Self { fractures, prolongations: Vec::new() }
    }

    pub fn with_prolongations(mut self, prolongations: Vec<Segment>) -> Self {
        self.prolongations = prolongations;
        self
    }

    pub fn len(&self) -> usize {
        self.fractures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fractures.is_empty()
    }

    pub fn validate(&self, tol: f64) -> Result<(), NetworkError> {
        for (id, f) in self.fractures.iter().enumerate() {
            f.validate(id)?;
        }
        for (tip, f) in self.fractures.iter().enumerate() {
            for p in [f.p0, f.p1] {
                for (host, g) in self.fractures.iter().enumerate() {
                    if host == tip || p.dist(g.p0) <= tol || p.dist(g.p1) <= tol {
                        continue;
                    }
                    if g.segment().distance(p) <= tol {
                        return Err(NetworkError::TJunction { tip, host });
                    }
                }
            }
        }
        Ok(())
    }

    /// Groups fracture tips that coincide within `tol`; every group with two or more
    /// fractures is an intersection. Order follows the first tip of each group.
    pub fn intersections(&self, tol: f64) -> Result<Vec<IntersectionPoint>, NetworkError> {
        let mut groups: Vec<(Point2, Vec<(usize, usize)>)> = Vec::new();
        for (k, f) in self.fractures.iter().enumerate() {
            for (end, p) in [f.p0, f.p1].into_iter().enumerate() {
                match groups.iter_mut().find(|(q, _)| q.dist(p) <= tol) {
                    Some((_, members)) => members.push((k, end)),
                    None => groups.push((p, vec![(k, end)])),
                }
            }
        }
        let mut out = Vec::new();
        for (location, mut members) in groups {
            if members.len() < 2 {
                continue;
            }
            members.sort_unstable();
            for w in members.windows(2) {
                if w[0].0 == w[1].0 {
                    return Err(NetworkError::SelfIntersection(w[0].0));
                }
            }
            let incident = members
                .into_iter()
                .map(|(k, end)| {
                    let t = self.fractures[k].tangent();
                    (k, if end == 1 { t } else { -t })
                })
                .collect();
            out.push(IntersectionPoint { location, incident });
        }
        Ok(out)
    }

    /// Fractures and prolongations: every segment the bulk mesh must be aligned with.
    pub fn cut_segments(&self) -> Vec<Segment> {
        self.fractures.iter().map(Fracture::segment).chain(self.prolongations.iter().copied()).collect()
    }
}
