//! Builtin manufactured cases. Exact fields are symbolic expressions; sources are
//! coded as closed forms so that the consistency gate checks one against the other.

use super::expr::{c, cos, sin, x, y, Expr};
use super::ExactSolution;
use crate::assembly::ProblemData;
use crate::geometry::{Point2, Rect, Side};
use crate::mesh::{build_cut_mesh, MeshError, MeshOptions, PolygonalMesh, SubdomainRule, GEOMETRIC_TOLERANCE};
use crate::network::{coupling_coefficients, Fracture, FractureNetwork, NetworkError};
use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use thiserror::Error;

pub type Field = Arc<dyn Fn(Point2) -> f64 + Send + Sync>;

#[derive(Debug, Error, PartialEq)]
pub enum CaseError {
    #[error("unknown case '{0}' (expected example1a … example4b)")]
    Unknown(String),
    #[error("case {case} has {expected} fractures, the override lists {got}")]
    FractureCount { case: String, expected: usize, got: usize },
    #[error("override of fracture {0} does not match the case geometry")]
    Geometry(usize),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CaseId {
    pub example: u8,
    pub variant: Variant,
}

impl CaseId {
    pub const ALL: [CaseId; 8] = [
        CaseId { example: 1, variant: Variant::A },
        CaseId { example: 1, variant: Variant::B },
        CaseId { example: 2, variant: Variant::A },
        CaseId { example: 2, variant: Variant::B },
        CaseId { example: 3, variant: Variant::A },
        CaseId { example: 3, variant: Variant::B },
        CaseId { example: 4, variant: Variant::A },
        CaseId { example: 4, variant: Variant::B },
    ];

    pub fn default_xi(self) -> f64 {
        match self.example {
            2 | 3 => 0.55,
            _ => 0.75,
        }
    }

    /// The case's fractures with their default coefficients.
    pub fn fractures(self) -> Vec<Fracture> {
        let v = self.variant;
        match self.example {
            1 => example1_fractures(v),
            2 => example2_fractures(v),
            3 => example3_fractures(v),
            _ => example4_fractures(v),
        }
    }

    pub fn build(self) -> Result<ManufacturedCase, CaseError> {
        self.build_with(&CaseOverrides::default())
    }

    pub fn build_with(self, overrides: &CaseOverrides) -> Result<ManufacturedCase, CaseError> {
        let mut fractures = self.fractures();
        if let Some(custom) = &overrides.fractures {
            if custom.len() != fractures.len() {
                return Err(CaseError::FractureCount {
                    case: self.to_string(),
                    expected: fractures.len(),
                    got: custom.len(),
                });
            }
            for (k, (f, o)) in fractures.iter().zip(custom).enumerate() {
                if f.p0.dist(o.p0) > 1e-12 || f.p1.dist(o.p1) > 1e-12 {
                    return Err(CaseError::Geometry(k));
                }
            }
            fractures = custom.clone();
        }
        let xi = overrides.xi.unwrap_or(self.default_xi());
        let mut case = match self.example {
            1 => example1_with(fractures, xi)?,
            2 => example2_with(fractures, xi)?,
            3 => example3_with(fractures, xi)?,
            _ => example4_with(fractures, xi)?,
        };
        case.name = self.to_string();
        Ok(case)
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = match self.variant {
            Variant::A => 'a',
            Variant::B => 'b',
        };
        write!(f, "example{}{}", self.example, v)
    }
}

impl FromStr for CaseId {
    type Err = CaseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CaseId::ALL.into_iter().find(|id| id.to_string() == s.trim()).ok_or_else(|| CaseError::Unknown(s.into()))
    }
}

/// Replacements for a builtin case's defaults; fracture overrides must keep the geometry.
#[derive(Clone, Debug, Default)]
pub struct CaseOverrides {
    pub xi: Option<f64>,
    pub fractures: Option<Vec<Fracture>>,
}

#[derive(Clone)]
pub struct BulkField {
    pub p: Expr,
    pub grad: (Expr, Expr),
    pub source: Field,
}

#[derive(Clone)]
pub struct FractureField {
    pub p: Expr,
    pub grad: (Expr, Expr),
    pub source: Field,
}

impl BulkField {
    pub fn new(p: Expr, source: Field) -> Self {
        Self { grad: p.grad(), p, source }
    }
}

impl FractureField {
    pub fn new(p: Expr, source: Field) -> Self {
        Self { grad: p.grad(), p, source }
    }
}

/// A coupled problem with known exact solution. Bulk fields are indexed by region,
/// i.e. by the subdomain tag that [`ManufacturedCase::mesh`] assigns.
#[derive(Clone)]
pub struct ManufacturedCase {
    pub name: String,
    pub domain: Rect,
    pub network: FractureNetwork,
    pub xi: f64,
    pub neumann_sides: Vec<Side>,
    region: Arc<dyn Fn(Point2) -> usize + Send + Sync>,
    pub bulk: Vec<BulkField>,
    pub fractures: Vec<FractureField>,
    /// `(location, J_∩)` for every intersection.
    pub intersection_fluxes: Vec<(Point2, f64)>,
}

impl fmt::Debug for ManufacturedCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ManufacturedCase")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("network", &self.network)
            .field("xi", &self.xi)
            .field("intersection_fluxes", &self.intersection_fluxes)
            .finish_non_exhaustive()
    }
}

impl ManufacturedCase {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: &str,
        domain: Rect,
        network: FractureNetwork,
        xi: f64,
        neumann_sides: Vec<Side>,
        region: Arc<dyn Fn(Point2) -> usize + Send + Sync>,
        bulk: Vec<BulkField>,
        fractures: Vec<FractureField>,
    ) -> Result<Self, CaseError> {
        for f in &network.fractures {
            coupling_coefficients(f, xi)?;
        }
        let mut case = Self {
            name: name.into(),
            domain,
            network,
            xi,
            neumann_sides,
            region,
            bulk,
            fractures,
            intersection_fluxes: Vec::new(),
        };
        case.intersection_fluxes = case.derive_intersection_fluxes()?;
        Ok(case)
    }

    pub fn tolerance(&self) -> f64 {
        GEOMETRIC_TOLERANCE * self.domain.diameter()
    }

    /// `Σ_k ν^τ_k ℓ_k ∇p_Γ^k · τ_k` at every intersection, from the symbolic gradients.
    fn derive_intersection_fluxes(&self) -> Result<Vec<(Point2, f64)>, CaseError> {
        let points = self.network.intersections(self.tolerance())?;
        Ok(points
            .iter()
            .map(|ip| {
                let j = ip
                    .incident
                    .iter()
                    .map(|&(k, tau)| {
                        let g = &self.fractures[k].grad;
                        let at = ip.location;
                        self.network.fractures[k].tangential_conductivity()
                            * Point2::new(g.0.eval(at), g.1.eval(at)).dot(tau)
                    })
                    .sum();
                (ip.location, j)
            })
            .collect())
    }

    pub fn region(&self, p: Point2) -> usize {
        (self.region)(p)
    }

    pub fn subdomain_rule(&self) -> SubdomainRule<'_> {
        SubdomainRule::Custom(&*self.region)
    }

    pub fn mesh(&self, n: usize, degree: usize) -> Result<PolygonalMesh, MeshError> {
        let options = MeshOptions {
            degree,
            fracture_degree: degree,
            neumann_sides: &self.neumann_sides,
            subdomains: self.subdomain_rule(),
        };
        build_cut_mesh(self.domain, &self.network, n, &options)
    }

    /// Same geometry, coefficients and boundary layout with `p ≡ p_Γ ≡ value`.
    pub fn constant(&self, value: f64) -> Self {
        let zero: Field = Arc::new(|_| 0.0);
        let bulk = self.bulk.iter().map(|_| BulkField::new(c(value), zero.clone())).collect();
        let fractures = self.fractures.iter().map(|_| FractureField::new(c(value), zero.clone())).collect();
        let mut case = Self { name: format!("{}-constant", self.name), bulk, fractures, ..self.clone() };
        case.intersection_fluxes = case.intersection_fluxes.iter().map(|&(p, _)| (p, 0.0)).collect();
        case
    }

    pub fn intersection_flux_at(&self, location: Point2) -> Option<f64> {
        let tol = 1e3 * self.tolerance();
        self.intersection_fluxes.iter().find(|(p, _)| p.dist(location) <= tol).map(|&(_, j)| j)
    }
}

impl ExactSolution for ManufacturedCase {
    fn bulk(&self, subdomain: usize, p: Point2) -> f64 {
        self.bulk[subdomain].p.eval(p)
    }

    fn bulk_grad(&self, subdomain: usize, p: Point2) -> Point2 {
        let g = &self.bulk[subdomain].grad;
        Point2::new(g.0.eval(p), g.1.eval(p))
    }

    fn fracture(&self, k: usize, p: Point2) -> f64 {
        self.fractures[k].p.eval(p)
    }

    fn fracture_ds(&self, k: usize, p: Point2) -> f64 {
        let g = &self.fractures[k].grad;
        Point2::new(g.0.eval(p), g.1.eval(p)).dot(self.network.fractures[k].tangent())
    }
}

impl ProblemData for ManufacturedCase {
    fn bulk_source(&self, subdomain: usize, p: Point2) -> f64 {
        (self.bulk[subdomain].source)(p)
    }

    fn dirichlet(&self, subdomain: usize, p: Point2) -> Option<f64> {
        Some(self.bulk[subdomain].p.eval(p))
    }

    fn fracture_source(&self, k: usize, p: Point2) -> f64 {
        (self.fractures[k].source)(p)
    }

    fn fracture_dirichlet(&self, k: usize, p: Point2) -> Option<f64> {
        Some(self.fractures[k].p.eval(p))
    }

    fn intersection_flux(&self, _i: usize, location: Point2) -> Option<f64> {
        self.intersection_flux_at(location)
    }
}

fn pt(x: f64, y: f64) -> Point2 {
    Point2::new(x, y)
}

fn unit_square() -> Rect {
    Rect::new(pt(0.0, 0.0), pt(1.0, 1.0))
}

/// `(ℓ, ν^τ, ν^n)` per fracture.
fn with_coefficients(segments: &[(Point2, Point2)], coefficients: &[(f64, f64, f64)]) -> Vec<Fracture> {
    segments.iter().zip(coefficients).map(|(&(a, b), &(l, t, n))| Fracture::new(a, b, l, t, n)).collect()
}

fn shared_coefficients(v: Variant) -> Vec<(f64, f64, f64)> {
    match v {
        Variant::A => vec![(1e-4, 3e4, 4e-4), (1e-2, 2e3, 4e-2), (1e-5, 4e4, 4e-5)],
        Variant::B => vec![(0.25e4, 3e-4, 1e4), (0.25e2, 2e-3, 1e2), (0.25e5, 4e-4, 1e5)],
    }
}

fn example1_fractures(v: Variant) -> Vec<Fracture> {
    let segments = [
        (pt(0.5, 0.0), pt(0.5, 0.5)),
        (pt(0.5, 0.5), pt(0.5, 0.75)),
        (pt(0.5, 0.75), pt(0.5, 1.0)),
    ];
    with_coefficients(&segments, &shared_coefficients(v))
}

/// Example 1 solution with any set of fractures lying on `x = 0.5` in the unit square.
pub fn example1_with(fractures: Vec<Fracture>, xi: f64) -> Result<ManufacturedCase, CaseError> {
    let (c2, s2) = (2f64.cos(), 2f64.sin());
    let left = sin(4.0 * x()) * cos(PI * y());
    let right = cos(4.0 * x()) * cos(PI * y());
    let bulk = vec![
        BulkField::new(left, Arc::new(|p: Point2| (16.0 + PI * PI) * (4.0 * p.x).sin() * (PI * p.y).cos())),
        BulkField::new(right, Arc::new(|p: Point2| (16.0 + PI * PI) * (4.0 * p.x).cos() * (PI * p.y).cos())),
    ];
    let frac = fractures
        .iter()
        .map(|f| {
            let (l, t) = (f.aperture, f.nu_tau);
            FractureField::new(
                (xi * (c2 + s2)) * cos(PI * y()),
                Arc::new(move |p: Point2| (PI * p.y).cos() * (c2 + s2) * (xi * t * PI * PI + 4.0 / l)),
            )
        })
        .collect();
    ManufacturedCase::new(
        "example1",
        unit_square(),
        FractureNetwork::new(fractures),
        xi,
        Vec::new(),
        Arc::new(|p: Point2| usize::from(p.x > 0.5)),
        bulk,
        frac,
    )
}

fn example2_fractures(v: Variant) -> Vec<Fracture> {
    let segments = [(pt(-2.0, -2.0), pt(0.0, 0.0)), (pt(0.0, 0.0), pt(2.0, 2.0)), (pt(0.0, 0.0), pt(0.0, 2.0))];
    with_coefficients(&segments, &shared_coefficients(v))
}

fn example2_with(fractures: Vec<Fracture>, xi: f64) -> Result<ManufacturedCase, CaseError> {
    let p = cos(x() * y() - x() * x());
    let source: Field = Arc::new(|p: Point2| {
        let (x, y) = (p.x, p.y);
        let u = x * y - x * x;
        u.cos() * (y * y + 5.0 * x * x - 4.0 * x * y) - 2.0 * u.sin()
    });
    let bulk = (0..3).map(|_| BulkField::new(p.clone(), source.clone())).collect();
    let frac = fractures.iter().map(|_| FractureField::new(c(1.0), Arc::new(|_| 0.0))).collect();
    ManufacturedCase::new(
        "example2",
        Rect::new(pt(-2.0, -2.0), pt(2.0, 2.0)),
        FractureNetwork::new(fractures),
        xi,
        Vec::new(),
        // below the diagonal, then the two wedges split by γ₃
        Arc::new(|p: Point2| if p.y < p.x { 0 } else if p.x < 0.0 { 1 } else { 2 }),
        bulk,
        frac,
    )
}

fn powers(v: Variant) -> Vec<(f64, f64, f64)> {
    (1..=5)
        .map(|k| {
            let e = match v {
                Variant::A => k as f64 * 10f64.powi(k),
                Variant::B => k as f64 * 10f64.powi(-k),
            };
            (e, e, e)
        })
        .collect()
}

fn example3_fractures(v: Variant) -> Vec<Fracture> {
    let segments = [
        (pt(-1.0, 0.0), pt(-0.5, 0.0)),
        (pt(-0.5, 0.0), pt(0.0, 0.0)),
        (pt(0.0, -1.0), pt(0.0, 0.0)),
        (pt(0.0, 0.0), pt(1.0, 0.0)),
        (pt(0.0, 0.0), pt(0.0, 1.0)),
    ];
    with_coefficients(&segments, &powers(v))
}

fn example3_with(fractures: Vec<Fracture>, xi: f64) -> Result<ManufacturedCase, CaseError> {
    let p = cos(PI * x()) * cos(PI * y());
    let source: Field = Arc::new(|p: Point2| 2.0 * PI * PI * (PI * p.x).cos() * (PI * p.y).cos());
    let bulk = (0..4).map(|_| BulkField::new(p.clone(), source.clone())).collect();
    let frac = fractures
        .iter()
        .map(|f| {
            let t = f.nu_tau;
            if f.tangent().x.abs() > 0.5 {
                FractureField::new(cos(PI * x()), Arc::new(move |p: Point2| PI * PI * t * (PI * p.x).cos()))
            } else {
                FractureField::new(cos(PI * y()), Arc::new(move |p: Point2| PI * PI * t * (PI * p.y).cos()))
            }
        })
        .collect();
    ManufacturedCase::new(
        "example3",
        Rect::new(pt(-1.0, -1.0), pt(1.0, 1.0)),
        FractureNetwork::new(fractures),
        xi,
        vec![Side::Right],
        Arc::new(|p: Point2| usize::from(p.x > 0.0) + 2 * usize::from(p.y > 0.0)),
        bulk,
        frac,
    )
}

fn example4_fractures(v: Variant) -> Vec<Fracture> {
    let segments = [
        (pt(0.0, 0.5), pt(0.5, 0.5)),
        (pt(0.5, 0.0), pt(0.5, 0.5)),
        (pt(0.5, 0.5), pt(1.0, 0.5)),
        (pt(0.5, 0.5), pt(0.5, 1.0)),
    ];
    let coefficients: Vec<(f64, f64, f64)> = (1..=4)
        .map(|k| {
            let e = k as f64 * 10f64.powi(k);
            match v {
                Variant::A => (2.0 / PI * e, e, e),
                Variant::B => {
                    let l = k as f64 * 10f64.powi(-k);
                    (l, e, PI / 2.0 * l)
                }
            }
        })
        .collect();
    with_coefficients(&segments, &coefficients)
}

fn example4_with(fractures: Vec<Fracture>, xi: f64) -> Result<ManufacturedCase, CaseError> {
    let h = |e: Expr| 0.5 * PI * e;
    let p_l = sin(h(x())) * cos(2.0 * PI * y());
    let p_r = cos(h(x())) * cos(2.0 * PI * y());
    let p_u = cos(h(y())) * cos(2.0 * PI * x());
    let p_d = sin(h(y())) * cos(2.0 * PI * x());
    let f = |a: fn(f64) -> f64, b: fn(f64) -> f64| -> Field {
        Arc::new(move |p: Point2| {
            let (x, y) = (p.x, p.y);
            let lr = a(0.5 * PI * x) * (2.0 * PI * y).cos();
            let ud = b(0.5 * PI * y) * (2.0 * PI * x).cos();
            17.0 / 4.0 * PI * PI * (lr + ud)
        })
    };
    let bulk = vec![
        BulkField::new(p_l.clone() + p_d.clone(), f(f64::sin, f64::sin)),
        BulkField::new(p_r.clone() + p_d, f(f64::cos, f64::sin)),
        BulkField::new(p_r + p_u.clone(), f(f64::cos, f64::cos)),
        BulkField::new(p_l + p_u, f(f64::sin, f64::cos)),
    ];
    let frac = fractures
        .iter()
        .enumerate()
        .map(|(k, fr)| {
            let (l, t) = (fr.aperture, fr.nu_tau);
            // γ₁, γ₃ horizontal; γ₁, γ₂ use the sine branch
            let horizontal = k % 2 == 0;
            let sine = k < 2;
            let s = if horizontal { x() } else { y() };
            let tail = if sine { sin(h(s.clone())) } else { cos(h(s.clone())) };
            let exact = (xi * SQRT_2) * cos(2.0 * PI * s) - tail;
            let source: Field = Arc::new(move |p: Point2| {
                let s = if horizontal { p.x } else { p.y };
                let tail = if sine { (0.5 * PI * s).sin() } else { (0.5 * PI * s).cos() };
                (2.0 * PI * s).cos() * (SQRT_2 * PI / (2.0 * l) + 4.0 * PI * PI * xi * SQRT_2 * t)
                    - t * PI * PI / 4.0 * tail
            });
            FractureField::new(exact, source)
        })
        .collect();
    ManufacturedCase::new(
        "example4",
        unit_square(),
        FractureNetwork::new(fractures),
        xi,
        Vec::new(),
        Arc::new(|p: Point2| match (p.x > 0.5, p.y > 0.5) {
            (false, false) => 0,
            (true, false) => 1,
            (true, true) => 2,
            (false, true) => 3,
        }),
        bulk,
        frac,
    )
}

/// Value shared by all four fracture pressures of Example 4 at the crossing.
pub fn example4_crossing_value(xi: f64) -> f64 {
    xi * SQRT_2 * PI.cos() - FRAC_1_SQRT_2
}
