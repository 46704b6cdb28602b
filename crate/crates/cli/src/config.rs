//! Network files and the problem they describe when no builtin case is selected.

use fracdg::assembly::ProblemData;
use fracdg::geometry::{Point2, Rect, Side};
use fracdg::network::{Fracture, FractureNetwork, TipCondition};
use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FractureSpec {
    pub p0: [f64; 2],
    pub p1: [f64; 2],
    pub aperture: f64,
    pub nu_tau: f64,
    pub nu_n: f64,
    #[serde(default)]
    pub bc0: TipCondition,
    #[serde(default)]
    pub bc1: TipCondition,
}

impl FractureSpec {
    pub fn to_fracture(&self) -> Fracture {
        let pt = |a: [f64; 2]| Point2::new(a[0], a[1]);
        Fracture { bc: [self.bc0, self.bc1], ..Fracture::new(pt(self.p0), pt(self.p1), self.aperture, self.nu_tau, self.nu_n) }
    }
}

/// Either overrides for a builtin case (only `fractures` and `xi` are read) or a
/// standalone problem with constant data.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    #[serde(default)]
    pub domain: Option<[[f64; 2]; 2]>,
    #[serde(default)]
    pub neumann_sides: Vec<Side>,
    #[serde(default)]
    pub xi: Option<f64>,
    #[serde(default)]
    pub bulk_source: f64,
    #[serde(default)]
    pub fracture_source: f64,
    #[serde(default)]
    pub dirichlet: f64,
    pub fractures: Vec<FractureSpec>,
}

impl NetworkFile {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("network: cannot read {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("network: {}: {e}", path.display()))
    }

    pub fn fractures(&self) -> Vec<Fracture> {
        self.fractures.iter().map(FractureSpec::to_fracture).collect()
    }

    pub fn domain(&self) -> Result<Rect, String> {
        let [a, b] = self.domain.unwrap_or([[0.0, 0.0], [1.0, 1.0]]);
        if !(a[0] < b[0] && a[1] < b[1]) || a.iter().chain(&b).any(|v| !v.is_finite()) {
            return Err("network: domain must be [[xmin, ymin], [xmax, ymax]] with xmin < xmax, ymin < ymax".into());
        }
        Ok(Rect::new(Point2::new(a[0], a[1]), Point2::new(b[0], b[1])))
    }
}

/// Constant sources and Dirichlet data; conservative at intersections.
#[derive(Clone, Debug)]
pub struct CustomProblem {
    pub domain: Rect,
    pub network: FractureNetwork,
    pub neumann_sides: Vec<Side>,
    pub xi: f64,
    pub bulk_source: f64,
    pub fracture_source: f64,
    pub dirichlet: f64,
}

impl ProblemData for CustomProblem {
    fn bulk_source(&self, _: usize, _: Point2) -> f64 {
        self.bulk_source
    }

    fn dirichlet(&self, _: usize, _: Point2) -> Option<f64> {
        Some(self.dirichlet)
    }

    fn fracture_source(&self, _: usize, _: Point2) -> f64 {
        self.fracture_source
    }

    fn fracture_dirichlet(&self, _: usize, _: Point2) -> Option<f64> {
        Some(self.dirichlet)
    }

    fn intersection_flux(&self, _: usize, _: Point2) -> Option<f64> {
        Some(0.0)
    }
}
