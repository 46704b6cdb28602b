//! Strong-form residuals of a manufactured case at random points. Derivatives come
//! from central differences so that the symbolic fields and the hand-coded sources are
//! checked against an independent oracle.

use super::cases::ManufacturedCase;
use crate::geometry::Point2;
use crate::network::coupling_coefficients;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const FD_STEP: f64 = 1e-6;

/// Largest relative residual of each equation family.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ConsistencyReport {
    /// Symbolic gradients against differences of the exact values.
    pub gradient: f64,
    pub bulk: f64,
    pub fracture: f64,
    /// `−{ν∇p}·n_Γ = β⟦p⟧·n_Γ`
    pub coupling_flux: f64,
    /// `−⟦ν∇p⟧ = α({p} − p_Γ)`
    pub coupling_exchange: f64,
    pub continuity: f64,
}

impl ConsistencyReport {
    pub fn max(&self) -> f64 {
        [self.gradient, self.bulk, self.fracture, self.coupling_flux, self.coupling_exchange, self.continuity]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// `|residual| / max(1, Σ|terms|)`.
fn relative(residual: f64, terms: &[f64]) -> f64 {
    residual.abs() / terms.iter().map(|t| t.abs()).sum::<f64>().max(1.0)
}

fn diff(f: impl Fn(Point2) -> f64, p: Point2, dir: Point2) -> f64 {
    (f(p + dir * FD_STEP) - f(p - dir * FD_STEP)) / (2.0 * FD_STEP)
}

const EX: Point2 = Point2 { x: 1.0, y: 0.0 };
const EY: Point2 = Point2 { x: 0.0, y: 1.0 };

/// Checks `samples` bulk points and `samples` fracture points (spread round-robin over
/// the fractures), plus pressure continuity at every intersection.
pub fn check_consistency(case: &ManufacturedCase, samples: usize, seed: u64) -> ConsistencyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = ConsistencyReport::default();
    let d = case.domain;

    for _ in 0..samples {
        let p = Point2::new(rng.gen_range(d.min.x..d.max.x), rng.gen_range(d.min.y..d.max.y));
        let field = &case.bulk[case.region(p)];
        let value = |q: Point2| field.p.eval(q);
        let (gx, gy) = (&field.grad.0, &field.grad.1);
        let (fx, fy) = (diff(value, p, EX), diff(value, p, EY));
        let (sx, sy) = (gx.eval(p), gy.eval(p));
        r.gradient = r.gradient.max(relative(fx - sx, &[sx])).max(relative(fy - sy, &[sy]));
        let pxx = diff(|q| gx.eval(q), p, EX);
        let pyy = diff(|q| gy.eval(q), p, EY);
        let f = (field.source)(p);
        r.bulk = r.bulk.max(relative(-(pxx + pyy) - f, &[pxx, pyy, f]));
    }

    let nf = case.network.fractures.len();
    for i in 0..samples.max(nf) {
        let k = i % nf;
        let fr = &case.network.fractures[k];
        let field = &case.fractures[k];
        let (t, n) = (fr.tangent(), fr.normal());
        let p = fr.point_at(rng.gen_range(0.001..0.999) * fr.length());

        let pg = field.p.eval(p);
        let ds = |q: Point2| Point2::new(field.grad.0.eval(q), field.grad.1.eval(q)).dot(t);
        let fd_ds = diff(|q| field.p.eval(q), p, t);
        r.gradient = r.gradient.max(relative(fd_ds - ds(p), &[ds(p)]));

        // side a lies where n points, side b opposite; outward normals −n and n
        let off = 1e-9 * d.diameter();
        let (a, b) = (&case.bulk[case.region(p + n * off)], &case.bulk[case.region(p - n * off)]);
        let grad_n = |field: &super::cases::BulkField| diff(|q| field.p.eval(q), p, n);
        let (ga, gb) = (grad_n(a), grad_n(b));
        let (pa, pb) = (a.p.eval(p), b.p.eval(p));
        let flux_jump = -ga + gb;

        let kappa = fr.tangential_conductivity();
        let d2 = diff(ds, p, t);
        let src = fr.aperture * (field.source)(p);
        r.fracture = r.fracture.max(relative(-kappa * d2 - (src - flux_jump), &[kappa * d2, src, flux_jump]));

        let cc = coupling_coefficients(fr, case.xi).expect("case coefficients were validated");
        let avg_flux = 0.5 * (ga + gb);
        let jump_n = pb - pa;
        r.coupling_flux = r.coupling_flux.max(relative(avg_flux + cc.beta * jump_n, &[avg_flux, cc.beta * jump_n]));
        let gap = cc.alpha * (0.5 * (pa + pb) - pg);
        r.coupling_exchange = r.coupling_exchange.max(relative(flux_jump + gap, &[flux_jump, gap]));
    }

    for ip in case.network.intersections(case.tolerance()).expect("case network was validated") {
        let values: Vec<f64> = ip.incident.iter().map(|&(k, _)| case.fractures[k].p.eval(ip.location)).collect();
        for v in &values {
            r.continuity = r.continuity.max(relative(v - values[0], &[values[0]]));
        }
    }
    r
}
