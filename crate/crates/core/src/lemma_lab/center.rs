use super::rng;
use crate::error::Result;
use crate::hyperbolic::{comparison_circle, direction_at_angle, frame_at, metric_dot, DiskPoint};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

/// A point of the open upper half-disk with a tangent angle `alpha` in
/// `[0, pi/2)`, measured from `X⊥`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CenterDraw {
    pub x1: f64,
    pub x2: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CenterDrawReport {
    /// Foot coordinate `t` of the hyperbolic center of the comparison circle.
    pub center_t: f64,
    /// Euclidean first coordinate of the hyperbolic center.
    pub center_x1: f64,
    /// `|tanh(l) - tan(alpha) sinh(s)|`, `l = t - center_t` the leg along the axis.
    pub trig_residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterReport {
    pub draws: usize,
    pub pass_fraction: f64,
    pub worst_center_x1: f64,
    pub max_trig_residual: f64,
    pub failures: Vec<CenterDraw>,
}

const CENTER_TOL: f64 = 1e-10;

/// `g_H(N, v)` for the unit vector at angle `alpha`.
fn radial_component(p: &DiskPoint, alpha: f64) -> f64 {
    let n = frame_at(p).n.expect("point off the origin");
    metric_dot(p, n, direction_at_angle(p, alpha))
}

pub fn verify_center_c_draw(draw: &CenterDraw) -> Result<CenterDrawReport> {
    let p = DiskPoint::new(draw.x1, draw.x2)?;
    let v = direction_at_angle(&p, draw.alpha);
    let c = comparison_circle(&p, v)?;
    let (center, _) = c
        .hyperbolic_center_radius()
        .ok_or_else(|| crate::error::Error::Numerical("comparison circle leaves the disk".into()))?;
    let f = p.fermi();
    let center_t = center.fermi().t;
    let ell = f.t - center_t;
    let trig_residual = (ell.tanh() - draw.alpha.tan() * f.s.sinh()).abs();
    Ok(CenterDrawReport {
        center_t,
        center_x1: center.x1(),
        trig_residual,
        pass: center.x1() >= -CENTER_TOL,
    })
}

/// Seeded draws satisfying the hypotheses: `x2 > 0`, `alpha` in the second
/// quadrant, `g_H(N, v) <= 0` and a comparison circle of curvature above one
/// (so that it has a center). Draws violating them are redrawn.
pub fn center_c_configs(count: usize, seed: u64) -> Vec<CenterDraw> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let rad = 0.95 * r.gen::<f64>().sqrt();
        let phi = r.gen_range(0.0..std::f64::consts::PI);
        let (x1, x2) = (rad * phi.cos(), rad * phi.sin());
        let alpha = r.gen_range(0.0..FRAC_PI_2);
        if x2 < 1e-6 || alpha.cos() < 1e-6 {
            continue;
        }
        let Ok(p) = DiskPoint::new(x1, x2) else { continue };
        if radial_component(&p, alpha) > 0.0 {
            continue;
        }
        // the normal geodesic must reach the axis: comparison curvature above one
        if alpha.cos() / p.fermi().s.tanh() <= 1.0 + 1e-9 {
            continue;
        }
        out.push(CenterDraw { x1, x2, alpha });
    }
    out
}

pub fn verify_center_c(count: usize, seed: u64) -> CenterReport {
    use rayon::prelude::*;
    let draws = center_c_configs(count, seed);
    let reports: Vec<Option<CenterDrawReport>> =
        draws.par_iter().map(|d| verify_center_c_draw(d).ok()).collect();
    let mut failures = Vec::new();
    let mut worst = f64::INFINITY;
    let mut trig = 0.0f64;
    for (d, r) in draws.iter().zip(&reports) {
        match r {
            Some(r) => {
                worst = worst.min(r.center_x1);
                trig = trig.max(r.trig_residual);
                if !r.pass {
                    failures.push(*d);
                }
            }
            None => failures.push(*d),
        }
    }
    CenterReport {
        draws: draws.len(),
        pass_fraction: if draws.is_empty() {
            1.0
        } else {
            (draws.len() - failures.len()) as f64 / draws.len() as f64
        },
        worst_center_x1: worst,
        max_trig_residual: trig,
        failures,
    }
}
