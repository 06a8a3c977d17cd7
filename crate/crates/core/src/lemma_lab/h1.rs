use super::{fd1, fd2, rng, ArcCircle};
use crate::density::RadialDensity;
use crate::error::{Error, Result};
use crate::hyperbolic::{translate_along_axis, DiskPoint};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// A circle with Euclidean center `(0, y)` and Euclidean radius `tau_e`,
/// run counterclockwise from `(tau_e, y)` to its top point `(0, y + tau_e)`,
/// and the pole `O = (-o_tilde, 0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H1CircleConfig {
    pub y: f64,
    pub tau_e: f64,
    pub o_tilde: f64,
    pub density: RadialDensity,
    pub samples: usize,
}

impl H1CircleConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(0.0..1.0).contains(&self.y) {
            return bad(format!("center height must lie in [0, 1), got {}", self.y));
        }
        if !(0.0..1.0).contains(&self.o_tilde) {
            return bad(format!("pole offset must lie in [0, 1), got {}", self.o_tilde));
        }
        if !(self.tau_e > 0.0) || self.y + self.tau_e >= 1.0 {
            return bad(format!(
                "circle of radius {} at height {} leaves the disk",
                self.tau_e, self.y
            ));
        }
        if self.samples == 0 {
            return bad("need at least one sample".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H1Report {
    /// Hyperbolic length of the quarter arc.
    pub length: f64,
    /// `min -H1'` over the samples of `(0, L]`.
    pub min_margin: f64,
    pub h1pp_zero: f64,
    pub h1p_end: f64,
    /// Largest finite-difference error estimate used in the tolerances.
    pub fd_bound: f64,
    /// Slack of the asserted conditions after allowing for the finite-difference
    /// error; below `-1e-9` on failure.
    pub margin: f64,
    pub pass: bool,
}

const BASE_TOL: f64 = 1e-9;

/// Sign checks for `H1(u) = h'(d(eta(u), O)) <nu, N_O>` along the arc.
///
/// With `y = 0` the derivative is nonpositive on `(0, L]` and the second
/// derivative at the start is nonpositive, both strictly when the pole is
/// off the origin. With `y > 0` and the pole off the origin, the derivative
/// at the top point is negative. With `y > 0` and the pole at the origin
/// nothing is asserted.
pub fn verify_h1_circle(cfg: &H1CircleConfig) -> Result<H1Report> {
    cfg.validate()?;
    let start = DiskPoint::new(cfg.tau_e, cfg.y)?;
    let top = DiskPoint::new(0.0, cfg.y + cfg.tau_e)?;
    let circle = ArcCircle::from_euclidean([0.0, cfg.y], cfg.tau_e)?.starting_at(&start);
    let length = circle.arclength_of(&top);
    let to_pole = translate_along_axis(2.0 * cfg.o_tilde.atanh());
    let d = &cfg.density;
    let h1 = |u: f64| {
        let p = circle.point(u);
        let q = to_pole.apply(&p);
        let nu = to_pole.push(&p, circle.outward_normal(u));
        let r = q.norm();
        let cos = (q.x1() * nu[0] + q.x2() * nu[1]) / (r * nu[0].hypot(nu[1]));
        d.dh(q.radius()) * cos
    };
    let h = 1e-4 * circle.radius().sinh();
    let mut fd_bound = 0.0f64;
    let mut min_margin = f64::INFINITY;
    let mut worst_rel = f64::INFINITY;
    let mut strict_ok = true;
    for k in 1..=cfg.samples {
        let u = length * k as f64 / cfg.samples as f64;
        let (v, e) = fd1(&h1, u, h);
        fd_bound = fd_bound.max(e);
        min_margin = min_margin.min(-v);
        worst_rel = worst_rel.min(-v + e);
        strict_ok &= v < 0.0;
    }
    let (h1pp_zero, e2) = fd2(&h1, 0.0, 10.0 * h);
    let (h1p_end, e_end) = fd1(&h1, length, h);
    fd_bound = fd_bound.max(e2).max(e_end);
    let off_origin = cfg.o_tilde != 0.0;
    let (margin, pass) = if cfg.y == 0.0 {
        let m = worst_rel.min(-h1pp_zero + e2);
        let strict = !off_origin || (strict_ok && h1pp_zero < 0.0);
        (m, m >= -BASE_TOL && strict)
    } else if off_origin {
        (-h1p_end, h1p_end < 0.0)
    } else {
        (f64::INFINITY, true)
    };
    Ok(H1Report {
        length,
        min_margin,
        h1pp_zero,
        h1p_end,
        fd_bound,
        margin,
        pass,
    })
}

/// Seeded configurations: a tenth centered, the rest split between circles
/// centered at the origin and raised circles, with strictly convex densities.
pub fn h1_configs(count: usize, seed: u64) -> Vec<H1CircleConfig> {
    let mut r = rng(seed);
    (0..count)
        .map(|i| {
            let raised = i % 2 == 1;
            let y = if raised { r.gen_range(0.05..0.9) } else { 0.0 };
            let tau_e = r.gen_range(0.05..0.95) * (1.0 - y);
            let o_tilde = if i % 10 == 0 { 0.0 } else { r.gen_range(0.01..0.95) };
            let density = if r.gen_bool(0.75) {
                RadialDensity::CoshPower(r.gen_range(1..=7))
            } else {
                RadialDensity::ScaledQuadratic(r.gen_range(0.05..1.0))
            };
            H1CircleConfig {
                y,
                tau_e,
                o_tilde,
                density,
                samples: 64,
            }
        })
        .collect()
}
