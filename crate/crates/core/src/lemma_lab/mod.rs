//! Randomized numerical checks of the comparison lemmas behind the
//! classification of constant weighted mean curvature generating curves.
//!
//! Each verifier is a pure function of its configuration. The suites draw
//! configurations from a seeded stream, check them in parallel and collect
//! the results in draw order, so a report depends only on `(count, seed)`.

mod center;
mod comparison;
mod formula_k;
mod h1;
mod leaves;
mod suites;

pub use center::{center_c_configs, verify_center_c, verify_center_c_draw, CenterDraw, CenterReport};
pub use comparison::{
    comparison_configs, comparison_identity_draws, verify_comparison, ComparisonConfig, ComparisonMode,
    ComparisonReport,
};
pub use formula_k::{
    formula_k_residual, verify_formula_k, CircleCurve, GeodesicCurve, LeafCurve, TrajectoryCurve,
    UnitSpeedCurve,
};
pub use h1::{h1_configs, verify_h1_circle, H1CircleConfig, H1Report};
pub use leaves::{leaf_angle, verify_leaf_angles, verify_radial_identity, LeafReport};
pub use suites::{run_verify, Suite, VerifyReport};

use crate::error::{Error, Result};
use crate::hyperbolic::{DiskPoint, OrientedCircle};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Outcome of one randomized suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub total: usize,
    pub passed: usize,
    /// Smallest margin over all configurations; negative means a violation.
    pub worst_margin: f64,
    /// Full configurations of the failing cases, for replay.
    pub failures: Vec<serde_json::Value>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.passed == self.total
    }
}

/// Check `configs` in parallel; `check` returns `(pass, margin)`.
pub fn run_suite<C, F>(name: &str, configs: &[C], check: F) -> SuiteReport
where
    C: Serialize + Sync,
    F: Fn(&C) -> (bool, f64) + Sync,
{
    let results: Vec<(bool, f64)> = configs.par_iter().map(&check).collect();
    let mut failures = Vec::new();
    let mut worst = f64::INFINITY;
    let mut passed = 0;
    for (cfg, (ok, margin)) in configs.iter().zip(&results) {
        worst = worst.min(*margin);
        if *ok {
            passed += 1;
        } else {
            failures.push(serde_json::to_value(cfg).unwrap_or(serde_json::Value::Null));
        }
    }
    SuiteReport {
        name: name.to_string(),
        total: configs.len(),
        passed,
        worst_margin: worst,
        failures,
    }
}

/// A circle of the disk with its counterclockwise unit-speed parametrization,
/// `u -> T(tanh(r/2) e^{i (phase + u / sinh r)})` for the isometry `T`
/// moving the origin to the hyperbolic center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcCircle {
    center: Complex64,
    radius: f64,
    phase: f64,
}

impl ArcCircle {
    pub fn new(center: &DiskPoint, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "radius must be positive, got {radius}"
            )));
        }
        Ok(ArcCircle {
            center: center.to_complex(),
            radius,
            phase: 0.0,
        })
    }

    /// The circle with Euclidean center `center` and Euclidean radius `r`.
    pub fn from_euclidean(center: [f64; 2], r: f64) -> Result<Self> {
        let c = OrientedCircle::Circle {
            center,
            radius: r,
            orientation: 1.0,
            anchor: [center[0] + r, center[1]],
        };
        let (hc, hr) = c
            .hyperbolic_center_radius()
            .ok_or_else(|| Error::InvalidParameter("circle leaves the disk".into()))?;
        Self::new(&hc, hr)
    }

    /// Shift the parametrization so that `u = 0` sits at the point of the
    /// circle closest to `p` in angle.
    pub fn starting_at(mut self, p: &DiskPoint) -> Self {
        let w = self.to_local(p.to_complex());
        self.phase = w.arg();
        self
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn curvature(&self) -> f64 {
        1.0 / self.radius.tanh()
    }

    pub fn circumference(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.radius.sinh()
    }

    fn to_local(self, z: Complex64) -> Complex64 {
        (z - self.center) / (Complex64::new(1.0, 0.0) - self.center.conj() * z)
    }

    fn local(&self, u: f64) -> Complex64 {
        Complex64::from_polar((0.5 * self.radius).tanh(), self.phase + u / self.radius.sinh())
    }

    pub fn point(&self, u: f64) -> DiskPoint {
        let w = self.local(u);
        DiskPoint::from_complex((w + self.center) / (Complex64::new(1.0, 0.0) + self.center.conj() * w))
    }

    /// Unit tangent at `u`, as Euclidean components of a hyperbolic unit vector.
    pub fn tangent(&self, u: f64) -> [f64; 2] {
        let w = self.local(u);
        let den = Complex64::new(1.0, 0.0) + self.center.conj() * w;
        let dz = (1.0 - self.center.norm_sqr()) / (den * den) * Complex64::i() * w;
        let z = self.point(u);
        let scale = 0.5 * (1.0 - z.norm_sq()) / dz.norm();
        [dz.re * scale, dz.im * scale]
    }

    /// Outward unit normal, Euclidean direction.
    pub fn outward_normal(&self, u: f64) -> [f64; 2] {
        let t = self.tangent(u);
        let m = t[0].hypot(t[1]);
        [t[1] / m, -t[0] / m]
    }

    /// Arclength position of `p`, in `[0, circumference)`.
    pub fn arclength_of(&self, p: &DiskPoint) -> f64 {
        let ang = (self.to_local(p.to_complex()).arg() - self.phase).rem_euclid(2.0 * std::f64::consts::PI);
        ang * self.radius.sinh()
    }
}

/// 5-point central first derivative and an error estimate from the stencil
/// at twice the step plus the rounding term.
pub(crate) fn fd1<F: Fn(f64) -> f64>(f: &F, x: f64, h: f64) -> (f64, f64) {
    let d = |h: f64| (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h);
    let (a, b) = (d(h), d(2.0 * h));
    let scale = f(x).abs().max(f(x + h).abs()).max(f(x - h).abs());
    (a, (a - b).abs() / 15.0 + 4.0 * f64::EPSILON * scale / h)
}

/// 5-point central second derivative with the same kind of error estimate.
pub(crate) fn fd2<F: Fn(f64) -> f64>(f: &F, x: f64, h: f64) -> (f64, f64) {
    let d = |h: f64| {
        (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h * h)
    };
    let (a, b) = (d(h), d(2.0 * h));
    let scale = f(x).abs().max(f(x + h).abs()).max(f(x - h).abs());
    (a, (a - b).abs() / 15.0 + 12.0 * f64::EPSILON * scale / (h * h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::{dist, metric_norm};
    use approx::assert_abs_diff_eq;

    #[test]
    fn arc_circle_is_unit_speed_and_equidistant() {
        let c = ArcCircle::from_euclidean([0.1, 0.3], 0.4).unwrap();
        let (hc, hr) = OrientedCircle::Circle {
            center: [0.1, 0.3],
            radius: 0.4,
            orientation: 1.0,
            anchor: [0.5, 0.3],
        }
        .hyperbolic_center_radius()
        .unwrap();
        let h = 1e-6;
        for k in 0..20 {
            let u = k as f64 * 0.37;
            let p = c.point(u);
            assert_abs_diff_eq!(dist(&p, &hc), hr, epsilon = 1e-12);
            assert_abs_diff_eq!(
                dist(&c.point(u - h), &c.point(u + h)) / (2.0 * h),
                1.0,
                epsilon = 1e-8
            );
            assert_abs_diff_eq!(metric_norm(&p, c.tangent(u)), 1.0, epsilon = 1e-12);
            let e = [p.x1() - 0.1, p.x2() - 0.3];
            let nu = c.outward_normal(u);
            assert_abs_diff_eq!(e[0] * nu[0] + e[1] * nu[1], 0.4, epsilon = 1e-12);
        }
    }

    #[test]
    fn start_point_and_arclength() {
        let p = DiskPoint::new(0.5, 0.2).unwrap();
        let c = ArcCircle::from_euclidean([0.2, 0.2], 0.3)
            .unwrap()
            .starting_at(&p);
        assert_abs_diff_eq!(dist(&c.point(0.0), &p), 0.0, epsilon = 1e-12);
        let q = c.point(0.7);
        assert_abs_diff_eq!(c.arclength_of(&q), 0.7, epsilon = 1e-12);
    }

    #[test]
    fn finite_differences_of_polynomials() {
        let f = |x: f64| x * x * x - 2.0 * x;
        let (d1, e1) = fd1(&f, 0.7, 1e-3);
        assert_abs_diff_eq!(d1, 3.0 * 0.49 - 2.0, epsilon = 1e-10);
        assert!(e1 < 1e-9);
        let (d2, _) = fd2(&f, 0.7, 1e-3);
        assert_abs_diff_eq!(d2, 4.2, epsilon = 1e-7);
    }

    #[test]
    fn suite_collects_failures_in_order() {
        let cfgs: Vec<u32> = (0..10).collect();
        let r = run_suite("parity", &cfgs, |c| (c % 3 != 0, *c as f64 - 3.0));
        assert_eq!(r.total, 10);
        assert_eq!(r.passed, 6);
        assert_eq!(
            r.failures,
            vec![
                serde_json::json!(0),
                serde_json::json!(3),
                serde_json::json!(6),
                serde_json::json!(9)
            ]
        );
        assert_eq!(r.worst_margin, -3.0);
    }
}
