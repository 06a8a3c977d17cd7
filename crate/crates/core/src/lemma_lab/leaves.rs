use super::rng;
use crate::hyperbolic::{frame_at, FermiCoords};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

/// Angle from `X⊥` to `N` at the point of the leaf at `height` with foot
/// coordinate `t`. Undefined at the origin.
pub fn leaf_angle(height: f64, t: f64) -> Option<f64> {
    frame_at(&FermiCoords::new(height, t).to_disk()).theta
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeafReport {
    pub leaves: usize,
    pub samples: usize,
    /// Largest `|theta(-u) + theta(u) - pi|`, `u` the arclength from the `e2` line.
    pub max_reflection_residual: f64,
    /// Consecutive samples along a leaf where the angle fails to decrease.
    pub monotone_violations: usize,
    pub pass: bool,
}

const SAMPLES_PER_LEAF: usize = 64;

/// Along each seeded leaf in the upper half-disk, checks the reflection
/// symmetry of the normal angle about the `e2` line and its strict decrease
/// in the direction of `X⊥`.
pub fn verify_leaf_angles(count: usize, seed: u64) -> LeafReport {
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    let mut violations = 0;
    for _ in 0..count {
        let height: f64 = r.gen_range(0.01..3.0);
        let reach = r.gen_range(0.1..4.0);
        let at = |u: f64| leaf_angle(height, -u / height.cosh()).expect("leaf avoids the origin");
        let mut prev = at(-reach);
        for k in 1..=SAMPLES_PER_LEAF {
            let u = -reach + 2.0 * reach * k as f64 / SAMPLES_PER_LEAF as f64;
            let cur = at(u);
            if cur >= prev {
                violations += 1;
            }
            prev = cur;
            worst = worst.max((at(-u) + cur - std::f64::consts::PI).abs());
        }
    }
    LeafReport {
        leaves: count,
        samples: count * SAMPLES_PER_LEAF,
        max_reflection_residual: worst,
        monotone_violations: violations,
        pass: worst < 1e-10 && violations == 0,
    }
}

/// Largest `|tanh(rho) cos(beta) - tanh(s)|` over seeded points of the upper
/// half-disk, `rho` the distance to the origin and `beta` the angle between
/// `N` and `X`.
pub fn verify_radial_identity(count: usize, seed: u64) -> f64 {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let s: f64 = r.gen_range(0.01..3.0);
            let t: f64 = r.gen_range(-3.0..3.0);
            let beta = (FRAC_PI_2 - leaf_angle(s, t).expect("off the origin")).abs();
            let rho = FermiCoords::new(s, t).radius();
            (rho.tanh() * beta.cos() - s.tanh()).abs()
        })
        .fold(0.0, f64::max)
}
