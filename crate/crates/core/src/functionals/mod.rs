//! Weighted perimeter and volume of sets of `H^n` that are rotationally
//! symmetric about the axis `e1`, computed from their planar generating data.
//!
//! A set is described by its trace in the upper half of the model plane. In
//! geodesic polar coordinates `(rho, theta)` about the origin, with `theta`
//! measured from the positive axis, the volume element of `H^n` restricted to
//! rotationally symmetric sets is `omega_{n-2} sin^{n-2}(theta) sinh^{n-1}(rho)`.

mod grid;
mod profile;
mod trajectory;

pub use grid::{symmetrize, OccupancyGrid};
pub use profile::{functionals_of_profile, profile_functionals, PolarProfile, Profile, TranslatedBall};
pub use trajectory::{
    is_star_shaped, trajectory_functionals, trajectory_functionals_with, TrajectoryProfile, VolumeMethod,
};

use crate::density::RadialDensity;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, Tolerance};
use crate::special::sphere_area;
use serde::{Deserialize, Serialize};

/// Weighted perimeter and volume with the accumulated quadrature error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalResult {
    #[serde(rename = "Pf")]
    pub pf: f64,
    #[serde(rename = "Vf")]
    pub vf: f64,
    #[serde(rename = "err")]
    pub err: f64,
}

/// Closed-form data of the geodesic ball centered at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallQuantities {
    #[serde(rename = "Pf")]
    pub pf: f64,
    #[serde(rename = "Vf")]
    pub vf: f64,
    #[serde(rename = "Hf")]
    pub hf: f64,
    pub err: f64,
}

pub(crate) fn check_dimension(n: u32) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "dimension must be at least 2, got {n}"
        )));
    }
    Ok(())
}

/// `int_0^rho exp(h(u)) sinh^{n-1}(u) du`, the weighted volume of the ball of
/// radius `rho` divided by `omega_{n-1}`.
pub(crate) fn radial_volume(n: u32, d: &RadialDensity, rho: f64) -> (f64, f64) {
    let k = (n - 1) as i32;
    let r = integrate(
        |u| (d.h(u)).exp() * u.sinh().powi(k),
        0.0,
        rho,
        Tolerance { abs: 0.0, rel: 1e-13 },
    );
    (r.value, r.error)
}

pub fn ball_quantities(n: u32, d: &RadialDensity, tau: f64) -> Result<BallQuantities> {
    check_dimension(n)?;
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "ball radius must be positive, got {tau}"
        )));
    }
    let omega = sphere_area(n - 1);
    let (v, e) = radial_volume(n, d, tau);
    Ok(BallQuantities {
        pf: omega * tau.sinh().powi((n - 1) as i32) * d.h(tau).exp(),
        vf: omega * v,
        hf: (n - 1) as f64 / tau.tanh() + d.dh(tau),
        err: omega * e,
    })
}

/// Radius of the centered ball with weighted volume `v`.
pub fn ball_radius_for_volume(n: u32, d: &RadialDensity, v: f64) -> Result<f64> {
    check_dimension(n)?;
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "volume must be positive, got {v}"
        )));
    }
    let vol = |tau: f64| ball_quantities(n, d, tau).map(|b| (b.vf, b.pf));
    let mut lo = 0.0;
    let mut hi = 1.0;
    while vol(hi)?.0 < v {
        lo = hi;
        hi *= 2.0;
        if hi > 1e3 {
            return Err(Error::Numerical(format!("volume {v} out of reach")));
        }
    }
    let mut tau = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (vt, pt) = vol(tau)?;
        let resid = vt - v;
        if resid.abs() <= 1e-14 * v {
            return Ok(tau);
        }
        if resid > 0.0 {
            hi = tau;
        } else {
            lo = tau;
        }
        let newton = tau - resid / pt;
        let next = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - tau).abs() <= 1e-15 * tau {
            return Ok(next);
        }
        tau = next;
    }
    Ok(tau)
}
