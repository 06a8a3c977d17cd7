use super::{check_dimension, radial_volume, FunctionalResult};
use crate::density::RadialDensity;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, Tolerance};
use crate::special::sphere_area;
use serde::{Deserialize, Serialize};
use std::cell::Cell;
use std::f64::consts::PI;

/// A star-shaped radial boundary `rho(theta)`, `theta` in `[0, pi]`, extended
/// evenly across the axis.
pub trait Profile {
    fn rho(&self, theta: f64) -> f64;
    fn rho_prime(&self, theta: f64) -> f64;
}

const POSITIVITY_GRID: usize = 2048;

/// `rho(theta) = a_0 + sum_k a_k cos(k theta)` in dimension `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarProfile {
    pub mode_coeffs: Vec<f64>,
    pub n: u32,
}

impl PolarProfile {
    pub fn new(mode_coeffs: Vec<f64>, n: u32) -> Result<Self> {
        check_dimension(n)?;
        let p = PolarProfile { mode_coeffs, n };
        p.validate()?;
        Ok(p)
    }

    /// The centered ball of radius `tau`.
    pub fn constant(tau: f64, n: u32) -> Result<Self> {
        Self::new(vec![tau], n)
    }

    pub fn validate(&self) -> Result<()> {
        if self.mode_coeffs.is_empty() {
            return Err(Error::InvalidProfile("no coefficients".into()));
        }
        if self.mode_coeffs.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidProfile("non-finite coefficient".into()));
        }
        for i in 0..POSITIVITY_GRID {
            let theta = PI * i as f64 / (POSITIVITY_GRID - 1) as f64;
            let r = self.rho(theta);
            if !(r > 0.0) {
                return Err(Error::InvalidProfile(format!(
                    "rho({theta:.6}) = {r} is not positive"
                )));
            }
        }
        Ok(())
    }

    pub fn modes(&self) -> usize {
        self.mode_coeffs.len()
    }

    fn series(&self, theta: f64, order: u8) -> f64 {
        let mut acc = 0.0;
        for (k, a) in self.mode_coeffs.iter().enumerate() {
            let kf = k as f64;
            let (s, c) = (kf * theta).sin_cos();
            acc += a * match order {
                0 => c,
                1 => -kf * s,
                _ => -kf * kf * c,
            };
        }
        acc
    }

    pub fn rho_second(&self, theta: f64) -> f64 {
        self.series(theta, 2)
    }

    /// Fourier energy in the modes `k >= 1`.
    pub fn nonround_energy(&self) -> f64 {
        self.mode_coeffs.iter().skip(1).map(|a| a * a).sum()
    }
}

impl Profile for PolarProfile {
    fn rho(&self, theta: f64) -> f64 {
        self.series(theta, 0)
    }

    fn rho_prime(&self, theta: f64) -> f64 {
        self.series(theta, 1)
    }
}

/// Geodesic ball of radius `tau` whose center sits at signed distance
/// `offset` along `e1`, described from the origin (requires `|offset| < tau`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TranslatedBall {
    pub tau: f64,
    pub offset: f64,
}

impl TranslatedBall {
    pub fn new(tau: f64, offset: f64) -> Result<Self> {
        if !(tau > 0.0) || !(offset.abs() < tau) {
            return Err(Error::InvalidProfile(format!(
                "origin must lie inside the ball (tau = {tau}, offset = {offset})"
            )));
        }
        Ok(TranslatedBall { tau, offset })
    }
}

impl Profile for TranslatedBall {
    // cosh(tau) = cosh(rho) cosh(c) - sinh(rho) sinh(c) cos(theta)
    fn rho(&self, theta: f64) -> f64 {
        let c = self.offset;
        let a_minus_b = c.cosh() - c.sinh() * theta.cos();
        let disc = self.tau.sinh().powi(2) - (c.sinh() * theta.sin()).powi(2);
        ((self.tau.cosh() + disc.max(0.0).sqrt()) / a_minus_b).ln()
    }

    fn rho_prime(&self, theta: f64) -> f64 {
        let c = self.offset;
        let rho = self.rho(theta);
        let den = c.cosh() * rho.sinh() - c.sinh() * theta.cos() * rho.cosh();
        -c.sinh() * theta.sin() * rho.sinh() / den
    }
}

/// Weighted functionals of the rotation about `e1` of the region bounded by `p`.
pub fn functionals_of_profile<P: Profile + ?Sized>(
    p: &P,
    n: u32,
    d: &RadialDensity,
) -> Result<FunctionalResult> {
    check_dimension(n)?;
    let k = (n - 2) as i32;
    let bad = Cell::new(None::<f64>);
    let guard = |theta: f64, rho: f64| {
        if !(rho > 0.0) && bad.get().is_none() {
            bad.set(Some(theta));
        }
    };
    // both integrands are positive; small balls in high dimension need a relative test
    let tol = Tolerance { abs: 0.0, rel: 1e-13 };
    let perim = integrate(
        |theta| {
            let rho = p.rho(theta);
            guard(theta, rho);
            let rp = p.rho_prime(theta);
            let sh = rho.sinh();
            d.h(rho).exp() * (sh * theta.sin()).powi(k) * (rp * rp + sh * sh).sqrt()
        },
        0.0,
        PI,
        tol,
    );
    let inner_err = Cell::new(0.0f64);
    let vol = integrate(
        |theta| {
            let rho = p.rho(theta);
            guard(theta, rho);
            if !(rho > 0.0) {
                return 0.0;
            }
            let (g, e) = radial_volume(n, d, rho);
            inner_err.set(inner_err.get().max(e));
            theta.sin().powi(k) * g
        },
        0.0,
        PI,
        tol,
    );
    if let Some(theta) = bad.get() {
        return Err(Error::InvalidProfile(format!(
            "radius is not positive at theta = {theta}"
        )));
    }
    let omega = sphere_area(n - 2);
    Ok(FunctionalResult {
        pf: omega * perim.value,
        vf: omega * vol.value,
        err: omega * (perim.error + vol.error + PI * inner_err.get()),
    })
}

pub fn profile_functionals(p: &PolarProfile, d: &RadialDensity) -> Result<FunctionalResult> {
    functionals_of_profile(p, p.n, d)
}
