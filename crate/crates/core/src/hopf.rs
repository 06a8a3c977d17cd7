//! Balls of the rank-one symmetric spaces `H_K^m` and their weighted
//! counterparts in real hyperbolic space.
//!
//! Along a unit-speed geodesic from the center, the curvature operator has
//! eigenvalue `-1` on a space of dimension `n - d` and `-4` on one of
//! dimension `d - 1`. The Jacobi fields are `sinh t` and `sinh(2t) / 2`, so
//! the volume density of geodesic spheres is
//! `sinh^{n-d}(t) (sinh(2t) / 2)^{d-1} = sinh^{n-1}(t) cosh^{d-1}(t)`,
//! the weighted hyperbolic density with `h = (d - 1) ln cosh`.

use crate::density::RadialDensity;
use crate::error::{Error, Result};
use crate::functionals::ball_quantities;
use crate::quadrature::{integrate, Tolerance};
use crate::special::sphere_area;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Field {
    R,
    C,
    H,
    O,
}

impl Field {
    pub fn dim(self) -> u32 {
        match self {
            Field::R => 1,
            Field::C => 2,
            Field::H => 4,
            Field::O => 8,
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Field::R => "R",
            Field::C => "C",
            Field::H => "H",
            Field::O => "O",
        };
        f.write_str(s)
    }
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "R" | "r" => Ok(Field::R),
            "C" | "c" => Ok(Field::C),
            "H" | "h" => Ok(Field::H),
            "O" | "o" => Ok(Field::O),
            _ => Err(Error::InvalidParameter(format!(
                "unknown field {s:?}, expected R, C, H or O"
            ))),
        }
    }
}

/// `H_K^m`: real dimension `n = d m` with `d = dim K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceParams {
    pub field: Field,
    pub m: u32,
    pub d: u32,
    pub n: u32,
}

impl SpaceParams {
    pub fn new(field: Field, m: u32) -> Result<Self> {
        let d = field.dim();
        let sp = SpaceParams {
            field,
            m,
            d,
            n: d * m,
        };
        sp.validate()?;
        Ok(sp)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.m < 2 {
            return bad(format!("m must be at least 2, got {}", self.m));
        }
        if self.d != self.field.dim() {
            return bad(format!(
                "field {} has dimension {}, got d = {}",
                self.field,
                self.field.dim(),
                self.d
            ));
        }
        if self.n != self.d * self.m {
            return bad(format!("n must equal d m = {}, got {}", self.d * self.m, self.n));
        }
        if self.field == Field::O && self.m != 2 {
            return bad(format!(
                "the octonionic space exists only for m = 2, got {}",
                self.m
            ));
        }
        Ok(())
    }
}

/// `cosh^{d-1}` without the strictness check; for `R` this is the flat density.
pub fn reference_density(sp: &SpaceParams) -> RadialDensity {
    RadialDensity::CoshPower(sp.d - 1)
}

/// The weighted density matching `sp`. Fails for `R`, where it is not
/// strictly log-convex.
pub fn hopf_density(sp: &SpaceParams) -> Result<RadialDensity> {
    sp.validate()?;
    if sp.field == Field::R {
        return Err(Error::InvalidDensity(
            "real hyperbolic space gives the flat density, which is not strictly log-convex".into(),
        ));
    }
    Ok(reference_density(sp))
}

/// Volume density of the geodesic sphere of radius `t`, from the Jacobi fields.
pub fn jacobi_density(sp: &SpaceParams, t: f64) -> f64 {
    let vertical = t.sinh().powi((sp.n - sp.d) as i32);
    let horizontal = (0.5 * (2.0 * t).sinh()).powi((sp.d - 1) as i32);
    vertical * horizontal
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectBall {
    #[serde(rename = "P")]
    pub p: f64,
    #[serde(rename = "V")]
    pub v: f64,
    pub err: f64,
}

/// Area and volume of the ball of radius `tau` in `H_K^m`.
pub fn ball_direct(sp: &SpaceParams, tau: f64) -> Result<DirectBall> {
    sp.validate()?;
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "ball radius must be positive, got {tau}"
        )));
    }
    let omega = sphere_area(sp.n - 1);
    let tol = Tolerance { abs: 0.0, rel: 1e-13 };
    let q = integrate(|t| jacobi_density(sp, t), 0.0, tau, tol);
    Ok(DirectBall {
        p: omega * jacobi_density(sp, tau),
        v: omega * q.value,
        err: omega * q.error,
    })
}

/// One row of the comparison table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopfRow {
    pub field: Field,
    pub m: u32,
    pub n: u32,
    pub d: u32,
    pub tau: f64,
    #[serde(rename = "P_direct")]
    pub p_direct: f64,
    #[serde(rename = "V_direct")]
    pub v_direct: f64,
    #[serde(rename = "P_weighted")]
    pub p_weighted: f64,
    #[serde(rename = "V_weighted")]
    pub v_weighted: f64,
    #[serde(rename = "relerr_P")]
    pub relerr_p: f64,
    #[serde(rename = "relerr_V")]
    pub relerr_v: f64,
}

/// Compares the ball of `H_K^m` with the centered ball of weighted
/// `H^n` under `cosh^{d-1}`.
pub fn crosscheck(sp: &SpaceParams, tau: f64) -> Result<HopfRow> {
    let direct = ball_direct(sp, tau)?;
    let weighted = ball_quantities(sp.n, &reference_density(sp), tau)?;
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE);
    Ok(HopfRow {
        field: sp.field,
        m: sp.m,
        n: sp.n,
        d: sp.d,
        tau,
        p_direct: direct.p,
        v_direct: direct.v,
        p_weighted: weighted.pf,
        v_weighted: weighted.vf,
        relerr_p: rel(direct.p, weighted.pf),
        relerr_v: rel(direct.v, weighted.vf),
    })
}
