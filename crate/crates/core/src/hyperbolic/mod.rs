//! Poincaré disk model of the hyperbolic plane.
//!
//! Points are Euclidean coordinates in the open unit disk; the metric is
//! `4 / (1 - r^2)^2` times the flat one. Tangent vectors are stored as their
//! Euclidean components, so a hyperbolic unit vector at `p` has Euclidean
//! length `(1 - |p|^2) / 2`. The axis `e1` is the horizontal diameter and
//! Fermi coordinates `(s, t)` are taken about it.

mod circle;
mod frame;
mod mobius;

pub use circle::{comparison_circle, comparison_curvature, curvature_convert, OrientedCircle};
pub use frame::{angle_from_x_perp, direction_at_angle, frame_at, metric_dot, metric_norm, FramePacket};
pub use mobius::{translate_along_axis, AxisIsometry};

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A point of the open unit disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskPoint {
    x1: f64,
    x2: f64,
}

impl DiskPoint {
    pub const ORIGIN: DiskPoint = DiskPoint { x1: 0.0, x2: 0.0 };

    pub fn new(x1: f64, x2: f64) -> Result<Self> {
        let r2 = x1 * x1 + x2 * x2;
        if !(r2 < 1.0) || !x1.is_finite() || !x2.is_finite() {
            return Err(Error::OutsideDisk(x1, x2));
        }
        Ok(DiskPoint { x1, x2 })
    }

    /// Builds a point from coordinates already known to lie in the disk.
    pub(crate) fn from_xy(x1: f64, x2: f64) -> Self {
        debug_assert!(x1 * x1 + x2 * x2 < 1.0, "({x1}, {x2}) outside the disk");
        DiskPoint { x1, x2 }
    }

    pub(crate) fn from_complex(z: Complex64) -> Self {
        Self::from_xy(z.re, z.im)
    }

    /// Point at hyperbolic distance `rho` from the origin in direction `angle`.
    pub fn from_polar(rho: f64, angle: f64) -> Self {
        let r = (0.5 * rho).tanh();
        Self::from_xy(r * angle.cos(), r * angle.sin())
    }

    pub fn x1(&self) -> f64 {
        self.x1
    }

    pub fn x2(&self) -> f64 {
        self.x2
    }

    pub fn xy(&self) -> [f64; 2] {
        [self.x1, self.x2]
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.x1, self.x2)
    }

    pub fn norm_sq(&self) -> f64 {
        self.x1 * self.x1 + self.x2 * self.x2
    }

    pub fn norm(&self) -> f64 {
        self.x1.hypot(self.x2)
    }

    /// Conformal factor `lambda` with `g_H = lambda^2 g_flat`, i.e. `2 / (1 - r^2)`.
    pub fn conformal_factor(&self) -> f64 {
        2.0 / (1.0 - self.norm_sq())
    }

    /// Hyperbolic distance from the origin, `2 artanh r`.
    pub fn radius(&self) -> f64 {
        2.0 * self.norm().atanh()
    }

    pub fn reflect_e1(&self) -> Self {
        DiskPoint {
            x1: self.x1,
            x2: -self.x2,
        }
    }

    pub fn reflect_e2(&self) -> Self {
        DiskPoint {
            x1: -self.x1,
            x2: self.x2,
        }
    }

    pub fn rotate(&self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::from_xy(c * self.x1 - s * self.x2, s * self.x1 + c * self.x2)
    }

    /// Fermi coordinates about the axis `e1`.
    pub fn fermi(&self) -> FermiCoords {
        let z = self.to_complex();
        let r2 = self.norm_sq();
        let s = (2.0 * self.x2 / (1.0 - r2)).asinh();
        let t = (1.0 + z).norm().ln() - (1.0 - z).norm().ln();
        FermiCoords { s, t }
    }
}

/// Fermi coordinates about `e1`: `s` is the signed distance to the axis
/// (positive in the upper half-disk) and `t` the signed arclength of the foot
/// of the perpendicular, measured from the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FermiCoords {
    pub s: f64,
    pub t: f64,
}

impl FermiCoords {
    pub fn new(s: f64, t: f64) -> Self {
        FermiCoords { s, t }
    }

    pub fn to_disk(&self) -> DiskPoint {
        let on_e2 = Complex64::new(0.0, (0.5 * self.s).tanh());
        translate_along_axis(self.t).apply_complex(on_e2)
    }

    /// Hyperbolic distance from the origin: `cosh rho = cosh s cosh t`.
    pub fn radius(&self) -> f64 {
        (self.s.cosh() * self.t.cosh()).acosh()
    }
}

/// Hyperbolic distance between two points of the disk.
pub fn dist(p: &DiskPoint, q: &DiskPoint) -> f64 {
    let zp = p.to_complex();
    let zq = q.to_complex();
    let num = (zp - zq).norm();
    if num == 0.0 {
        return 0.0;
    }
    let den = (Complex64::new(1.0, 0.0) - zp.conj() * zq).norm();
    2.0 * (num / den).atanh()
}
