use super::{frame::angle_from_x_perp, DiskPoint};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Below this distance to the axis the comparison curvature is taken from the
/// Euclidean construction instead of `cos(alpha) / tanh(s)`.
pub const TRIG_LAW_MIN_S: f64 = 1e-4;

/// An oriented Euclidean circle or line, viewed as a constant-curvature curve
/// of the hyperbolic plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum OrientedCircle {
    /// `orientation = +1` for counterclockwise traversal; `anchor` is a
    /// point on the circle, used to evaluate the curvature without
    /// cancellation when the center is far away.
    Circle {
        center: [f64; 2],
        radius: f64,
        orientation: f64,
        anchor: [f64; 2],
    },
    Line {
        base: [f64; 2],
        direction: [f64; 2],
    },
}

impl OrientedCircle {
    /// Signed hyperbolic curvature with respect to the left normal.
    pub fn curvature(&self) -> f64 {
        match *self {
            OrientedCircle::Circle {
                center,
                radius,
                orientation,
                anchor: a,
            } => {
                // 1 - |c|^2 + R^2 = 1 - |a|^2 + 2 <a, a - c>
                let u = [a[0] - center[0], a[1] - center[1]];
                let a2 = a[0] * a[0] + a[1] * a[1];
                orientation * (1.0 - a2 + 2.0 * (a[0] * u[0] + a[1] * u[1])) / (2.0 * radius)
            }
            OrientedCircle::Line { base, direction } => {
                // outward normal is minus the left normal
                let nu = [direction[1], -direction[0]];
                base[0] * nu[0] + base[1] * nu[1]
            }
        }
    }

    /// Hyperbolic center and radius, for circles contained in the disk.
    pub fn hyperbolic_center_radius(&self) -> Option<(DiskPoint, f64)> {
        let OrientedCircle::Circle { center, radius, .. } = *self else {
            return None;
        };
        if center[1] != 0.0 {
            // general circle: conjugate by the rotation putting its center on e1
            let c = center[0].hypot(center[1]);
            let ang = center[1].atan2(center[0]);
            let on_axis = OrientedCircle::Circle {
                center: [c, 0.0],
                radius,
                orientation: 1.0,
                anchor: [c + radius, 0.0],
            };
            let (p, r) = on_axis.hyperbolic_center_radius()?;
            return Some((p.rotate(ang), r));
        }
        let lo = center[0] - radius;
        let hi = center[0] + radius;
        if lo <= -1.0 || hi >= 1.0 {
            return None;
        }
        let t_lo = 2.0 * lo.atanh();
        let t_hi = 2.0 * hi.atanh();
        let t_c = 0.5 * (t_lo + t_hi);
        Some((DiskPoint::from_xy((0.5 * t_c).tanh(), 0.0), 0.5 * (t_hi - t_lo)))
    }
}

/// Hyperbolic signed curvature of a curve through `p` from its Euclidean
/// signed curvature and unit outward Euclidean normal:
/// `kappa = (1 - |p|^2) / 2 * kappa_flat + <p, nu_flat>`.
pub fn curvature_convert(kappa_flat: f64, p: &DiskPoint, nu_flat: [f64; 2]) -> Result<f64> {
    let len = nu_flat[0].hypot(nu_flat[1]);
    if (len - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "normal must have unit Euclidean length, got {len}"
        )));
    }
    Ok(0.5 * (1.0 - p.norm_sq()) * kappa_flat + p.x1() * nu_flat[0] + p.x2() * nu_flat[1])
}

/// The oriented circle (or line) through `p`, tangent to `tangent`, with
/// Euclidean center on the axis `e1`.
///
/// Fails with [`Error::AxisUnderdetermined`] when `p` is on the axis and the
/// tangent is perpendicular to it, and with [`Error::DegenerateCircle`] when
/// `p` is on the axis and the tangent is not perpendicular (zero radius).
pub fn comparison_circle(p: &DiskPoint, tangent: [f64; 2]) -> Result<OrientedCircle> {
    let len = tangent[0].hypot(tangent[1]);
    if !(len > 0.0) {
        return Err(Error::DegenerateTangent);
    }
    let v = [tangent[0] / len, tangent[1] / len];
    // left normal
    let n = [-v[1], v[0]];
    let [x1, x2] = p.xy();
    if n[1] == 0.0 || (x2 != 0.0 && (x2 / n[1]).abs() > 1e12) {
        if x2 == 0.0 {
            return Err(Error::AxisUnderdetermined);
        }
        return Ok(OrientedCircle::Line {
            base: [x1, x2],
            direction: v,
        });
    }
    if x2 == 0.0 {
        return Err(Error::DegenerateCircle);
    }
    let rho = -x2 / n[1];
    Ok(OrientedCircle::Circle {
        center: [x1 + rho * n[0], 0.0],
        radius: rho.abs(),
        orientation: rho.signum(),
        anchor: [x1, x2],
    })
}

/// Curvature of the comparison circle at `p` for tangent angle `alpha`
/// (measured from `X⊥`): `cos(alpha) / tanh(s)` away from the axis, the
/// Euclidean construction when `|s| < 1e-4`.
pub fn comparison_curvature(p: &DiskPoint, tangent: [f64; 2]) -> Result<f64> {
    let s = p.fermi().s;
    if s.abs() >= TRIG_LAW_MIN_S {
        let alpha = angle_from_x_perp(p, tangent);
        return Ok(alpha.cos() / s.tanh());
    }
    comparison_circle(p, tangent).map(|c| c.curvature())
}
