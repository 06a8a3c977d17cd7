use super::ArcCircle;
use crate::generating_curve::{advance, breakdown, CurveState, ShootingConfig, Trajectory};
use crate::hyperbolic::FermiCoords;
use std::f64::consts::PI;

/// A curve with a unit-speed parametrization and a known geodesic curvature.
pub trait UnitSpeedCurve {
    fn fermi_at(&self, u: f64) -> Option<FermiCoords>;
    fn curvature_at(&self, u: f64) -> Option<f64>;
}

/// A circle of the disk, counterclockwise.
pub struct CircleCurve(pub ArcCircle);

impl UnitSpeedCurve for CircleCurve {
    fn fermi_at(&self, u: f64) -> Option<FermiCoords> {
        Some(self.0.point(u).fermi())
    }

    fn curvature_at(&self, _u: f64) -> Option<f64> {
        Some(self.0.curvature())
    }
}

/// The hypercycle at signed distance `s` from the axis, run along `X⊥`
/// starting at foot coordinate `t0`.
pub struct LeafCurve {
    pub s: f64,
    pub t0: f64,
}

impl UnitSpeedCurve for LeafCurve {
    fn fermi_at(&self, u: f64) -> Option<FermiCoords> {
        Some(FermiCoords::new(self.s, self.t0 - u / self.s.cosh()))
    }

    fn curvature_at(&self, _u: f64) -> Option<f64> {
        Some(self.s.tanh())
    }
}

/// The geodesic crossing the axis perpendicularly at foot `t`, run along `X`.
pub struct GeodesicCurve {
    pub t: f64,
}

impl UnitSpeedCurve for GeodesicCurve {
    fn fermi_at(&self, u: f64) -> Option<FermiCoords> {
        Some(FermiCoords::new(u, self.t))
    }

    fn curvature_at(&self, _u: f64) -> Option<f64> {
        Some(0.0)
    }
}

/// A shooting trajectory; positions come from re-integrating from the nearest
/// stored state, curvature from the mean curvature constraint.
pub struct TrajectoryCurve<'a> {
    pub cfg: &'a ShootingConfig,
    pub traj: &'a Trajectory,
}

impl TrajectoryCurve<'_> {
    fn state_at(&self, u: f64) -> Option<CurveState> {
        let states = &self.traj.states;
        let i = states.partition_point(|s| s.u <= u).max(1) - 1;
        let base = states.get(i)?;
        advance(self.cfg, base, u - base.u).ok()
    }
}

impl UnitSpeedCurve for TrajectoryCurve<'_> {
    fn fermi_at(&self, u: f64) -> Option<FermiCoords> {
        self.state_at(u).map(|s| s.fermi)
    }

    fn curvature_at(&self, u: f64) -> Option<f64> {
        let st = self.state_at(u)?;
        breakdown(&st, self.cfg).ok().map(|b| b.kappa_gamma)
    }
}

const D1: [f64; 4] = [1.0, -8.0, 8.0, -1.0];
const OFFSETS: [f64; 4] = [-2.0, -1.0, 1.0, 2.0];

/// Angle of the velocity from `X⊥`, from 5-point differences of the position.
fn tangent_angle<C: UnitSpeedCurve + ?Sized>(curve: &C, u: f64, h: f64) -> Option<f64> {
    let mut ds = 0.0;
    let mut dt = 0.0;
    for (w, o) in D1.iter().zip(OFFSETS) {
        let f = curve.fermi_at(u + o * h)?;
        ds += w * f.s;
        dt += w * f.t;
    }
    let s = curve.fermi_at(u)?.s;
    // s' = sin(beta), t' cosh(s) = -cos(beta)
    Some(ds.atan2(-dt * s.cosh()))
}

/// `|beta' - K1 cos(beta) + kappa|` at `u`, with `beta'` by central differences.
pub fn formula_k_residual<C: UnitSpeedCurve + ?Sized>(curve: &C, u: f64, h: f64) -> Option<f64> {
    let b0 = tangent_angle(curve, u, h)?;
    let mut db = 0.0;
    for (w, o) in D1.iter().zip(OFFSETS) {
        let b = tangent_angle(curve, u + o * h, h)?;
        // lift next to b0
        let b = b + 2.0 * PI * ((b0 - b) / (2.0 * PI)).round();
        db += w * b;
    }
    let db = db / (12.0 * h);
    let k1 = curve.fermi_at(u)?.s.tanh();
    let kappa = curve.curvature_at(u)?;
    Some((db - k1 * b0.cos() + kappa).abs())
}

/// Largest residual over `samples` equally spaced points of `[a, b]`.
/// Points where the curve cannot be evaluated are skipped.
pub fn verify_formula_k<C: UnitSpeedCurve + ?Sized>(
    curve: &C,
    a: f64,
    b: f64,
    samples: usize,
    h: f64,
) -> f64 {
    (0..samples)
        .filter_map(|k| {
            let u = if samples == 1 {
                a
            } else {
                a + (b - a) * k as f64 / (samples - 1) as f64
            };
            formula_k_residual(curve, u, h)
        })
        .fold(0.0, f64::max)
}
