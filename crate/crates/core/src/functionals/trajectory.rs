use super::{check_dimension, radial_volume, FunctionalResult, OccupancyGrid, Profile};
use crate::density::RadialDensity;
use crate::error::{Error, Result};
use crate::generating_curve::{CurveState, Trajectory};
use crate::hyperbolic::direction_at_angle;
use crate::ode::{bisect_root, DenseSegment};
use crate::quadrature::{integrate, Tolerance};
use crate::special::sphere_area;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// How the enclosed volume of a generating curve is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum VolumeMethod {
    /// Line integral when the curve is star-shaped about the origin, raster
    /// at the default resolution otherwise.
    #[default]
    Auto,
    /// `omega_{n-2} int G(rho) sin^{n-2}(theta) dtheta` along the curve.
    LineIntegral,
    /// Polar occupancy grid with `n_radial x n_angular` cells.
    Raster { n_radial: usize, n_angular: usize },
}

impl VolumeMethod {
    pub const DEFAULT_RASTER: VolumeMethod = VolumeMethod::Raster {
        n_radial: 2048,
        n_angular: 4096,
    };
}

const SUBDIVISIONS: usize = 4;
const STAR_TOL: f64 = 1e-12;

fn state(u: f64, y: &[f64; 3]) -> CurveState {
    CurveState::new(y[0], y[1], y[2], u)
}

/// Polar angle in `[0, pi]` of the point with Fermi data `y`.
fn polar_angle(y: &[f64; 3]) -> f64 {
    let p = state(0.0, y).point();
    p.x2().abs().atan2(p.x1())
}

/// `d theta / du` along the unit-speed curve.
fn angular_speed(y: &[f64; 3]) -> f64 {
    let p = state(0.0, y).point();
    let r2 = p.norm_sq();
    if r2 == 0.0 {
        return f64::INFINITY;
    }
    let v = direction_at_angle(&p, y[2]);
    let sign = if p.x2() < 0.0 { -1.0 } else { 1.0 };
    sign * (p.x1() * v[1] - p.x2() * v[0]) / r2
}

fn pieces(traj: &Trajectory) -> impl Iterator<Item = (&DenseSegment<3>, f64)> {
    traj.arcs().map(|(seg, _, end)| (seg, end))
}

fn require_closed(traj: &Trajectory) -> Result<()> {
    if !traj.closure.closed {
        return Err(Error::OpenTrajectory(traj.closure.closing_angle_defect));
    }
    Ok(())
}

/// Monotone polar angle along the curve, with the origin enclosed.
pub fn is_star_shaped(traj: &Trajectory) -> bool {
    let (first, last) = match (traj.states.first(), traj.states.last()) {
        (Some(a), Some(b)) => (a, b),
        _ => return false,
    };
    if first.fermi.t * last.fermi.t >= 0.0 {
        return false;
    }
    let mut sign = 0.0;
    for (seg, end) in pieces(traj) {
        for k in 0..=SUBDIVISIONS {
            let u = seg.u0 + (end - seg.u0) * k as f64 / SUBDIVISIONS as f64;
            let w = angular_speed(&seg.eval(u));
            if w.abs() <= STAR_TOL {
                continue;
            }
            if sign == 0.0 {
                sign = w.signum();
            } else if w.signum() != sign {
                return false;
            }
        }
    }
    sign != 0.0
}

pub fn trajectory_functionals(traj: &Trajectory, n: u32, d: &RadialDensity) -> Result<FunctionalResult> {
    trajectory_functionals_with(traj, n, d, VolumeMethod::Auto)
}

pub fn trajectory_functionals_with(
    traj: &Trajectory,
    n: u32,
    d: &RadialDensity,
    method: VolumeMethod,
) -> Result<FunctionalResult> {
    check_dimension(n)?;
    require_closed(traj)?;
    let omega = sphere_area(n - 2);
    let k = (n - 2) as i32;
    let tol = Tolerance::default();
    let mut pf = 0.0;
    let mut err = 0.0;
    for (seg, end) in pieces(traj) {
        let r = integrate(
            |u| {
                let y = seg.eval(u);
                let st = state(u, &y);
                d.h(st.rho()).exp() * y[0].abs().sinh().powi(k)
            },
            seg.u0,
            end,
            tol,
        );
        pf += r.value;
        err += r.error;
    }
    let method = match method {
        VolumeMethod::Auto if is_star_shaped(traj) => VolumeMethod::LineIntegral,
        VolumeMethod::Auto => VolumeMethod::DEFAULT_RASTER,
        m => m,
    };
    let (vf, verr) = match method {
        VolumeMethod::Raster { n_radial, n_angular } => {
            let vf = raster_volume(traj, n, d, n_radial, n_angular)?;
            // discretization error is not estimated by the grid
            (vf, 0.0)
        }
        _ => line_volume(traj, n, d),
    };
    Ok(FunctionalResult {
        pf: omega * pf,
        vf: vf.abs(),
        err: omega * err + verr,
    })
}

/// Weighted volume as a line integral. Valid for any simple closed curve
/// meeting the axis at its endpoints, since the axis adds no `dtheta`.
fn line_volume(traj: &Trajectory, n: u32, d: &RadialDensity) -> (f64, f64) {
    let omega = sphere_area(n - 2);
    let k = (n - 2) as i32;
    let mut total = 0.0;
    let mut err = 0.0;
    for (seg, end) in pieces(traj) {
        let inner = std::cell::Cell::new(0.0f64);
        let r = integrate(
            |u| {
                let y = seg.eval(u);
                let rho = state(u, &y).rho();
                let (g, e) = radial_volume(n, d, rho);
                inner.set(inner.get().max(e));
                g * polar_angle(&y).sin().powi(k) * angular_speed(&y)
            },
            seg.u0,
            end,
            Tolerance::default(),
        );
        total += r.value;
        err += r.error + (end - seg.u0) * inner.get();
    }
    (omega * total, omega * err)
}

/// Sub-arcs of the curve on which the polar angle is bracketed by its values
/// at the ends.
struct AngleTable<'a> {
    arcs: Vec<(&'a DenseSegment<3>, f64, f64, f64, f64)>,
}

impl<'a> AngleTable<'a> {
    fn new(traj: &'a Trajectory) -> Self {
        let mut arcs = Vec::new();
        for (seg, end) in pieces(traj) {
            let h = (end - seg.u0) / SUBDIVISIONS as f64;
            for k in 0..SUBDIVISIONS {
                let a = seg.u0 + h * k as f64;
                let b = if k + 1 == SUBDIVISIONS { end } else { a + h };
                arcs.push((seg, a, b, polar_angle(&seg.eval(a)), polar_angle(&seg.eval(b))));
            }
        }
        AngleTable { arcs }
    }

    /// Arclength positions where the curve crosses the ray at angle `theta`.
    fn crossings(&self, theta: f64) -> Vec<(f64, &'a DenseSegment<3>)> {
        let mut out = Vec::new();
        for &(seg, a, b, ta, tb) in &self.arcs {
            let (ga, gb) = (ta - theta, tb - theta);
            if ga == 0.0 {
                out.push((a, seg));
            } else if ga * gb < 0.0 {
                out.push((bisect_root(seg, a, b, |y| polar_angle(y) - theta, 1e-14), seg));
            }
        }
        out
    }
}

fn raster_volume(
    traj: &Trajectory,
    n: u32,
    d: &RadialDensity,
    n_radial: usize,
    n_angular: usize,
) -> Result<f64> {
    let table = AngleTable::new(traj);
    let (first, last) = (traj.states[0], *traj.states.last().unwrap());
    let origin_inside = first.fermi.t * last.fermi.t < 0.0;
    let r_max = traj.states.iter().map(|s| s.rho()).fold(0.0, f64::max) * 1.01 + 1e-9;
    let grid = OccupancyGrid::from_ray_intervals(n_radial, n_angular, r_max, n, d, |theta| {
        let theta = if theta > PI { 2.0 * PI - theta } else { theta };
        let mut radii: Vec<f64> = table
            .crossings(theta)
            .into_iter()
            .map(|(u, seg)| state(u, &seg.eval(u)).rho())
            .collect();
        radii.sort_by(f64::total_cmp);
        if origin_inside {
            radii.insert(0, 0.0);
        }
        radii.chunks_exact(2).map(|c| (c[0], c[1])).collect()
    })?;
    Ok(grid.weighted_volume(n, d))
}

/// Polar resampling `rho(theta)` of a closed star-shaped trajectory.
pub struct TrajectoryProfile<'a> {
    table: AngleTable<'a>,
}

impl<'a> TrajectoryProfile<'a> {
    pub fn new(traj: &'a Trajectory) -> Result<Self> {
        require_closed(traj)?;
        if !is_star_shaped(traj) {
            return Err(Error::InvalidProfile(
                "trajectory is not star-shaped about the origin".into(),
            ));
        }
        Ok(TrajectoryProfile {
            table: AngleTable::new(traj),
        })
    }

    fn locate(&self, theta: f64) -> CurveState {
        let theta = theta.clamp(0.0, PI);
        let arcs = &self.table.arcs;
        let hit = arcs
            .iter()
            .find(|&&(_, _, _, ta, tb)| (ta - theta) * (tb - theta) <= 0.0)
            .copied();
        let (seg, a, b, ta, _) = hit.unwrap_or_else(|| {
            // the endpoint nearest in angle
            let first = arcs[0];
            let last = arcs[arcs.len() - 1];
            if (first.3 - theta).abs() <= (last.4 - theta).abs() {
                (first.0, first.1, first.1, first.3, first.3)
            } else {
                (last.0, last.2, last.2, last.4, last.4)
            }
        });
        let u = if a == b || ta == theta {
            a
        } else {
            bisect_root(seg, a, b, |y| polar_angle(y) - theta, 1e-15)
        };
        state(u, &seg.eval(u))
    }
}

impl Profile for TrajectoryProfile<'_> {
    fn rho(&self, theta: f64) -> f64 {
        self.locate(theta).rho()
    }

    fn rho_prime(&self, theta: f64) -> f64 {
        let st = self.locate(theta);
        let y = [st.fermi.s, st.fermi.t, st.alpha];
        let w = angular_speed(&y);
        if !w.is_finite() || w == 0.0 {
            return 0.0;
        }
        st.radial_velocity() / w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::{ball_quantities, functionals_of_profile, TranslatedBall};
    use crate::generating_curve::{lambda_for_ball, shoot, shoot_mirrored, ShootingConfig};
    use crate::hyperbolic::{angle_from_x_perp, translate_along_axis, DiskPoint};
    use approx::assert_relative_eq;

    fn ball_traj(n: u32, d: &RadialDensity, tau: f64) -> Trajectory {
        let c = ShootingConfig::new(n, d.clone(), lambda_for_ball(n, d, tau), tau).unwrap();
        shoot(&c).unwrap()
    }

    /// Upper half of the circle of radius `tau` centered at distance `c` on `e1`.
    fn circle_samples(n: u32, c: f64, tau: f64, m: usize) -> Trajectory {
        let iso = translate_along_axis(c);
        let mut states: Vec<CurveState> = Vec::with_capacity(m + 1);
        for i in 0..=m {
            let phi = PI * i as f64 / m as f64;
            let p0 = DiskPoint::from_polar(tau, phi);
            let p = iso.apply(&p0);
            let v = iso.push(&p0, [-phi.sin(), phi.cos()]);
            let f = p.fermi();
            let mut alpha = angle_from_x_perp(&p, v);
            if let Some(prev) = states.last() {
                alpha += (2.0 * PI) * ((prev.alpha - alpha) / (2.0 * PI)).round();
            }
            let s = if i == 0 || i == m { 0.0 } else { f.s };
            states.push(CurveState::new(s, f.t, alpha, phi * tau.sinh()));
        }
        Trajectory::from_samples(n, states).unwrap()
    }

    #[test]
    fn centered_circle_matches_ball() {
        let d = RadialDensity::CoshPower(1);
        for n in [2, 3, 4] {
            for tau in [0.5, 1.0, 2.0] {
                let r = trajectory_functionals(&ball_traj(n, &d, tau), n, &d).unwrap();
                let b = ball_quantities(n, &d, tau).unwrap();
                assert_relative_eq!(r.pf, b.pf, max_relative = 1e-8);
                assert_relative_eq!(r.vf, b.vf, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn perimeter_three_ways() {
        let d = RadialDensity::CoshPower(2);
        for n in [2, 3] {
            let tau = 1.0;
            let traj = ball_traj(n, &d, tau);
            let a = ball_quantities(n, &d, tau).unwrap().pf;
            let b = functionals_of_profile(
                &crate::functionals::PolarProfile::constant(tau, n).unwrap(),
                n,
                &d,
            )
            .unwrap()
            .pf;
            let c = trajectory_functionals(&traj, n, &d).unwrap().pf;
            assert_relative_eq!(a, b, max_relative = 1e-8);
            assert_relative_eq!(a, c, max_relative = 1e-8);
            assert_relative_eq!(b, c, max_relative = 1e-8);
        }
    }

    #[test]
    fn reflected_trajectory_agrees() {
        let d = RadialDensity::CoshPower(1);
        let n = 3;
        let c = ShootingConfig::new(n, d.clone(), lambda_for_ball(n, &d, 1.0), 1.0).unwrap();
        let a = trajectory_functionals(&shoot(&c).unwrap(), n, &d).unwrap();
        let b = trajectory_functionals(&shoot_mirrored(&c).unwrap(), n, &d).unwrap();
        assert_relative_eq!(a.pf, b.pf, max_relative = 1e-10);
        assert_relative_eq!(a.vf, b.vf, max_relative = 1e-10);
    }

    #[test]
    fn polar_resampling_agrees() {
        let d = RadialDensity::CoshPower(1);
        for n in [2, 3] {
            let traj = circle_samples(n, 0.4, 1.0, 4000);
            let prof = TrajectoryProfile::new(&traj).unwrap();
            let tb = TranslatedBall::new(1.0, 0.4).unwrap();
            for theta in [0.0, 0.3, 1.5, 2.9, PI] {
                assert_relative_eq!(prof.rho(theta), tb.rho(theta), max_relative = 1e-10);
            }
            let via_curve = trajectory_functionals(&traj, n, &d).unwrap();
            let via_profile = functionals_of_profile(&prof, n, &d).unwrap();
            let exact = functionals_of_profile(&tb, n, &d).unwrap();
            assert_relative_eq!(via_curve.pf, via_profile.pf, max_relative = 1e-8);
            assert_relative_eq!(via_curve.vf, via_profile.vf, max_relative = 1e-8);
            assert_relative_eq!(via_curve.pf, exact.pf, max_relative = 1e-8);
            assert_relative_eq!(via_curve.vf, exact.vf, max_relative = 1e-8);
        }
    }

    #[test]
    fn off_origin_circle_uses_raster() {
        let traj = circle_samples(3, 1.5, 0.7, 2000);
        assert!(traj.closure.closed);
        assert!(!is_star_shaped(&traj));
        let flat = RadialDensity::flat();
        let r = trajectory_functionals(&traj, 3, &flat).unwrap();
        let b = ball_quantities(3, &flat, 0.7).unwrap();
        assert_relative_eq!(r.vf, b.vf, max_relative = 1e-3);
        assert_relative_eq!(r.pf, b.pf, max_relative = 1e-8);
        let d = RadialDensity::CoshPower(2);
        let raster = trajectory_functionals(&traj, 3, &d).unwrap().vf;
        let line = trajectory_functionals_with(&traj, 3, &d, VolumeMethod::LineIntegral)
            .unwrap()
            .vf;
        assert_relative_eq!(raster, line, max_relative = 1e-3);
    }

    #[test]
    fn open_trajectory_is_rejected() {
        let d = RadialDensity::CoshPower(1);
        let c = ShootingConfig::new(3, d.clone(), 1.5 * lambda_for_ball(3, &d, 1.0), 1.0).unwrap();
        let traj = shoot(&c).unwrap();
        assert!(!traj.closure.closed);
        assert!(matches!(
            trajectory_functionals(&traj, 3, &d),
            Err(Error::OpenTrajectory(_))
        ));
    }
}
