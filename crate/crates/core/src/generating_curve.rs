//! Generating curves of rotationally symmetric hypersurfaces with constant
//! weighted mean curvature.
//!
//! The curve lives in the upper half of the model plane and is parametrized by
//! hyperbolic arclength `u`. Its state is `(s, t, alpha)`: Fermi coordinates
//! about `e1` and the angle of the unit tangent measured from `X⊥` towards `X`,
//! lifted continuously. The equations are
//!
//! ```text
//! s'     = sin(alpha)
//! t'     = -cos(alpha) / cosh(s)
//! alpha' = tanh(s) cos(alpha) - kappa_gamma
//! kappa_gamma = lambda - (n - 2) kappa_C - h'(rho) <nu, N>
//! ```
//!
//! with `kappa_C = cos(alpha) / tanh(s)` the curvature of the comparison circle
//! and `nu` the outward normal.

use crate::density::RadialDensity;
use crate::error::{Error, Result};
use crate::hyperbolic::{DiskPoint, FermiCoords};
use crate::ode::{bisect_root, DenseSegment, Dopri5, Dopri5Options, StepFailure};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

/// Below this distance to the axis an oblique tangent makes the comparison
/// circle degenerate.
pub const AXIS_EPS: f64 = 1e-6;
/// Threshold above which `g(N, gamma')` counts as a radial monotonicity violation.
pub const WITNESS_EPS: f64 = 1e-9;
/// Closure tolerance used to flag a trajectory as closed.
pub const CLOSURE_TOL: f64 = 1e-6;
/// Width of the band about the axis where, for `n >= 3`, integration stops and
/// the return to the axis is extrapolated. The comparison-circle term repels
/// solutions from a perpendicular landing, so the last stretch is not integrated.
pub const AXIS_BAND: f64 = 3e-3;

fn default_step_tol() -> f64 {
    1e-13
}
fn default_max_arclength() -> f64 {
    50.0
}
fn default_max_step() -> f64 {
    0.05
}
fn default_escape_radius() -> f64 {
    20.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShootingConfig {
    pub n: u32,
    pub density: RadialDensity,
    pub lambda: f64,
    pub start_t: f64,
    #[serde(default = "default_step_tol")]
    pub step_tol: f64,
    #[serde(default = "default_max_arclength")]
    pub max_arclength: f64,
    /// Upper bound on the spacing of recorded states.
    #[serde(default = "default_max_step")]
    pub max_step: f64,
    /// Hyperbolic distance from the origin beyond which the curve has escaped.
    #[serde(default = "default_escape_radius")]
    pub escape_radius: f64,
}

impl ShootingConfig {
    pub fn new(n: u32, density: RadialDensity, lambda: f64, start_t: f64) -> Result<Self> {
        let cfg = ShootingConfig {
            n,
            density,
            lambda,
            start_t,
            step_tol: default_step_tol(),
            max_arclength: default_max_arclength(),
            max_step: default_max_step(),
            escape_radius: default_escape_radius(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.n < 2 {
            return bad(format!("dimension must be at least 2, got {}", self.n));
        }
        if !(self.start_t > 0.0) || !self.start_t.is_finite() {
            return bad(format!("start_t must be positive, got {}", self.start_t));
        }
        if !(self.max_arclength > 0.0) {
            return bad(format!(
                "max_arclength must be positive, got {}",
                self.max_arclength
            ));
        }
        if !(self.step_tol > 0.0) || !(self.max_step > 0.0) || !(self.escape_radius > 0.0) {
            return bad("step_tol, max_step and escape_radius must be positive".into());
        }
        if !self.lambda.is_finite() {
            return bad(format!("lambda must be finite, got {}", self.lambda));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveState {
    pub fermi: FermiCoords,
    pub alpha: f64,
    pub u: f64,
}

impl CurveState {
    pub fn new(s: f64, t: f64, alpha: f64, u: f64) -> Self {
        CurveState {
            fermi: FermiCoords::new(s, t),
            alpha,
            u,
        }
    }

    fn from_vec(u: f64, y: [f64; 3]) -> Self {
        Self::new(y[0], y[1], y[2], u)
    }

    fn to_vec(self) -> [f64; 3] {
        [self.fermi.s, self.fermi.t, self.alpha]
    }

    pub fn point(&self) -> DiskPoint {
        self.fermi.to_disk()
    }

    /// Hyperbolic distance from the origin.
    pub fn rho(&self) -> f64 {
        sinh_rho(self.fermi.s, self.fermi.t).asinh()
    }

    /// `g(N, gamma')`, the radial component of the unit tangent.
    pub fn radial_velocity(&self) -> f64 {
        let (s, t) = (self.fermi.s, self.fermi.t);
        let sr = sinh_rho(s, t);
        if sr == 0.0 {
            return 0.0;
        }
        let (sa, ca) = self.alpha.sin_cos();
        (-t.sinh() * ca + s.sinh() * t.cosh() * sa) / sr
    }

    /// `<nu, N>` for the outward normal `nu`.
    pub fn normal_radial(&self) -> f64 {
        normal_radial(self.fermi.s, self.fermi.t, self.alpha)
    }
}

/// `sinh(rho)` from `cosh(rho) = cosh(s) cosh(t)` without cancellation.
fn sinh_rho(s: f64, t: f64) -> f64 {
    (s.sinh() * t.cosh()).hypot(t.sinh())
}

fn normal_radial(s: f64, t: f64, alpha: f64) -> f64 {
    let sr = sinh_rho(s, t);
    if sr == 0.0 {
        return 0.0;
    }
    let (sa, ca) = alpha.sin_cos();
    (s.sinh() * t.cosh() * ca + t.sinh() * sa) / sr
}

/// Splitting of the weighted mean curvature of the rotation hypersurface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanCurvatureBreakdown {
    pub kappa_gamma: f64,
    #[serde(rename = "kappa_C")]
    pub kappa_c: f64,
    #[serde(rename = "H1")]
    pub h1: f64,
    #[serde(rename = "Hf")]
    pub hf: f64,
}

impl MeanCurvatureBreakdown {
    pub fn new(n: u32, kappa_gamma: f64, kappa_c: f64, h1: f64) -> Self {
        MeanCurvatureBreakdown {
            kappa_gamma,
            kappa_c,
            h1,
            hf: kappa_gamma + (n as f64 - 2.0) * kappa_c + h1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TangentEventKind {
    /// `gamma' = X⊥` (`alpha = 0`).
    HitsXPerp,
    /// `gamma' = -X` (`alpha = -pi/2`).
    HitsMinusX,
    /// `gamma' = X` after a full turn (`alpha = -3 pi/2`).
    HitsPlusX,
    AxisCrossing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentEvent {
    pub kind: TangentEventKind,
    pub u: f64,
    pub state: CurveState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    AxisReturn,
    CurlComplete,
    Escaped,
    StepLimit,
    Stiff,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Closure {
    pub closed: bool,
    pub closing_angle_defect: f64,
    pub curl_detected: bool,
}

/// Integrated curve with its dense output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub n: u32,
    pub lambda: f64,
    pub states: Vec<CurveState>,
    pub breakdowns: Vec<MeanCurvatureBreakdown>,
    pub events: Vec<TangentEvent>,
    pub closure: Closure,
    pub termination: Termination,
    /// Largest `|Hf - lambda|` over the recorded states.
    pub hf_drift: f64,
    #[serde(skip)]
    segments: Vec<DenseSegment<3>>,
}

/// One CSV row of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub u: f64,
    pub s: f64,
    pub t: f64,
    pub alpha: f64,
    pub rho: f64,
    pub kappa_gamma: f64,
    #[serde(rename = "kappa_C")]
    pub kappa_c: f64,
    #[serde(rename = "H1")]
    pub h1: f64,
    #[serde(rename = "Hf")]
    pub hf: f64,
}

impl Trajectory {
    /// A trajectory through given samples, interpolated by cubic Hermite
    /// segments. Tangent angles must be lifted continuously.
    pub fn from_samples(n: u32, states: Vec<CurveState>) -> Result<Self> {
        if states.len() < 2 {
            return Err(Error::InvalidParameter("need at least two samples".into()));
        }
        if states.windows(2).any(|w| !(w[1].u > w[0].u)) {
            return Err(Error::InvalidParameter("arclength must increase strictly".into()));
        }
        let m = states.len();
        let dalpha: Vec<f64> = (0..m)
            .map(|i| {
                let (a, b) = (i.saturating_sub(1), (i + 1).min(m - 1));
                (states[b].alpha - states[a].alpha) / (states[b].u - states[a].u)
            })
            .collect();
        let deriv = |i: usize| {
            let st = &states[i];
            let (sa, ca) = st.alpha.sin_cos();
            [sa, -ca / st.fermi.s.cosh(), dalpha[i]]
        };
        let segments = (0..m - 1)
            .map(|i| {
                DenseSegment::hermite(
                    states[i].u,
                    states[i + 1].u - states[i].u,
                    states[i].to_vec(),
                    states[i + 1].to_vec(),
                    deriv(i),
                    deriv(i + 1),
                )
            })
            .collect();
        let last = states[m - 1];
        let defect = landing_defect(last.alpha);
        let on_axis = last.fermi.s.abs() < CLOSURE_TOL && states[0].fermi.s.abs() < CLOSURE_TOL;
        Ok(Trajectory {
            n,
            lambda: f64::NAN,
            states,
            breakdowns: Vec::new(),
            events: Vec::new(),
            closure: Closure {
                closed: on_axis && defect < CLOSURE_TOL,
                closing_angle_defect: defect,
                curl_detected: false,
            },
            termination: if on_axis {
                Termination::AxisReturn
            } else {
                Termination::StepLimit
            },
            hf_drift: 0.0,
            segments,
        })
    }

    pub fn length(&self) -> f64 {
        self.states.last().map_or(0.0, |s| s.u)
    }

    pub fn segments(&self) -> &[DenseSegment<3>] {
        &self.segments
    }

    /// Non-overlapping pieces of the dense output as `(segment, start, end)`;
    /// a segment may extend past the point where the next one takes over.
    pub fn arcs(&self) -> impl Iterator<Item = (&DenseSegment<3>, f64, f64)> + '_ {
        let len = self.length();
        let segs = &self.segments;
        segs.iter().enumerate().filter_map(move |(i, seg)| {
            let next = segs.get(i + 1).map_or(f64::INFINITY, |n| n.u0);
            let end = seg.u1().min(next).min(len);
            (end > seg.u0).then_some((seg, seg.u0, end))
        })
    }

    /// State at arclength `u` from the dense output.
    pub fn state_at(&self, u: f64) -> Option<CurveState> {
        let first = self.segments.first()?;
        let last = self.segments.last()?;
        if u < first.u0 || u > last.u1().min(self.length()) {
            return None;
        }
        let idx = self.segments.partition_point(|seg| seg.u0 <= u).max(1) - 1;
        Some(CurveState::from_vec(u, self.segments[idx].eval(u)))
    }

    pub fn first_event(&self, kind: TangentEventKind) -> Option<&TangentEvent> {
        self.events.iter().find(|e| e.kind == kind)
    }

    pub fn rows(&self) -> Vec<TrajectoryRow> {
        self.states
            .iter()
            .enumerate()
            .map(|(i, st)| {
                let b = self.breakdowns.get(i).copied().unwrap_or(MeanCurvatureBreakdown {
                    kappa_gamma: f64::NAN,
                    kappa_c: f64::NAN,
                    h1: f64::NAN,
                    hf: f64::NAN,
                });
                TrajectoryRow {
                    u: st.u,
                    s: st.fermi.s,
                    t: st.fermi.t,
                    alpha: st.alpha,
                    rho: st.rho(),
                    kappa_gamma: b.kappa_gamma,
                    kappa_c: b.kappa_c,
                    h1: b.h1,
                    hf: b.hf,
                }
            })
            .collect()
    }
}

/// Angular distance of a landing direction from the perpendicular `-pi/2`.
/// The clockwise (mirrored) orientation lands at `3 pi / 2`.
fn landing_defect(alpha: f64) -> f64 {
    let e = (alpha + FRAC_PI_2).rem_euclid(2.0 * PI);
    e.min(2.0 * PI - e)
}

/// Weighted mean curvature of the centered ball of radius `tau`.
pub fn lambda_for_ball(n: u32, d: &RadialDensity, tau: f64) -> f64 {
    (n as f64 - 1.0) / tau.tanh() + d.dh(tau)
}

fn rhs_raw(
    n: u32,
    d: &RadialDensity,
    lambda: f64,
    s: f64,
    t: f64,
    alpha: f64,
) -> Result<([f64; 3], MeanCurvatureBreakdown)> {
    if !(s.is_finite() && t.is_finite() && alpha.is_finite()) {
        return Err(Error::Numerical(format!("non-finite state ({s}, {t}, {alpha})")));
    }
    let sr = sinh_rho(s, t);
    if !sr.is_finite() || sr.asinh() > 700.0 {
        return Err(Error::OutsideDisk(s, t));
    }
    let rho = sr.asinh();
    let (sa, ca) = alpha.sin_cos();
    let h1 = d.dh(rho) * normal_radial(s, t, alpha);
    let m = n as f64 - 2.0;
    let breakdown = if s == 0.0 {
        if n > 2 && ca.abs() > AXIS_EPS {
            return Err(Error::DegenerateCircle);
        }
        // the comparison circle osculates: kappa_C = kappa_gamma
        let kg = (lambda - h1) / (m + 1.0);
        MeanCurvatureBreakdown::new(n, kg, kg, h1)
    } else {
        if n > 2 && s.abs() < AXIS_EPS && ca.abs() > AXIS_EPS {
            return Err(Error::DegenerateCircle);
        }
        let kc = ca / s.tanh();
        let kg = lambda - m * kc - h1;
        MeanCurvatureBreakdown::new(n, kg, kc, h1)
    };
    let f = [sa, -ca / s.cosh(), s.tanh() * ca - breakdown.kappa_gamma];
    Ok((f, breakdown))
}

/// Derivative of the state and the mean curvature splitting at `state`.
pub fn rhs(state: &CurveState, cfg: &ShootingConfig) -> Result<([f64; 3], MeanCurvatureBreakdown)> {
    rhs_raw(
        cfg.n,
        &cfg.density,
        cfg.lambda,
        state.fermi.s,
        state.fermi.t,
        state.alpha,
    )
}

/// Mean curvature splitting at `state` (convenience over [`rhs`]).
pub fn breakdown(state: &CurveState, cfg: &ShootingConfig) -> Result<MeanCurvatureBreakdown> {
    rhs(state, cfg).map(|(_, b)| b)
}

const ALPHA_TARGETS: [(f64, TangentEventKind); 3] = [
    (0.0, TangentEventKind::HitsXPerp),
    (-FRAC_PI_2, TangentEventKind::HitsMinusX),
    (-1.5 * PI, TangentEventKind::HitsPlusX),
];

fn crosses(a: f64, b: f64) -> bool {
    (a < 0.0 && b >= 0.0) || (a > 0.0 && b <= 0.0)
}

/// Integrate the generating curve from `(s, t, alpha) = (0, start_t, pi/2)`.
pub fn shoot(cfg: &ShootingConfig) -> Result<Trajectory> {
    cfg.validate()?;
    integrate_from(cfg, cfg.lambda, CurveState::new(0.0, cfg.start_t, FRAC_PI_2, 0.0))
}

/// The mirror image of [`shoot`] under the reflection across `e2`: starts at
/// `t = -start_t` and runs clockwise, which flips the sign of `lambda`.
pub fn shoot_mirrored(cfg: &ShootingConfig) -> Result<Trajectory> {
    cfg.validate()?;
    integrate_from(
        cfg,
        -cfg.lambda,
        CurveState::new(0.0, -cfg.start_t, FRAC_PI_2, 0.0),
    )
}

fn integrate_from(cfg: &ShootingConfig, lambda: f64, start: CurveState) -> Result<Trajectory> {
    let n = cfg.n;
    let d = &cfg.density;
    let mut f = |_u: f64, y: &[f64; 3]| -> std::result::Result<[f64; 3], String> {
        rhs_raw(n, d, lambda, y[0], y[1], y[2])
            .map(|r| r.0)
            .map_err(|e| e.to_string())
    };
    let opts = Dopri5Options {
        rtol: cfg.step_tol,
        atol: cfg.step_tol,
        h_init: cfg.max_step.min(1e-3),
        h_min: 1e-13,
        h_max: cfg.max_step,
    };
    let mut stepper = Dopri5::new(&mut f, start.u, start.to_vec(), opts).map_err(Error::Numerical)?;
    let mut states = vec![start];
    let mut segments = Vec::new();
    let mut events: Vec<TangentEvent> = Vec::new();
    let termination;
    let u_end = start.u + cfg.max_arclength;
    let banded = n > 2;
    let band_w = AXIS_BAND;
    let mut left_band = start.fermi.s.abs() > 2.0 * band_w;
    loop {
        let acc = match stepper.step(&mut f, u_end) {
            Ok(a) => a,
            Err(StepFailure::Underflow { .. }) => {
                termination = Termination::Stiff;
                break;
            }
        };
        let seg = acc.segment;
        let y0 = seg.start();
        let y1 = acc.y;
        let mut found: Vec<TangentEvent> = Vec::new();
        for (target, kind) in ALPHA_TARGETS {
            if crosses(y0[2] - target, y1[2] - target) {
                let u = bisect_root(&seg, seg.u0, seg.u1(), |y| y[2] - target, 1e-12);
                let mut st = CurveState::from_vec(u, seg.eval(u));
                st.alpha = target;
                found.push(TangentEvent { kind, u, state: st });
            }
        }
        // (event, extrapolated end state when the stop happens inside the axis band)
        let mut axis: Option<(TangentEvent, Option<CurveState>)> = None;
        if banded {
            if left_band && y0[0].abs() > band_w && y1[0].abs() <= band_w {
                let ub = bisect_root(&seg, seg.u0, seg.u1(), |y| y[0].abs() - band_w, 1e-13);
                let band = CurveState::from_vec(ub, seg.eval(ub));
                let end = extrapolate_to_axis(n, d, lambda, &band);
                let ev = TangentEvent {
                    kind: TangentEventKind::AxisCrossing,
                    u: end.map_or(ub, |e| e.u),
                    state: end.unwrap_or(band),
                };
                axis = Some((ev, Some(band)));
            }
        } else if crosses(y0[0], y1[0]) && y0[0] != 0.0 {
            let u = bisect_root(&seg, seg.u0, seg.u1(), |y| y[0], 1e-12);
            let mut st = CurveState::from_vec(u, seg.eval(u));
            st.fermi.s = 0.0;
            axis = Some((
                TangentEvent {
                    kind: TangentEventKind::AxisCrossing,
                    u,
                    state: st,
                },
                None,
            ));
        }
        if y1[0].abs() > 2.0 * band_w {
            left_band = true;
        }
        found.sort_by(|a, b| a.u.total_cmp(&b.u));
        let stop_curl = found.iter().position(|e| e.kind == TangentEventKind::HitsPlusX);
        let axis_first = match (&axis, stop_curl) {
            (Some((_, Some(band))), Some(k)) => band.u < found[k].u,
            (Some((ev, None)), Some(k)) => ev.u < found[k].u,
            (Some(_), None) => true,
            _ => false,
        };
        if axis_first {
            let (ev, band) = axis.unwrap();
            let cut = band.map_or(ev.u, |b| b.u);
            found.retain(|e| e.u <= cut);
            events.extend(found);
            segments.push(seg);
            if let Some(b) = band {
                states.push(b);
                let e = ev.state;
                let fb = rhs_raw(n, d, lambda, b.fermi.s, b.fermi.t, b.alpha).map(|r| r.0);
                // slope of the perpendicular landing; the extrapolated angle may miss it slightly
                let fe = rhs_raw(n, d, lambda, 0.0, e.fermi.t, -FRAC_PI_2).map(|r| r.0);
                if let (Ok(fb), Ok(fe), true) = (fb, fe, e.u > b.u) {
                    segments.push(DenseSegment::hermite(
                        b.u,
                        e.u - b.u,
                        b.to_vec(),
                        e.to_vec(),
                        fb,
                        fe,
                    ));
                    states.push(e);
                }
            } else {
                states.push(ev.state);
            }
            events.push(ev);
            termination = Termination::AxisReturn;
            break;
        }
        if let Some(k) = stop_curl {
            found.truncate(k + 1);
            let ev = found[k];
            events.extend(found);
            segments.push(seg);
            states.push(ev.state);
            termination = Termination::CurlComplete;
            break;
        }
        events.extend(found);
        segments.push(seg);
        let st = CurveState::from_vec(acc.u, y1);
        states.push(st);
        if st.rho() > cfg.escape_radius {
            termination = Termination::Escaped;
            break;
        }
        if acc.u >= u_end {
            termination = Termination::StepLimit;
            break;
        }
    }
    let mut breakdowns = Vec::with_capacity(states.len());
    let mut drift = 0.0f64;
    for st in &states {
        let b = rhs_raw(n, d, lambda, st.fermi.s, st.fermi.t, st.alpha)
            .map(|r| r.1)
            .unwrap_or(MeanCurvatureBreakdown {
                kappa_gamma: f64::NAN,
                kappa_c: f64::NAN,
                h1: f64::NAN,
                hf: f64::NAN,
            });
        if b.hf.is_finite() {
            drift = drift.max((b.hf - lambda).abs());
        }
        breakdowns.push(b);
    }
    let last = *states.last().unwrap();
    let defect = landing_defect(last.alpha);
    let curl = [
        TangentEventKind::HitsXPerp,
        TangentEventKind::HitsMinusX,
        TangentEventKind::HitsPlusX,
    ]
    .iter()
    .all(|k| events.iter().any(|e| e.kind == *k));
    Ok(Trajectory {
        n,
        lambda,
        states,
        breakdowns,
        events,
        closure: Closure {
            closed: termination == Termination::AxisReturn && defect < CLOSURE_TOL,
            closing_angle_defect: defect,
            curl_detected: curl,
        },
        termination,
        hf_drift: drift,
        segments,
    })
}

/// Landing on the axis from a state inside the axis band. For a curve meeting
/// the axis perpendicularly, `alpha + pi/2` is odd and `t` even in `s`, so an
/// Euler step for `alpha` and a trapezoidal step for `t` are accurate to `O(s^3)`.
fn extrapolate_to_axis(n: u32, d: &RadialDensity, lambda: f64, st: &CurveState) -> Option<CurveState> {
    let (f, _) = rhs_raw(n, d, lambda, st.fermi.s, st.fermi.t, st.alpha).ok()?;
    if f[0] == 0.0 || (st.fermi.s / f[0]) > 0.0 {
        return None;
    }
    let du = -st.fermi.s / f[0];
    let alpha = st.alpha + f[2] * du;
    // t' is odd in s: average the slopes at both ends
    let t = st.fermi.t + 0.5 * (f[1] - alpha.cos()) * du;
    Some(CurveState::new(0.0, t, alpha, st.u + du))
}

/// Integrate the curve equation from `state` over signed arclength `du`.
pub fn advance(cfg: &ShootingConfig, state: &CurveState, du: f64) -> Result<CurveState> {
    if du == 0.0 {
        return Ok(*state);
    }
    let sign = du.signum();
    let (n, d, lambda) = (cfg.n, &cfg.density, cfg.lambda);
    let mut f = |_v: f64, y: &[f64; 3]| -> std::result::Result<[f64; 3], String> {
        rhs_raw(n, d, lambda, y[0], y[1], y[2])
            .map(|(k, _)| [sign * k[0], sign * k[1], sign * k[2]])
            .map_err(|e| e.to_string())
    };
    let opts = Dopri5Options {
        rtol: 1e-13,
        atol: 1e-14,
        h_init: du.abs().min(1e-3),
        h_min: 1e-15,
        h_max: du.abs(),
    };
    let mut st = Dopri5::new(&mut f, 0.0, state.to_vec(), opts).map_err(Error::Numerical)?;
    while st.u() < du.abs() {
        st.step(&mut f, du.abs())
            .map_err(|StepFailure::Underflow { u, reason }| {
                Error::Numerical(format!("step underflow at {u}: {}", reason.unwrap_or_default()))
            })?;
    }
    Ok(CurveState::from_vec(state.u + du, st.y()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrajectoryClass {
    CenteredCircle,
    CurlSequence,
    /// Returned to the axis without being the centered circle.
    AxisReturn,
    Escaped,
    StepLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub class: TrajectoryClass,
    /// First arclength where `g(N, gamma') > 0`.
    pub monotonicity_witness: Option<f64>,
    pub max_radius_deviation: f64,
}

/// First arclength where the radial velocity exceeds [`WITNESS_EPS`].
pub fn monotonicity_witness(traj: &Trajectory) -> Option<f64> {
    let len = traj.length();
    for seg in traj.segments() {
        let g = |y: &[f64; 3]| CurveState::from_vec(0.0, *y).radial_velocity() - WITNESS_EPS;
        let span = seg.u1().min(len) - seg.u0;
        // sample the segment finely enough to catch short excursions
        let m = 8;
        let mut prev_u = seg.u0;
        if g(&seg.eval(prev_u)) > 0.0 {
            return Some(prev_u);
        }
        for k in 1..=m {
            let u = seg.u0 + span * k as f64 / m as f64;
            if g(&seg.eval(u)) > 0.0 {
                return Some(bisect_root(seg, prev_u, u, g, 1e-12));
            }
            prev_u = u;
        }
    }
    None
}

pub fn classify(traj: &Trajectory, tol: f64) -> Classification {
    let rho0 = traj.states.first().map_or(0.0, |s| s.rho());
    let mut dev = 0.0f64;
    for st in &traj.states {
        dev = dev.max((st.rho() - rho0).abs());
    }
    let len = traj.length();
    for seg in traj.segments() {
        let mid = CurveState::from_vec(0.0, seg.eval(0.5 * (seg.u0 + seg.u1().min(len))));
        dev = dev.max((mid.rho() - rho0).abs());
    }
    let class = if traj.closure.curl_detected {
        TrajectoryClass::CurlSequence
    } else {
        match traj.termination {
            Termination::AxisReturn => {
                if dev < tol && traj.closure.closing_angle_defect < tol {
                    TrajectoryClass::CenteredCircle
                } else {
                    TrajectoryClass::AxisReturn
                }
            }
            Termination::Escaped => TrajectoryClass::Escaped,
            Termination::CurlComplete => TrajectoryClass::CurlSequence,
            Termination::StepLimit | Termination::Stiff => TrajectoryClass::StepLimit,
        }
    };
    Classification {
        class,
        monotonicity_witness: monotonicity_witness(traj),
        max_radius_deviation: dev,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::{curvature_convert, direction_at_angle, frame_at};
    use approx::assert_abs_diff_eq;

    fn cfg(n: u32, tau: f64, rel: f64) -> ShootingConfig {
        let d = RadialDensity::CoshPower(1);
        let lam = lambda_for_ball(n, &d, tau) * rel;
        ShootingConfig::new(n, d, lam, tau).unwrap()
    }

    #[test]
    fn lambda_examples() {
        let d = RadialDensity::CoshPower(1);
        assert_abs_diff_eq!(lambda_for_ball(2, &d, 1.0), 1.0 / 1f64.tanh() + 1f64.tanh());
        assert_abs_diff_eq!(
            lambda_for_ball(2, &RadialDensity::CoshPower(3), 40.0),
            4.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn circle_breakdown() {
        for n in [2, 3, 5] {
            let c = cfg(n, 1.2, 1.0);
            // a point on the circle: rho = 1.2, at polar angle 1.0
            let p = DiskPoint::from_polar(1.2, 1.0);
            let f = p.fermi();
            // tangent of the counterclockwise circle
            let tangent = [-p.x2(), p.x1()];
            let alpha = crate::hyperbolic::angle_from_x_perp(&p, tangent);
            let st = CurveState::new(f.s, f.t, alpha, 0.0);
            let b = breakdown(&st, &c).unwrap();
            assert_abs_diff_eq!(b.kappa_gamma, 1.0 / 1.2f64.tanh(), epsilon = 1e-12);
            assert_abs_diff_eq!(b.kappa_c, 1.0 / 1.2f64.tanh(), epsilon = 1e-12);
            assert_abs_diff_eq!(st.normal_radial(), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(st.radial_velocity(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn start_limit() {
        for n in [2, 3, 4] {
            let c = cfg(n, 1.0, 1.3);
            let st = CurveState::new(0.0, 1.0, FRAC_PI_2, 0.0);
            let b = breakdown(&st, &c).unwrap();
            let expect = (c.lambda - c.density.dh(1.0)) / (n as f64 - 1.0);
            assert_abs_diff_eq!(b.kappa_gamma, expect, epsilon = 1e-14);
            assert_abs_diff_eq!(b.hf, c.lambda, epsilon = 1e-13);
        }
    }

    #[test]
    fn oblique_axis_state_is_flagged() {
        let c = cfg(3, 1.0, 1.0);
        let st = CurveState::new(1e-8, 0.3, 0.3, 0.0);
        assert_eq!(rhs(&st, &c).unwrap_err(), Error::DegenerateCircle);
        let c2 = cfg(2, 1.0, 1.0);
        assert!(rhs(&st, &c2).is_ok());
    }

    #[test]
    fn centered_circle_closes() {
        for n in [2, 3, 4] {
            for tau in [0.5, 1.0, 2.0] {
                let traj = shoot(&cfg(n, tau, 1.0)).unwrap();
                let cl = classify(&traj, 1e-6);
                assert_eq!(
                    cl.class,
                    TrajectoryClass::CenteredCircle,
                    "n={n} tau={tau} {:?}",
                    traj.termination
                );
                assert!(cl.max_radius_deviation < 1e-6);
                let end = traj.states.last().unwrap();
                assert_abs_diff_eq!(end.fermi.t, -tau, epsilon = 1e-6);
                assert_abs_diff_eq!(traj.length(), PI * tau.sinh(), epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn states_are_spaced() {
        let c = cfg(3, 1.0, 1.0);
        let traj = shoot(&c).unwrap();
        for w in traj.states.windows(2) {
            assert!(w[1].u > w[0].u);
            assert!(w[1].u - w[0].u <= c.max_step + 1e-15);
        }
    }

    #[test]
    fn mirrored_shot_is_reflection() {
        for rel in [1.0, 1.1] {
            let c = cfg(3, 1.0, rel);
            let a = shoot(&c).unwrap();
            let b = shoot_mirrored(&c).unwrap();
            let len = a.length().min(b.length());
            for k in 0..200 {
                let u = len * k as f64 / 200.0;
                let sa = a.state_at(u).unwrap();
                let sb = b.state_at(u).unwrap();
                assert_abs_diff_eq!(sa.fermi.s, sb.fermi.s, epsilon = 1e-8);
                assert_abs_diff_eq!(sa.fermi.t, -sb.fermi.t, epsilon = 1e-8);
                assert_abs_diff_eq!(sa.alpha, PI - sb.alpha, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn advance_matches_dense_output() {
        let c = cfg(3, 1.0, 1.05);
        let traj = shoot(&c).unwrap();
        let st = traj.state_at(1.0).unwrap();
        let fwd = advance(&c, &st, 0.3).unwrap();
        let dense = traj.state_at(1.3).unwrap();
        assert_abs_diff_eq!(fwd.fermi.s, dense.fermi.s, epsilon = 1e-8);
        assert_abs_diff_eq!(fwd.alpha, dense.alpha, epsilon = 1e-8);
        let back = advance(&c, &fwd, -0.3).unwrap();
        assert_abs_diff_eq!(back.fermi.t, st.fermi.t, epsilon = 1e-11);
    }

    /// Weighted mean curvature rebuilt from positions alone.
    fn geometric_hf(c: &ShootingConfig, st: &CurveState, h: f64) -> f64 {
        let prev = advance(c, st, -h).unwrap().point().xy();
        let next = advance(c, st, h).unwrap().point().xy();
        let p = st.point();
        let x = p.xy();
        let d1 = [(next[0] - prev[0]) / (2.0 * h), (next[1] - prev[1]) / (2.0 * h)];
        let d2 = [
            (next[0] - 2.0 * x[0] + prev[0]) / (h * h),
            (next[1] - 2.0 * x[1] + prev[1]) / (h * h),
        ];
        let speed = d1[0].hypot(d1[1]);
        let kflat = (d1[0] * d2[1] - d1[1] * d2[0]) / speed.powi(3);
        let nu = [d1[1] / speed, -d1[0] / speed];
        let kg = curvature_convert(kflat, &p, nu).unwrap();
        let kc = crate::hyperbolic::comparison_circle(&p, d1).unwrap().curvature();
        let en = [x[0] / p.norm(), x[1] / p.norm()];
        let h1 = c.density.dh(p.radius()) * (en[0] * nu[0] + en[1] * nu[1]);
        kg + (c.n as f64 - 2.0) * kc + h1
    }

    #[test]
    fn constraint_is_conserved_geometrically() {
        for rel in [0.95, 1.0, 1.1] {
            let c = cfg(3, 1.0, rel);
            let traj = shoot(&c).unwrap();
            let len = traj.length();
            for k in 1..20 {
                let st = traj.state_at(len * k as f64 / 20.0).unwrap();
                // differencing disk coordinates near the boundary is ill-conditioned
                if st.fermi.s < 1e-3 || st.rho() > 5.0 {
                    continue;
                }
                assert_abs_diff_eq!(geometric_hf(&c, &st, 1e-4), c.lambda, epsilon = 1e-5);
            }
        }
    }

    #[test]
    fn tangent_frame_is_consistent() {
        let st = CurveState::new(0.4, -0.2, 0.7, 0.0);
        let p = st.point();
        let v = direction_at_angle(&p, st.alpha);
        let f = frame_at(&p);
        let nrm = f.n.unwrap();
        let g = crate::hyperbolic::metric_dot(&p, nrm, v);
        assert_abs_diff_eq!(g, st.radial_velocity(), epsilon = 1e-12);
    }
}
