//! Volume-constrained descent of the weighted perimeter over profiles
//! `rho(theta) = a_0 + sum_k a_k cos(k theta)`.

use crate::density::RadialDensity;
use crate::error::{Error, Result};
use crate::functionals::{
    ball_quantities, ball_radius_for_volume, profile_functionals, PolarProfile, Profile,
};
use crate::generating_curve::MeanCurvatureBreakdown;
use crate::hyperbolic::{comparison_curvature, curvature_convert, DiskPoint};
use crate::quadrature::{integrate, integrate_vec, Tolerance};
use crate::special::sphere_area;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Mean curvature of the rotation hypersurface of `p` at polar angle `theta`.
pub fn profile_mean_curvature(
    p: &PolarProfile,
    d: &RadialDensity,
    theta: f64,
) -> Result<MeanCurvatureBreakdown> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::InvalidParameter(format!(
            "theta must lie in [0, pi], got {theta}"
        )));
    }
    mean_curvature_from_jet(
        p.n,
        d,
        theta,
        [p.rho(theta), p.rho_prime(theta), p.rho_second(theta)],
    )
}

/// Same, from `(rho, rho', rho'')` at `theta`.
pub fn mean_curvature_from_jet(
    n: u32,
    d: &RadialDensity,
    theta: f64,
    [rho, rp, rpp]: [f64; 3],
) -> Result<MeanCurvatureBreakdown> {
    if !(rho > 0.0) {
        return Err(Error::InvalidProfile(format!("radius {rho} is not positive")));
    }
    // Euclidean polar curve r(theta) in the disk
    let r = (0.5 * rho).tanh();
    let q = 0.5 * (1.0 - r * r);
    let r1 = rp * q;
    let r2 = rpp * q - rp * r * r1;
    let (st, ct) = theta.sin_cos();
    let v = [r1 * ct - r * st, r1 * st + r * ct];
    let speed = v[0].hypot(v[1]);
    let kappa_flat = (r * r + 2.0 * r1 * r1 - r * r2) / speed.powi(3);
    let nu = [v[1] / speed, -v[0] / speed];
    let p = DiskPoint::new(r * ct, r * st)?;
    let kappa_gamma = curvature_convert(kappa_flat, &p, nu)?;
    let on_axis = st.abs() < 1e-12;
    // by symmetry the comparison circle on the axis osculates the profile
    let kappa_c = if on_axis {
        kappa_gamma
    } else {
        comparison_curvature(&p, v)?
    };
    let h1 = d.dh(rho) * (nu[0] * ct + nu[1] * st);
    Ok(MeanCurvatureBreakdown::new(n, kappa_gamma, kappa_c, h1))
}

/// `max Hf - min Hf` over `samples` equally spaced angles of `[0, pi]`.
pub fn hf_spread(p: &PolarProfile, d: &RadialDensity, samples: usize) -> Result<f64> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..samples.max(2) {
        let theta = PI * i as f64 / (samples.max(2) - 1) as f64;
        let hf = profile_mean_curvature(p, d, theta)?.hf;
        lo = lo.min(hf);
        hi = hi.max(hf);
    }
    Ok(hi - lo)
}

/// Coefficient-space derivatives of the weighted functionals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientReport {
    pub grad_pf: Vec<f64>,
    pub grad_vf: Vec<f64>,
    /// Multiplier of the orthogonal projection onto `grad_vf`'s complement.
    pub mu: f64,
    /// `grad_pf - mu grad_vf`.
    pub projected: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Derivatives of `Pf` and `Vf` with respect to the mode coefficients.
pub fn gradient(p: &PolarProfile, d: &RadialDensity) -> Result<GradientReport> {
    p.validate()?;
    let modes = p.modes();
    let n = p.n;
    let k = (n - 2) as i32;
    let tol = Tolerance {
        abs: 1e-14,
        rel: 1e-12,
    };
    let (vals, _) = integrate_vec(
        |theta, out| {
            let rho = p.rho(theta);
            let rp = p.rho_prime(theta);
            let (sh, ch) = (rho.sinh(), rho.cosh());
            let e = d.h(rho).exp();
            let st = theta.sin();
            let side = (sh * st).powi(k);
            let w = (rp * rp + sh * sh).sqrt();
            let l = e * side * w;
            let coth_term = if k > 0 { k as f64 * ch / sh } else { 0.0 };
            let dl_drho = (d.dh(rho) + coth_term) * l + e * side * sh * ch / w;
            let dl_drp = e * side * rp / w;
            let dv = st.powi(k) * e * sh.powi(k + 1);
            for m in 0..modes {
                let (s, c) = (m as f64 * theta).sin_cos();
                out[m] = dl_drho * c - m as f64 * s * dl_drp;
                out[modes + m] = dv * c;
            }
        },
        2 * modes,
        0.0,
        PI,
        tol,
    );
    let omega = sphere_area(n - 2);
    let grad_pf: Vec<f64> = vals[..modes].iter().map(|v| omega * v).collect();
    let grad_vf: Vec<f64> = vals[modes..].iter().map(|v| omega * v).collect();
    let vv = dot(&grad_vf, &grad_vf);
    assert!(vv > 0.0, "volume gradient vanishes for a positive profile");
    let mu = dot(&grad_pf, &grad_vf) / vv;
    let projected = grad_pf.iter().zip(&grad_vf).map(|(a, b)| a - mu * b).collect();
    Ok(GradientReport {
        grad_pf,
        grad_vf,
        mu,
        projected,
    })
}

/// `ball`-like start: radius `tau` plus a seeded perturbation with Gaussian
/// mode coefficients of size `1 / k^2`, rescaled to sup-norm `amplitude`.
pub fn random_perturbation(
    n: u32,
    tau: f64,
    modes: usize,
    amplitude: f64,
    seed: u64,
) -> Result<PolarProfile> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c: Vec<f64> = (0..=modes)
        .map(|k| {
            let z: f64 = StandardNormal.sample(&mut rng);
            if k == 0 {
                0.0
            } else {
                z / (k * k) as f64
            }
        })
        .collect();
    let bump = PolarProfile {
        mode_coeffs: c.clone(),
        n,
    };
    let sup = (0..=2048)
        .map(|i| bump.rho(PI * i as f64 / 2048.0).abs())
        .fold(0.0, f64::max);
    if sup > 0.0 {
        c.iter_mut().for_each(|a| *a *= amplitude / sup);
    }
    c[0] = tau;
    PolarProfile::new(c, n)
}

/// Cosine coefficients `a_0..a_modes` of `p` on `[0, pi]`.
pub fn fit_cosine_modes<P: Profile + ?Sized>(p: &P, n: u32, modes: usize) -> Result<PolarProfile> {
    let (vals, _) = integrate_vec(
        |theta, out| {
            let r = p.rho(theta);
            for (k, o) in out.iter_mut().enumerate() {
                *o = r * (k as f64 * theta).cos();
            }
        },
        modes + 1,
        0.0,
        PI,
        Tolerance {
            abs: 1e-14,
            rel: 1e-13,
        },
    );
    let c = vals
        .iter()
        .enumerate()
        .map(|(k, v)| if k == 0 { v / PI } else { 2.0 * v / PI })
        .collect();
    PolarProfile::new(c, n)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizeConfig {
    pub n: u32,
    pub density: RadialDensity,
    pub target_volume: f64,
    #[serde(default = "default_modes")]
    pub modes: usize,
    /// Starting profile; when absent, a seeded 0.2-amplitude perturbation of
    /// the ball of the target volume.
    #[serde(default)]
    pub init: Option<PolarProfile>,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_grad_tol")]
    pub grad_tol: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_modes() -> usize {
    16
}

fn default_max_iters() -> usize {
    500
}

fn default_grad_tol() -> f64 {
    1e-7
}

pub const DEFAULT_AMPLITUDE: f64 = 0.2;

impl MinimizeConfig {
    pub fn new(n: u32, density: RadialDensity, target_volume: f64) -> Self {
        MinimizeConfig {
            n,
            density,
            target_volume,
            modes: default_modes(),
            init: None,
            max_iters: default_max_iters(),
            grad_tol: default_grad_tol(),
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.n < 2 {
            return bad(format!("dimension must be at least 2, got {}", self.n));
        }
        if !(self.target_volume > 0.0) || !self.target_volume.is_finite() {
            return bad(format!(
                "target volume must be positive, got {}",
                self.target_volume
            ));
        }
        if !(self.grad_tol > 0.0) {
            return bad(format!(
                "gradient tolerance must be positive, got {}",
                self.grad_tol
            ));
        }
        if let Some(p) = &self.init {
            p.validate()?;
            if p.n != self.n {
                return bad(format!(
                    "initial profile has dimension {}, expected {}",
                    p.n, self.n
                ));
            }
            if p.modes() > self.modes + 1 {
                return bad(format!(
                    "initial profile has {} modes, more than {}",
                    p.modes() - 1,
                    self.modes
                ));
            }
        }
        Ok(())
    }

    fn start(&self) -> Result<PolarProfile> {
        match &self.init {
            Some(p) => {
                let mut c = p.mode_coeffs.clone();
                c.resize(self.modes + 1, 0.0);
                PolarProfile::new(c, self.n)
            }
            None => {
                let tau = ball_radius_for_volume(self.n, &self.density, self.target_volume)?;
                random_perturbation(self.n, tau, self.modes, DEFAULT_AMPLITUDE, self.seed)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizeReport {
    #[serde(rename = "final")]
    pub final_profile: PolarProfile,
    #[serde(rename = "Pf_history")]
    pub pf_history: Vec<f64>,
    #[serde(rename = "Vf_drift")]
    pub vf_drift: f64,
    /// `Pf` of the result minus `Pf` of the centered ball of the target volume.
    pub deficit: f64,
    pub nonround_energy: f64,
    pub converged: bool,
    pub iterations: usize,
    pub grad_norm: f64,
    /// `max Hf - min Hf` along the final profile.
    pub hf_spread: f64,
    pub line_search_failed: bool,
}

/// Newton iteration on `a_0` for `Vf = target`.
fn project_volume(p: &mut PolarProfile, d: &RadialDensity, target: f64) -> Result<()> {
    for _ in 0..60 {
        let v = profile_functionals(p, d)?.vf;
        let resid = target - v;
        if resid.abs() <= 1e-13 * target {
            return Ok(());
        }
        let k = (p.n - 2) as i32;
        let dv0 = sphere_area(p.n - 2)
            * integrate(
                |t| {
                    let rho = p.rho(t);
                    t.sin().powi(k) * d.h(rho).exp() * rho.sinh().powi(k + 1)
                },
                0.0,
                PI,
                Tolerance::default(),
            )
            .value;
        let mut step = resid / dv0;
        loop {
            let mut c = p.mode_coeffs.clone();
            c[0] += step;
            match PolarProfile::new(c, p.n) {
                Ok(q) => {
                    *p = q;
                    break;
                }
                Err(_) if step.abs() > 1e-15 => step *= 0.5,
                Err(e) => return Err(e),
            }
        }
    }
    let v = profile_functionals(p, d)?.vf;
    if (v - target).abs() <= 1e-10 * target {
        Ok(())
    } else {
        Err(Error::Numerical(format!(
            "volume projection stalled at {v} (target {target})"
        )))
    }
}

const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 50;

/// Preconditioned projected-gradient descent of `Pf` at fixed `Vf`.
///
/// The direction is `-M (grad Pf - mu grad Vf)` with `M = diag(1 / (1 + k^2))`
/// and `mu` chosen so that it is tangent to the volume constraint to first
/// order; each trial point is moved back onto the constraint along `a_0`.
/// Step sizes come from the Barzilai-Borwein rule with Armijo backtracking.
pub fn minimize(cfg: &MinimizeConfig) -> Result<MinimizeReport> {
    cfg.validate()?;
    let d = &cfg.density;
    let target = cfg.target_volume;
    let mut p = cfg.start()?;
    project_volume(&mut p, d, target)?;
    let weights: Vec<f64> = (0..p.modes()).map(|k| 1.0 / (1.0 + (k * k) as f64)).collect();
    let precond = |g: &GradientReport| -> Vec<f64> {
        let mv: Vec<f64> = g.grad_vf.iter().zip(&weights).map(|(v, w)| v * w).collect();
        let mu = dot(&g.grad_pf, &mv) / dot(&g.grad_vf, &mv);
        g.grad_pf
            .iter()
            .zip(&g.grad_vf)
            .map(|(a, b)| a - mu * b)
            .collect()
    };
    let mut pf = profile_functionals(&p, d)?.pf;
    let mut history = vec![pf];
    let mut grad = gradient(&p, d)?;
    let mut gm = precond(&grad);
    let mut step = 1.0;
    let mut converged = false;
    let mut failed = false;
    let mut iterations = 0;
    while iterations < cfg.max_iters {
        if dot(&grad.projected, &grad.projected).sqrt() < cfg.grad_tol {
            converged = true;
            break;
        }
        let dir: Vec<f64> = gm.iter().zip(&weights).map(|(g, w)| -g * w).collect();
        let slope = dot(&grad.grad_pf, &dir);
        if !(slope < 0.0) {
            converged = true;
            break;
        }
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let c: Vec<f64> = p
                .mode_coeffs
                .iter()
                .zip(&dir)
                .map(|(a, s)| a + step * s)
                .collect();
            let trial = PolarProfile::new(c, p.n).and_then(|mut q| {
                project_volume(&mut q, d, target)?;
                let f = profile_functionals(&q, d)?.pf;
                Ok((q, f))
            });
            match trial {
                Ok((q, f)) if f <= pf + ARMIJO * step * slope => {
                    accepted = Some((q, f));
                    break;
                }
                _ => step *= 0.5,
            }
        }
        let Some((q, f)) = accepted else {
            failed = true;
            break;
        };
        let g_new = gradient(&q, d)?;
        let gm_new = precond(&g_new);
        let s: Vec<f64> = q
            .mode_coeffs
            .iter()
            .zip(&p.mode_coeffs)
            .map(|(a, b)| a - b)
            .collect();
        let y: Vec<f64> = gm_new.iter().zip(&gm).map(|(a, b)| a - b).collect();
        let s_minv: f64 = s.iter().zip(&weights).map(|(x, w)| x * x / w).sum();
        let sy = dot(&s, &y);
        step = if sy > 0.0 {
            (s_minv / sy).clamp(1e-8, 1e8)
        } else {
            2.0 * step
        };
        p = q;
        pf = f;
        history.push(pf);
        grad = g_new;
        gm = gm_new;
        iterations += 1;
    }
    let grad_norm = dot(&grad.projected, &grad.projected).sqrt();
    if !converged && grad_norm < cfg.grad_tol {
        converged = true;
    }
    let fr = profile_functionals(&p, d)?;
    let tau = ball_radius_for_volume(p.n, d, target)?;
    let ball = ball_quantities(p.n, d, tau)?;
    Ok(MinimizeReport {
        vf_drift: (fr.vf - target).abs() / target,
        deficit: fr.pf - ball.pf,
        nonround_energy: p.nonround_energy(),
        converged,
        iterations,
        grad_norm,
        hf_spread: hf_spread(&p, d, 257)?,
        line_search_failed: failed,
        pf_history: history,
        final_profile: p,
    })
}
