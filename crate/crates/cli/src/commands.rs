use crate::output::{write_csv, write_json, write_json_stderr};
use crate::{CliResult, Failure};
use clap::Args;
use isohyp_core::functionals::{ball_quantities, ball_radius_for_volume, PolarProfile};
use isohyp_core::generating_curve::{
    classify, lambda_for_ball, shoot as shoot_curve, Classification, Closure, ShootingConfig, TangentEvent,
    Termination,
};
use isohyp_core::hopf::{crosscheck, Field, SpaceParams};
use isohyp_core::lemma_lab::{run_verify, Suite};
use isohyp_core::optimizer::{minimize as run_minimize, MinimizeConfig, MinimizeReport};
use isohyp_core::RadialDensity;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

fn density(spec: &str) -> CliResult<RadialDensity> {
    Ok(spec.parse::<RadialDensity>()?)
}

/// `lo:hi:count`, equally spaced and inclusive.
pub fn parse_grid(spec: &str) -> CliResult<Vec<f64>> {
    let bad = || Failure::validation(format!("grid must look like lo:hi:count, got {spec:?}"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [lo, hi, count] = parts[..] else {
        return Err(bad());
    };
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let count: usize = count.trim().parse().map_err(|_| bad())?;
    if count == 0 || !lo.is_finite() || !hi.is_finite() || (count > 1 && hi <= lo) {
        return Err(bad());
    }
    Ok((0..count)
        .map(|i| {
            if count == 1 {
                lo
            } else {
                lo + (hi - lo) * i as f64 / (count - 1) as f64
            }
        })
        .collect())
}

#[derive(Args, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileArgs {
    #[arg(long, default_value_t = 3)]
    pub n: u32,
    /// Density: cosh:p, quad:c or poly:c2,c4,...
    #[arg(long, default_value = "cosh:1")]
    pub density: String,
    /// Weighted volumes, lo:hi:count.
    #[arg(long = "v-grid", default_value = "0.1:10:25")]
    pub v_grid: String,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct ProfileRow {
    v: f64,
    tau: f64,
    #[serde(rename = "Pf")]
    pf: f64,
}

pub fn profile(a: ProfileArgs) -> CliResult<()> {
    let d = density(&a.density)?;
    let grid = parse_grid(&a.v_grid)?;
    let rows: Vec<CliResult<ProfileRow>> = grid
        .par_iter()
        .map(|&v| {
            let tau = ball_radius_for_volume(a.n, &d, v)?;
            let b = ball_quantities(a.n, &d, tau)?;
            if !b.pf.is_finite() {
                return Err(Failure::numerical(format!("perimeter overflows at v = {v}")));
            }
            Ok(ProfileRow { v, tau, pf: b.pf })
        })
        .collect();
    let rows = rows.into_iter().collect::<CliResult<Vec<_>>>()?;
    write_csv(a.output.as_deref(), &rows)
}

#[derive(Args, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShootArgs {
    #[arg(long, default_value_t = 3)]
    pub n: u32,
    #[arg(long, default_value = "cosh:1")]
    pub density: String,
    /// Starting distance from the origin on the positive axis.
    #[arg(long = "tau-star", default_value_t = 1.0)]
    pub tau_star: f64,
    /// Mean curvature as a multiple of the centered ball's.
    #[arg(long = "lambda-rel", default_value_t = 1.0)]
    pub lambda_rel: f64,
    /// Absolute mean curvature; overrides --lambda-rel.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long = "max-arclength", default_value_t = 50.0)]
    pub max_arclength: f64,
    #[arg(long = "step-tol", default_value_t = 1e-13)]
    pub step_tol: f64,
    /// Tolerance on radius deviation and closing angle for a centered circle.
    #[arg(long = "classify-tol", default_value_t = 1e-6)]
    pub classify_tol: f64,
    /// Trajectory CSV; the summary goes to stdout when set, stderr otherwise.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Write the summary JSON here instead.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct ShootSummary {
    n: u32,
    density: String,
    tau_star: f64,
    lambda: f64,
    lambda_ball: f64,
    length: f64,
    termination: Termination,
    closure: Closure,
    hf_drift: f64,
    classification: Classification,
    events: Vec<TangentEvent>,
}

pub fn shoot(a: ShootArgs) -> CliResult<()> {
    let d = density(&a.density)?;
    if a.tau_star.is_nan() || a.tau_star <= 0.0 {
        return Err(Failure::validation(format!(
            "tau-star must be positive, got {}",
            a.tau_star
        )));
    }
    let lambda_ball = lambda_for_ball(a.n.max(2), &d, a.tau_star);
    let lambda = a.lambda.unwrap_or(a.lambda_rel * lambda_ball);
    let mut cfg = ShootingConfig::new(a.n, d, lambda, a.tau_star)?;
    cfg.max_arclength = a.max_arclength;
    cfg.step_tol = a.step_tol;
    cfg.validate()?;
    let traj = shoot_curve(&cfg)?;
    let summary = ShootSummary {
        n: a.n,
        density: cfg.density.to_spec_string(),
        tau_star: a.tau_star,
        lambda,
        lambda_ball,
        length: traj.length(),
        termination: traj.termination,
        closure: traj.closure,
        hf_drift: traj.hf_drift,
        classification: classify(&traj, a.classify_tol),
        events: traj.events.clone(),
    };
    write_csv(a.output.as_deref(), &traj.rows())?;
    match (&a.summary, &a.output) {
        (Some(p), _) => write_json(Some(p), &summary),
        (None, Some(_)) => write_json(None, &summary),
        (None, None) => write_json_stderr(&summary),
    }
}

#[derive(Args, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyArgs {
    /// `all` or a comma-separated list of h1_circle, center_c,
    /// kappa_comparison, circle_comparison, normal_comparison.
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Configurations per suite.
    #[arg(long, default_value_t = 200)]
    pub count: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn parse_suites(spec: &str) -> CliResult<Vec<Suite>> {
    if spec.trim() == "all" {
        return Ok(Suite::ALL.to_vec());
    }
    spec.split(',').map(|s| Ok(s.trim().parse::<Suite>()?)).collect()
}

pub fn verify(a: VerifyArgs) -> CliResult<()> {
    let suites = parse_suites(&a.suite)?;
    if a.count == 0 {
        return Err(Failure::validation("count must be positive"));
    }
    let report = run_verify(&suites, a.count, a.seed);
    write_json(a.output.as_deref(), &report)
}

#[derive(Args, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinimizeArgs {
    #[arg(long, default_value_t = 3)]
    pub n: u32,
    #[arg(long, default_value = "cosh:1")]
    pub density: String,
    /// Target weighted volume; defaults to the ball of radius --tau.
    #[arg(long = "target-volume")]
    pub target_volume: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    /// Highest cosine mode.
    #[arg(long, default_value_t = 16)]
    pub modes: usize,
    #[arg(long = "max-iters", default_value_t = 500)]
    pub max_iters: usize,
    #[arg(long = "grad-tol", default_value_t = 1e-7)]
    pub grad_tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Independent runs with seeds seed, seed + 1, ...
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
    /// Starting profile (config file only); replaces the random start.
    #[arg(skip)]
    pub init: Option<PolarProfile>,
    /// Report JSON.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// CSV of the perimeter after each accepted step.
    #[arg(long)]
    pub history: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct HistoryRow {
    run: usize,
    seed: u64,
    iteration: usize,
    #[serde(rename = "Pf")]
    pf: f64,
}

pub fn minimize(a: MinimizeArgs) -> CliResult<()> {
    let d = density(&a.density)?;
    if a.runs == 0 {
        return Err(Failure::validation("runs must be positive"));
    }
    let target = match a.target_volume {
        Some(v) => v,
        None => ball_quantities(a.n, &d, a.tau)?.vf,
    };
    let base = MinimizeConfig {
        n: a.n,
        density: d,
        target_volume: target,
        modes: a.modes,
        init: a.init.clone(),
        max_iters: a.max_iters,
        grad_tol: a.grad_tol,
        seed: a.seed,
    };
    base.validate()?;
    let reports: Vec<CliResult<MinimizeReport>> = (0..a.runs)
        .into_par_iter()
        .map(|i| {
            let mut cfg = base.clone();
            cfg.seed = a.seed + i as u64;
            Ok(run_minimize(&cfg)?)
        })
        .collect();
    let reports = reports.into_iter().collect::<CliResult<Vec<_>>>()?;
    if let Some(path) = &a.history {
        let rows: Vec<HistoryRow> = reports
            .iter()
            .enumerate()
            .flat_map(|(run, r)| {
                r.pf_history
                    .iter()
                    .enumerate()
                    .map(move |(iteration, &pf)| HistoryRow {
                        run,
                        seed: a.seed + run as u64,
                        iteration,
                        pf,
                    })
            })
            .collect();
        write_csv(Some(path), &rows)?;
    }
    if reports.len() == 1 {
        write_json(a.output.as_deref(), &reports[0])
    } else {
        write_json(a.output.as_deref(), &reports)
    }
}

#[derive(Args, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HopfArgs {
    /// Comma-separated field:m pairs.
    #[arg(long, default_value = "C:2,C:3,H:2,O:2")]
    pub spaces: String,
    /// Comma-separated ball radii.
    #[arg(long, default_value = "0.5,1,2")]
    pub tau: String,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn parse_spaces(spec: &str) -> CliResult<Vec<SpaceParams>> {
    spec.split(',')
        .map(|item| {
            let (f, m) = item
                .trim()
                .split_once(':')
                .ok_or_else(|| Failure::validation(format!("space must look like C:2, got {item:?}")))?;
            let field: Field = f.parse()?;
            let m: u32 = m
                .parse()
                .map_err(|_| Failure::validation(format!("bad quaternionic dimension in {item:?}")))?;
            Ok(SpaceParams::new(field, m)?)
        })
        .collect()
}

fn parse_list(spec: &str) -> CliResult<Vec<f64>> {
    spec.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Failure::validation(format!("not a number: {x:?}")))
        })
        .collect()
}

pub fn hopf(a: HopfArgs) -> CliResult<()> {
    let spaces = parse_spaces(&a.spaces)?;
    let taus = parse_list(&a.tau)?;
    let cases: Vec<(SpaceParams, f64)> = spaces
        .iter()
        .flat_map(|s| taus.iter().map(move |&t| (*s, t)))
        .collect();
    let rows: Vec<CliResult<_>> = cases.par_iter().map(|(s, t)| Ok(crosscheck(s, *t)?)).collect();
    let rows = rows.into_iter().collect::<CliResult<Vec<_>>>()?;
    write_csv(a.output.as_deref(), &rows)
}
