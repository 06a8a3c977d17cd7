use super::{
    center_c_configs, comparison_configs, comparison_identity_draws, h1_configs, run_suite,
    verify_center_c_draw, verify_comparison, verify_h1_circle, verify_leaf_angles, verify_radial_identity,
    ComparisonMode, LeafReport, SuiteReport,
};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    H1Circle,
    CenterC,
    KappaComparison,
    CircleComparison,
    NormalComparison,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::H1Circle,
        Suite::CenterC,
        Suite::KappaComparison,
        Suite::CircleComparison,
        Suite::NormalComparison,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::H1Circle => "h1_circle",
            Suite::CenterC => "center_c",
            Suite::KappaComparison => "kappa_comparison",
            Suite::CircleComparison => "circle_comparison",
            Suite::NormalComparison => "normal_comparison",
        }
    }

    /// Run `count` seeded configurations.
    pub fn run(self, count: usize, seed: u64) -> SuiteReport {
        let mode = match self {
            Suite::H1Circle => {
                let cfgs = h1_configs(count, seed);
                return run_suite(self.name(), &cfgs, |c| match verify_h1_circle(c) {
                    Ok(r) => (r.pass, r.margin),
                    Err(_) => (false, f64::NEG_INFINITY),
                });
            }
            Suite::CenterC => {
                let cfgs = center_c_configs(count, seed);
                return run_suite(self.name(), &cfgs, |c| match verify_center_c_draw(c) {
                    Ok(r) => (r.pass, r.center_x1),
                    Err(_) => (false, f64::NEG_INFINITY),
                });
            }
            Suite::KappaComparison => ComparisonMode::KappaComparison,
            Suite::CircleComparison => ComparisonMode::CircleComparison,
            Suite::NormalComparison => ComparisonMode::NormalComparison,
        };
        let cfgs = comparison_configs(mode, count, seed);
        run_suite(self.name(), &cfgs, |c| match verify_comparison(c) {
            Ok(r) => (r.pass, r.margin),
            Err(_) => (false, f64::NEG_INFINITY),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite {s:?}")))
    }
}

/// Everything `verify` reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub count: usize,
    pub suites: Vec<SuiteReport>,
    /// Worst mismatch of the trigonometric comparison-circle curvature.
    pub law_of_cosines_residual: f64,
    /// Worst mismatch of `tanh(rho) cos(beta) = tanh(s)`.
    pub radial_identity_residual: f64,
    pub leaves: LeafReport,
    pub pass: bool,
}

/// Run the selected suites with `count` configurations each, plus the
/// pointwise identity checks.
pub fn run_verify(suites: &[Suite], count: usize, seed: u64) -> VerifyReport {
    let reports: Vec<SuiteReport> = suites
        .iter()
        .enumerate()
        .map(|(i, s)| s.run(count, seed.wrapping_add(i as u64)))
        .collect();
    let law = comparison_identity_draws(count.max(500), seed);
    let radial = verify_radial_identity(count, seed);
    let leaves = verify_leaf_angles(count, seed);
    let pass = reports.iter().all(SuiteReport::all_passed) && law < 1e-9 && radial < 1e-10 && leaves.pass;
    VerifyReport {
        seed,
        count,
        suites: reports,
        law_of_cosines_residual: law,
        radial_identity_residual: radial,
        leaves,
        pass,
    }
}
