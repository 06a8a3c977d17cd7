//! Radial log-convex densities `f = exp(h(d_H(o, x)))`.
//!
//! `h(0)` is not normalized: every comparison in the crate is either a ratio
//! or a difference of functionals under the same density.

use crate::error::{Error, Result};
use crate::hyperbolic::DiskPoint;
use serde::{Deserialize, Serialize};
use std::str::FromStr;

/// Even log-density `h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params")]
pub enum RadialDensity {
    /// `h(s) = p ln cosh s`.
    CoshPower(u32),
    /// `h(s) = sum_k c_k s^{2k}`, coefficients listed from `s^2` upwards.
    EvenPolynomial(Vec<f64>),
    /// `h(s) = c s^2`.
    ScaledQuadratic(f64),
}

/// Outcome of [`RadialDensity::validate_strict`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StrictnessReport {
    pub pass: bool,
    /// Minimum sampled `h''`.
    pub margin: f64,
    /// Where the minimum was attained.
    pub argmin: f64,
}

fn ln_cosh(s: f64) -> f64 {
    let a = s.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

fn sech2(s: f64) -> f64 {
    let c = s.cosh();
    1.0 / (c * c)
}

impl RadialDensity {
    pub fn cosh_power(p: u32) -> Self {
        RadialDensity::CoshPower(p)
    }

    /// The reference density `h = 0`.
    pub fn flat() -> Self {
        RadialDensity::EvenPolynomial(Vec::new())
    }

    /// `h^{(order)}(s)` for `order` in `0..=3`.
    pub fn derivative(&self, s: f64, order: u8) -> f64 {
        match self {
            RadialDensity::CoshPower(p) => {
                let p = *p as f64;
                match order {
                    0 => p * ln_cosh(s),
                    1 => p * s.tanh(),
                    2 => p * sech2(s),
                    3 => -2.0 * p * sech2(s) * s.tanh(),
                    _ => panic!("derivative order {order} not supported"),
                }
            }
            RadialDensity::ScaledQuadratic(c) => match order {
                0 => c * s * s,
                1 => 2.0 * c * s,
                2 => 2.0 * c,
                3 => 0.0,
                _ => panic!("derivative order {order} not supported"),
            },
            RadialDensity::EvenPolynomial(coeffs) => {
                assert!(order <= 3, "derivative order {order} not supported");
                let mut acc = 0.0;
                for (k, c) in coeffs.iter().enumerate() {
                    let power = 2 * (k as i32 + 1);
                    let mut factor = 1.0;
                    for j in 0..order as i32 {
                        factor *= (power - j) as f64;
                    }
                    let e = power - order as i32;
                    if factor != 0.0 {
                        acc += c * factor * s.powi(e);
                    }
                }
                acc
            }
        }
    }

    pub fn h(&self, s: f64) -> f64 {
        self.derivative(s, 0)
    }

    pub fn dh(&self, s: f64) -> f64 {
        self.derivative(s, 1)
    }

    pub fn d2h(&self, s: f64) -> f64 {
        self.derivative(s, 2)
    }

    /// The weight `exp(h(rho))` at hyperbolic distance `rho` from the base point.
    pub fn weight_at_radius(&self, rho: f64) -> f64 {
        self.h(rho).exp()
    }

    /// `f(p) = exp(h(d_H(o, p)))`.
    pub fn weight_at(&self, p: &DiskPoint) -> f64 {
        self.weight_at_radius(p.radius())
    }

    /// Strict convexity check: `h'' > 0` on the grid `0, 1e-3, ..., 10`.
    pub fn validate_strict(&self) -> StrictnessReport {
        let mut margin = f64::INFINITY;
        let mut argmin = 0.0;
        for i in 0..=10_000 {
            let s = i as f64 * 1e-3;
            let v = self.d2h(s);
            if v < margin || v.is_nan() {
                margin = v;
                argmin = s;
            }
        }
        StrictnessReport {
            pass: margin > 0.0,
            margin,
            argmin,
        }
    }

    /// Parse the `{"family": name, "params": [numbers]}` record.
    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let family = value
            .get("family")
            .and_then(|f| f.as_str())
            .ok_or_else(|| Error::InvalidDensity("missing \"family\"".into()))?;
        let params: Vec<f64> = match value.get("params") {
            None => Vec::new(),
            Some(serde_json::Value::Array(a)) => a
                .iter()
                .map(|v| {
                    v.as_f64()
                        .ok_or_else(|| Error::InvalidDensity(format!("non-numeric param {v}")))
                })
                .collect::<Result<_>>()?,
            Some(v) => vec![v
                .as_f64()
                .ok_or_else(|| Error::InvalidDensity(format!("non-numeric params {v}")))?],
        };
        Self::from_parts(family, &params)
    }

    fn from_parts(family: &str, params: &[f64]) -> Result<Self> {
        let single = |name: &str| -> Result<f64> {
            match params {
                [x] if x.is_finite() => Ok(*x),
                _ => Err(Error::InvalidDensity(format!(
                    "{name} takes exactly one finite parameter"
                ))),
            }
        };
        match family.to_ascii_lowercase().as_str() {
            "cosh" | "coshpower" | "cosh_power" => {
                let p = single("cosh")?;
                if p < 0.0 || p.fract() != 0.0 || p > u32::MAX as f64 {
                    return Err(Error::InvalidDensity(format!(
                        "cosh exponent must be a non-negative integer, got {p}"
                    )));
                }
                Ok(RadialDensity::CoshPower(p as u32))
            }
            "quad" | "scaledquadratic" | "scaled_quadratic" => {
                Ok(RadialDensity::ScaledQuadratic(single("quad")?))
            }
            "poly" | "evenpolynomial" | "even_polynomial" => {
                if params.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidDensity("non-finite coefficient".into()));
                }
                Ok(RadialDensity::EvenPolynomial(params.to_vec()))
            }
            other => Err(Error::InvalidDensity(format!("unknown family {other:?}"))),
        }
    }

    /// Mini-syntax: `cosh:p`, `quad:c`, `poly:c2,c4,...`.
    pub fn to_spec_string(&self) -> String {
        match self {
            RadialDensity::CoshPower(p) => format!("cosh:{p}"),
            RadialDensity::ScaledQuadratic(c) => format!("quad:{c}"),
            RadialDensity::EvenPolynomial(cs) => format!(
                "poly:{}",
                cs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
            ),
        }
    }
}

impl FromStr for RadialDensity {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let (family, rest) = spec
            .split_once(':')
            .ok_or_else(|| Error::InvalidDensity(format!("expected family:params, got {spec:?}")))?;
        let params = if rest.trim().is_empty() {
            Vec::new()
        } else {
            rest.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::InvalidDensity(format!("{x:?}: {e}")))
                })
                .collect::<Result<Vec<_>>>()?
        };
        Self::from_parts(family, &params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn families() -> Vec<RadialDensity> {
        vec![
            RadialDensity::CoshPower(1),
            RadialDensity::CoshPower(3),
            RadialDensity::CoshPower(7),
            RadialDensity::ScaledQuadratic(0.1),
            RadialDensity::EvenPolynomial(vec![0.2, 0.01, 0.001]),
        ]
    }

    #[test]
    fn derivative_examples() {
        let d = RadialDensity::CoshPower(1);
        assert_eq!(d.derivative(0.0, 1), 0.0);
        assert_abs_diff_eq!(d.derivative(3f64.ln(), 1), 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(
            RadialDensity::ScaledQuadratic(0.1).derivative(2.0, 2),
            0.2,
            epsilon = 1e-15
        );
    }

    #[test]
    fn evenness_and_zero_slope() {
        for d in families() {
            assert_eq!(d.dh(0.0), 0.0);
            for s in [0.3, 1.7, 4.2] {
                assert_eq!(d.h(s), d.h(-s));
            }
        }
    }

    #[test]
    fn weight_examples() {
        let p = DiskPoint::new(0.5, 0.0).unwrap();
        assert_relative_eq!(
            RadialDensity::CoshPower(1).weight_at(&p),
            5.0 / 3.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            RadialDensity::CoshPower(3).weight_at(&p),
            (5.0f64 / 3.0).powi(3),
            max_relative = 1e-14
        );
        for d in families() {
            assert_eq!(d.weight_at(&DiskPoint::ORIGIN), d.h(0.0).exp());
        }
    }

    #[test]
    fn strictness() {
        let r = RadialDensity::CoshPower(1).validate_strict();
        assert!(r.pass);
        assert_relative_eq!(r.margin, 1.0 / 10f64.cosh().powi(2), max_relative = 1e-12);
        assert_eq!(r.argmin, 10.0);
        assert!(!RadialDensity::ScaledQuadratic(0.0).validate_strict().pass);
        assert!(!RadialDensity::EvenPolynomial(vec![-0.5]).validate_strict().pass);
        assert!(!RadialDensity::flat().validate_strict().pass);
        assert!(!RadialDensity::CoshPower(0).validate_strict().pass);
    }

    #[test]
    fn parses_spec_strings_and_json() {
        assert_eq!(
            "cosh:3".parse::<RadialDensity>().unwrap(),
            RadialDensity::CoshPower(3)
        );
        assert_eq!(
            "quad:0.1".parse::<RadialDensity>().unwrap(),
            RadialDensity::ScaledQuadratic(0.1)
        );
        assert_eq!(
            "poly:0.1,0.01".parse::<RadialDensity>().unwrap(),
            RadialDensity::EvenPolynomial(vec![0.1, 0.01])
        );
        assert!("cosh:1.5".parse::<RadialDensity>().is_err());
        assert!("banana:1".parse::<RadialDensity>().is_err());
        let v = serde_json::json!({"family": "CoshPower", "params": [7]});
        assert_eq!(RadialDensity::from_json(&v).unwrap(), RadialDensity::CoshPower(7));
        let d = RadialDensity::EvenPolynomial(vec![0.5, 0.25]);
        assert_eq!(d.to_spec_string().parse::<RadialDensity>().unwrap(), d);
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let step = 1e-5;
        for d in families() {
            for i in 0..50 {
                let s = 0.1 + i as f64 * 0.1;
                for order in 1..=3u8 {
                    let fd = (d.derivative(s + step, order - 1) - d.derivative(s - step, order - 1))
                        / (2.0 * step);
                    let exact = d.derivative(s, order);
                    let scale = exact.abs().max(1e-3);
                    assert!(
                        (fd - exact).abs() / scale < 1e-6,
                        "{d:?} order {order} at {s}: {fd} vs {exact}"
                    );
                }
            }
        }
    }

    proptest! {
        #[test]
        fn weight_is_rotation_invariant(r in 0.0f64..0.95, a in 0.0f64..6.3, rot in -7.0f64..7.0, p in 1u32..8) {
            let q = DiskPoint::new(r * a.cos(), r * a.sin()).unwrap();
            let d = RadialDensity::CoshPower(p);
            let w0 = d.weight_at(&q);
            let w1 = d.weight_at(&q.rotate(rot));
            prop_assert!((w0 - w1).abs() <= 1e-12 * w0);
        }
    }
}
