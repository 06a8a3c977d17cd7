//! Gamma function and unit-sphere areas.

use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function.
///
/// Positive integers and half-integers are evaluated exactly through the
/// factorial and `sqrt(pi)` recursions; everything else goes through the
/// Lanczos approximation (g = 7, nine terms) with reflection for `x < 0.5`.
pub fn gamma(x: f64) -> f64 {
    if x > 0.0 && x <= 171.0 && (2.0 * x).fract() == 0.0 {
        return gamma_half_integer(x);
    }
    lanczos_gamma(x)
}

fn gamma_half_integer(x: f64) -> f64 {
    // x = k or x = k + 1/2
    let mut acc;
    let mut y;
    if x.fract() == 0.0 {
        acc = 1.0;
        y = 1.0;
    } else {
        acc = PI.sqrt();
        y = 0.5;
    }
    while y < x {
        acc *= y;
        y += 1.0;
    }
    acc
}

pub(crate) fn lanczos_gamma(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * lanczos_gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = LANCZOS_COEFFS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// Area of the unit sphere `S^k` in `R^{k+1}`: `2 pi^{(k+1)/2} / Gamma((k+1)/2)`.
///
/// `sphere_area(0) == 2` (two points), `sphere_area(1) == 2 pi`.
pub fn sphere_area(k: u32) -> f64 {
    let half = (k as f64 + 1.0) / 2.0;
    2.0 * PI.powf(half) / gamma(half)
}
