use super::DiskPoint;
use num_complex::Complex64;

/// Orthonormal frames at a point: `{X, X⊥}` adapted to the hypercycle
/// foliation about `e1`, and the radial frame `N` (undefined at the origin).
///
/// `X = ∇s` for the signed distance `s` to the axis, `X⊥` is its
/// counterclockwise rotation. `theta` is the oriented angle of `N` measured
/// from `X⊥` towards `X`, in `(-π, π]`. `k1 = tanh(s)` is the curvature of the
/// equidistant hypercycle through the point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FramePacket {
    pub x: [f64; 2],
    pub x_perp: [f64; 2],
    pub n: Option<[f64; 2]>,
    pub theta: Option<f64>,
    pub k1: f64,
}

/// Euclidean unit vector along `X` at `p`: the direction of `i (1 - z^2)`.
fn unit_x(p: &DiskPoint) -> [f64; 2] {
    let z = p.to_complex();
    let w = Complex64::i() * (Complex64::new(1.0, 0.0) - z * z);
    let m = w.norm();
    [w.re / m, w.im / m]
}

pub fn frame_at(p: &DiskPoint) -> FramePacket {
    let half = 0.5 * (1.0 - p.norm_sq());
    let ex = unit_x(p);
    let ex_perp = [-ex[1], ex[0]];
    let r = p.norm();
    let (n, theta) = if r > 0.0 {
        let en = [p.x1() / r, p.x2() / r];
        let along_x = en[0] * ex[0] + en[1] * ex[1];
        let along_perp = en[0] * ex_perp[0] + en[1] * ex_perp[1];
        (
            Some([half * en[0], half * en[1]]),
            Some(along_x.atan2(along_perp)),
        )
    } else {
        (None, None)
    };
    let s = (2.0 * p.x2() / (1.0 - p.norm_sq())).asinh();
    FramePacket {
        x: [half * ex[0], half * ex[1]],
        x_perp: [half * ex_perp[0], half * ex_perp[1]],
        n,
        theta,
        k1: s.tanh(),
    }
}

/// `g_H(u, v)` at `p`.
pub fn metric_dot(p: &DiskPoint, u: [f64; 2], v: [f64; 2]) -> f64 {
    let l = p.conformal_factor();
    l * l * (u[0] * v[0] + u[1] * v[1])
}

pub fn metric_norm(p: &DiskPoint, u: [f64; 2]) -> f64 {
    metric_dot(p, u, u).sqrt()
}

/// Oriented angle of the tangent `v` (any length) from `X⊥` towards `X`, in `(-π, π]`.
pub fn angle_from_x_perp(p: &DiskPoint, v: [f64; 2]) -> f64 {
    let ex = unit_x(p);
    let along_x = v[0] * ex[0] + v[1] * ex[1];
    let along_perp = -v[0] * ex[1] + v[1] * ex[0];
    along_x.atan2(along_perp)
}

/// Hyperbolic unit vector at `p` making angle `alpha` with `X⊥`:
/// `cos(alpha) X⊥ + sin(alpha) X`.
pub fn direction_at_angle(p: &DiskPoint, alpha: f64) -> [f64; 2] {
    let f = frame_at(p);
    let (s, c) = alpha.sin_cos();
    [c * f.x_perp[0] + s * f.x[0], c * f.x_perp[1] + s * f.x[1]]
}
