use super::DiskPoint;
use num_complex::Complex64;

/// Orientation-preserving isometry of the disk with real coefficients,
/// `z -> (a z + b) / (c z + d)`. Translations along `e1` form the
/// one-parameter subgroup `[[cosh(c/2), sinh(c/2)], [sinh(c/2), cosh(c/2)]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisIsometry {
    m: [[f64; 2]; 2],
}

/// Hyperbolic translation along `e1` moving the origin to signed distance `c`.
pub fn translate_along_axis(c: f64) -> AxisIsometry {
    let (ch, sh) = ((0.5 * c).cosh(), (0.5 * c).sinh());
    AxisIsometry {
        m: [[ch, sh], [sh, ch]],
    }
}

impl AxisIsometry {
    pub fn identity() -> Self {
        AxisIsometry {
            m: [[1.0, 0.0], [0.0, 1.0]],
        }
    }

    pub fn matrix(&self) -> [[f64; 2]; 2] {
        self.m
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AxisIsometry) -> AxisIsometry {
        let a = self.m;
        let b = other.m;
        AxisIsometry {
            m: [
                [
                    a[0][0] * b[0][0] + a[0][1] * b[1][0],
                    a[0][0] * b[0][1] + a[0][1] * b[1][1],
                ],
                [
                    a[1][0] * b[0][0] + a[1][1] * b[1][0],
                    a[1][0] * b[0][1] + a[1][1] * b[1][1],
                ],
            ],
        }
    }

    pub fn inverse(&self) -> AxisIsometry {
        let [[a, b], [c, d]] = self.m;
        let det = a * d - b * c;
        AxisIsometry {
            m: [[d / det, -b / det], [-c / det, a / det]],
        }
    }

    pub(crate) fn apply_complex(&self, z: Complex64) -> DiskPoint {
        let [[a, b], [c, d]] = self.m;
        DiskPoint::from_complex((z * a + b) / (z * c + d))
    }

    pub fn apply(&self, p: &DiskPoint) -> DiskPoint {
        self.apply_complex(p.to_complex())
    }

    /// Push forward a tangent vector (Euclidean components) based at `p`.
    pub fn push(&self, p: &DiskPoint, v: [f64; 2]) -> [f64; 2] {
        let [[a, b], [c, d]] = self.m;
        let den = p.to_complex() * c + d;
        let deriv = Complex64::new(a * d - b * c, 0.0) / (den * den);
        let w = deriv * Complex64::new(v[0], v[1]);
        [w.re, w.im]
    }
}
