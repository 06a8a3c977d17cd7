//! Dormand–Prince 5(4) with Hairer's dense output.

use serde::{Deserialize, Serialize};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Continuous extension over one accepted step `[u0, u0 + h]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DenseSegment<const N: usize> {
    pub u0: f64,
    pub h: f64,
    #[serde(with = "coeff_serde")]
    pub r: [[f64; N]; 5],
}

mod coeff_serde {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer, const N: usize>(r: &[[f64; N]; 5], s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<Vec<f64>> = r.iter().map(|row| row.to_vec()).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>, const N: usize>(d: D) -> Result<[[f64; N]; 5], D::Error> {
        let v: Vec<Vec<f64>> = Vec::deserialize(d)?;
        let mut out = [[0.0; N]; 5];
        if v.len() != 5 || v.iter().any(|row| row.len() != N) {
            return Err(serde::de::Error::custom("bad dense coefficient shape"));
        }
        for (dst, src) in out.iter_mut().zip(&v) {
            dst.copy_from_slice(src);
        }
        Ok(out)
    }
}

impl<const N: usize> DenseSegment<N> {
    /// Cubic Hermite segment through `(y0, f0)` and `(y1, f1)`.
    pub fn hermite(u0: f64, h: f64, y0: [f64; N], y1: [f64; N], f0: [f64; N], f1: [f64; N]) -> Self {
        let mut r = [[0.0; N]; 5];
        for i in 0..N {
            let dy = y1[i] - y0[i];
            let b = h * f0[i] - dy;
            r[0][i] = y0[i];
            r[1][i] = dy;
            r[2][i] = b;
            r[3][i] = dy - h * f1[i] - b;
        }
        DenseSegment { u0, h, r }
    }

    pub fn u1(&self) -> f64 {
        self.u0 + self.h
    }

    pub fn eval(&self, u: f64) -> [f64; N] {
        let th = (u - self.u0) / self.h;
        let th1 = 1.0 - th;
        let mut y = [0.0; N];
        for i in 0..N {
            let r = &self.r;
            y[i] = r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
        }
        y
    }

    pub fn start(&self) -> [f64; N] {
        self.r[0]
    }

    pub fn end(&self) -> [f64; N] {
        std::array::from_fn(|i| self.r[0][i] + self.r[1][i])
    }
}

/// Step-size controller settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dopri5Options {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
}

impl Default for Dopri5Options {
    fn default() -> Self {
        Dopri5Options {
            rtol: 1e-10,
            atol: 1e-10,
            h_init: 1e-3,
            h_min: 1e-14,
            h_max: 0.05,
        }
    }
}

/// An accepted step.
#[derive(Debug, Clone, Copy)]
pub struct Accepted<const N: usize> {
    pub u: f64,
    pub y: [f64; N],
    pub f: [f64; N],
    pub segment: DenseSegment<N>,
}

/// Why the stepper gave up.
#[derive(Debug, Clone, PartialEq)]
pub enum StepFailure {
    /// Step size fell below `h_min`; `reason` is the last right-hand-side error, if any.
    Underflow { u: f64, reason: Option<String> },
}

/// Adaptive stepper. The right-hand side may refuse a state (`Err`), which is
/// treated like a rejected step.
pub struct Dopri5<const N: usize> {
    opts: Dopri5Options,
    h: f64,
    u: f64,
    y: [f64; N],
    f: [f64; N],
}

fn axpy<const N: usize>(y: &[f64; N], terms: &[(f64, &[f64; N])], h: f64) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] += h * acc;
    }
    out
}

impl<const N: usize> Dopri5<N> {
    pub fn new<F>(rhs: &mut F, u0: f64, y0: [f64; N], opts: Dopri5Options) -> Result<Self, String>
    where
        F: FnMut(f64, &[f64; N]) -> Result<[f64; N], String>,
    {
        let f = rhs(u0, &y0)?;
        Ok(Dopri5 {
            opts,
            h: opts.h_init.min(opts.h_max),
            u: u0,
            y: y0,
            f,
        })
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn y(&self) -> [f64; N] {
        self.y
    }

    /// Take one accepted step, never going past `u_end`.
    pub fn step<F>(&mut self, rhs: &mut F, u_end: f64) -> Result<Accepted<N>, StepFailure>
    where
        F: FnMut(f64, &[f64; N]) -> Result<[f64; N], String>,
    {
        let mut last_reason = None;
        loop {
            let mut h = self.h.min(self.opts.h_max);
            let clipped = self.u + h >= u_end;
            if clipped {
                h = u_end - self.u;
            }
            if h < self.opts.h_min && !clipped {
                return Err(StepFailure::Underflow {
                    u: self.u,
                    reason: last_reason,
                });
            }
            match self.attempt(rhs, h) {
                Ok((y1, f1, err, seg)) => {
                    let fac = if err == 0.0 {
                        5.0
                    } else {
                        (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                    };
                    if err <= 1.0 {
                        self.u = if clipped { u_end } else { self.u + h };
                        self.y = y1;
                        self.f = f1;
                        if !clipped || fac < 1.0 {
                            self.h = h * fac;
                        }
                        return Ok(Accepted {
                            u: self.u,
                            y: y1,
                            f: f1,
                            segment: seg,
                        });
                    }
                    self.h = h * fac.min(1.0);
                }
                Err(reason) => {
                    last_reason = Some(reason);
                    self.h = 0.25 * h;
                }
            }
            if self.h < self.opts.h_min {
                return Err(StepFailure::Underflow {
                    u: self.u,
                    reason: last_reason,
                });
            }
        }
    }

    #[allow(clippy::type_complexity)]
    fn attempt<F>(&self, rhs: &mut F, h: f64) -> Result<([f64; N], [f64; N], f64, DenseSegment<N>), String>
    where
        F: FnMut(f64, &[f64; N]) -> Result<[f64; N], String>,
    {
        let (u, y, k1) = (self.u, &self.y, &self.f);
        let k2 = rhs(u + C2 * h, &axpy(y, &[(A21, k1)], h))?;
        let k3 = rhs(u + C3 * h, &axpy(y, &[(A31, k1), (A32, &k2)], h))?;
        let k4 = rhs(u + C4 * h, &axpy(y, &[(A41, k1), (A42, &k2), (A43, &k3)], h))?;
        let k5 = rhs(
            u + C5 * h,
            &axpy(y, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)], h),
        )?;
        let k6 = rhs(
            u + h,
            &axpy(y, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], h),
        )?;
        let y1 = axpy(y, &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)], h);
        let k7 = rhs(u + h, &y1)?;
        let mut err = 0.0;
        let mut seg = DenseSegment {
            u0: u,
            h,
            r: [[0.0; N]; 5],
        };
        for i in 0..N {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = self.opts.atol + self.opts.rtol * y[i].abs().max(y1[i].abs());
            err += (e / sc).powi(2);
            let dy = y1[i] - y[i];
            let b = h * k1[i] - dy;
            seg.r[0][i] = y[i];
            seg.r[1][i] = dy;
            seg.r[2][i] = b;
            seg.r[3][i] = dy - h * k7[i] - b;
            seg.r[4][i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
        }
        let err = (err / N as f64).sqrt();
        if !err.is_finite() || y1.iter().any(|v| !v.is_finite()) {
            return Err("non-finite step".into());
        }
        Ok((y1, k7, err, seg))
    }
}

/// Locate a root of `g` on a segment where `g` changes sign, by bisection to `tol` in `u`.
pub fn bisect_root<const N: usize, G: Fn(&[f64; N]) -> f64>(
    seg: &DenseSegment<N>,
    mut lo: f64,
    mut hi: f64,
    g: G,
    tol: f64,
) -> f64 {
    let mut glo = g(&seg.eval(lo));
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let gm = g(&seg.eval(mid));
        if gm == 0.0 {
            return mid;
        }
        if (gm < 0.0) == (glo < 0.0) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
