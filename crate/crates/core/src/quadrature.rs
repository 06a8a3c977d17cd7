//! Globally adaptive Gauss–Kronrod (G7/K15) quadrature.
//!
//! The panel with the largest error estimate is bisected until the summed
//! estimate drops below `max(abs_tol, rel_tol * |I|)`. The error estimate of a
//! panel is `|K15 - G7|`, which is pessimistic for smooth integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_PANELS: usize = 4000;

/// Integration tolerances.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-12,
            rel: 1e-13,
        }
    }
}

/// Value and error estimate of an integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Integrate a scalar function over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Integral {
    if a == b {
        return Integral {
            value: 0.0,
            error: 0.0,
            panels: 0,
        };
    }
    let (v, e) = gk15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel {
        a,
        b,
        value: v,
        error: e,
    });
    let mut total = v;
    let mut err = e;
    while err > tol.abs.max(tol.rel * total.abs()) && heap.len() < MAX_PANELS {
        let worst = heap.pop().expect("heap is never empty");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk15(&mut f, worst.a, m);
        let (v2, e2) = gk15(&mut f, m, worst.b);
        total += v1 + v2 - worst.value;
        err += e1 + e2 - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: m,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: m,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
    // Re-sum in interval order so the result does not depend on the
    // accumulated update history.
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = panels.iter().map(|p| p.value).sum();
    let error = panels.iter().map(|p| p.error).sum();
    Integral {
        value,
        error,
        panels: panels.len(),
    }
}

struct VecPanel {
    a: f64,
    b: f64,
    value: Vec<f64>,
    error: f64,
}

fn gk15_vec<F: FnMut(f64, &mut [f64])>(
    f: &mut F,
    a: f64,
    b: f64,
    buf: &mut [f64],
    buf2: &mut [f64],
) -> (Vec<f64>, f64) {
    let dim = buf.len();
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = vec![0.0; dim];
    let mut g = vec![0.0; dim];
    f(c, buf);
    for i in 0..dim {
        k[i] = WGK[7] * buf[i];
        g[i] = WG[3] * buf[i];
    }
    for j in 0..7 {
        let dx = h * XGK[j];
        f(c - dx, buf);
        f(c + dx, buf2);
        for i in 0..dim {
            let s = buf[i] + buf2[i];
            k[i] += WGK[j] * s;
            if j % 2 == 1 {
                g[i] += WG[j / 2] * s;
            }
        }
    }
    let mut err = 0.0f64;
    for i in 0..dim {
        err = err.max(((k[i] - g[i]) * h).abs());
        k[i] *= h;
    }
    (k, err)
}

/// Integrate a vector-valued function over `[a, b]`; `f(x, out)` fills `out`.
/// The error is measured in the max norm.
pub fn integrate_vec<F: FnMut(f64, &mut [f64])>(
    mut f: F,
    dim: usize,
    a: f64,
    b: f64,
    tol: Tolerance,
) -> (Vec<f64>, f64) {
    let mut buf = vec![0.0; dim];
    let mut buf2 = vec![0.0; dim];
    let (v, e) = gk15_vec(&mut f, a, b, &mut buf, &mut buf2);
    let mut panels = vec![VecPanel {
        a,
        b,
        value: v,
        error: e,
    }];
    loop {
        let err: f64 = panels.iter().map(|p| p.error).sum();
        let norm = (0..dim)
            .map(|i| panels.iter().map(|p| p.value[i]).sum::<f64>().abs())
            .fold(0.0, f64::max);
        if err <= tol.abs.max(tol.rel * norm) || panels.len() >= MAX_PANELS {
            break;
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("non-empty");
        let worst = panels.swap_remove(idx);
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            panels.push(worst);
            break;
        }
        let (v1, e1) = gk15_vec(&mut f, worst.a, m, &mut buf, &mut buf2);
        let (v2, e2) = gk15_vec(&mut f, m, worst.b, &mut buf, &mut buf2);
        panels.push(VecPanel {
            a: worst.a,
            b: m,
            value: v1,
            error: e1,
        });
        panels.push(VecPanel {
            a: m,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut out = vec![0.0; dim];
    for p in &panels {
        for (o, v) in out.iter_mut().zip(&p.value) {
            *o += v;
        }
    }
    (out, panels.iter().map(|p| p.error).sum())
}
