use super::check_dimension;
use crate::density::RadialDensity;
use crate::error::{Error, Result};
use crate::hyperbolic::{dist, DiskPoint};
use crate::quadrature::{integrate, Tolerance};
use crate::special::sphere_area;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Compensated (Neumaier) summation in iteration order.
pub(crate) fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Occupancy fractions on a polar grid about the origin: `n_radial` annuli of
/// equal hyperbolic width covering `[0, r_max]` and `n_angular` sectors of
/// `[0, 2 pi)`. Cell `(i, j)` covers radii `[i dr, (i + 1) dr)` and angles
/// `[j dtheta, (j + 1) dtheta)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupancyGrid {
    n_radial: usize,
    n_angular: usize,
    r_max: f64,
    occupancy: Vec<f64>,
}

impl OccupancyGrid {
    pub fn new(n_radial: usize, n_angular: usize, r_max: f64) -> Result<Self> {
        if n_radial == 0 || n_angular < 2 || !n_angular.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "grid needs n_radial >= 1 and an even n_angular >= 2, got {n_radial} x {n_angular}"
            )));
        }
        if !(r_max > 0.0) || !r_max.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "r_max must be positive, got {r_max}"
            )));
        }
        Ok(OccupancyGrid {
            n_radial,
            n_angular,
            r_max,
            occupancy: vec![0.0; n_radial * n_angular],
        })
    }

    /// Occupancy estimated by `sub x sub` midpoint samples per cell.
    pub fn from_indicator<F: Fn(&DiskPoint) -> bool>(
        n_radial: usize,
        n_angular: usize,
        r_max: f64,
        sub: usize,
        inside: F,
    ) -> Result<Self> {
        let mut g = Self::new(n_radial, n_angular, r_max)?;
        let sub = sub.max(1);
        let (dr, dt) = (g.dr(), g.dtheta());
        for i in 0..n_radial {
            for j in 0..n_angular {
                let mut hits = 0usize;
                for a in 0..sub {
                    for b in 0..sub {
                        let r = (i as f64 + (a as f64 + 0.5) / sub as f64) * dr;
                        let t = (j as f64 + (b as f64 + 0.5) / sub as f64) * dt;
                        if inside(&DiskPoint::from_polar(r, t)) {
                            hits += 1;
                        }
                    }
                }
                g.occupancy[i * n_angular + j] = hits as f64 / (sub * sub) as f64;
            }
        }
        Ok(g)
    }

    /// Occupancy from the radial intervals `[a, b]` cut out of each sector's
    /// central ray; partial cells get the exact weighted measure fraction.
    pub fn from_ray_intervals<F: Fn(f64) -> Vec<(f64, f64)>>(
        n_radial: usize,
        n_angular: usize,
        r_max: f64,
        n: u32,
        d: &RadialDensity,
        intervals: F,
    ) -> Result<Self> {
        check_dimension(n)?;
        let mut g = Self::new(n_radial, n_angular, r_max)?;
        let radial = g.radial_measures(n, d);
        let dr = g.dr();
        let k = (n - 1) as i32;
        let measure =
            |a: f64, b: f64| integrate(|u| d.h(u).exp() * u.sinh().powi(k), a, b, Tolerance::default()).value;
        for j in 0..n_angular {
            let theta = (j as f64 + 0.5) * g.dtheta();
            for (a, b) in intervals(theta) {
                let a = a.max(0.0);
                let b = b.min(r_max);
                if !(b > a) {
                    continue;
                }
                let i0 = ((a / dr).floor() as usize).min(n_radial - 1);
                let i1 = ((b / dr).ceil() as usize).min(n_radial);
                for (i, &full) in radial.iter().enumerate().take(i1).skip(i0) {
                    let lo = (i as f64 * dr).max(a);
                    let hi = ((i + 1) as f64 * dr).min(b);
                    if hi <= lo {
                        continue;
                    }
                    let cell = &mut g.occupancy[i * n_angular + j];
                    if lo <= i as f64 * dr && hi >= (i + 1) as f64 * dr {
                        *cell = 1.0;
                    } else {
                        *cell = (*cell + measure(lo, hi) / full).min(1.0);
                    }
                }
            }
        }
        Ok(g)
    }

    pub fn n_radial(&self) -> usize {
        self.n_radial
    }

    pub fn n_angular(&self) -> usize {
        self.n_angular
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn dr(&self) -> f64 {
        self.r_max / self.n_radial as f64
    }

    pub fn dtheta(&self) -> f64 {
        TAU / self.n_angular as f64
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.occupancy[i * self.n_angular + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidParameter(format!(
                "occupancy {value} outside [0, 1]"
            )));
        }
        self.occupancy[i * self.n_angular + j] = value;
        Ok(())
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.occupancy[i * self.n_angular..(i + 1) * self.n_angular]
    }

    pub fn is_empty(&self) -> bool {
        self.occupancy.iter().all(|&o| o == 0.0)
    }

    /// `int exp(h) sinh^{n-1}` over each annulus.
    pub fn radial_measures(&self, n: u32, d: &RadialDensity) -> Vec<f64> {
        let dr = self.dr();
        let k = (n - 1) as i32;
        (0..self.n_radial)
            .map(|i| {
                integrate(
                    |u| d.h(u).exp() * u.sinh().powi(k),
                    i as f64 * dr,
                    (i + 1) as f64 * dr,
                    Tolerance::default(),
                )
                .value
            })
            .collect()
    }

    /// `omega_{n-2} / 2 * int |sin|^{n-2}` over each sector; mirror sectors
    /// `j` and `n_angular - 1 - j` get bitwise equal values.
    pub fn angular_measures(&self, n: u32) -> Vec<f64> {
        let dt = self.dtheta();
        let half = 0.5 * sphere_area(n - 2);
        let k = (n - 2) as i32;
        let na = self.n_angular;
        let mut m = vec![0.0; na];
        for j in 0..na / 2 {
            let v = if n == 2 {
                half * dt
            } else {
                half * integrate(
                    |t| t.sin().abs().powi(k),
                    j as f64 * dt,
                    (j + 1) as f64 * dt,
                    Tolerance::default(),
                )
                .value
            };
            m[j] = v;
            m[na - 1 - j] = v;
        }
        m
    }

    /// Weighted volume of the rotation about `e1` of the occupied set (the
    /// factor 1/2 in the sector measure accounts for both half-planes).
    pub fn weighted_volume(&self, n: u32, d: &RadialDensity) -> f64 {
        let radial = self.radial_measures(n, d);
        let angular = self.angular_measures(n);
        neumaier_sum(
            (0..self.n_radial)
                .map(|i| radial[i] * neumaier_sum(self.row(i).iter().zip(&angular).map(|(o, m)| o * m))),
        )
    }

    /// Weighted length of the `1/2` level set of the occupancy (planar case),
    /// from marching squares over the cell centers.
    pub fn perimeter_estimate(&self, d: &RadialDensity) -> f64 {
        let (nr, na) = (self.n_radial, self.n_angular);
        let (dr, dt) = (self.dr(), self.dtheta());
        // rows: -1 is the origin (mean of the first annulus), nr is outside
        let origin_value = self.row(0).iter().sum::<f64>() / na as f64;
        let value = |i: isize, j: usize| -> f64 {
            if i < 0 {
                origin_value
            } else if i as usize >= nr {
                0.0
            } else {
                self.get(i as usize, j % na)
            }
        };
        let radius = |i: isize| -> f64 {
            if i < 0 {
                0.0
            } else {
                (i as f64 + 0.5) * dr
            }
        };
        let mut segments = Vec::new();
        for i in -1..nr as isize {
            for j in 0..na {
                let corners = [
                    (radius(i), (j as f64 + 0.5) * dt, value(i, j)),
                    (radius(i + 1), (j as f64 + 0.5) * dt, value(i + 1, j)),
                    (radius(i + 1), (j as f64 + 1.5) * dt, value(i + 1, j + 1)),
                    (radius(i), (j as f64 + 1.5) * dt, value(i, j + 1)),
                ];
                let centre = 0.25 * corners.iter().map(|c| c.2).sum::<f64>();
                let cuts: Vec<(usize, (f64, f64))> = (0..4)
                    .filter_map(|e| {
                        let a = corners[e];
                        let b = corners[(e + 1) % 4];
                        let (fa, fb) = (a.2 - 0.5, b.2 - 0.5);
                        if (fa < 0.0) != (fb < 0.0) {
                            let s = fa / (fa - fb);
                            Some((e, (a.0 + s * (b.0 - a.0), a.1 + s * (b.1 - a.1))))
                        } else {
                            None
                        }
                    })
                    .collect();
                match cuts.len() {
                    2 => segments.push((cuts[0].1, cuts[1].1)),
                    4 => {
                        // saddle: connect so that the centre value decides
                        let corner0_in = corners[0].2 >= 0.5;
                        if (centre >= 0.5) == corner0_in {
                            segments.push((cuts[0].1, cuts[1].1));
                            segments.push((cuts[2].1, cuts[3].1));
                        } else {
                            segments.push((cuts[0].1, cuts[3].1));
                            segments.push((cuts[1].1, cuts[2].1));
                        }
                    }
                    _ => {}
                }
            }
        }
        neumaier_sum(segments.iter().map(|&((r0, t0), (r1, t1))| {
            let p = DiskPoint::from_polar(r0, t0);
            let q = DiskPoint::from_polar(r1, t1);
            let mid = 0.5 * (p.radius() + q.radius());
            dist(&p, &q) * d.h(mid).exp()
        }))
    }
}

/// Whether a row already is a cap centered on angle 0: mirror-symmetric, full
/// up to one partial sector pair, empty afterwards.
fn is_cap(row: &[f64]) -> bool {
    let na = row.len();
    let mut tail = false;
    for k in 0..na / 2 {
        let (a, b) = (row[k], row[na - 1 - k]);
        if a != b {
            return false;
        }
        if tail {
            if a != 0.0 {
                return false;
            }
        } else if a < 1.0 {
            tail = true;
        }
    }
    true
}

/// Spherical symmetrization about the positive axis: every annulus is
/// replaced by a centered cap of the same weighted measure.
pub fn symmetrize(grid: &OccupancyGrid, d: &RadialDensity, n: u32) -> Result<OccupancyGrid> {
    check_dimension(n)?;
    let _ = d; // annulus-wise rearrangement does not depend on the radial weight
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let angular = grid.angular_measures(n);
    let na = grid.n_angular;
    let mut out = grid.clone();
    for i in 0..grid.n_radial {
        let row = grid.row(i);
        if is_cap(row) {
            continue;
        }
        let mut remaining = neumaier_sum(row.iter().zip(&angular).map(|(o, m)| o * m));
        let dst = &mut out.occupancy[i * na..(i + 1) * na];
        for k in 0..na / 2 {
            let pair = 2.0 * angular[k];
            let fill = if remaining >= pair {
                remaining -= pair;
                1.0
            } else if remaining > 0.0 {
                let f = (remaining / pair).clamp(0.0, 1.0);
                remaining = 0.0;
                f
            } else {
                0.0
            };
            dst[k] = fill;
            dst[na - 1 - k] = fill;
        }
    }
    Ok(out)
}
