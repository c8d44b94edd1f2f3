//! The weight `m` with `supp m̂ = [1/2, 3/2]`.
//!
//! `m̂(ξ) = exp(−1/(1−u²))`, `u = 2(ξ−1)`, normalised so that `m(0) = 1`.
//! `m(t) = ∫ m̂(ξ) e^{2πiξt} dξ` is tabulated together with `m'` on
//! `[−T_MAX, T_MAX]` and evaluated by cubic Hermite interpolation; outside the
//! table `m` is treated as zero.

use num_complex::Complex64;
use once_cell::sync::Lazy;
use std::f64::consts::PI;

use crate::gauss::panel_rule;

pub const T_MAX: f64 = 64.0;
const STEPS_PER_UNIT: usize = 512;

pub fn m_hat(xi: f64) -> f64 {
    let u = 2.0 * (xi - 1.0);
    if u.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - u * u)).exp()
    }
}

struct Table {
    values: Vec<Complex64>,
    slopes: Vec<Complex64>,
}

static TABLE: Lazy<Table> = Lazy::new(|| {
    // 64 panels of 8 nodes on [1/2, 3/2].
    let nodes = panel_rule(0.5, 1.5, 64);
    let weighted: Vec<(f64, f64)> = nodes.iter().map(|&(x, w)| (x, w * m_hat(x))).collect();
    let norm: f64 = weighted.iter().map(|(_, w)| w).sum();
    let n = 2 * (T_MAX as usize) * STEPS_PER_UNIT + 1;
    let h = 1.0 / STEPS_PER_UNIT as f64;
    let mut values = Vec::with_capacity(n);
    let mut slopes = Vec::with_capacity(n);
    for k in 0..n {
        let t = -T_MAX + k as f64 * h;
        let (mut v, mut d) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for &(xi, w) in &weighted {
            let e = Complex64::from_polar(w, 2.0 * PI * xi * t);
            v += e;
            d += e * Complex64::new(0.0, 2.0 * PI * xi);
        }
        values.push(v / norm);
        slopes.push(d / norm);
    }
    Table { values, slopes }
});

pub fn m(t: f64) -> Complex64 {
    if !(t.abs() < T_MAX) {
        return Complex64::new(0.0, 0.0);
    }
    let table = &*TABLE;
    let h = 1.0 / STEPS_PER_UNIT as f64;
    let pos = (t + T_MAX) * STEPS_PER_UNIT as f64;
    let k = (pos.floor() as usize).min(table.values.len() - 2);
    let s = pos - k as f64;
    let (y0, y1) = (table.values[k], table.values[k + 1]);
    let (d0, d1) = (table.slopes[k] * h, table.slopes[k + 1] * h);
    let s2 = s * s;
    let s3 = s2 * s;
    y0 * (2.0 * s3 - 3.0 * s2 + 1.0)
        + d0 * (s3 - 2.0 * s2 + s)
        + y1 * (-2.0 * s3 + 3.0 * s2)
        + d1 * (s3 - s2)
}
