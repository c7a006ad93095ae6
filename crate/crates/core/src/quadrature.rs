//! Adaptive Gauss–Kronrod (7/15) quadrature.

use crate::error::{PdmError, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

/// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

const MAX_INTERVALS: usize = 4000;

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
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

struct Panel {
    a: f64,
    b: f64,
    val: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// Integrates `f` over `[a, b]` to absolute tolerance `abs_tol`.
///
/// Globally adaptive: the panel with the largest error estimate is bisected until the
/// summed estimate meets the tolerance. `b < a` yields the negated integral over `[b, a]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(PdmError::InvalidInput("integration limits must be finite".into()));
    }
    if b < a {
        return integrate(f, b, a, abs_tol).map(|v| -v);
    }
    let (val, err) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, val, err });
    let mut total_err = err;
    loop {
        if !total_err.is_finite() {
            return Err(PdmError::Numeric(format!("non-finite integrand on [{a}, {b}]")));
        }
        if total_err <= abs_tol {
            break;
        }
        if heap.len() >= MAX_INTERVALS {
            return Err(PdmError::Numeric(format!(
                "quadrature did not reach tolerance {abs_tol:e} on [{a}, {b}] (estimate {total_err:e})"
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            // Panel at floating-point resolution; accept its estimate.
            heap.push(Panel { err: 0.0, ..worst });
            total_err -= worst.err;
            continue;
        }
        let (lv, le) = gk15(&f, worst.a, m);
        let (rv, re) = gk15(&f, m, worst.b);
        total_err += le + re - worst.err;
        heap.push(Panel { a: worst.a, b: m, val: lv, err: le });
        heap.push(Panel { a: m, b: worst.b, val: rv, err: re });
        if heap.len() % 64 == 0 {
            total_err = heap.iter().map(|p| p.err).sum();
        }
    }
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let v: f64 = panels.iter().map(|p| p.val).sum();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(PdmError::Numeric(format!("non-finite integral on [{a}, {b}]")))
    }
}

/// Integrates over consecutive panels `[p_i, p_{i+1}]`, splitting the tolerance evenly.
pub fn integrate_panels<F: Fn(f64) -> f64>(f: F, breaks: &[f64], abs_tol: f64) -> Result<f64> {
    if breaks.len() < 2 {
        return Err(PdmError::InvalidInput("need at least two break points".into()));
    }
    let tol = abs_tol / (breaks.len() - 1) as f64;
    breaks.windows(2).map(|w| integrate(&f, w[0], w[1], tol)).sum()
}
