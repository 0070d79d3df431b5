//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Values the integrators can accumulate.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Integral and error estimate.
#[derive(Clone, Copy, Debug)]
pub struct Estimate<V> {
    pub value: V,
    pub error: f64,
}

/// One 15-point Kronrod panel with the embedded 7-point Gauss error estimate.
pub fn gk15<V: QuadValue, F: Fn(f64) -> V>(f: &F, a: f64, b: f64) -> Estimate<V> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = h * x;
        let s = f(c - dx) + f(c + dx);
        kron = kron + s * w;
        if j % 2 == 1 {
            gauss = gauss + s * WG[j / 2];
        }
    }
    Estimate {
        value: kron * h,
        error: (kron - gauss).magnitude() * h.abs(),
    }
}

struct Panel<V> {
    a: f64,
    b: f64,
    est: Estimate<V>,
}

impl<V> PartialEq for Panel<V> {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
    }
}
impl<V> Eq for Panel<V> {}
impl<V> PartialOrd for Panel<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<V> Ord for Panel<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est.error.total_cmp(&other.est.error)
    }
}

/// Adaptive integration over `breaks[0]..breaks[last]`, starting from the
/// given panel boundaries, to absolute tolerance `tol`.
pub fn integrate_breaks<V: QuadValue, F: Fn(f64) -> V>(
    f: F,
    breaks: &[f64],
    tol: f64,
    max_panels: usize,
) -> Result<Estimate<V>> {
    let mut heap = BinaryHeap::new();
    let mut total_err = 0.0;
    for w in breaks.windows(2) {
        let est = gk15(&f, w[0], w[1]);
        total_err += est.error;
        heap.push(Panel { a: w[0], b: w[1], est });
    }
    let mut steps = 0usize;
    loop {
        steps += 1;
        if steps % 256 == 0 {
            total_err = heap.iter().map(|p| p.est.error).sum();
        }
        if total_err <= tol {
            break;
        }
        if heap.len() >= max_panels {
            return Err(Error::Quadrature {
                target: tol,
                achieved: total_err,
            });
        }
        let worst = heap.pop().expect("non-empty");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            return Err(Error::Quadrature {
                target: tol,
                achieved: total_err,
            });
        }
        let left = gk15(&f, worst.a, m);
        let right = gk15(&f, m, worst.b);
        total_err += left.error + right.error - worst.est.error;
        heap.push(Panel { a: worst.a, b: m, est: left });
        heap.push(Panel { a: m, b: worst.b, est: right });
    }
    let mut panels: Vec<_> = heap.into_vec();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut value = V::zero();
    let mut error = 0.0;
    for p in panels {
        value = value + p.est.value;
        error += p.est.error;
    }
    Ok(Estimate { value, error })
}

pub fn integrate<V: QuadValue, F: Fn(f64) -> V>(f: F, a: f64, b: f64, tol: f64) -> Result<Estimate<V>> {
    integrate_breaks(f, &[a, b], tol, 20_000)
}

/// Fixed composite rule: `panels` equal Kronrod panels, no adaptivity.
pub fn composite_gk15<V: QuadValue, F: Fn(f64) -> V>(f: F, a: f64, b: f64, panels: usize) -> V {
    let h = (b - a) / panels as f64;
    (0..panels).fold(V::zero(), |acc, i| {
        let lo = a + h * i as f64;
        acc + gk15(&f, lo, lo + h).value
    })
}
