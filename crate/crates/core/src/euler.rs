//! The constants `a_k` and the Euler products `Z₁ … Z₄`.
//!
//! Every product is accumulated as a sum of principal logarithms of the
//! local factors over `p ≤ P`, in ascending prime order, so the result is
//! independent of how rayon splits the work. Tail bounds are empirical: the
//! decay exponent `e` of `|log Z_p|` is read off two windows below `P` and
//! the envelope `C p^{-e}` is summed past `P`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::arith::{factorize, fundamental_split, kronecker, primes_up_to};
use crate::error::{Error, Result};
use crate::gauss::gauss_prime_power;
use crate::smooth::{mellin_tilde, BumpProfile};
use crate::special::{g_factor, hurwitz_zeta, riemann_zeta};

type C64 = Complex64;

pub const DEFAULT_PRIME_LIMIT: u64 = 100_000;
pub const HEADLINE_PRIME_LIMIT: u64 = 1_000_000;

/// Shifts `α, β, γ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShiftPoint {
    pub alpha: C64,
    pub beta: C64,
    pub gamma: C64,
}

impl ShiftPoint {
    pub fn new(alpha: C64, beta: C64, gamma: C64) -> Self {
        Self { alpha, beta, gamma }
    }

    pub fn real(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self::new(alpha.into(), beta.into(), gamma.into())
    }

    pub fn swapped(&self) -> Self {
        Self::new(self.beta, self.alpha, self.gamma)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EulerProductResult {
    /// Prefactor times the partial product over `p ≤ prime_limit`.
    pub value: C64,
    pub prime_limit: u64,
    /// Bound on `|full − value|`; infinite when the envelope fit fails.
    pub tail_bound: f64,
    /// Fitted estimate of `Σ_{p>P} log Z_p`.
    pub log_tail_estimate: C64,
    /// Number of local factors multiplied.
    pub factors: usize,
}

impl EulerProductResult {
    /// `value` corrected by the fitted tail.
    pub fn extrapolated(&self) -> C64 {
        self.value * self.log_tail_estimate.exp()
    }

    /// Accumulated rounding in `value`, a few ulps per logarithm.
    pub fn rounding_bound(&self) -> f64 {
        4.0 * f64::EPSILON * self.factors as f64 * self.value.norm()
    }
}

/// `a` (odd, positive) and `k` (nonzero) with `4k = k₁k₂²`, `k₁` fundamental.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LocalFactorContext {
    pub a: u64,
    pub k: i64,
    pub k1: i64,
    pub k2: u64,
}

impl LocalFactorContext {
    pub fn new(a: u64, k: i64) -> Result<Self> {
        if a == 0 || a % 2 == 0 {
            return Err(Error::InvalidInput(format!("a = {a} must be odd and positive")));
        }
        if k == 0 {
            return Err(Error::InvalidInput("k must be nonzero".into()));
        }
        let four_k = k
            .checked_mul(4)
            .ok_or_else(|| Error::InvalidInput(format!("4k overflows for k = {k}")))?;
        let (k1, k2) = fundamental_split(four_k)?;
        Ok(Self { a, k, k1, k2 })
    }

    /// `χ_{k₁}(p)`.
    pub fn chi(&self, p: u64) -> f64 {
        kronecker(self.k1, p as i64) as f64
    }

    /// Whether `p | 2a`.
    pub fn divides_2a(&self, p: u64) -> bool {
        (2 * self.a) % p == 0
    }
}

/// `p^{-s}`.
fn pinv(p: u64, s: C64) -> C64 {
    (-s * (p as f64).ln()).exp()
}

fn region(func: &'static str, ok: bool, detail: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Region { func, detail: detail() })
    }
}

// ---------------------------------------------------------------------------
// product engine

const WINDOW_MIN_PRIMES: usize = 40;
const ENVELOPE_START: u64 = 50;
const MIN_DECAY: f64 = 1.05;
/// Logs this small are dominated by rounding in the local factor.
const NOISE_FLOOR: f64 = 1e-13;

/// `Σ_p p^{-e}` via `Σ_n μ(n)/n · log ζ(ne)`.
pub fn prime_zeta(e: f64) -> Result<f64> {
    if e <= 1.0 {
        return Err(Error::Pole {
            func: "prime_zeta",
            at: e.to_string(),
        });
    }
    let mut acc = 0.0;
    let mut n = 1u64;
    while (n as f64) * e < 80.0 {
        let mu = factorize(n)?.moebius();
        if mu != 0 {
            let z = riemann_zeta(C64::new(n as f64 * e, 0.0))?.re;
            acc += mu as f64 / n as f64 * (z - 1.0).ln_1p();
        }
        n += 1;
    }
    Ok(acc)
}

/// `Σ_{p > P} p^{-e}` given the primes up to `P`.
fn prime_tail_sum(e: f64, primes: &[u64]) -> Result<f64> {
    let head: f64 = primes.iter().rev().map(|&p| (p as f64).powf(-e)).sum();
    Ok((prime_zeta(e)? - head).max(0.0))
}

/// Bound and fitted estimate for `Σ_{p>P} log Z_p`, given an exponent `e`
/// with `|log Z_p| = O(p^{-e})`.
///
/// The envelope constant is `sup p^e |log Z_p|` over `ENVELOPE_START < p ≤ P`,
/// skipping logs at rounding level; the fit uses the highest windows
/// `(P/16s, P/4s]`, `(P/4s, P/s]` clear of that noise.
fn tail_analysis(limit: u64, decay: f64, primes: &[u64], logs: &[C64]) -> (f64, C64) {
    let zero = C64::new(0.0, 0.0);
    let start = primes.partition_point(|&p| p <= ENVELOPE_START);
    if primes.len() < start + WINDOW_MIN_PRIMES {
        return (f64::INFINITY, zero);
    }
    let bound = if decay > 1.0 {
        let c = (start..primes.len())
            .filter(|&i| logs[i].norm() >= NOISE_FLOOR)
            .map(|i| logs[i].norm() * (primes[i] as f64).powf(decay))
            .fold(0.0f64, f64::max);
        2.0 * c * (limit as f64).powf(1.0 - decay) / (decay - 1.0)
    } else {
        f64::INFINITY
    };
    let lim = limit as f64;
    let window = |lo: f64, hi: f64| -> Vec<usize> {
        let a = primes.partition_point(|&p| (p as f64) <= lo);
        let b = primes.partition_point(|&p| (p as f64) <= hi);
        (a..b).collect()
    };
    let mut s = 1.0;
    loop {
        let w1 = window(lim / (16.0 * s), lim / (4.0 * s));
        let w2 = window(lim / (4.0 * s), lim / s);
        if w1.len() < WINDOW_MIN_PRIMES || w2.len() < WINDOW_MIN_PRIMES {
            return (bound, zero);
        }
        if w2.iter().all(|&i| logs[i].norm() < NOISE_FLOOR) {
            s *= 4.0;
            continue;
        }
        return (bound, fitted_tail(primes, logs, &w1, &w2));
    }
}

/// `Σ_{p>P} c p^{-e}` with `e` the least-squares slope of `log|log Z_p|`
/// against `log p` and `c` the mean of `p^e log Z_p` on the upper window.
fn fitted_tail(primes: &[u64], logs: &[C64], w1: &[usize], w2: &[usize]) -> C64 {
    let pts: Vec<(f64, f64)> = w1
        .iter()
        .chain(w2)
        .filter(|&&i| logs[i].norm() > 0.0)
        .map(|&i| ((primes[i] as f64).ln(), logs[i].norm().ln()))
        .collect();
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (sxy, sxx) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    let e = -sxy / sxx;
    if !(e > MIN_DECAY) {
        return C64::new(0.0, 0.0);
    }
    let mean: C64 = w2.iter().map(|&i| logs[i] * (primes[i] as f64).powf(e)).sum::<C64>() / w2.len() as f64;
    match prime_tail_sum(e, primes) {
        Ok(t) => mean * t,
        Err(_) => C64::new(0.0, 0.0),
    }
}

/// `prefactor · ∏_{p ≤ limit} local(p)`; `decay` is an exponent with
/// `|log local(p)| = O(p^{-decay})`.
pub fn euler_product<F>(limit: u64, prefactor: C64, decay: f64, local: F) -> Result<EulerProductResult>
where
    F: Fn(u64) -> C64 + Sync,
{
    let primes = primes_up_to(limit);
    let logs: Vec<C64> = primes.par_iter().map(|&p| local(p).ln()).collect();
    if logs.iter().any(|l| !l.is_finite()) {
        return Err(Error::Accuracy("vanishing or non-finite Euler factor".into()));
    }
    let sum: C64 = logs.iter().sum();
    let value = prefactor * sum.exp();
    let (log_bound, log_tail_estimate) = tail_analysis(limit, decay, &primes, &logs);
    let tail_bound = if log_bound.is_finite() {
        value.norm() * log_bound.exp_m1()
    } else {
        f64::INFINITY
    };
    Ok(EulerProductResult {
        value,
        prime_limit: limit,
        tail_bound,
        log_tail_estimate,
        factors: primes.len(),
    })
}

// ---------------------------------------------------------------------------
// a_k

fn check_limit(limit: u64) -> Result<()> {
    if limit < 3 {
        return Err(Error::InvalidInput(format!("prime limit {limit} must be at least 3")));
    }
    Ok(())
}

/// Odd local factor of `a_k`.
pub fn a_k_local(k: u32, p: u64) -> f64 {
    let pf = p as f64;
    let u = pf.sqrt().recip();
    let kk = k as i32;
    let bracket = ((1.0 + u).powi(-kk) + (1.0 - u).powi(-kk)) / 2.0 + 1.0 / pf;
    let tri = (k * (k + 1) / 2) as i32;
    (1.0 - 1.0 / pf).powi(tri) / (1.0 + 1.0 / pf) * bracket
}

/// `a_k = 2^{-k(k+2)/2} ∏_{p odd} (1-1/p)^{k(k+1)/2}/(1+1/p) · (((1+p^{-½})^{-k} + (1-p^{-½})^{-k})/2 + 1/p)`.
pub fn a_k_constant(k: u32, limit: u64) -> Result<EulerProductResult> {
    check_limit(limit)?;
    if k == 0 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    let pre = 2f64.powf(-((k * (k + 2)) as f64) / 2.0);
    euler_product(limit, pre.into(), 2.0, |p| {
        if p == 2 {
            C64::new(1.0, 0.0)
        } else {
            a_k_local(k, p).into()
        }
    })
}

/// Simplified odd local factor of `a₄`.
pub fn a4_local_simplified(p: u64) -> f64 {
    let x = 1.0 / p as f64;
    let poly = 1.0 + x * (7.0 + x * (-3.0 + x * (6.0 + x * (-4.0 + x))));
    (1.0 - x).powi(6) / (1.0 + x) * poly
}

/// `a₄ = 2^{-12} ∏_{p odd} (1-1/p)⁶/(1+1/p) (1 + 7/p - 3/p² + 6/p³ - 4/p⁴ + 1/p⁵)`.
pub fn a4_simplified(limit: u64) -> Result<EulerProductResult> {
    check_limit(limit)?;
    euler_product(limit, 2f64.powi(-12).into(), 2.0, |p| {
        if p == 2 {
            C64::new(1.0, 0.0)
        } else {
            a4_local_simplified(p).into()
        }
    })
}

// ---------------------------------------------------------------------------
// Z₁

fn z1_region(sp: &ShiftPoint) -> Result<()> {
    region("z1", sp.alpha.re >= 0.3 && sp.beta.re >= 0.3, || {
        format!("need Re α, Re β ≥ 0.3, got α = {}, β = {}", sp.alpha, sp.beta)
    })
}

/// `Z_{1,p}(α, β)` as printed.
pub fn z1_local(p: u64, sp: &ShiftPoint) -> C64 {
    let one = C64::new(1.0, 0.0);
    let (a, b) = (sp.alpha, sp.beta);
    if p == 2 {
        return (one - pinv(4, a)).powi(3) * (one - pinv(4, b)).powi(3) * (one - pinv(2, a + b)).powi(4);
    }
    let x2 = pinv(p, 2.0 * a);
    let y2 = pinv(p, 2.0 * b);
    let xy = pinv(p, a + b);
    let x4 = x2 * x2;
    let y4 = y2 * y2;
    let x2y2 = x2 * y2;
    let inner = 3.0 * x2 + 3.0 * y2 + 4.0 * xy - x4 - y4 - 3.0 * x2y2 + 2.0 * x2 * y4 + 2.0 * x4 * y2 - x4 * y4;
    let bracket = one + 4.0 * xy + x2 + y2 + x2y2 - inner / (p as f64 + 1.0);
    (one - x2) * (one - y2) * (one - xy).powi(4) * bracket
}

/// `Z_{1,p}` with the bracket rewritten as a polynomial in `x = p^{-α}`.
pub fn z1_local_horner(p: u64, sp: &ShiftPoint) -> C64 {
    if p == 2 {
        return z1_local(p, sp);
    }
    let one = C64::new(1.0, 0.0);
    let x = pinv(p, sp.alpha);
    let y = pinv(p, sp.beta);
    let y2 = y * y;
    let q = 1.0 / (p as f64 + 1.0);
    let c0 = one + y2 - (3.0 * y2 - y2 * y2) * q;
    let c1 = 4.0 * y * (1.0 - q);
    let c2 = one + y2 - (3.0 - 3.0 * y2 + 2.0 * y2 * y2) * q;
    let c4 = (one - y2) * (one - y2) * q;
    let bracket = c0 + x * (c1 + x * (c2 + x * x * c4));
    (one - x * x) * (one - y2) * (one - x * y).powi(4) * bracket
}

pub fn z1_product(sp: &ShiftPoint, limit: u64) -> Result<EulerProductResult> {
    z1_region(sp)?;
    check_limit(limit)?;
    let sp = *sp;
    let sig = sp.alpha.re.min(sp.beta.re);
    euler_product(limit, C64::new(1.0, 0.0), (1.0 + 2.0 * sig).min(4.0 * sig), move |p| z1_local(p, &sp))
}

// ---------------------------------------------------------------------------
// Z₂

fn z2_region(sp: &ShiftPoint) -> Result<()> {
    region("z2", sp.alpha.re > 0.0 && sp.beta.re > 0.0, || {
        format!("need Re α, Re β > 0, got α = {}, β = {}", sp.alpha, sp.beta)
    })
}

/// `(1 - χ(p)p^{-½-α})²(1 - χ(p)p^{-½-β})²`.
fn z2_prefactor(p: u64, sp: &ShiftPoint, chi: f64) -> C64 {
    let one = C64::new(1.0, 0.0);
    let u = one - chi * pinv(p, 0.5 + sp.alpha);
    let v = one - chi * pinv(p, 0.5 + sp.beta);
    u * u * v * v
}

fn ord(mut k: u64, p: u64) -> u32 {
    let mut e = 0;
    while k % p == 0 {
        k /= p;
        e += 1;
    }
    e
}

/// `Σ_{n₁,n₂} τ(p^{n₁})τ(p^{n₂}) p^{-n₁α-n₂β} G_k(p^{n₁+n₂})/p^{n₁+n₂}` for odd
/// `p`; finite because `G_k(p^n) = 0` once `n ≥ ord_p(4k) + 2`.
pub fn z2_local_sum(p: u64, sp: &ShiftPoint, k: i64) -> C64 {
    let top = ord(k.unsigned_abs(), p) + 1;
    let x = pinv(p, sp.alpha);
    let y = pinv(p, sp.beta);
    let pf = p as f64;
    let g: Vec<f64> = (0..=top)
        .map(|n| {
            if n == 0 {
                1.0
            } else {
                gauss_prime_power(k, p, n).0.to_f64() / pf.powi(n as i32)
            }
        })
        .collect();
    let mut acc = C64::new(0.0, 0.0);
    let mut xp = C64::new(1.0, 0.0);
    for n1 in 0..=top {
        let mut yp = C64::new(1.0, 0.0);
        for n2 in 0..=(top - n1) {
            let t = ((n1 + 1) * (n2 + 1)) as f64 * g[(n1 + n2) as usize];
            acc += xp * yp * t;
            yp *= y;
        }
        xp *= x;
    }
    acc
}

/// `Z_{2,p}(α, β, a, k)`.
pub fn z2_local(p: u64, sp: &ShiftPoint, ctx: &LocalFactorContext) -> C64 {
    let chi = ctx.chi(p);
    let pre = z2_prefactor(p, sp, chi);
    if ctx.divides_2a(p) {
        pre
    } else if ctx.k % p as i64 != 0 {
        pre * (1.0 + 2.0 * chi * pinv(p, 0.5 + sp.alpha) + 2.0 * chi * pinv(p, 0.5 + sp.beta))
    } else {
        pre * z2_local_sum(p, sp, ctx.k)
    }
}

pub fn z2_value(sp: &ShiftPoint, ctx: &LocalFactorContext, limit: u64) -> Result<EulerProductResult> {
    z2_region(sp)?;
    check_limit(limit)?;
    let (sp, ctx) = (*sp, *ctx);
    let sig = sp.alpha.re.min(sp.beta.re);
    euler_product(limit, C64::new(1.0, 0.0), 1.0 + 2.0 * sig, move |p| z2_local(p, &sp, &ctx))
}

// ---------------------------------------------------------------------------
// Z₃

fn z3_region(sp: &ShiftPoint) -> Result<()> {
    region(
        "z3",
        sp.alpha.re > 0.5 && sp.beta.re > 0.5 && sp.gamma.re > 0.0,
        || format!("need Re α, Re β > ½ and Re γ > 0, got {sp:?}"),
    )
}

/// Local factor of `Z₃` at `p | 2a`.
pub fn k1_factor(p: u64, sp: &ShiftPoint) -> C64 {
    let one = C64::new(1.0, 0.0);
    let (a, b, g) = (sp.alpha, sp.beta, sp.gamma);
    let f = (one - pinv(p, 0.5 + a))
        * (one - pinv(p, 0.5 + b))
        * (one - pinv(p, 2.0 * a + 2.0 * g))
        * (one - pinv(p, 2.0 * b + 2.0 * g));
    f * f
}

/// Local factor of `Z₃` at `p ∤ 2a`.
pub fn k2_factor(p: u64, sp: &ShiftPoint) -> C64 {
    let one = C64::new(1.0, 0.0);
    let (a, b, g) = (sp.alpha, sp.beta, sp.gamma);
    let ip = 1.0 / p as f64;
    let x = pinv(p, 2.0 * a + 2.0 * g);
    let y = pinv(p, 2.0 * b + 2.0 * g);
    let w = pinv(p, a + b + 2.0 * g);
    let ua = pinv(p, 0.5 + a);
    let ub = pinv(p, 0.5 + b);
    let pre = (one - ua) * (one - ua) * (one - ub) * (one - ub);
    let odd = ua + ub + pinv(p, 0.5 + 2.0 * a + b + 2.0 * g) + pinv(p, 0.5 + a + 2.0 * b + 2.0 * g);
    let bracket = (1.0 - ip) * (one + x) * (one + y)
        + ip * (one - x) * (one - x) * (one - y) * (one - y)
        + (1.0 - ip) * 4.0 * w
        + 2.0 * (one - pinv(p, 2.0 * g)) * odd;
    pre * bracket
}

pub fn z3_local(p: u64, sp: &ShiftPoint, a: u64) -> C64 {
    if (2 * a) % p == 0 {
        k1_factor(p, sp)
    } else {
        k2_factor(p, sp)
    }
}

/// `ζ(2α+2γ)²ζ(2β+2γ)²`.
fn z3_zeta_prefactor(sp: &ShiftPoint) -> Result<C64> {
    let za = riemann_zeta(2.0 * sp.alpha + 2.0 * sp.gamma)?;
    let zb = riemann_zeta(2.0 * sp.beta + 2.0 * sp.gamma)?;
    Ok(za * za * zb * zb)
}

pub fn z3_product(sp: &ShiftPoint, a: u64, limit: u64) -> Result<EulerProductResult> {
    z3_region(sp)?;
    check_limit(limit)?;
    if a == 0 || a % 2 == 0 {
        return Err(Error::InvalidInput(format!("a = {a} must be odd and positive")));
    }
    let sp = *sp;
    let sig = sp.alpha.re.min(sp.beta.re);
    let g = sp.gamma.re;
    let decay = (2.0 * sig + 2.0 * g).min(0.5 + sig + 2.0 * g).min(1.0 + 2.0 * sig);
    euler_product(limit, z3_zeta_prefactor(&sp)?, decay, move |p| z3_local(p, &sp, a))
}

/// `Z₃(·, a)` for many `a` at one shift point: the local factors are shared
/// and only the primes of `a` switch from `K₂` to `K₁`.
pub struct Z3Table {
    primes: Vec<u64>,
    ratio: Vec<C64>,
    base: C64,
}

impl Z3Table {
    pub fn new(sp: &ShiftPoint, limit: u64) -> Result<Self> {
        let base = z3_product(sp, 1, limit)?.value;
        let primes = primes_up_to(limit);
        let ratio = primes
            .par_iter()
            .map(|&p| if p == 2 { C64::new(1.0, 0.0) } else { k1_factor(p, sp) / k2_factor(p, sp) })
            .collect();
        Ok(Self { primes, ratio, base })
    }

    pub fn eval(&self, a: u64) -> Result<C64> {
        let mut v = self.base;
        for (p, _) in factorize(a)?.factors {
            if let Ok(i) = self.primes.binary_search(&p) {
                v *= self.ratio[i];
            }
        }
        Ok(v)
    }
}

// ---------------------------------------------------------------------------
// Z₄

fn z4_region(sp: &ShiftPoint) -> Result<()> {
    region(
        "z4",
        sp.alpha.re >= 0.375 && sp.beta.re >= 0.375 && sp.gamma.re >= -0.0625 && sp.gamma.re <= 0.125,
        || format!("need Re α, Re β ≥ 3/8 and -1/16 ≤ Re γ ≤ 1/8, got {sp:?}"),
    )
}

/// `(1-p^{-2α-2γ})(1-p^{-2β-2γ})(1-p^{-α-β-2γ})⁴ / ((1-p^{-½-α-2γ})²(1-p^{-½-β-2γ})²)`.
fn z4_ratio_local(p: u64, sp: &ShiftPoint) -> C64 {
    let one = C64::new(1.0, 0.0);
    let (a, b, g) = (sp.alpha, sp.beta, sp.gamma);
    let num = (one - pinv(p, 2.0 * a + 2.0 * g)) * (one - pinv(p, 2.0 * b + 2.0 * g)) * (one - pinv(p, a + b + 2.0 * g)).powi(4);
    let da = one - pinv(p, 0.5 + a + 2.0 * g);
    let db = one - pinv(p, 0.5 + b + 2.0 * g);
    num / (da * da * db * db)
}

/// Combined local factor of `Z₄` at `p`.
pub fn z4_local(p: u64, sp: &ShiftPoint) -> C64 {
    let r = z4_ratio_local(p, sp);
    if p == 2 {
        r * k1_factor(2, sp)
    } else {
        r * (k2_factor(p, sp) - pinv(p, 2.0 - 2.0 * sp.gamma) * k1_factor(p, sp))
    }
}

pub fn z4_product(sp: &ShiftPoint, limit: u64) -> Result<EulerProductResult> {
    z4_region(sp)?;
    check_limit(limit)?;
    let sp = *sp;
    // first-order terms cancel between the ratio and K₂
    let sig = sp.alpha.re.min(sp.beta.re);
    let g = sp.gamma.re;
    let decay = [1.0 + 2.0 * sig + 2.0 * g.min(2.0 * g), 2.0 - 2.0 * g, 4.0 * sig + 4.0 * g, 0.5 + 3.0 * sig + 2.0 * g, 1.0 + 2.0 * sig]
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    euler_product(limit, C64::new(1.0, 0.0), decay, move |p| z4_local(p, &sp))
}

/// `ζ(2α+2γ)³ζ(2β+2γ)³ζ(α+β+2γ)⁴ / (ζ(½+α+2γ)²ζ(½+β+2γ)²)`.
pub fn z4_zeta_ratio(sp: &ShiftPoint) -> Result<C64> {
    let (a, b, g) = (sp.alpha, sp.beta, sp.gamma);
    let za = riemann_zeta(2.0 * a + 2.0 * g)?;
    let zb = riemann_zeta(2.0 * b + 2.0 * g)?;
    let zab = riemann_zeta(a + b + 2.0 * g)?;
    let ha = riemann_zeta(0.5 + a + 2.0 * g)?;
    let hb = riemann_zeta(0.5 + b + 2.0 * g)?;
    Ok(za.powi(3) * zb.powi(3) * zab.powi(4) / (ha * ha * hb * hb))
}

/// `𝓕(0,0,0) = 𝓙(0,1) g(0)² Z₄(½,½,0)` with `𝓙(0,1) = -½Φ̃(1)`, returned next to
/// the closed form `-16Φ̃(1)a₄/π²`.
pub fn f_at_origin(profile: &BumpProfile, limit: u64) -> Result<(f64, f64)> {
    let phi1 = mellin_tilde(profile, C64::new(1.0, 0.0))?.value.re;
    let g0 = g_factor(C64::new(0.0, 0.0))?;
    let z4 = z4_product(&ShiftPoint::real(0.5, 0.5, 0.0), limit)?.extrapolated();
    let a4 = a_k_constant(4, limit)?.extrapolated().re;
    let assembled = (-0.5 * phi1 * g0 * g0 * z4).re;
    Ok((assembled, -16.0 * phi1 * a4 / (PI * PI)))
}

// ---------------------------------------------------------------------------
// Dirichlet-series cross-checks

/// Two sides of an identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityCheck {
    pub lhs: C64,
    pub rhs: C64,
}

impl IdentityCheck {
    /// `|lhs - rhs| / |rhs|`.
    pub fn residual(&self) -> f64 {
        (self.lhs - self.rhs).norm() / self.rhs.norm()
    }
}

/// A factored summation index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub n: u64,
    pub fac: Vec<(u64, u32)>,
}

impl Entry {
    fn tau(&self) -> f64 {
        self.fac.iter().map(|&(_, e)| (e + 1) as f64).product()
    }

    fn kernel(&self) -> u64 {
        self.fac.iter().filter(|&&(_, e)| e % 2 == 1).map(|&(p, _)| p).product()
    }

    fn pow_neg(&self, s: C64) -> C64 {
        (-s * (self.n as f64).ln()).exp()
    }
}

/// Odd `n ≤ n_max` coprime to `coprime_to`.
pub fn box_entries(n_max: u64, coprime_to: u64) -> Result<Vec<Entry>> {
    let mut out = Vec::new();
    for n in (1..=n_max).step_by(2) {
        let fac = factorize(n)?.factors;
        if fac.iter().any(|&(p, _)| coprime_to % p == 0) {
            continue;
        }
        out.push(Entry { n, fac });
    }
    Ok(out)
}

/// All `n ≤ limit` composed of the given primes, optionally capping each
/// exponent, sorted by `n`.
pub fn smooth_entries(primes: &[u64], limit: u64, max_exp: impl Fn(u64) -> u32) -> Vec<Entry> {
    fn rec(primes: &[u64], i: usize, n: u64, fac: &mut Vec<(u64, u32)>, limit: u64, cap: &dyn Fn(u64) -> u32, out: &mut Vec<Entry>) {
        if i == primes.len() {
            out.push(Entry { n, fac: fac.clone() });
            return;
        }
        let p = primes[i];
        rec(primes, i + 1, n, fac, limit, cap, out);
        let mut m = n;
        let mut e = 0;
        while e < cap(p) {
            match m.checked_mul(p) {
                Some(v) if v <= limit => m = v,
                _ => break,
            }
            e += 1;
            fac.push((p, e));
            rec(primes, i + 1, m, fac, limit, cap, out);
            fac.pop();
        }
    }
    let mut out = Vec::new();
    rec(primes, 0, 1, &mut Vec::new(), limit, &max_exp, &mut out);
    out.sort_by_key(|e| e.n);
    out
}

/// `Σ τ(n₁)τ(n₂) n₁^{-α} n₂^{-β} ∏_{p | n₁n₂} p/(p+1)` over pairs from
/// `entries` with `n₁n₂` a square.
pub fn z1_series(sp: &ShiftPoint, entries: &[Entry]) -> C64 {
    let rho = |e: &Entry| -> f64 { e.fac.iter().map(|&(p, _)| p as f64 / (p as f64 + 1.0)).product() };
    let mut groups: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (i, e) in entries.iter().enumerate() {
        groups.entry(e.kernel()).or_default().push(i);
    }
    let pre: Vec<(C64, C64)> = entries
        .iter()
        .map(|e| {
            let w = e.tau() * rho(e);
            (e.pow_neg(sp.alpha) * w, e.pow_neg(sp.beta) * w)
        })
        .collect();
    let mut acc = C64::new(0.0, 0.0);
    for idx in groups.values() {
        for &i in idx {
            for &j in idx {
                // primes dividing both are counted once
                let shared: f64 = entries[i]
                    .fac
                    .iter()
                    .filter(|&&(p, _)| entries[j].n % p == 0)
                    .map(|&(p, _)| p as f64 / (p as f64 + 1.0))
                    .product();
                acc += pre[i].0 * pre[j].1 / shared;
            }
        }
    }
    acc
}

/// `Σ τ(n₁)τ(n₂) n₁^{-α} n₂^{-β} G_k(n₁n₂)/(n₁n₂)` over ordered pairs.
pub fn z2_series(sp: &ShiftPoint, k: i64, entries: &[Entry]) -> C64 {
    let pre: Vec<(C64, C64)> = entries
        .iter()
        .map(|e| {
            let t = e.tau();
            (e.pow_neg(sp.alpha) * t, e.pow_neg(sp.beta) * t)
        })
        .collect();
    let rows: Vec<C64> = (0..entries.len())
        .into_par_iter()
        .map(|i| {
            let mut row = C64::new(0.0, 0.0);
            let mut merged: Vec<(u64, u32)> = Vec::with_capacity(12);
            for j in 0..entries.len() {
                merged.clear();
                merged.extend_from_slice(&entries[i].fac);
                for &(p, e) in &entries[j].fac {
                    match merged.iter_mut().find(|(q, _)| *q == p) {
                        Some(slot) => slot.1 += e,
                        None => merged.push((p, e)),
                    }
                }
                let mut g = 1.0;
                for &(p, e) in &merged {
                    let (v, _) = gauss_prime_power(k, p, e);
                    if v.coeff == 0 {
                        g = 0.0;
                        break;
                    }
                    g *= v.to_f64() / (p as f64).powi(e as i32);
                }
                if g != 0.0 {
                    row += pre[i].0 * pre[j].1 * g;
                }
            }
            row
        })
        .collect();
    rows.iter().sum()
}

/// `L(s, χ_D) = |D|^{-s} Σ_{b=1}^{|D|} χ_D(b) ζ(s, b/|D|)` for a fundamental `D`.
pub fn kronecker_l(s: C64, d: i64) -> Result<C64> {
    let q = d.unsigned_abs();
    let qf = q as f64;
    let mut acc = C64::new(0.0, 0.0);
    for b in 1..=q {
        let c = kronecker(d, b as i64);
        if c != 0 {
            acc += hurwitz_zeta(s, b as f64 / qf)? * c as f64;
        }
    }
    Ok(acc * (-s * qf.ln()).exp())
}

/// The double series for `Z₁` on the box `n₁, n₂ ≤ n_max` against
/// `ζ(2α)³ζ(2β)³ζ(α+β)⁴ Z₁`.
pub fn z1_identity_box(sp: &ShiftPoint, n_max: u64, limit: u64) -> Result<IdentityCheck> {
    let lhs = z1_series(sp, &box_entries(n_max, 1)?);
    let z = riemann_zeta(2.0 * sp.alpha)?.powi(3)
        * riemann_zeta(2.0 * sp.beta)?.powi(3)
        * riemann_zeta(sp.alpha + sp.beta)?.powi(4);
    Ok(IdentityCheck {
        lhs,
        rhs: z * z1_product(sp, limit)?.extrapolated(),
    })
}

/// The same identity restricted to integers built from `primes` (odd); both
/// sides then reduce to the local factors at those primes.
pub fn z1_identity_smooth(sp: &ShiftPoint, primes: &[u64], limit: u64) -> Result<IdentityCheck> {
    z1_region(sp)?;
    let lhs = z1_series(sp, &smooth_entries(primes, limit, |_| u32::MAX));
    let one = C64::new(1.0, 0.0);
    let mut rhs = one;
    for &p in primes {
        let zl = (one - pinv(p, 2.0 * sp.alpha)).powi(3)
            * (one - pinv(p, 2.0 * sp.beta)).powi(3)
            * (one - pinv(p, sp.alpha + sp.beta)).powi(4);
        rhs *= z1_local(p, sp) / zl;
    }
    Ok(IdentityCheck { lhs, rhs })
}

/// The series for `Z₂` on `n₁, n₂ ≤ n_max` coprime to `2a` against
/// `L(½+α,χ_{k₁})² L(½+β,χ_{k₁})² Z₂`.
pub fn z2_identity_box(sp: &ShiftPoint, ctx: &LocalFactorContext, n_max: u64, limit: u64) -> Result<IdentityCheck> {
    let lhs = z2_series(sp, ctx.k, &box_entries(n_max, 2 * ctx.a)?);
    let la = kronecker_l(0.5 + sp.alpha, ctx.k1)?;
    let lb = kronecker_l(0.5 + sp.beta, ctx.k1)?;
    Ok(IdentityCheck {
        lhs,
        rhs: la * la * lb * lb * z2_value(sp, ctx, limit)?.extrapolated(),
    })
}

/// `Z₂` identity on integers built from the odd `primes`.
pub fn z2_identity_smooth(sp: &ShiftPoint, ctx: &LocalFactorContext, primes: &[u64], limit: u64) -> Result<IdentityCheck> {
    z2_region(sp)?;
    let usable: Vec<u64> = primes.iter().copied().filter(|&p| !ctx.divides_2a(p)).collect();
    let k = ctx.k;
    let entries = smooth_entries(&usable, limit, |p| ord(k.unsigned_abs(), p) + 1);
    let lhs = z2_series(sp, k, &entries);
    let one = C64::new(1.0, 0.0);
    let mut rhs = one;
    for &p in primes {
        let chi = ctx.chi(p);
        let lp = (one - chi * pinv(p, 0.5 + sp.alpha)) * (one - chi * pinv(p, 0.5 + sp.beta));
        rhs *= z2_local(p, sp, ctx) / (lp * lp);
    }
    Ok(IdentityCheck { lhs, rhs })
}

/// `Σ_{k ≤ k_max} (±1)^k k^{-2γ} Z₂(α,β,a,k²)` against `(2^{1-2γ}-1)ζ(2γ)Z₃`
/// (alternating) or `ζ(2γ)Z₃`.
pub fn z3_identity_box(sp: &ShiftPoint, a: u64, k_max: u64, alternating: bool, limit: u64) -> Result<IdentityCheck> {
    z3_region(sp)?;
    let z2sp = ShiftPoint::new(sp.alpha, sp.beta, C64::new(0.0, 0.0));
    let terms: Vec<Result<C64>> = (1..=k_max)
        .into_par_iter()
        .map(|k| {
            let ctx = LocalFactorContext::new(a, (k * k) as i64)?;
            let z2 = z2_value(&z2sp, &ctx, limit)?.extrapolated();
            let sign = if alternating && k % 2 == 1 { -1.0 } else { 1.0 };
            Ok(z2 * sign * pinv(k, 2.0 * sp.gamma))
        })
        .collect();
    let mut lhs = C64::new(0.0, 0.0);
    for t in terms {
        lhs += t?;
    }
    let zg = riemann_zeta(2.0 * sp.gamma)?;
    let factor = if alternating {
        (C64::new(2.0, 0.0).powc(1.0 - 2.0 * sp.gamma) - 1.0) * zg
    } else {
        zg
    };
    Ok(IdentityCheck {
        lhs,
        rhs: factor * z3_product(sp, a, limit)?.extrapolated(),
    })
}

/// `Z₃` identity with `k` built from `primes` (which must contain 2).
pub fn z3_identity_smooth(sp: &ShiftPoint, a: u64, primes: &[u64], limit: u64, alternating: bool) -> Result<IdentityCheck> {
    z3_region(sp)?;
    if !primes.contains(&2) {
        return Err(Error::InvalidInput("the prime set must contain 2".into()));
    }
    let z2sp = ShiftPoint::new(sp.alpha, sp.beta, C64::new(0.0, 0.0));
    let entries = smooth_entries(primes, limit, |_| u32::MAX);
    let terms: Vec<Result<C64>> = entries
        .par_iter()
        .map(|e| {
            let k = e.n;
            let ctx = LocalFactorContext::new(a, (k as i64) * (k as i64))?;
            let mut z2 = C64::new(1.0, 0.0);
            for &p in primes {
                z2 *= z2_local(p, &z2sp, &ctx);
            }
            let sign = if alternating && k % 2 == 1 { -1.0 } else { 1.0 };
            Ok(z2 * sign * pinv(k, 2.0 * sp.gamma))
        })
        .collect();
    let mut lhs = C64::new(0.0, 0.0);
    for t in terms {
        lhs += t?;
    }
    let one = C64::new(1.0, 0.0);
    let mut rhs = one;
    for &p in primes {
        let zeta_g = if alternating && p == 2 {
            C64::new(2.0, 0.0).powc(1.0 - 2.0 * sp.gamma) - 1.0
        } else {
            one
        } / (one - pinv(p, 2.0 * sp.gamma));
        let xa = one - pinv(p, 2.0 * sp.alpha + 2.0 * sp.gamma);
        let xb = one - pinv(p, 2.0 * sp.beta + 2.0 * sp.gamma);
        rhs *= zeta_g * z3_local(p, sp, a) / (xa * xa * xb * xb);
    }
    Ok(IdentityCheck { lhs, rhs })
}

/// `Σ_{a ≤ a_max odd} μ(a) a^{-(2-2γ)} Z₃(α,β,γ,a)` against the zeta ratio
/// times `Z₄`.
pub fn z4_identity_box(sp: &ShiftPoint, a_max: u64, z3_limit: u64, z4_limit: u64) -> Result<IdentityCheck> {
    z3_region(sp)?;
    let table = Z3Table::new(sp, z3_limit)?;
    let mut lhs = C64::new(0.0, 0.0);
    for a in (1..=a_max).step_by(2) {
        let mu = factorize(a)?.moebius();
        if mu != 0 {
            lhs += table.eval(a)? * mu as f64 * pinv(a, 2.0 - 2.0 * sp.gamma);
        }
    }
    Ok(IdentityCheck {
        lhs,
        rhs: z4_zeta_ratio(sp)? * z4_product(sp, z4_limit)?.extrapolated(),
    })
}

/// Möbius identity with `a` running over square-free products of the odd
/// `primes`; both sides restricted to `primes ∪ {2}`.
pub fn z4_identity_smooth(sp: &ShiftPoint, primes: &[u64]) -> Result<IdentityCheck> {
    z3_region(sp)?;
    z4_region(sp)?;
    let one = C64::new(1.0, 0.0);
    let mut all: Vec<u64> = primes.iter().copied().filter(|&p| p != 2).collect();
    let odd = all.clone();
    all.insert(0, 2);
    let z3_restricted = |a: u64| -> C64 {
        let mut v = one;
        for &p in &all {
            let xa = one - pinv(p, 2.0 * sp.alpha + 2.0 * sp.gamma);
            let xb = one - pinv(p, 2.0 * sp.beta + 2.0 * sp.gamma);
            v *= z3_local(p, sp, a) / (xa * xa * xb * xb);
        }
        v
    };
    let mut lhs = C64::new(0.0, 0.0);
    for mask in 0u64..(1 << odd.len()) {
        let mut a = 1u64;
        let mut mu = 1.0;
        for (i, &p) in odd.iter().enumerate() {
            if mask >> i & 1 == 1 {
                a *= p;
                mu = -mu;
            }
        }
        lhs += z3_restricted(a) * mu * pinv(a, 2.0 - 2.0 * sp.gamma);
    }
    let mut rhs = one;
    for &p in &all {
        let (a, b, g) = (sp.alpha, sp.beta, sp.gamma);
        let zr = (one - pinv(p, 0.5 + a + 2.0 * g)).powi(2) * (one - pinv(p, 0.5 + b + 2.0 * g)).powi(2)
            / ((one - pinv(p, 2.0 * a + 2.0 * g)).powi(3)
                * (one - pinv(p, 2.0 * b + 2.0 * g)).powi(3)
                * (one - pinv(p, a + b + 2.0 * g)).powi(4));
        rhs *= zr * z4_local(p, sp);
    }
    Ok(IdentityCheck { lhs, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::gauss_closed;
    use crate::lfunc::{lvalue_oracle, QuadChar};

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1.0)
    }

    #[test]
    fn prime_zeta_matches_direct_sum() {
        // Σ_p p^{-3} = 0.17476263929944353642…
        assert!((prime_zeta(3.0).unwrap() - 0.174_762_639_299_443_54).abs() < 1e-15);
        let primes = primes_up_to(1000);
        let direct: f64 = primes_up_to(2_000_000).iter().rev().map(|&p| (p as f64).powi(-2)).sum();
        let head: f64 = primes.iter().map(|&p| (p as f64).powi(-2)).sum();
        let tail = prime_tail_sum(2.0, &primes).unwrap();
        assert!((head + tail - prime_zeta(2.0).unwrap()).abs() < 1e-15);
        assert!((direct - prime_zeta(2.0).unwrap()).abs() < 1e-7);
    }

    #[test]
    fn a4_two_forms_agree() {
        let g = a_k_constant(4, 100_000).unwrap();
        let s = a4_simplified(100_000).unwrap();
        assert!((g.value - s.value).norm() < 1e-10 * s.value.norm());
        assert!(g.value.re > 0.0);
        for p in primes_up_to(2000).into_iter().skip(1) {
            let (x, y) = (a_k_local(4, p), a4_local_simplified(p));
            assert!((x - y).abs() < 1e-14, "p = {p}");
        }
        let small = a_k_constant(4, 10_000).unwrap();
        assert!((small.value - g.value).norm() < 1e-8);
        assert!((small.value - g.value).norm() <= small.tail_bound);
    }

    #[test]
    fn z1_two_factor_and_headline() {
        let h = ShiftPoint::real(0.5, 0.5, 0.0);
        assert!((z1_local(2, &h) - C64::new(1.0 / 1024.0, 0.0)).norm() < 1e-16);
        let z1 = z1_product(&h, 100_000).unwrap();
        let a4 = a_k_constant(4, 100_000).unwrap();
        assert!((z1.value - 4.0 * a4.value).norm() < 1e-8 * a4.value.norm());
        assert!(z1_product(&ShiftPoint::real(0.2, 0.5, 0.0), 100).is_err());
    }

    #[test]
    fn z1_horner_and_symmetry() {
        let pts = [
            ShiftPoint::new(C64::new(0.5, 3.0), C64::new(0.7, -1.0), 0.0.into()),
            ShiftPoint::real(0.3, 1.2, 0.0),
            ShiftPoint::new(C64::new(2.0, 10.0), C64::new(0.4, 0.0), 0.0.into()),
        ];
        for sp in &pts {
            for p in [2u64, 3, 5, 7, 101, 7919] {
                assert!(close(z1_local(p, sp), z1_local_horner(p, sp), 1e-14));
                assert!(close(z1_local(p, sp), z1_local(p, &sp.swapped()), 1e-14));
            }
        }
    }

    #[test]
    fn z4_headline_and_k1_at_two() {
        let h = ShiftPoint::real(0.5, 0.5, 0.0);
        assert!((k1_factor(2, &h) - C64::new(1.0 / 256.0, 0.0)).norm() < 1e-16);
        let z4 = z4_product(&h, 100_000).unwrap();
        let a4 = a_k_constant(4, 100_000).unwrap();
        let target = 32.0 * a4.extrapolated().re / (PI * PI);
        let scale = a4.extrapolated().re / (PI * PI);
        assert!((z4.extrapolated().re - target).abs() < 1e-6 * scale);
        assert!((z4.value.re - target).abs() <= z4.tail_bound + 1e-6 * scale);
        assert!(z4_product(&ShiftPoint::real(0.5, 0.5, 0.2), 100).is_err());
    }

    #[test]
    fn f_at_origin_matches_closed_form() {
        let (assembled, closed) = f_at_origin(&BumpProfile::reference(), 20_000).unwrap();
        assert!((assembled - closed).abs() < 1e-6 * closed.abs());
        assert!(closed < 0.0);
    }

    #[test]
    fn z2_closed_form_is_the_finite_sum() {
        let sp = ShiftPoint::real(0.8, 0.8, 0.0);
        let ctx = LocalFactorContext::new(3, 5).unwrap();
        let chi = ctx.chi(7);
        let closed = 1.0 + 2.0 * chi * pinv(7, 0.5 + sp.alpha) + 2.0 * chi * pinv(7, 0.5 + sp.beta);
        assert!((z2_local_sum(7, &sp, 5) - closed).norm() < 1e-12);
        // the finite sum also agrees with Gauss sums evaluated at the full modulus
        let k = 45i64;
        let mut direct = C64::new(0.0, 0.0);
        for n1 in 0..4u32 {
            for n2 in 0..4u32 {
                let n = 3i64.pow(n1 + n2);
                let g = gauss_closed(k, n).unwrap().value / n as f64;
                direct += pinv(3, sp.alpha * n1 as f64 + sp.beta * n2 as f64) * ((n1 + 1) * (n2 + 1)) as f64 * g;
            }
        }
        assert!((z2_local_sum(3, &sp, k) - direct).norm() < 1e-12);
    }

    #[test]
    fn context_split() {
        let c = LocalFactorContext::new(1, 2).unwrap();
        assert_eq!((c.k1, c.k2), (8, 1));
        let c = LocalFactorContext::new(1, 9).unwrap();
        assert_eq!((c.k1, c.k2), (1, 6));
        let c = LocalFactorContext::new(1, -3).unwrap();
        assert_eq!((c.k1, c.k2), (-3, 2));
        assert!(LocalFactorContext::new(2, 1).is_err());
        assert!(LocalFactorContext::new(1, 0).is_err());
    }

    #[test]
    fn z2_exceptional_primes_follow_2a() {
        let sp = ShiftPoint::real(0.9, 1.1, 0.0);
        let (a1, a2) = (3u64, 5u64);
        let whole = LocalFactorContext::new(a1 * a2, 7).unwrap();
        let c1 = LocalFactorContext::new(a1, 7).unwrap();
        let c2 = LocalFactorContext::new(a2, 7).unwrap();
        for p in primes_up_to(50) {
            assert_eq!(whole.divides_2a(p), c1.divides_2a(p) || c2.divides_2a(p));
            if whole.divides_2a(p) {
                assert_eq!(z2_local(p, &sp, &whole), z2_prefactor(p, &sp, whole.chi(p)));
            }
        }
    }

    #[test]
    fn kronecker_l_matches_oracle() {
        let s = C64::new(1.6, 0.0);
        let q = QuadChar::new(1).unwrap();
        assert!(close(kronecker_l(s, 8).unwrap(), lvalue_oracle(s, q).unwrap(), 1e-13));
        assert!(close(kronecker_l(s, 1).unwrap(), riemann_zeta(s).unwrap(), 1e-14));
    }

    #[test]
    fn smooth_identities() {
        let primes = [3u64, 5, 7, 11];
        let c = z1_identity_smooth(&ShiftPoint::real(1.2, 1.2, 0.0), &primes, 10_000_000_000_000).unwrap();
        assert!(c.residual() < 1e-9, "{c:?}");
        let ctx = LocalFactorContext::new(1, 2).unwrap();
        let c = z2_identity_smooth(&ShiftPoint::real(1.1, 1.1, 0.0), &ctx, &primes, u64::MAX).unwrap();
        assert!(c.residual() < 1e-12, "{c:?}");
        let ctx = LocalFactorContext::new(3, 45).unwrap();
        let c = z2_identity_smooth(&ShiftPoint::real(0.6, 0.9, 0.0), &ctx, &primes, u64::MAX).unwrap();
        assert!(c.residual() < 1e-12, "{c:?}");
        let sp = ShiftPoint::real(1.0, 1.0, 0.8);
        for alt in [true, false] {
            let c = z3_identity_smooth(&sp, 3, &[2, 3, 5, 7], 100_000_000, alt).unwrap();
            assert!(c.residual() < 1e-9, "{alt} {c:?}");
        }
        let c = z4_identity_smooth(&ShiftPoint::real(0.7, 0.7, 0.05), &[3, 5, 7, 11, 13]).unwrap();
        assert!(c.residual() < 1e-12, "{c:?}");
    }

    #[test]
    fn z3_table_matches_products() {
        let sp = ShiftPoint::real(1.0, 0.9, 0.3);
        let t = Z3Table::new(&sp, 3000).unwrap();
        for a in [1u64, 3, 15, 105, 1001] {
            let d = z3_product(&sp, a, 3000).unwrap().value;
            assert!(close(t.eval(a).unwrap(), d, 1e-12));
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(5))]
        #[test]
        fn z1_doubling_within_tail(a in 0.35f64..1.0, b in 0.35f64..1.0, t in -5.0f64..5.0) {
            let sp = ShiftPoint::new(C64::new(a, t), C64::new(b, -t), 0.0.into());
            let r1 = z1_product(&sp, 20_000).unwrap();
            let r2 = z1_product(&sp, 40_000).unwrap();
            proptest::prop_assert!((r2.value - r1.value).norm() <= r1.tail_bound + r2.rounding_bound());
            proptest::prop_assert!(r2.tail_bound <= r1.tail_bound);
        }

        #[test]
        fn z2_doubling_within_tail(a in 0.7f64..2.0, b in 0.7f64..2.0, k in 1i64..30) {
            let sp = ShiftPoint::real(a, b, 0.0);
            let ctx = LocalFactorContext::new(3, k).unwrap();
            let r1 = z2_value(&sp, &ctx, 20_000).unwrap();
            let r2 = z2_value(&sp, &ctx, 40_000).unwrap();
            proptest::prop_assert!((r2.value - r1.value).norm() <= r1.tail_bound + r2.rounding_bound());
        }

        #[test]
        fn z3_doubling_within_tail(a in 0.6f64..2.0, b in 0.6f64..2.0, g in 0.05f64..1.0) {
            let sp = ShiftPoint::real(a, b, g);
            let r1 = z3_product(&sp, 15, 20_000).unwrap();
            let r2 = z3_product(&sp, 15, 40_000).unwrap();
            proptest::prop_assert!((r2.value - r1.value).norm() <= r1.tail_bound + r2.rounding_bound());
        }

        #[test]
        fn z4_doubling_within_tail(a in 0.4f64..2.0, b in 0.4f64..2.0, g in -0.06f64..0.12) {
            let sp = ShiftPoint::real(a, b, g);
            let r1 = z4_product(&sp, 20_000).unwrap();
            let r2 = z4_product(&sp, 40_000).unwrap();
            proptest::prop_assert!((r2.value - r1.value).norm() <= r1.tail_bound + r2.rounding_bound());
        }
    }
}
