//! Complex log-gamma, Hurwitz and Riemann zeta, the gamma factor
//! `g(s) = π^{-s} (Γ(s/2+1/4)/Γ(1/4))²`, and the smoothing weight
//! `ω(ξ) = (1/2πi) ∫_{(c)} π^s g(s) ξ^{-s} ds/s` by vertical-line quadrature.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS_COEF: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_747,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_8e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_6e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_7;

fn is_nonpositive_integer(s: C64) -> bool {
    s.im == 0.0 && s.re <= 0.0 && s.re.fract() == 0.0
}

fn lanczos_ln_gamma(z: C64) -> C64 {
    let x = z - 1.0;
    let mut a = C64::new(LANCZOS_COEF[0], 0.0);
    for (k, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        a += c / (x + k as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    HALF_LN_2PI + (x + 0.5) * t.ln() - t + a.ln()
}

/// Principal branch of `log Γ(s)`: real on the positive axis, continuous off
/// the negative real axis, and `log Γ(s+1) = log Γ(s) + log s`.
pub fn log_gamma(s: C64) -> Result<C64> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::InvalidInput(format!("log_gamma({s})")));
    }
    if is_nonpositive_integer(s) {
        return Err(Error::Pole {
            func: "log_gamma",
            at: s.to_string(),
        });
    }
    if s.re >= 0.5 {
        return Ok(lanczos_ln_gamma(s));
    }
    let shift = (0.5 - s.re).ceil() as usize;
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..shift {
        acc += (s + k as f64).ln();
    }
    Ok(lanczos_ln_gamma(s + shift as f64) - acc)
}

pub fn gamma(s: C64) -> Result<C64> {
    Ok(log_gamma(s)?.exp())
}

fn ln_gamma_quarter() -> f64 {
    static V: OnceLock<f64> = OnceLock::new();
    *V.get_or_init(|| lanczos_ln_gamma(C64::new(0.25, 0.0)).re)
}

/// `π^s g(s) = (Γ(s/2+1/4)/Γ(1/4))²`.
pub fn gamma_ratio_sq(s: C64) -> Result<C64> {
    let z = s * 0.5 + 0.25;
    if is_nonpositive_integer(z) {
        return Err(Error::Pole {
            func: "g_factor",
            at: s.to_string(),
        });
    }
    Ok(((log_gamma(z)? - ln_gamma_quarter()) * 2.0).exp())
}

/// The gamma factor `g(s) = π^{-s}(Γ(s/2+1/4)/Γ(1/4))²`.
pub fn g_factor(s: C64) -> Result<C64> {
    Ok(gamma_ratio_sq(s)? * (-s * PI.ln()).exp())
}

const BERNOULLI_2J: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

/// Hurwitz zeta `ζ(s, a) = Σ_{k≥0} (k+a)^{-s}` by Euler–Maclaurin summation.
pub fn hurwitz_zeta(s: C64, a: f64) -> Result<C64> {
    if s == C64::new(1.0, 0.0) {
        return Err(Error::Pole {
            func: "hurwitz_zeta",
            at: "1".into(),
        });
    }
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::InvalidInput(format!("hurwitz_zeta: a = {a} not in (0,1]")));
    }
    let n = 20usize.max(s.norm().ceil() as usize + 12);
    let mut sum = C64::new(0.0, 0.0);
    for k in 0..n {
        sum += (-s * (k as f64 + a).ln()).exp();
    }
    let w = n as f64 + a;
    let w_pow = (-s * w.ln()).exp();
    sum += w_pow * w / (s - 1.0);
    sum += w_pow * 0.5;
    let mut q = s / (2.0 * w);
    let w2 = w * w;
    for (j, &b) in BERNOULLI_2J.iter().enumerate() {
        let term = q * b * w_pow;
        sum += term;
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
        let j2 = 2.0 * (j + 1) as f64;
        q = q * (s + (j2 - 1.0)) * (s + j2) / ((j2 + 1.0) * (j2 + 2.0) * w2);
    }
    Ok(sum)
}

/// Digamma `ψ(x)` for real `x > 0`: upward recurrence then the asymptotic series.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::InvalidInput(format!("digamma({x})")));
    }
    let mut acc = 0.0;
    let mut x = x;
    while x < 12.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    let mut pow = inv2;
    let mut series = 0.0;
    for (j, &b) in BERNOULLI_2J.iter().take(8).enumerate() {
        series += b / (2.0 * (j + 1) as f64) * pow;
        pow *= inv2;
    }
    Ok(acc + x.ln() - 0.5 / x - series)
}

pub fn riemann_zeta(s: C64) -> Result<C64> {
    hurwitz_zeta(s, 1.0).map_err(|e| match e {
        Error::Pole { .. } => Error::Pole {
            func: "riemann_zeta",
            at: "1".into(),
        },
        other => other,
    })
}

/// Vertical-line trapezoid parameters for contour integrals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureParams {
    /// Abscissa `c` of the contour `Re(s) = c`. For ω, `c` in `(-1/2, 0)`
    /// picks up the residue 1 at `s = 0`.
    pub line_re: f64,
    /// Half height `T`; the contour is truncated to `|Im s| ≤ T`.
    pub half_height: f64,
    /// Trapezoid step `h`.
    pub step: f64,
}

impl Default for QuadratureParams {
    fn default() -> Self {
        Self {
            line_re: 1.0,
            half_height: 60.0,
            step: 0.05,
        }
    }
}

impl QuadratureParams {
    pub fn nodes_per_side(&self) -> usize {
        (self.half_height / self.step).round() as usize
    }

    pub fn validate_for_omega(&self) -> Result<()> {
        let line_ok = self.line_re > -0.5 && self.line_re != 0.0;
        if !(line_ok && self.step > 0.0 && self.half_height > 0.0) {
            return Err(Error::InvalidInput(format!("bad quadrature params {self:?}")));
        }
        let ratio = self.half_height / self.step;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::InvalidInput("T/h must be an integer".into()));
        }
        Ok(())
    }
}

/// Tolerance on the imaginary residue of the raw ω quadrature.
pub const OMEGA_IMAG_TOL: f64 = 1e-10;
/// Tolerance on the truncated contour tail of ω.
pub const OMEGA_TAIL_TOL: f64 = 1e-12;

/// Precomputed contour nodes for ω: `ω(ξ) ≈ Σ_k w_k ξ^{-s_k}`.
#[derive(Clone, Debug)]
pub struct OmegaQuadrature {
    params: QuadratureParams,
    nodes: Vec<C64>,
    weights: Vec<C64>,
    tail: f64,
    residue: f64,
}

impl OmegaQuadrature {
    pub fn new(params: QuadratureParams) -> Result<Self> {
        params.validate_for_omega()?;
        let k = params.nodes_per_side() as i64;
        let mut nodes = Vec::with_capacity(2 * k as usize + 1);
        let mut weights = Vec::with_capacity(2 * k as usize + 1);
        for j in -k..=k {
            let s = C64::new(params.line_re, j as f64 * params.step);
            let w = gamma_ratio_sq(s)? / s * (params.step / (2.0 * PI));
            nodes.push(s);
            weights.push(w);
        }
        let top = C64::new(params.line_re, params.half_height);
        // |Γ(s/2+1/4)|² decays like e^{-π|t|/2}; integrate that envelope beyond T.
        let tail = 2.0 * gamma_ratio_sq(top)?.norm() / top.norm() / (PI / 2.0) / (2.0 * PI);
        Ok(Self {
            params,
            nodes,
            weights,
            tail,
            residue: if params.line_re < 0.0 { 1.0 } else { 0.0 },
        })
    }

    pub fn params(&self) -> QuadratureParams {
        self.params
    }

    /// Raw complex quadrature value of ω(ξ) (before discarding `Im`).
    pub fn raw(&self, xi: f64) -> C64 {
        let lx = xi.ln();
        let sum: C64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(s, w)| w * (-s * lx).exp())
            .sum();
        sum + self.residue
    }

    /// `dω/d(log ξ)`.
    pub fn dlog(&self, xi: f64) -> f64 {
        let lx = xi.ln();
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(s, w)| -(w * s * (-s * lx).exp()).re)
            .sum()
    }

    /// `(Re ω(ξ), dω/d(log ξ))` from one pass over the nodes.
    pub fn value_dlog(&self, xi: f64) -> (f64, f64) {
        let lx = xi.ln();
        let mut v = self.residue;
        let mut d = 0.0;
        for (s, w) in self.nodes.iter().zip(&self.weights) {
            let term = w * (-s * lx).exp();
            v += term.re;
            d -= (term * s).re;
        }
        (v, d)
    }

    /// Truncation-tail estimate at `±iT` for the given ξ.
    pub fn tail_estimate(&self, xi: f64) -> f64 {
        self.tail * xi.powf(-self.params.line_re)
    }

    pub fn eval(&self, xi: f64) -> Result<f64> {
        if !(xi > 0.0 && xi.is_finite()) {
            return Err(Error::InvalidInput(format!("omega: xi = {xi}")));
        }
        let tail = self.tail_estimate(xi);
        if tail > OMEGA_TAIL_TOL {
            return Err(Error::Convergence {
                tail,
                tol: OMEGA_TAIL_TOL,
            });
        }
        let raw = self.raw(xi);
        if raw.im.abs() > OMEGA_IMAG_TOL {
            return Err(Error::Accuracy(format!(
                "omega({xi}) has imaginary residue {:e}",
                raw.im
            )));
        }
        Ok(raw.re)
    }
}

/// ω(ξ) by direct contour quadrature.
pub fn omega_weight(xi: f64, q: QuadratureParams) -> Result<f64> {
    OmegaQuadrature::new(q)?.eval(xi)
}

pub fn default_omega_quadrature() -> &'static OmegaQuadrature {
    static Q: OnceLock<OmegaQuadrature> = OnceLock::new();
    Q.get_or_init(|| OmegaQuadrature::new(QuadratureParams::default()).expect("default params"))
}

/// Contour left of the pole at 0, for `ξ < 1`: no cancellation against `ξ^{-c}`.
pub const SMALL_XI_PARAMS: QuadratureParams = QuadratureParams {
    line_re: -0.25,
    half_height: 60.0,
    step: 0.025,
};

pub fn small_xi_omega_quadrature() -> &'static OmegaQuadrature {
    static Q: OnceLock<OmegaQuadrature> = OnceLock::new();
    Q.get_or_init(|| OmegaQuadrature::new(SMALL_XI_PARAMS).expect("small-xi params"))
}

/// ω tabulated for fast repeated evaluation: a geometric grid in `log ξ` below
/// `ξ = 1`, a uniform grid in `ξ` above, cubic Hermite interpolation on both
/// with derivatives taken from the contour sum.
///
/// Nodes with `ξ < 1` come from `small`, the rest from `large`. Beyond
/// `xi_max` the weight is returned as 0; below the grid `small` is summed
/// directly.
#[derive(Clone, Debug)]
pub struct OmegaTable {
    log_min: f64,
    log_inv_step: f64,
    log_nodes: Vec<[f64; 2]>,
    uniform_inv_step: f64,
    uniform_nodes: Vec<[f64; 2]>,
    xi_max: f64,
    envelope: f64,
    small: OmegaQuadrature,
    large: OmegaQuadrature,
}

/// Rate of the exponential envelope `ω(ξ) ≤ C e^{-2ξ}` for `ξ ≥ 1`.
pub const OMEGA_DECAY_RATE: f64 = 2.0;
/// Boundary between the logarithmic and the uniform grid.
pub const OMEGA_UNIFORM_START: f64 = 1.0;

#[inline]
fn hermite(nodes: &[[f64; 2]], x: f64) -> f64 {
    let i = x as usize;
    let t = x - i as f64;
    let [y0, m0] = nodes[i];
    let [y1, m1] = nodes[i + 1];
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * m0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * m1
}

impl OmegaTable {
    pub fn new(
        small: OmegaQuadrature,
        large: OmegaQuadrature,
        log_min: f64,
        log_step: f64,
        xi_max: f64,
        uniform_step: f64,
    ) -> Self {
        use rayon::prelude::*;
        let pick = |xi: f64| if xi < 1.0 { &small } else { &large };
        let n_log = ((OMEGA_UNIFORM_START.ln() - log_min) / log_step).ceil() as usize + 2;
        let log_nodes: Vec<[f64; 2]> = (0..n_log)
            .into_par_iter()
            .map(|i| {
                let xi = (log_min + log_step * i as f64).exp();
                let (v, d) = pick(xi).value_dlog(xi);
                [v, d * log_step]
            })
            .collect();
        let n_uni = ((xi_max - OMEGA_UNIFORM_START) / uniform_step).ceil() as usize + 2;
        let uniform_nodes: Vec<[f64; 2]> = (0..n_uni)
            .into_par_iter()
            .map(|i| {
                let xi = OMEGA_UNIFORM_START + uniform_step * i as f64;
                let (v, d) = pick(xi).value_dlog(xi);
                [v, d / xi * uniform_step]
            })
            .collect();
        let mut envelope: f64 = 0.0;
        // ω e^{2ξ} decreases like 1/ξ; beyond ξ = 8 the quadrature is at its roundoff floor.
        let mut xi = 1.0;
        while xi <= xi_max.min(8.0) {
            envelope = envelope.max(large.raw(xi).re.abs() * (OMEGA_DECAY_RATE * xi).exp());
            xi += 0.05;
        }
        Self {
            log_min,
            log_inv_step: 1.0 / log_step,
            log_nodes,
            uniform_inv_step: 1.0 / uniform_step,
            uniform_nodes,
            xi_max,
            envelope: envelope * 1.1,
            small,
            large,
        }
    }

    /// Constant `C` with `|ω(ξ)| ≤ C e^{-2ξ}` on `ξ ≥ 1` (calibrated, 10% margin).
    pub fn envelope_constant(&self) -> f64 {
        self.envelope
    }

    pub fn xi_max(&self) -> f64 {
        self.xi_max
    }

    /// Direct quadrature value, using the same contour split as the table.
    pub fn direct(&self, xi: f64) -> f64 {
        if xi < 1.0 {
            self.small.raw(xi).re
        } else {
            self.large.raw(xi).re
        }
    }

    #[inline]
    pub fn eval(&self, xi: f64) -> f64 {
        if xi >= OMEGA_UNIFORM_START {
            if xi >= self.xi_max {
                return 0.0;
            }
            return hermite(&self.uniform_nodes, (xi - OMEGA_UNIFORM_START) * self.uniform_inv_step);
        }
        let x = (xi.ln() - self.log_min) * self.log_inv_step;
        if x < 0.0 {
            return self.small.raw(xi).re;
        }
        hermite(&self.log_nodes, x)
    }
}

/// Shared table built from the default quadrature.
pub fn default_omega_table() -> &'static OmegaTable {
    static T: OnceLock<OmegaTable> = OnceLock::new();
    T.get_or_init(|| {
        OmegaTable::new(
            small_xi_omega_quadrature().clone(),
            default_omega_quadrature().clone(),
            -18.0,
            0.002,
            24.0,
            0.002,
        )
    })
}
