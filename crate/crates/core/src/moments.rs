//! Empirical moment experiments: the sweep over odd square-free `d`, the
//! Poisson summation check, and the Cauchy–Schwarz lower bound.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::jacobi_odd;
use crate::error::{Error, Result};
use crate::euler::{a_k_constant, DEFAULT_PRIME_LIMIT};
use crate::gauss::gauss_closed;
use crate::lfunc::{afe_truncation, lvalue_oracle, odd_squarefree_up_to, AfeEngine, QuadChar};
use crate::smooth::{derivative_l1, fourier_hat, BumpProfile};

pub const DEFAULT_SWEEP_CAP: u64 = 200_000;
pub const DEFAULT_SWEEP_TOL: f64 = 1e-10;
/// `2A(d)` below `-NEGATIVE_TOL` is an accuracy fault.
pub const NEGATIVE_TOL: f64 = 1e-6;
pub const ORACLE_SAMPLE_MAX_D: u64 = 10_000;
pub const ORACLE_SAMPLE_STRIDE: usize = 100;
pub const ORACLE_TOL: f64 = 1e-4;
pub const POISSON_TAIL_TOL: f64 = 1e-12;
pub const CAUCHY_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub x_max: u64,
    pub dyadic: bool,
    pub profile: Option<BumpProfile>,
    pub afe_tol: f64,
    pub thread_blocks: usize,
    pub moments: Vec<u32>,
    pub cap: u64,
}

impl SweepConfig {
    pub fn new(x_max: u64) -> Self {
        Self {
            x_max,
            dyadic: true,
            profile: None,
            afe_tol: DEFAULT_SWEEP_TOL,
            thread_blocks: 64,
            moments: vec![1, 2, 3, 4],
            cap: DEFAULT_SWEEP_CAP,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.x_max == 0 {
            return Err(Error::InvalidInput("sweep X_max must be positive".into()));
        }
        if self.x_max > self.cap {
            return Err(Error::Capacity {
                requested: self.x_max,
                budget: self.cap,
            });
        }
        if !(self.afe_tol > 0.0 && self.afe_tol < 1.0) {
            return Err(Error::InvalidInput(format!("AFE tolerance {} outside (0, 1)", self.afe_tol)));
        }
        if self.thread_blocks == 0 {
            return Err(Error::InvalidInput("thread_blocks must be positive".into()));
        }
        if self.moments.is_empty() || self.moments.iter().any(|k| !(1..=4).contains(k)) {
            return Err(Error::InvalidInput(format!("moment orders {:?} must lie in 1..=4", self.moments)));
        }
        Ok(())
    }

    /// The `X` values reported: powers of two up to `x_max`, then `x_max`.
    pub fn x_values(&self) -> Vec<u64> {
        let mut xs = Vec::new();
        if self.dyadic {
            let mut x = 2u64;
            while x < self.x_max {
                xs.push(x);
                x *= 2;
            }
        }
        xs.push(self.x_max);
        xs
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentRecord {
    #[serde(rename = "X")]
    pub x: u64,
    pub k: u32,
    pub sharp_sum: f64,
    pub smooth_sum: Option<f64>,
    pub predicted: Option<f64>,
    pub ratio: Option<f64>,
    /// Values of `2A(d)` in `[-NEGATIVE_TOL, 0)` clamped to zero, `d ≤ X`.
    pub warnings: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleSample {
    pub d: u64,
    /// `(2A(d))²`.
    pub afe_fourth: f64,
    /// `L(½, χ_{8d})⁴` from the Hurwitz oracle.
    pub oracle_fourth: f64,
    pub rel_error: f64,
}

#[derive(Clone, Debug)]
pub struct SweepOutput {
    pub records: Vec<MomentRecord>,
    pub samples: Vec<OracleSample>,
    /// Smallest `2A(d)` seen before clamping.
    pub min_two_a: f64,
    pub clamped: u64,
}

/// `a₄ X log¹⁰X / (302400 π²)`.
pub fn predicted_fourth(a4: f64, x: u64) -> f64 {
    let lx = (x as f64).ln();
    a4 / (302_400.0 * PI * PI) * x as f64 * lx.powi(10)
}

/// `2A(d) = L(½, χ_{8d})²` for every odd square-free `d ≤ d_max`, in
/// ascending order of `d`. Blocks run in parallel and are joined in order.
fn two_a_values(ds: &[u64], tol: f64, blocks: usize) -> Result<Vec<f64>> {
    let Some(&d_max) = ds.last() else {
        return Ok(Vec::new());
    };
    let engine = AfeEngine::for_d_max(d_max, tol)?;
    let chunk = ds.len().div_ceil(blocks).max(1);
    let parts: Vec<Result<Vec<f64>>> = ds
        .par_chunks(chunk)
        .map(|block| {
            block
                .iter()
                .map(|&d| Ok(2.0 * engine.a_of_d(QuadChar::new(d)?, tol)?.a_value))
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(ds.len());
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

fn oracle_samples(ds: &[u64], two_a: &[f64]) -> Result<Vec<OracleSample>> {
    let picks: Vec<usize> = (0..ds.len())
        .step_by(ORACLE_SAMPLE_STRIDE)
        .filter(|&i| ds[i] <= ORACLE_SAMPLE_MAX_D)
        .collect();
    picks
        .par_iter()
        .map(|&i| {
            let d = ds[i];
            let l = lvalue_oracle(C64::new(0.5, 0.0), QuadChar::new(d)?)?.re;
            let oracle_fourth = l.powi(4);
            let afe_fourth = two_a[i] * two_a[i];
            let rel_error = (afe_fourth - oracle_fourth).abs() / oracle_fourth.abs();
            Ok(OracleSample {
                d,
                afe_fourth,
                oracle_fourth,
                rel_error,
            })
        })
        .collect()
}

pub fn sweep_moments(cfg: &SweepConfig) -> Result<SweepOutput> {
    cfg.validate()?;
    let reach = match &cfg.profile {
        Some(p) => (p.support().1 * cfg.x_max as f64).floor() as u64,
        None => cfg.x_max,
    };
    let ds = odd_squarefree_up_to(reach.max(cfg.x_max));
    let raw = two_a_values(&ds, cfg.afe_tol, cfg.thread_blocks)?;

    let mut min_two_a = f64::INFINITY;
    let mut clamped_at = Vec::new();
    let mut sq = Vec::with_capacity(raw.len());
    for (&d, &v) in ds.iter().zip(&raw) {
        min_two_a = min_two_a.min(v);
        if v < -NEGATIVE_TOL {
            return Err(Error::Accuracy(format!("2A({d}) = {v:e} is negative beyond tolerance")));
        }
        if v < 0.0 {
            log::warn!("clamping 2A({d}) = {v:e} to zero");
            clamped_at.push(d);
            sq.push(0.0);
        } else {
            sq.push(v);
        }
    }

    let samples = oracle_samples(&ds, &raw)?;
    if let Some(bad) = samples.iter().find(|s| !(s.rel_error <= ORACLE_TOL)) {
        return Err(Error::Accuracy(format!(
            "AFE fourth power at d = {} differs from the oracle by {:e}",
            bad.d, bad.rel_error
        )));
    }

    let a4 = if cfg.moments.contains(&4) {
        Some(a_k_constant(4, DEFAULT_PRIME_LIMIT)?.extrapolated().re)
    } else {
        None
    };

    let mut moments = cfg.moments.clone();
    moments.sort_unstable();
    moments.dedup();
    let mut records = Vec::new();
    for &k in &moments {
        // |L|^k = (2A)^{k/2}
        let term = |v: f64| match k {
            2 => v,
            4 => v * v,
            _ => v.powf(k as f64 / 2.0),
        };
        for x in cfg.x_values() {
            let mut sharp = 0.0;
            let mut smooth = 0.0;
            for (&d, &v) in ds.iter().zip(&sq) {
                let t = term(v);
                if d <= x {
                    sharp += t;
                }
                if let Some(p) = &cfg.profile {
                    let w = p.eval(d as f64 / x as f64);
                    if w != 0.0 {
                        smooth += t * w;
                    }
                }
            }
            let predicted = match (k, a4) {
                (4, Some(a4)) => Some(predicted_fourth(a4, x)),
                _ => None,
            };
            let ratio = predicted.filter(|&p| p > 0.0).map(|p| sharp / p);
            records.push(MomentRecord {
                x,
                k,
                sharp_sum: sharp,
                smooth_sum: cfg.profile.map(|_| smooth),
                predicted,
                ratio,
                warnings: clamped_at.iter().filter(|&&d| d <= x).count() as u64,
            });
        }
    }
    Ok(SweepOutput {
        records,
        samples,
        min_two_a,
        clamped: clamped_at.len() as u64,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoissonCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    /// Bound on the omitted `|k| > Kmax` terms.
    pub tail_bound: f64,
}

/// Bound on `(Z/2n) Σ_{|k|>K} |G_k(n)| |Φ̂(kZ/2n)|` using `|G_k(n)| ≤ n` and
/// `|Φ̂(y)| ≤ √2 ‖Φ^{(m)}‖₁ / (2π|y|)^m`, minimised over `2 ≤ m ≤ 10`.
pub fn poisson_tail_bound(n: u64, z: f64, profile: &BumpProfile, k_max: u64) -> Result<f64> {
    let mut best = f64::INFINITY;
    let h = z / (2.0 * n as f64);
    for m in 2..=10usize {
        let norm = derivative_l1(profile, m)?;
        let mf = m as f64;
        // Σ_{k>K} k^{-m} ≤ K^{1-m}/(m-1), and ≤ ζ(m) when K = 0 is excluded
        let sum_k = if k_max == 0 {
            f64::INFINITY
        } else {
            (k_max as f64).powf(1.0 - mf) / (mf - 1.0)
        };
        let b = h * 2.0 * n as f64 * 2f64.sqrt() * norm / (2.0 * PI * h).powf(mf) * sum_k;
        best = best.min(b);
    }
    Ok(best)
}

/// Smallest `Kmax` whose tail bound is below `tol`.
pub fn poisson_kmax(n: u64, z: f64, profile: &BumpProfile, tol: f64) -> Result<u64> {
    let mut k = 1u64;
    while poisson_tail_bound(n, z, profile, k)? >= tol {
        k *= 2;
        if k > 1 << 40 {
            return Err(Error::Truncation { needed: k, cap: 1 << 40 });
        }
    }
    let (mut lo, mut hi) = (k / 2, k);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if poisson_tail_bound(n, z, profile, mid)? < tol {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `Σ_{d odd} (d/n) Φ(d/Z)` against `(Z/2n)(2/n) Σ_{|k|≤Kmax} (-1)^k G_k(n) Φ̂(kZ/2n)`.
pub fn poisson_check(n: u64, z: f64, profile: &BumpProfile, k_max: u64) -> Result<PoissonCheck> {
    if n == 0 || n % 2 == 0 {
        return Err(Error::InvalidInput(format!("Poisson modulus n = {n} must be odd and positive")));
    }
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::InvalidInput(format!("Poisson scale Z = {z}")));
    }
    let tail_bound = poisson_tail_bound(n, z, profile, k_max)?;
    if !(tail_bound < POISSON_TAIL_TOL) {
        return Err(Error::Truncation {
            needed: poisson_kmax(n, z, profile, POISSON_TAIL_TOL)?,
            cap: k_max,
        });
    }
    let (a, b) = profile.support();
    let d_lo = (a * z).floor().max(1.0) as u64;
    let d_hi = (b * z).ceil() as u64;
    let lhs: f64 = (d_lo..=d_hi)
        .filter(|d| d % 2 == 1)
        .map(|d| jacobi_odd(d, n) as f64 * profile.eval(d as f64 / z))
        .sum();

    let h = z / (2.0 * n as f64);
    let ni = n as i64;
    let terms: Vec<Result<f64>> = (0..=k_max as i64)
        .into_par_iter()
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let mut t = gauss_closed(k, ni)?.value * fourier_hat(profile, k as f64 * h)?.value.re;
            if k > 0 {
                t += gauss_closed(-k, ni)?.value * fourier_hat(profile, -k as f64 * h)?.value.re;
            }
            Ok(sign * t)
        })
        .collect();
    let mut acc = 0.0;
    for t in terms {
        acc += t?;
    }
    let chi2 = jacobi_odd(2, n) as f64;
    let rhs = h * chi2 * acc;
    Ok(PoissonCheck {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
        tail_bound,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CauchyCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs / lhs`.
    pub ratio: f64,
}

/// `Σ* L⁴ Φ(d/X) ≥ (Σ* A_U L² Φ)² / Σ* A_U² Φ`.
pub fn cauchy_lower_check(x: u64, u: f64, profile: &BumpProfile, tol: f64) -> Result<CauchyCheck> {
    if x == 0 || x > DEFAULT_SWEEP_CAP {
        return Err(Error::InvalidInput(format!("X = {x} outside 1..={DEFAULT_SWEEP_CAP}")));
    }
    if !(u > 0.0 && u.is_finite()) {
        return Err(Error::InvalidInput(format!("U = {u}")));
    }
    let (_, b) = profile.support();
    let reach = (b * x as f64).floor() as u64;
    let ds: Vec<u64> = odd_squarefree_up_to(reach)
        .into_iter()
        .filter(|&d| profile.eval(d as f64 / x as f64) > 0.0)
        .collect();
    let Some(&d_max) = ds.last() else {
        return Err(Error::ZeroDenominator(format!("no odd square-free d in the support of Φ(d/{x})")));
    };
    let t_max = (8 * d_max) as f64;
    let omega_c = crate::special::default_omega_table().envelope_constant();
    let n = afe_truncation(t_max.max(u), tol, omega_c);
    let engine = AfeEngine::new(n)?;
    let rows: Vec<Result<(f64, f64, f64)>> = ds
        .par_iter()
        .map(|&d| {
            let q = QuadChar::new(d)?;
            let table = q.period_table();
            let l2 = engine.a_t_with_table(q.modulus() as f64, q, &table, tol)?.a_value;
            let au = engine.a_t_with_table(u, q, &table, tol)?.a_value;
            Ok((l2, au, profile.eval(d as f64 / x as f64)))
        })
        .collect();
    let (mut lhs, mut cross, mut den) = (0.0, 0.0, 0.0);
    for r in rows {
        let (l2, au, w) = r?;
        lhs += l2 * l2 * w;
        cross += au * l2 * w;
        den += au * au * w;
    }
    if den == 0.0 {
        return Err(Error::ZeroDenominator("Σ* A_U² Φ vanishes".into()));
    }
    let rhs = cross * cross / den;
    if lhs < rhs - CAUCHY_SLACK * lhs.abs() {
        return Err(Error::Accuracy(format!("Cauchy–Schwarz violated: lhs {lhs:e} < rhs {rhs:e}")));
    }
    Ok(CauchyCheck {
        lhs,
        rhs,
        ratio: rhs / lhs,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

pub const CSV_HEADER: &str = "X,k,sharp_sum,smooth_sum,predicted,ratio,warnings";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepDocument {
    pub config: SweepConfig,
    pub records: Vec<MomentRecord>,
}

// Display for f64 is the shortest string that parses back to the same value.
fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn render_results(records: &[MomentRecord], config: &SweepConfig, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => {
            let mut s = String::from(CSV_HEADER);
            s.push('\n');
            for r in records {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{}",
                    r.x,
                    r.k,
                    r.sharp_sum,
                    opt(r.smooth_sum),
                    opt(r.predicted),
                    opt(r.ratio),
                    r.warnings
                );
            }
            Ok(s)
        }
        OutputFormat::Json => {
            let doc = SweepDocument {
                config: config.clone(),
                records: records.to_vec(),
            };
            let mut s = serde_json::to_string_pretty(&doc).map_err(|e| Error::Io(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
    }
}

pub fn emit_results(records: &[MomentRecord], config: &SweepConfig, format: OutputFormat, path: &Path) -> Result<()> {
    std::fs::write(path, render_results(records, config, format)?)?;
    Ok(())
}

pub fn parse_json(text: &str) -> Result<SweepDocument> {
    serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("sweep JSON: {e}")))
}

pub fn parse_csv(text: &str) -> Result<Vec<MomentRecord>> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::InvalidInput("sweep CSV header mismatch".into()));
    }
    let bad = |l: &str| Error::InvalidInput(format!("sweep CSV row: {l}"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 7 {
                return Err(bad(l));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad(l));
            let opt = |s: &str| if s.is_empty() { Ok(None) } else { num(s).map(Some) };
            Ok(MomentRecord {
                x: f[0].parse().map_err(|_| bad(l))?,
                k: f[1].parse().map_err(|_| bad(l))?,
                sharp_sum: num(f[2])?,
                smooth_sum: opt(f[3])?,
                predicted: opt(f[4])?,
                ratio: opt(f[5])?,
                warnings: f[6].parse().map_err(|_| bad(l))?,
            })
        })
        .collect()
}
