//! Real characters `χ_{8d}`, an L-value oracle through Hurwitz zeta, and the
//! smoothed series `A_t(½; 8d) = 2 Σ τ(n) χ_{8d}(n) n^{-1/2} ω(nπ/t)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::arith::{build_mult_tables, factorize, kronecker, primes_up_to};
use crate::error::{Error, Result};
use crate::special::{default_omega_table, digamma, hurwitz_zeta, OmegaTable};

type C64 = Complex64;

/// Default tolerance for the truncated AFE tail.
pub const AFE_TOL: f64 = 1e-12;
/// Largest AFE length accepted before reporting a truncation error.
pub const AFE_TRUNCATION_CAP: usize = 100_000_000;

/// `n ↦ χ_{8d}(n) = (8d/n)` for odd square-free `d > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadChar {
    d: u64,
}

impl QuadChar {
    pub fn new(d: u64) -> Result<Self> {
        if d == 0 || d % 2 == 0 {
            return Err(Error::InvalidInput(format!("d = {d} must be odd and positive")));
        }
        if !factorize(d)?.is_squarefree() {
            return Err(Error::InvalidInput(format!("d = {d} is not square-free")));
        }
        Ok(Self { d })
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn modulus(&self) -> u64 {
        8 * self.d
    }

    pub fn chi(&self, n: u64) -> i8 {
        kronecker(8 * self.d as i64, n as i64)
    }

    /// One full period `χ(0), …, χ(8d-1)`.
    ///
    /// For odd `n`, `(8d/n) = (2/n)(d/n)` and reciprocity turns `(d/n)` into
    /// `(n/d)` up to the sign `(-1)^{(d-1)/2·(n-1)/2}`; `(n/d)` is a product of
    /// Legendre tables for the primes of `d`.
    pub fn period_table(&self) -> Vec<i8> {
        let d = self.d as usize;
        let mut jac = vec![1i8; d];
        if d > 1 {
            let primes = factorize(self.d).expect("d fits in 64 bits").factors;
            for (p, _) in primes {
                let p = p as usize;
                let mut leg = vec![-1i8; p];
                leg[0] = 0;
                for x in 1..p {
                    leg[(x * x) % p] = 1;
                }
                for (r, j) in jac.iter_mut().enumerate() {
                    *j *= leg[r % p];
                }
            }
        }
        let d_is_3_mod_4 = d % 4 == 3;
        let m = 8 * d;
        let mut out = vec![0i8; m];
        for (n, v) in out.iter_mut().enumerate() {
            if n % 2 == 0 {
                continue;
            }
            let two = if n % 8 == 1 || n % 8 == 7 { 1 } else { -1 };
            let sign = if d_is_3_mod_4 && n % 4 == 3 { -1 } else { 1 };
            *v = two * sign * jac[n % d];
        }
        out
    }
}

/// `L(s, χ_{8d}) = q^{-s} Σ_{a=1}^{q} χ(a) ζ(s, a/q)`, `q = 8d`.
///
/// At `s = 1` the Hurwitz poles cancel and `L(1, χ) = -q^{-1} Σ χ(a) ψ(a/q)`.
pub fn lvalue_oracle(s: C64, q: QuadChar) -> Result<C64> {
    let m = q.modulus();
    let table = q.period_table();
    let mf = m as f64;
    if s == C64::new(1.0, 0.0) {
        let mut acc = 0.0;
        for (a, &c) in table.iter().enumerate().skip(1) {
            if c != 0 {
                acc += c as f64 * digamma(a as f64 / mf)?;
            }
        }
        return Ok(C64::new(-acc / mf, 0.0));
    }
    let mut acc = C64::new(0.0, 0.0);
    for (a, &c) in table.iter().enumerate().skip(1) {
        if c != 0 {
            acc += hurwitz_zeta(s, a as f64 / mf)? * c as f64;
        }
    }
    Ok(acc * (-s * mf.ln()).exp())
}

/// A truncated evaluation of `A_t(½; 8d)` (or of `A(d)`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AfeResult {
    pub d: u64,
    pub t: f64,
    pub truncation: usize,
    pub a_value: f64,
    pub tail_bound: f64,
}

/// Bound on `Σ_{n>N} 2 τ(n) n^{-1/2} |ω(nπ/t)|`, using `τ(n) ≤ 2√n`,
/// `0 < ω ≤ 1`, and `ω(ξ) ≤ C e^{-2ξ}` for `ξ ≥ 1`.
pub fn afe_tail_bound(t: f64, n: usize, envelope: f64) -> f64 {
    let knee = (t / PI).ceil() as usize;
    let mut bound = 0.0;
    let mut start = n + 1;
    if start < knee {
        bound += 4.0 * (knee - start) as f64;
        start = knee;
    }
    let r = 2.0 * PI / t;
    bound + 4.0 * envelope * (-r * start as f64).exp() / (-(-r).exp_m1())
}

/// Smallest `N` whose tail bound is below `tol`.
pub fn afe_truncation(t: f64, tol: f64, envelope: f64) -> usize {
    let knee = (t / PI).ceil() as usize;
    let r = 2.0 * PI / t;
    let need = ((4.0 * envelope / (tol * -(-r).exp_m1())).ln() / r).ceil();
    let mut n = if need.is_finite() && need > 1.0 { need as usize - 1 } else { 0 };
    n = n.max(knee.saturating_sub(1));
    while afe_tail_bound(t, n, envelope) >= tol {
        n += 1;
    }
    n
}

/// Holds `τ(n)/√n` up to a limit so that many AFE sums share one sieve.
pub struct AfeEngine {
    coef: Vec<f64>,
    omega: &'static OmegaTable,
    cap: usize,
}

impl AfeEngine {
    pub fn new(limit: usize) -> Result<Self> {
        let tables = build_mult_tables(limit.max(1))?;
        let coef = (0..=limit)
            .map(|n| if n == 0 { 0.0 } else { tables.tau(n) as f64 / (n as f64).sqrt() })
            .collect();
        Ok(Self {
            coef,
            omega: default_omega_table(),
            cap: AFE_TRUNCATION_CAP,
        })
    }

    /// Engine large enough for `A(d)` with every `d ≤ d_max` at tolerance `tol`.
    pub fn for_d_max(d_max: u64, tol: f64) -> Result<Self> {
        let omega = default_omega_table();
        let n = afe_truncation(8.0 * d_max as f64, tol, omega.envelope_constant());
        if n > AFE_TRUNCATION_CAP {
            return Err(Error::Truncation {
                needed: n as u64,
                cap: AFE_TRUNCATION_CAP as u64,
            });
        }
        Self::new(n)
    }

    pub fn limit(&self) -> usize {
        self.coef.len() - 1
    }

    pub fn omega(&self) -> &'static OmegaTable {
        self.omega
    }

    /// `A_t(½; 8d)` with a period table supplied by the caller.
    pub fn a_t_with_table(&self, t: f64, q: QuadChar, table: &[i8], tol: f64) -> Result<AfeResult> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidInput(format!("AFE scale t = {t}")));
        }
        let envelope = self.omega.envelope_constant();
        let n_max = afe_truncation(t, tol, envelope);
        if n_max > self.cap {
            return Err(Error::Truncation {
                needed: n_max as u64,
                cap: self.cap as u64,
            });
        }
        if n_max > self.limit() {
            return Err(Error::Capacity {
                requested: n_max as u64,
                budget: self.limit() as u64,
            });
        }
        let m = table.len();
        let scale = PI / t;
        let mut acc = 0.0;
        let mut r = 1usize % m;
        let mut n = 1usize;
        while n <= n_max {
            let c = table[r];
            if c != 0 {
                acc += c as f64 * self.coef[n] * self.omega.eval(n as f64 * scale);
            }
            n += 2;
            r += 2;
            if r >= m {
                r -= m;
            }
        }
        Ok(AfeResult {
            d: q.d(),
            t,
            truncation: n_max,
            a_value: 2.0 * acc,
            tail_bound: afe_tail_bound(t, n_max, envelope),
        })
    }

    pub fn a_t(&self, t: f64, q: QuadChar, tol: f64) -> Result<AfeResult> {
        self.a_t_with_table(t, q, &q.period_table(), tol)
    }

    /// `A(d) = ½ A_{8d}(½; 8d)`, so that `L(½, χ_{8d})² = 2 A(d)`.
    pub fn a_of_d(&self, q: QuadChar, tol: f64) -> Result<AfeResult> {
        let mut r = self.a_t(q.modulus() as f64, q, 2.0 * tol)?;
        r.a_value *= 0.5;
        r.tail_bound *= 0.5;
        Ok(r)
    }
}

fn engine_for(t: f64, tol: f64) -> Result<AfeEngine> {
    let omega = default_omega_table();
    let n = afe_truncation(t, tol, omega.envelope_constant());
    if n > AFE_TRUNCATION_CAP {
        return Err(Error::Truncation {
            needed: n as u64,
            cap: AFE_TRUNCATION_CAP as u64,
        });
    }
    AfeEngine::new(n)
}

/// `A_t(½; 8d)` truncated so that the certified tail is below `tol`.
pub fn afe_a(t: f64, q: QuadChar, tol: f64) -> Result<AfeResult> {
    engine_for(t, tol)?.a_t(t, q, tol)
}

/// `A(d) = ½ A_{8d}(½; 8d)`.
pub fn a_of_d(q: QuadChar, tol: f64) -> Result<AfeResult> {
    engine_for(q.modulus() as f64, 2.0 * tol)?.a_of_d(q, tol)
}

/// `B_U(½; 8d) = L(½, χ_{8d})² - A_U(½; 8d)`.
pub fn b_u(q: QuadChar, u: f64) -> Result<f64> {
    let l = lvalue_oracle(C64::new(0.5, 0.0), q)?.re;
    Ok(l * l - afe_a(u, q, AFE_TOL)?.a_value)
}

/// Odd square-free `d` in `1..=x`.
pub fn odd_squarefree_up_to(x: u64) -> Vec<u64> {
    let mut flags = vec![true; x as usize + 1];
    for p in primes_up_to((x as f64).sqrt() as u64 + 1) {
        let sq = (p * p) as usize;
        let mut j = sq;
        while j <= x as usize {
            flags[j] = false;
            j += sq;
        }
    }
    (1..=x).step_by(2).filter(|&d| flags[d as usize]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_eight_values() {
        let q = QuadChar::new(1).unwrap();
        assert_eq!([q.chi(1), q.chi(3), q.chi(5), q.chi(7)], [1, -1, -1, 1]);
        for d in [1, 3, 5, 7, 15] {
            assert_eq!(QuadChar::new(d).unwrap().chi(2), 0);
        }
        assert!(QuadChar::new(9).is_err());
        assert!(QuadChar::new(4).is_err());
    }

    #[test]
    fn chi_multiplicative_and_periodic() {
        for d in [1u64, 3, 5] {
            let q = QuadChar::new(d).unwrap();
            for m in 1..=100u64 {
                for n in 1..=100u64 {
                    assert_eq!(q.chi(m * n), q.chi(m) * q.chi(n));
                }
                assert_eq!(q.chi(m), q.chi(m + q.modulus()));
            }
        }
    }

    #[test]
    fn period_table_matches_kronecker() {
        for d in odd_squarefree_up_to(300) {
            let q = QuadChar::new(d).unwrap();
            let t = q.period_table();
            for (n, &v) in t.iter().enumerate() {
                assert_eq!(v, q.chi(n as u64), "d={d} n={n}");
            }
        }
    }

    #[test]
    fn odd_squarefree_count() {
        let v = odd_squarefree_up_to(100);
        let brute = (1..=100u64)
            .step_by(2)
            .filter(|&d| (2..=10u64).all(|p| d % (p * p) != 0))
            .count();
        assert_eq!(v.len(), brute);
    }

    #[test]
    fn lvalue_at_two_matches_series() {
        for d in odd_squarefree_up_to(50) {
            let q = QuadChar::new(d).unwrap();
            let table = q.period_table();
            let m = table.len();
            let k = 4_000_000usize;
            let mut series = 0.0;
            for n in (1..=k).rev() {
                let c = table[n % m];
                if c != 0 {
                    series += c as f64 / (n as f64 * n as f64);
                }
            }
            // partial character sums are bounded by m/2, so Abel summation bounds the tail by m/K²
            let tail = m as f64 / (k as f64 * k as f64);
            let l = lvalue_oracle(C64::new(2.0, 0.0), q).unwrap();
            assert!((l.re - series).abs() < 1e-10 + tail, "d={d}");
            assert!(l.im.abs() < 1e-14);
        }
    }

    #[test]
    fn lvalue_symmetries_and_sign() {
        let q = QuadChar::new(5).unwrap();
        let s = C64::new(0.5, 2.0);
        let a = lvalue_oracle(s, q).unwrap();
        let b = lvalue_oracle(s.conj(), q).unwrap();
        assert!((a - b.conj()).norm() < 1e-12);
        assert!(lvalue_oracle(C64::new(0.5, 0.0), QuadChar::new(1).unwrap()).unwrap().re > 0.0);
        // L(1, χ_8) = log(1 + √2)/√2
        let l1 = lvalue_oracle(C64::new(1.0, 0.0), QuadChar::new(1).unwrap()).unwrap().re;
        assert!((l1 - (1.0 + 2f64.sqrt()).ln() / 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn afe_matches_lvalue_small_d() {
        for d in [1u64, 3, 5, 7, 11, 13] {
            let q = QuadChar::new(d).unwrap();
            let l = lvalue_oracle(C64::new(0.5, 0.0), q).unwrap().re;
            let a = a_of_d(q, AFE_TOL).unwrap();
            assert!((l * l - 2.0 * a.a_value).abs() < 1e-6, "d={d}: {} vs {}", l * l, 2.0 * a.a_value);
        }
    }

    #[test]
    fn tail_bound_monotone() {
        let c = default_omega_table().envelope_constant();
        let t = 8.0 * 101.0;
        assert!(afe_tail_bound(t, 10_000, c) > afe_tail_bound(t, 100_000, c));
        let mut prev = f64::INFINITY;
        for n in (0..5000).step_by(50) {
            let b = afe_tail_bound(t, n, c);
            assert!(b <= prev && b >= 0.0);
            prev = b;
        }
        let n = afe_truncation(t, 1e-12, c);
        assert!(afe_tail_bound(t, n, c) < 1e-12);
        assert!(n == 0 || afe_tail_bound(t, n - 1, c) >= 1e-12);
    }

    #[test]
    fn scale_dependence() {
        let q = QuadChar::new(17).unwrap();
        let t = q.modulus() as f64;
        let a = afe_a(t, q, AFE_TOL).unwrap().a_value;
        assert!((a - 2.0 * a_of_d(q, AFE_TOL).unwrap().a_value).abs() < 1e-12);
        let near = afe_a(t * (1.0 + 1e-3), q, AFE_TOL).unwrap().a_value;
        let nearer = afe_a(t * (1.0 + 1e-6), q, AFE_TOL).unwrap().a_value;
        assert!((a - nearer).abs() < (a - near).abs().max(1e-9));
        assert!((a - nearer).abs() < 1e-5);
    }

    #[test]
    fn b_u_properties() {
        let q = QuadChar::new(5).unwrap();
        let u = q.modulus() as f64;
        assert!(b_u(q, u).unwrap().abs() < 1e-6);
        let l = lvalue_oracle(C64::new(0.5, 0.0), q).unwrap().re;
        for &uu in &[10.0, 25.0, 100.0] {
            let b = b_u(q, uu).unwrap();
            let b2 = b_u(q, uu * (1.0 + 1e-6)).unwrap();
            assert!((b - b2).abs() < 1e-4);
            assert!(b.abs() <= l * l + afe_a(uu, q, AFE_TOL).unwrap().a_value.abs() + 1e-12);
        }
    }
}
