//! Named residual checks shared by the command-line report and the
//! acceptance suite. Each check carries the achieved residual and the
//! tolerance it is judged against.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::gcd;
use crate::error::Result;
use crate::euler::{
    a4_simplified, a_k_constant, z1_identity_box, z1_identity_smooth, z1_product, z2_identity_box,
    z2_identity_smooth, z3_identity_box, z3_identity_smooth, z4_identity_box, z4_identity_smooth, z4_product,
    IdentityCheck, LocalFactorContext, ShiftPoint,
};
use crate::gauss::{gauss_closed, gauss_direct};
use crate::lfunc::{lvalue_oracle, odd_squarefree_up_to, AfeEngine, QuadChar};
use crate::moments::{poisson_check, poisson_kmax, POISSON_TAIL_TOL};
use crate::residue;
use crate::smooth::BumpProfile;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance,
        }
    }

    /// An exact comparison: residual 0 on equality, 1 otherwise.
    pub fn exact(name: impl Into<String>, equal: bool) -> Self {
        Self::new(name, if equal { 0.0 } else { 1.0 }, 0.0)
    }

    pub fn passed(&self) -> bool {
        if self.tolerance == 0.0 {
            self.residual == 0.0
        } else {
            self.residual < self.tolerance
        }
    }

    /// `name residual tolerance status`; a check with infinite tolerance is a
    /// diagnostic and reports `info`.
    pub fn line(&self) -> String {
        if self.tolerance.is_infinite() {
            return format!("{} {:.3e} - info", self.name, self.residual);
        }
        format!(
            "{} {:.3e} {:.1e} {}",
            self.name,
            self.residual,
            self.tolerance,
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

fn max_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, |m, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v) })
}

/// `max |L(½,χ_{8d})² - 2A(d)|` over odd square-free `d ≤ d_max`.
pub fn afe_identity(d_max: u64, tol: f64) -> Result<Check> {
    let ds = odd_squarefree_up_to(d_max);
    let engine = AfeEngine::for_d_max(d_max, 1e-12)?;
    let diffs: Vec<Result<f64>> = ds
        .par_iter()
        .map(|&d| {
            let q = QuadChar::new(d)?;
            let l = lvalue_oracle(C64::new(0.5, 0.0), q)?.re;
            let two_a = 2.0 * engine.a_of_d(q, 1e-12)?.a_value;
            Ok((l * l - two_a).abs())
        })
        .collect();
    let diffs: Result<Vec<f64>> = diffs.into_iter().collect();
    Ok(Check::new(format!("afe_identity_d<={d_max}"), max_of(diffs?.into_iter()), tol))
}

/// Direct against closed-form `G_k(n)`, multiplicativity in `n`, and
/// `G_{4k}(n) = G_k(n)`, over odd `n ≤ n_max`, `|k| ≤ k_max`.
pub fn gauss_suite(n_max: i64, k_max: i64, tol: f64) -> Result<Vec<Check>> {
    let ns: Vec<i64> = (1..=n_max).step_by(2).collect();
    let rows: Vec<Result<(f64, f64)>> = ns
        .par_iter()
        .map(|&n| {
            let (mut eq, mut four) = (0.0f64, 0.0f64);
            for k in -k_max..=k_max {
                let d = gauss_direct(k, n)?.value;
                eq = eq.max((d - gauss_closed(k, n)?.value).abs());
                four = four.max((gauss_direct(4 * k, n)?.value - d).abs());
            }
            Ok((eq, four))
        })
        .collect();
    let (mut eq, mut four) = (0.0f64, 0.0f64);
    for r in rows {
        let (a, b) = r?;
        eq = eq.max(a);
        four = four.max(b);
    }
    // coprime odd pairs with mn in range
    let pairs: Vec<(i64, i64)> = ns
        .iter()
        .flat_map(|&m| ns.iter().map(move |&n| (m, n)))
        .filter(|&(m, n)| m > 1 && n > m && m * n <= n_max && gcd(m as u64, n as u64) == 1)
        .collect();
    let mult: Vec<Result<f64>> = pairs
        .par_iter()
        .map(|&(m, n)| {
            let mut worst = 0.0f64;
            for k in -k_max..=k_max {
                let prod = gauss_direct(k, m)?.value * gauss_direct(k, n)?.value;
                worst = worst.max((gauss_direct(k, m * n)?.value - prod).abs());
            }
            Ok(worst)
        })
        .collect();
    let mult: Result<Vec<f64>> = mult.into_iter().collect();
    Ok(vec![
        Check::new(format!("gauss_direct_vs_closed_n<={n_max}_|k|<={k_max}"), eq, tol),
        Check::new("gauss_multiplicative", max_of(mult?.into_iter()), tol),
        Check::new("gauss_g4k_equals_gk", four, tol),
    ])
}

/// The Poisson summation residual for each `(n, Z)`, with `Kmax` chosen from
/// the decay bound.
pub fn poisson_matrix(ns: &[u64], zs: &[f64], profile: &BumpProfile, tol: f64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for &n in ns {
        for &z in zs {
            let k = poisson_kmax(n, z, profile, POISSON_TAIL_TOL)?;
            let c = poisson_check(n, z, profile, k)?;
            out.push(Check::new(format!("poisson_n={n}_Z={z}"), c.residual, tol));
        }
    }
    Ok(out)
}

/// `Z₁(½,½) = 4a₄`, `Z₄(½,½,0) = 32a₄/π²` and the two forms of `a₄`.
///
/// `z1_limit` and `z4_limit` are the prime limits of the two products. The
/// `Z₄` comparison uses tail-extrapolated values of `Z₄` and `a₄`.
pub fn euler_headline(z1_limit: u64, z4_limit: u64) -> Result<Vec<Check>> {
    let half = ShiftPoint::real(0.5, 0.5, 0.0);
    let a4_z1 = a_k_constant(4, z1_limit)?;
    let z1 = z1_product(&half, z1_limit)?;
    let z1_res = (z1.value.re - 4.0 * a4_z1.value.re).abs() / a4_z1.value.re;

    let a4 = a_k_constant(4, z4_limit)?;
    let z4 = z4_product(&half, z4_limit)?;
    let a4x = a4.extrapolated().re;
    let z4_res = (z4.extrapolated().re - 32.0 * a4x / (PI * PI)).abs() / (a4x / (PI * PI));
    let z4_raw = (z4.value.re - 32.0 * a4.value.re / (PI * PI)).abs() / (a4.value.re / (PI * PI));

    let simp = a4_simplified(z4_limit)?;
    let forms = (simp.value.re - a4.value.re).abs() / a4.value.re;
    Ok(vec![
        Check::new(format!("z1_half_half_eq_4a4_P={z1_limit}"), z1_res, 1e-8),
        Check::new(format!("z4_half_half_0_eq_32a4_over_pi2_P={z4_limit}"), z4_res, 1e-6),
        Check::new(format!("z4_unextrapolated_diagnostic_P={z4_limit}"), z4_raw, f64::INFINITY),
        Check::new(format!("a4_product_vs_simplified_P={z4_limit}"), forms, 1e-10),
    ])
}

fn identity(name: &str, c: Result<IdentityCheck>, tol: f64) -> Result<Check> {
    Ok(Check::new(name, c?.residual(), tol))
}

/// The Dirichlet-series identities behind `Z₁`, `Z₂`, `Z₃` and the Möbius
/// sum for `Z₄`.
///
/// Each identity is checked twice. The `*_local` checks use the stated
/// shifts on integers built from a few small primes, where both sides are
/// finite and must agree to rounding. The `*_full` checks compare a box
/// truncation of the full series with the full product at shifts of large
/// real part, where the box tail is negligible.
pub fn dirichlet_identities() -> Result<Vec<Check>> {
    let primes = [3u64, 5, 7, 11];
    let p1 = ShiftPoint::real(1.2, 1.2, 0.0);
    let p2 = ShiftPoint::real(1.1, 1.1, 0.0);
    let p3 = ShiftPoint::real(1.0, 1.0, 0.8);
    let p4 = ShiftPoint::real(0.7, 0.7, 0.05);
    let ctx = LocalFactorContext::new(1, 2)?;
    let big = ShiftPoint::real(3.0, 3.0, 2.0);
    let big4 = ShiftPoint::real(3.0, 3.0, 0.01);
    let ctx_big = LocalFactorContext::new(1, 2)?;
    Ok(vec![
        identity("z1_series_local_a=b=1.2", z1_identity_smooth(&p1, &primes, 10_000_000_000_000), 1e-6)?,
        identity("z1_series_full_a=b=3", z1_identity_box(&ShiftPoint::real(3.0, 3.0, 0.0), 3000, 100_000), 1e-6)?,
        identity("z2_series_local_a=1_k=2", z2_identity_smooth(&p2, &ctx, &primes, u64::MAX), 1e-5)?,
        identity("z2_series_full_a=b=3_a=1_k=2", z2_identity_box(&big, &ctx_big, 2000, 100_000), 1e-5)?,
        identity("z3_alternating_local", z3_identity_smooth(&p3, 3, &[2, 3, 5, 7], 100_000_000, true), 1e-5)?,
        identity("z3_plain_local", z3_identity_smooth(&p3, 3, &[2, 3, 5, 7], 100_000_000, false), 1e-5)?,
        identity("z3_alternating_full_a=b=3_g=2", z3_identity_box(&big, 1, 200, true, 2000), 1e-5)?,
        identity("z3_plain_full_a=b=3_g=2", z3_identity_box(&big, 1, 200, false, 2000), 1e-5)?,
        identity("z4_moebius_local_a=b=0.7_g=0.05", z4_identity_smooth(&p4, &[3, 5, 7, 11, 13]), 1e-4)?,
        identity("z4_moebius_full_a=b=3_g=0.01", z4_identity_box(&big4, 100_000, 2000, 1_000_000), 1e-4)?,
    ])
}

/// Literal box truncations at the stated shifts. Their residuals measure
/// the truncation tail of slowly convergent series and carry no tolerance.
pub fn literal_box_diagnostics() -> Result<Vec<Check>> {
    let inf = f64::INFINITY;
    let p3 = ShiftPoint::real(1.0, 1.0, 0.8);
    let ctx = LocalFactorContext::new(1, 2)?;
    Ok(vec![
        identity("z1_box_3000_a=b=1.2", z1_identity_box(&ShiftPoint::real(1.2, 1.2, 0.0), 3000, 100_000), inf)?,
        identity("z2_box_2000_a=b=1.1", z2_identity_box(&ShiftPoint::real(1.1, 1.1, 0.0), &ctx, 2000, 100_000), inf)?,
        identity("z3_alternating_box_k<=200", z3_identity_box(&p3, 1, 200, true, 20_000), inf)?,
        identity("z3_plain_box_k<=200", z3_identity_box(&p3, 1, 200, false, 20_000), inf)?,
        identity(
            "z4_moebius_box_a<=300",
            z4_identity_box(&ShiftPoint::real(0.7, 0.7, 0.05), 300, 20_000, 100_000),
            inf,
        )?,
    ])
}

/// The exact rational constants of the leading-term assembly.
pub fn residue_constants() -> Vec<Check> {
    use num_bigint::BigInt;
    use num_traits::One;
    let r = |n: i64, d: i64| residue::Rational::new(BigInt::from(n), BigInt::from(d));
    let fact = |n: i64| (1..=n).product::<i64>();
    let diag = residue::square_term_sum().on_diagonal();
    let square = r(26, fact(10)) - r(10, fact(9)) + r(1, fact(8));
    let bracket = residue::diagonal_bracket().at_equal_u();
    let coeff_sum = r(-1 + 5 - 9 + 6, 1);
    let k0 = residue::k0_residue_constant();
    let lead = residue::assemble_leading_constant();
    vec![
        Check::exact("square_sum_26/10!-10/9!+1/8!=1/226800", square == r(1, 226_800) && diag[10] == square),
        Check::exact("multinomial_slice=1/10!", residue::multinomial_slice() == r(1, fact(10))),
        Check::exact("bracket_at_equal_u=1", bracket[10] == coeff_sum && coeff_sum.is_one()),
        Check::exact("k0_residue=1/11612160", k0.as_ref().map(|c| *c == r(1, 11_612_160)).unwrap_or(false)),
        Check::exact(
            "leading_1/181440-1/453600=1/302400",
            r(1, 64 * 81 * 5 * 7) - r(1, 2 * 226_800) == r(1, 302_400)
                && lead.as_ref().map(|c| *c == r(1, 64 * 27 * 25 * 7)).unwrap_or(false),
        ),
    ]
}

/// `G_k(n)` in closed form, checked against direct summation.
pub fn gauss_value(n: i64, k: i64, tol: f64) -> Result<(f64, Check)> {
    let closed = gauss_closed(k, n)?.value;
    let direct = gauss_direct(k, n)?.value;
    Ok((closed, Check::new(format!("gauss_n={n}_k={k}"), (closed - direct).abs(), tol)))
}

/// `L(s, χ_{8d})` from the Hurwitz oracle; at `s = ½` also the AFE identity
/// `L² = 2A(d)` for this `d`.
pub fn lvalue(d: u64, s: C64, tol: f64) -> Result<(C64, Vec<Check>)> {
    let q = QuadChar::new(d)?;
    let l = lvalue_oracle(s, q)?;
    let mut checks = Vec::new();
    if s == C64::new(0.5, 0.0) {
        let two_a = 2.0 * crate::lfunc::a_of_d(q, 1e-12)?.a_value;
        checks.push(Check::new(format!("afe_identity_d={d}"), (l.re * l.re - two_a).abs(), tol));
    }
    Ok((l, checks))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_status() {
        assert!(Check::new("a", 1e-9, 1e-8).passed());
        assert!(!Check::new("a", 1e-8, 1e-8).passed());
        assert!(!Check::new("a", f64::NAN, 1e-8).passed());
        assert!(Check::exact("e", true).passed());
        assert!(!Check::exact("e", false).passed());
        assert_eq!(Check::new("x", 0.5, 1.0).line(), "x 5.000e-1 1.0e0 PASS");
        assert!(Check::new("d", 3.0, f64::INFINITY).line().ends_with("info"));
    }

    #[test]
    fn single_values() {
        let (g, c) = gauss_value(9, 0, 1e-9).unwrap();
        assert_eq!(g, 6.0);
        assert!(c.passed());
        let (l, checks) = lvalue(5, C64::new(0.5, 0.0), 1e-6).unwrap();
        assert!(l.re > 0.0);
        assert!(checks[0].passed());
        assert!(lvalue(9, C64::new(0.5, 0.0), 1e-6).is_err());
    }

    #[test]
    fn residue_constants_all_pass() {
        assert!(residue_constants().iter().all(Check::passed));
    }
}
