//! Twisted quadratic Gauss sums
//! `G_k(n) = ((1-i)/2 + (-1/n)(1+i)/2) Σ_{a mod n} (a/n) e(ak/n)` for odd `n`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::arith::{factorize, jacobi_odd, kronecker};
use crate::error::{Error, Result};

/// Which branch of the prime-power evaluation produced a factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GaussForm {
    Zero,
    /// `n = 1`.
    One,
    /// `φ(p^β)`.
    Phi,
    /// `-p^α`.
    NegPAlpha,
    /// `(k p^{-α} / p) p^α √p`.
    SqrtPTerm,
    /// Product over several prime powers, none zero.
    Product,
    /// Computed by direct summation.
    Direct,
}

/// `coeff · √radicand` with `radicand` square-free.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactSurd {
    pub coeff: i128,
    pub radicand: u64,
}

impl ExactSurd {
    pub fn to_f64(self) -> f64 {
        self.coeff as f64 * (self.radicand as f64).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussSumValue {
    pub value: f64,
    pub form: GaussForm,
    /// Present for the closed form.
    pub exact: Option<ExactSurd>,
}

fn check_modulus(n: i64) -> Result<u64> {
    if n < 1 || n % 2 == 0 {
        return Err(Error::InvalidInput(format!("Gauss sum modulus n = {n} must be odd and positive")));
    }
    Ok(n as u64)
}

/// Direct O(n) summation.
pub fn gauss_direct(k: i64, n: i64) -> Result<GaussSumValue> {
    let n = check_modulus(n)?;
    let kk = k.rem_euclid(n as i64) as u64;
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 0..n {
        let j = jacobi_odd(a, n);
        if j == 0 {
            continue;
        }
        let r = ((a as u128 * kk as u128) % n as u128) as f64;
        let (s, c) = (2.0 * PI * r / n as f64).sin_cos();
        acc += Complex64::new(c, s) * j as f64;
    }
    // (1-i)/2 + (1+i)/2 = 1 when n ≡ 1 mod 4, and (1-i)/2 - (1+i)/2 = -i otherwise
    let g = if n % 4 == 1 { acc } else { acc * Complex64::new(0.0, -1.0) };
    if g.im.abs() >= 1e-8 * g.re.abs().max(1.0) {
        return Err(Error::Accuracy(format!(
            "G_{k}({n}) has imaginary part {:e}",
            g.im
        )));
    }
    Ok(GaussSumValue {
        value: g.re,
        form: GaussForm::Direct,
        exact: None,
    })
}

/// Closed form at a single prime power `p^β`, `β ≥ 1`.
pub fn gauss_prime_power(k: i64, p: u64, beta: u32) -> (ExactSurd, GaussForm) {
    let alpha = if k == 0 {
        u32::MAX
    } else {
        let mut a = 0;
        let mut m = k.unsigned_abs();
        while m % p == 0 {
            m /= p;
            a += 1;
        }
        a
    };
    let pi = p as i128;
    if beta <= alpha {
        if beta % 2 == 1 {
            (ExactSurd { coeff: 0, radicand: 1 }, GaussForm::Zero)
        } else {
            let phi = pi.pow(beta - 1) * (pi - 1);
            (ExactSurd { coeff: phi, radicand: 1 }, GaussForm::Phi)
        }
    } else if beta == alpha + 1 {
        let pa = pi.pow(alpha);
        if beta % 2 == 0 {
            (ExactSurd { coeff: -pa, radicand: 1 }, GaussForm::NegPAlpha)
        } else {
            let unit = k / (pa as i64);
            let sym = kronecker(unit, p as i64) as i128;
            (ExactSurd { coeff: sym * pa, radicand: p }, GaussForm::SqrtPTerm)
        }
    } else {
        (ExactSurd { coeff: 0, radicand: 1 }, GaussForm::Zero)
    }
}

/// Multiplicative closed form over the prime powers of `n`.
pub fn gauss_closed(k: i64, n: i64) -> Result<GaussSumValue> {
    let n = check_modulus(n)?;
    let f = factorize(n)?;
    let mut acc = ExactSurd { coeff: 1, radicand: 1 };
    let mut form = GaussForm::One;
    for &(p, beta) in &f.factors {
        let (v, fm) = gauss_prime_power(k, p, beta);
        if v.coeff == 0 {
            return Ok(GaussSumValue {
                value: 0.0,
                form: GaussForm::Zero,
                exact: Some(ExactSurd { coeff: 0, radicand: 1 }),
            });
        }
        acc = ExactSurd {
            coeff: acc.coeff * v.coeff,
            radicand: acc.radicand * v.radicand,
        };
        form = if form == GaussForm::One { fm } else { GaussForm::Product };
    }
    Ok(GaussSumValue {
        value: acc.to_f64(),
        form,
        exact: Some(acc),
    })
}
