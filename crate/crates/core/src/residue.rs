//! Exact bookkeeping of the main-term constants: polynomials in
//! `L₁ = log U₁`, `L₂ = log U₂`, `LX = log X` with rational coefficients.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Largest total degree stored.
pub const MAX_DEGREE: u32 = 10;
const SLOTS: usize = 286; // C(13, 3)

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * BigInt::from(k))
}

/// Position of `L₁^i L₂^j LX^k`: monomials grouped by total degree, then by `i`, then `j`.
fn slot(i: u32, j: u32, k: u32) -> usize {
    let d = (i + j + k) as usize;
    let below = d * (d + 1) * (d + 2) / 6;
    let i = i as usize;
    // degree-d monomials with first exponent < i
    let before_i: usize = (0..i).map(|a| d - a + 1).sum();
    below + before_i + j as usize
}

/// Dense polynomial of total degree ≤ 10 in `L₁, L₂, LX`.
#[derive(Clone, PartialEq, Eq)]
pub struct LogPolynomial {
    coef: Vec<Rational>,
}

/// Formal variable selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    L1,
    L2,
    LX,
}

impl LogPolynomial {
    pub fn zero() -> Self {
        Self {
            coef: vec![Rational::zero(); SLOTS],
        }
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Self::zero();
        p.coef[0] = c;
        p
    }

    pub fn monomial(c: Rational, i: u32, j: u32, k: u32) -> Result<Self> {
        if i + j + k > MAX_DEGREE {
            return Err(Error::InvalidInput(format!("degree {} exceeds {MAX_DEGREE}", i + j + k)));
        }
        let mut p = Self::zero();
        p.coef[slot(i, j, k)] = c;
        Ok(p)
    }

    pub fn var(v: Var) -> Self {
        let (i, j, k) = match v {
            Var::L1 => (1, 0, 0),
            Var::L2 => (0, 1, 0),
            Var::LX => (0, 0, 1),
        };
        Self::monomial(Rational::one(), i, j, k).expect("degree 1")
    }

    pub fn coefficient(&self, i: u32, j: u32, k: u32) -> Rational {
        if i + j + k > MAX_DEGREE {
            return Rational::zero();
        }
        self.coef[slot(i, j, k)].clone()
    }

    /// Nonzero terms as `((i, j, k), c)` in storage order.
    pub fn terms(&self) -> Vec<((u32, u32, u32), Rational)> {
        let mut out = Vec::new();
        for d in 0..=MAX_DEGREE {
            for i in (0..=d).rev() {
                for j in (0..=d - i).rev() {
                    let c = &self.coef[slot(i, j, d - i - j)];
                    if !c.is_zero() {
                        out.push(((i, j, d - i - j), c.clone()));
                    }
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coef.iter().all(Zero::is_zero)
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms().iter().map(|((i, j, k), _)| i + j + k).max()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            coef: self.coef.iter().map(|x| x * c).collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            coef: self.coef.iter().zip(&o.coef).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self {
            coef: self.coef.iter().zip(&o.coef).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        let mut out = Self::zero();
        for ((i, j, k), a) in self.terms() {
            for ((p, q, r), b) in o.terms() {
                if i + j + k + p + q + r > MAX_DEGREE {
                    return Err(Error::InvalidInput("product exceeds degree 10".into()));
                }
                out.coef[slot(i + p, j + q, k + r)] += &a * &b;
            }
        }
        Ok(out)
    }

    /// Coefficients in `t` after `L₁ = L₂ = LX = t`.
    pub fn on_diagonal(&self) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); MAX_DEGREE as usize + 1];
        for ((i, j, k), c) in self.terms() {
            out[(i + j + k) as usize] += c;
        }
        out
    }

    /// Coefficients in `t` after `L₁ = L₂ = t`, `LX = 0`.
    pub fn at_equal_u(&self) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); MAX_DEGREE as usize + 1];
        for ((i, j, k), c) in self.terms() {
            if k == 0 {
                out[(i + j) as usize] += c;
            }
        }
        out
    }
}

impl fmt::Debug for LogPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for LogPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (n, ((i, j, k), c)) in terms.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else if n > 0 { "+" } else { "" };
            if n > 0 {
                write!(f, " {sign} ")?;
            } else {
                write!(f, "{sign}")?;
            }
            write!(f, "{}", c.abs())?;
            for (name, e) in [("L1", i), ("L2", j), ("LX", k)] {
                match e {
                    0 => {}
                    1 => write!(f, "·{name}")?,
                    _ => write!(f, "·{name}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

/// `B(0) = 26`, `B(1) = -5(L₁ + L₂)`, `B(2) = 2L₁L₂`, `B(j) = 0` for `j ≥ 3`.
pub fn b_coeff(j: u32) -> LogPolynomial {
    let l1 = LogPolynomial::var(Var::L1);
    let l2 = LogPolynomial::var(Var::L2);
    match j {
        0 => LogPolynomial::constant(rat(26, 1)),
        1 => l1.add(&l2).scale(&rat(-5, 1)),
        2 => l1.mul(&l2).expect("degree 2").scale(&rat(2, 1)),
        _ => LogPolynomial::zero(),
    }
}

/// `Σ_{j₁+j₂+j₃+j₄=10} (-1)^{j₃} B(j₄)/(j₁!j₂!j₃!j₄!) L₁^{j₁} L₂^{j₂} LX^{j₃}`.
pub fn square_term_sum() -> LogPolynomial {
    let n = MAX_DEGREE;
    let mut acc = LogPolynomial::zero();
    for j4 in 0..=n {
        let b = b_coeff(j4);
        if b.is_zero() {
            continue;
        }
        for j1 in 0..=n - j4 {
            for j2 in 0..=n - j4 - j1 {
                let j3 = n - j4 - j1 - j2;
                let sign = if j3 % 2 == 1 { -1 } else { 1 };
                let denom = factorial(j1) * factorial(j2) * factorial(j3) * factorial(j4);
                let c = Rational::new(BigInt::from(sign), denom);
                let mono = LogPolynomial::monomial(c, j1, j2, j3).expect("degree ≤ 10");
                acc = acc.add(&mono.mul(&b).expect("degree 10"));
            }
        }
    }
    acc
}

/// `Σ_{j₁+j₂+j₃=10} (-1)^{j₃}/(j₁!j₂!j₃!)`, the `B(0)`-free slice of the
/// square-term sum on the diagonal; equals `(1+1-1)¹⁰/10!`.
pub fn multinomial_slice() -> Rational {
    let n = MAX_DEGREE;
    let mut acc = Rational::zero();
    for j1 in 0..=n {
        for j2 in 0..=n - j1 {
            let j3 = n - j1 - j2;
            let sign = if j3 % 2 == 1 { -1 } else { 1 };
            acc += Rational::new(BigInt::from(sign), factorial(j1) * factorial(j2) * factorial(j3));
        }
    }
    acc
}

/// `-L₁¹⁰ + 5L₁⁹L₂ - 9L₁⁸L₂² + 6L₁⁷L₂³`.
pub fn diagonal_bracket() -> LogPolynomial {
    [(-1, 10, 0), (5, 9, 1), (-9, 8, 2), (6, 7, 3)]
        .iter()
        .map(|&(c, i, j)| LogPolynomial::monomial(rat(c, 1), i, j, 0).expect("degree 10"))
        .fold(LogPolynomial::zero(), |a, m| a.add(&m))
}

/// Degree-10 part of `Res_{u=0}` of
/// `U₁^u/(384u¹¹)·(u³L₂³ - 12u²L₂² + 60uL₂ - 120)`, the leading piece of the
/// residue at `v = 0` with `𝓔(u,0)` frozen at `𝓔(0,0) = 1`.
///
/// `Res_{u=0} U₁^u u^{m-11} = L₁^{10-m}/(10-m)!`.
pub fn k0_residue_polynomial() -> LogPolynomial {
    let mut acc = LogPolynomial::zero();
    // (power of u, coefficient, power of L₂)
    for &(m, c, l2) in &[(3u32, 1i64, 3u32), (2, -12, 2), (1, 60, 1), (0, -120, 0)] {
        let e = 10 - m;
        let coeff = Rational::new(BigInt::from(c), BigInt::from(384) * factorial(e));
        acc = acc.add(&LogPolynomial::monomial(coeff, e, l2, 0).expect("degree 10"));
    }
    acc
}

/// The scalar `c` with `k0_residue_polynomial() = c · diagonal_bracket()`.
pub fn k0_residue_constant() -> Result<Rational> {
    let poly = k0_residue_polynomial();
    let bracket = diagonal_bracket();
    let c = poly.coefficient(10, 0, 0) / bracket.coefficient(10, 0, 0);
    if poly != bracket.scale(&c) {
        return Err(Error::Accuracy(format!("residue {poly} is not a multiple of the bracket")));
    }
    Ok(c)
}

/// Coefficient of `a₄Φ̃(1)X log¹⁰X/π²` in the full main term, with
/// `U₁ = U₂ = X`.
///
/// The `k = 0` piece is `(16/π²)·𝓔(0,0)·c·bracket` with `𝓔(0,0) = 4a₄`; the
/// square piece is `-a₄Φ̃(1)/(2π²)` times the square-term sum. The result
/// must equal `1/302400 = 1/(2⁶·3³·5²·7)`.
pub fn assemble_leading_constant() -> Result<Rational> {
    let c0 = k0_residue_constant()?;
    let bracket_sum = diagonal_bracket().at_equal_u()[10].clone();
    let k0_part = rat(64, 1) * c0 * bracket_sum;
    let sq_top = square_term_sum().on_diagonal()[10].clone();
    let sq_part = rat(-1, 2) * sq_top;
    let total = k0_part + sq_part;
    let expected = Rational::new(BigInt::one(), BigInt::from(2i64.pow(6) * 3i64.pow(3) * 5i64.pow(2) * 7));
    if total != expected {
        return Err(Error::Accuracy(format!("leading constant {total} differs from {expected}")));
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slots_are_a_bijection() {
        let mut seen = vec![false; SLOTS];
        for i in 0..=MAX_DEGREE {
            for j in 0..=MAX_DEGREE - i {
                for k in 0..=MAX_DEGREE - i - j {
                    let s = slot(i, j, k);
                    assert!(!seen[s]);
                    seen[s] = true;
                }
            }
        }
        assert!(seen.into_iter().all(|b| b));
    }

    #[test]
    fn b_values() {
        assert_eq!(b_coeff(0), LogPolynomial::constant(rat(26, 1)));
        assert_eq!(b_coeff(2).coefficient(1, 1, 0), rat(2, 1));
        assert_eq!(b_coeff(2).terms().len(), 1);
        assert_eq!(b_coeff(1).coefficient(0, 1, 0), rat(-5, 1));
        assert!(b_coeff(7).is_zero());
    }

    #[test]
    fn square_term_sum_on_diagonal() {
        let s = square_term_sum();
        assert_eq!(s.total_degree(), Some(10));
        let diag = s.on_diagonal();
        for c in &diag[..10] {
            assert!(c.is_zero());
        }
        let expected = rat(26, 1) / Rational::from(factorial(10)) - rat(10, 1) / Rational::from(factorial(9))
            + Rational::new(BigInt::one(), factorial(8));
        assert_eq!(diag[10], expected);
        assert_eq!(diag[10], rat(1, 226800));
        assert_eq!(226800, 2i64.pow(4) * 3i64.pow(4) * 5i64.pow(2) * 7);
    }

    #[test]
    fn multinomial_slice_is_inverse_factorial() {
        assert_eq!(multinomial_slice(), Rational::new(BigInt::one(), factorial(10)));
    }

    #[test]
    fn bracket_properties() {
        let b = diagonal_bracket();
        assert_eq!(b.at_equal_u()[10], Rational::one());
        assert_eq!(b.coefficient(9, 1, 0), rat(5, 1));
        assert!(b.coefficient(1, 9, 0).is_zero());
        assert_eq!(b.total_degree(), Some(10));
    }

    #[test]
    fn k0_constant_chain() {
        assert_eq!(384 * 30240, 11_612_160);
        let c = k0_residue_constant().unwrap();
        assert_eq!(c, rat(1, 11_612_160));
        assert_eq!(rat(16 * 4, 1) * &c, rat(1, 181_440));
        assert_eq!(181_440, 2i64.pow(6) * 3i64.pow(4) * 5 * 7);
    }

    #[test]
    fn leading_constant() {
        let c = assemble_leading_constant().unwrap();
        assert_eq!(c, rat(1, 302_400));
        assert_eq!(rat(1, 181_440) - rat(1, 2 * 226_800), rat(1, 302_400));
        assert_eq!(302_400, 2i64.pow(6) * 3i64.pow(3) * 5i64.pow(2) * 7);
    }

    #[test]
    fn degree_overflow_is_an_error() {
        let a = LogPolynomial::monomial(rat(1, 1), 6, 0, 0).unwrap();
        assert!(a.mul(&a).is_err());
        assert!(LogPolynomial::monomial(rat(1, 1), 11, 0, 0).is_err());
    }

    proptest::proptest! {
        #[test]
        fn ring_laws(a in proptest::collection::vec(-20i64..20, 4), b in proptest::collection::vec(-20i64..20, 4)) {
            let mk = |v: &[i64]| {
                LogPolynomial::monomial(rat(v[0], 1), 1, 0, 0).unwrap()
                    .add(&LogPolynomial::monomial(rat(v[1], 3), 0, 2, 0).unwrap())
                    .add(&LogPolynomial::monomial(rat(v[2], 7), 1, 1, 1).unwrap())
                    .add(&LogPolynomial::constant(rat(v[3], 2)))
            };
            let (p, q) = (mk(&a), mk(&b));
            proptest::prop_assert_eq!(p.mul(&q).unwrap(), q.mul(&p).unwrap());
            proptest::prop_assert_eq!(p.add(&q).sub(&q), p.clone());
            let lhs: Rational = p.mul(&q).unwrap().on_diagonal().iter().sum();
            let rhs: Rational = p.on_diagonal().iter().sum::<Rational>() * q.on_diagonal().iter().sum::<Rational>();
            proptest::prop_assert_eq!(lhs, rhs);
        }
    }
}
