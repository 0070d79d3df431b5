//! Integer primitives: Kronecker symbol, factorization, and linear-sieve
//! tables of τ, μ, φ and square-freeness.

use crate::error::{Error, Result};

/// Largest table a single `MultTables` may hold.
pub const DEFAULT_TABLE_BUDGET: usize = 200_000_000;

const TAB2: [i8; 8] = [0, 1, 0, -1, 0, -1, 0, 1];

/// Kronecker symbol (a/n) for arbitrary integers.
///
/// Computed by the binary reciprocity reduction; never factors `n`.
/// `(a/0)` is 1 when `a = ±1` and 0 otherwise.
pub fn kronecker(a: i64, n: i64) -> i8 {
    if n == 0 {
        return (a == 1 || a == -1) as i8;
    }
    if a & 1 == 0 && n & 1 == 0 {
        return 0;
    }
    let mut m = n.unsigned_abs();
    let v = m.trailing_zeros();
    m >>= v;
    let mut k: i8 = 1;
    if v & 1 == 1 {
        k = TAB2[(a & 7) as usize];
    }
    if n < 0 && a < 0 {
        k = -k;
    }
    let r = (a as i128).rem_euclid(m as i128) as u64;
    k * jacobi_odd(r, m)
}

/// Jacobi symbol (a/m) for odd positive `m`.
pub fn jacobi_odd(a: u64, m: u64) -> i8 {
    debug_assert!(m & 1 == 1);
    let mut a = a % m;
    let mut m = m;
    let mut t: i8 = 1;
    while a != 0 {
        let v = a.trailing_zeros();
        a >>= v;
        if v & 1 == 1 && (m & 7 == 3 || m & 7 == 5) {
            t = -t;
        }
        if a & 3 == 3 && m & 3 == 3 {
            t = -t;
        }
        std::mem::swap(&mut a, &mut m);
        a %= m;
    }
    if m == 1 {
        t
    } else {
        0
    }
}

/// A positive integer together with its prime factorization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoredInt {
    pub n: u64,
    /// `(prime, exponent)` with primes strictly increasing.
    pub factors: Vec<(u64, u32)>,
}

impl FactoredInt {
    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn divisor_count(&self) -> u64 {
        self.factors.iter().map(|&(_, e)| e as u64 + 1).product()
    }

    pub fn moebius(&self) -> i8 {
        if self.is_squarefree() {
            if self.factors.len() % 2 == 0 {
                1
            } else {
                -1
            }
        } else {
            0
        }
    }

    pub fn totient(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| (p - 1) * p.pow(e - 1))
            .product()
    }

    /// Exponent of `p` in `n`.
    pub fn ord(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for the full 64-bit range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

// Brent's variant of Pollard rho. `n` is odd, composite, and has no factor below 1000.
fn pollard_brent(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g, mut q) = (2u64, 2u64, 1u64, 1u64);
        let mut r = 1u64;
        let m = 128u64;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += m;
            }
            r <<= 1;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn split_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_brent(n);
    split_into(d, out);
    split_into(n / d, out);
}

/// Prime factorization of `n ≥ 1`.
pub fn factorize(n: u64) -> Result<FactoredInt> {
    if n == 0 {
        return Err(Error::InvalidInput("factorize requires n >= 1".into()));
    }
    let mut rest = n;
    let mut factors = Vec::new();
    let tz = rest.trailing_zeros();
    if tz > 0 {
        factors.push((2, tz));
        rest >>= tz;
    }
    let mut p = 3u64;
    while p < 1000 && p * p <= rest {
        if rest % p == 0 {
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += 2;
    }
    if rest > 1 {
        let mut big = Vec::new();
        split_into(rest, &mut big);
        big.sort_unstable();
        for q in big {
            match factors.last_mut() {
                Some((last, e)) if *last == q => *e += 1,
                _ => factors.push((q, 1)),
            }
        }
    }
    Ok(FactoredInt { n, factors })
}

/// Primes `≤ limit` by the sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Linear-sieve tables of τ, μ, φ and square-freeness on `1..=limit`.
#[derive(Clone, Debug)]
pub struct MultTables {
    limit: usize,
    tau: Vec<u32>,
    mu: Vec<i8>,
    phi: Vec<u32>,
    squarefree: Vec<u64>,
    primes: Vec<u32>,
}

impl MultTables {
    pub fn limit(&self) -> usize {
        self.limit
    }

    #[inline]
    pub fn tau(&self, n: usize) -> u32 {
        self.tau[n]
    }

    #[inline]
    pub fn mu(&self, n: usize) -> i8 {
        self.mu[n]
    }

    #[inline]
    pub fn phi(&self, n: usize) -> u32 {
        self.phi[n]
    }

    #[inline]
    pub fn is_squarefree(&self, n: usize) -> bool {
        self.squarefree[n >> 6] >> (n & 63) & 1 == 1
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn tau_slice(&self) -> &[u32] {
        &self.tau
    }
}

/// Builds the tables with the default memory budget.
pub fn build_mult_tables(limit: usize) -> Result<MultTables> {
    build_mult_tables_with_budget(limit, DEFAULT_TABLE_BUDGET)
}

pub fn build_mult_tables_with_budget(limit: usize, budget: usize) -> Result<MultTables> {
    if limit == 0 {
        return Err(Error::InvalidInput("table limit must be >= 1".into()));
    }
    if limit > budget {
        return Err(Error::Capacity {
            requested: limit as u64,
            budget: budget as u64,
        });
    }
    let n = limit;
    let mut tau = vec![0u32; n + 1];
    let mut mu = vec![0i8; n + 1];
    let mut phi = vec![0u32; n + 1];
    // exponent of the smallest prime factor
    let mut lp_exp = vec![0u8; n + 1];
    let mut primes: Vec<u32> = Vec::new();
    tau[1] = 1;
    mu[1] = 1;
    phi[1] = 1;
    for i in 2..=n {
        if tau[i] == 0 {
            primes.push(i as u32);
            tau[i] = 2;
            mu[i] = -1;
            phi[i] = i as u32 - 1;
            lp_exp[i] = 1;
        }
        for &p in &primes {
            let p = p as usize;
            let ip = i * p;
            if ip > n {
                break;
            }
            if i % p == 0 {
                let e = lp_exp[i] as u32;
                lp_exp[ip] = (e + 1) as u8;
                tau[ip] = tau[i] / (e + 1) * (e + 2);
                mu[ip] = 0;
                phi[ip] = phi[i] * p as u32;
                break;
            }
            lp_exp[ip] = 1;
            tau[ip] = tau[i] * 2;
            mu[ip] = -mu[i];
            phi[ip] = phi[i] * (p as u32 - 1);
        }
    }
    let mut squarefree = vec![0u64; n / 64 + 1];
    for (i, &m) in mu.iter().enumerate().skip(1) {
        if m != 0 {
            squarefree[i >> 6] |= 1 << (i & 63);
        }
    }
    Ok(MultTables {
        limit: n,
        tau,
        mu,
        phi,
        squarefree,
        primes,
    })
}

/// Writes `m = f·s²` with `f` square-free (sign carried by `f`).
pub fn squarefree_decompose(m: i64) -> Result<(i64, u64)> {
    if m == 0 {
        return Err(Error::InvalidInput("cannot decompose 0".into()));
    }
    let fac = factorize(m.unsigned_abs())?;
    let mut f: i64 = m.signum();
    let mut s: u64 = 1;
    for (p, e) in fac.factors {
        if e % 2 == 1 {
            f *= p as i64;
        }
        s *= p.pow(e / 2);
    }
    Ok((f, s))
}

/// Splits a nonzero `m ≡ 0, 1 (mod 4)` as `m = D·f²` with `D` a fundamental
/// discriminant (possibly 1) and `f > 0`.
pub fn fundamental_split(m: i64) -> Result<(i64, u64)> {
    if m.rem_euclid(4) > 1 {
        return Err(Error::InvalidInput(format!("{m} is not a discriminant")));
    }
    let (f, s) = squarefree_decompose(m)?;
    if f.rem_euclid(4) == 1 {
        Ok((f, s))
    } else {
        debug_assert!(s % 2 == 0);
        Ok((4 * f, s / 2))
    }
}
