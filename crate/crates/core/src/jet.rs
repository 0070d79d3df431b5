//! Truncated Taylor series in one variable (`c[k] = f^{(k)}(x₀)/k!`), enough
//! to differentiate the smooth profiles to a fixed order.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    pub c: Vec<f64>,
}

impl Jet {
    pub fn constant(v: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = v;
        Self { c }
    }

    /// The identity function expanded at `x`.
    pub fn variable(x: f64, order: usize) -> Self {
        let mut j = Self::constant(x, order);
        if order >= 1 {
            j.c[1] = 1.0;
        }
        j
    }

    pub fn zero(order: usize) -> Self {
        Self::constant(0.0, order)
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// `f^{(k)}(x₀)`.
    pub fn derivative(&self, k: usize) -> f64 {
        let mut fact = 1.0;
        for i in 2..=k {
            fact *= i as f64;
        }
        self.c[k] * fact
    }

    pub fn scale(&self, a: f64) -> Self {
        Self {
            c: self.c.iter().map(|v| v * a).collect(),
        }
    }

    pub fn add_scalar(&self, a: f64) -> Self {
        let mut r = self.clone();
        r.c[0] += a;
        r
    }

    pub fn recip(&self) -> Self {
        let n = self.c.len();
        let mut r = vec![0.0; n];
        r[0] = 1.0 / self.c[0];
        for k in 1..n {
            let mut s = 0.0;
            for j in 1..=k {
                s += self.c[j] * r[k - j];
            }
            r[k] = -s * r[0];
        }
        Self { c: r }
    }

    pub fn exp(&self) -> Self {
        let n = self.c.len();
        let mut r = vec![0.0; n];
        r[0] = self.c[0].exp();
        for k in 1..n {
            let mut s = 0.0;
            for j in 1..=k {
                s += j as f64 * self.c[j] * r[k - j];
            }
            r[k] = s / k as f64;
        }
        Self { c: r }
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, o: &Jet) -> Jet {
        Jet {
            c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, o: &Jet) -> Jet {
        Jet {
            c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, o: &Jet) -> Jet {
        let n = self.c.len();
        let mut r = vec![0.0; n];
        for (i, a) in self.c.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            for (j, b) in o.c.iter().take(n - i).enumerate() {
                r[i + j] += a * b;
            }
        }
        Jet { c: r }
    }
}

impl Div for &Jet {
    type Output = Jet;
    fn div(self, o: &Jet) -> Jet {
        self * &o.recip()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_sine_like_series() {
        // d^k/dx^k e^{2x} at x = 0.3
        let x = Jet::variable(0.3, 6);
        let e = x.scale(2.0).exp();
        for k in 0..=6 {
            let exact = 2f64.powi(k as i32) * 0.6f64.exp();
            assert!((e.derivative(k) - exact).abs() < 1e-12 * exact);
        }
    }

    #[test]
    fn quotient_rule() {
        // f = x/(1+x²), f' = (1-x²)/(1+x²)², f'' = 2x(x²-3)/(1+x²)³
        let x = Jet::variable(0.7, 3);
        let f = &x / &(&x * &x).add_scalar(1.0);
        let d = 1.0 + 0.49;
        assert!((f.derivative(1) - (1.0 - 0.49) / (d * d)).abs() < 1e-14);
        assert!((f.derivative(2) - 1.4 * (0.49 - 3.0) / (d * d * d)).abs() < 1e-13);
    }

    #[test]
    fn recip_matches_power_rule() {
        let x = Jet::variable(2.0, 5);
        let r = x.recip();
        // d^k (1/x) = (-1)^k k! x^{-k-1}
        let mut fact = 1.0;
        for k in 0..=5 {
            if k > 0 {
                fact *= k as f64;
            }
            let exact = (-1f64).powi(k as i32) * fact * 2f64.powi(-(k as i32) - 1);
            assert!((r.derivative(k) - exact).abs() < 1e-14);
        }
    }
}
