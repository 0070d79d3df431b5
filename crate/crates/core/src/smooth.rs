//! Compactly supported test functions built from the `exp(-1/x)` smooth step,
//! with their Mellin and Fourier-type transforms.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::quad::integrate_breaks;
use crate::special::{log_gamma, QuadratureParams};

type C64 = Complex64;

/// Absolute quadrature target for all transforms.
pub const TRANSFORM_TOL: f64 = 1e-11;
const MAX_PANELS: usize = 200_000;
/// Frequencies above this are integrated panel-by-panel per oscillation.
pub const OSCILLATION_SPLIT: f64 = 20.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileKind {
    /// Rises on [1/2, 3/2], falls on [3/2, 5/2]; peak 1 at 3/2.
    Reference,
    /// Supported on [1, 2], equal to 1 on [1+1/Z, 2-1/Z].
    PlateauInner,
    /// Supported on [1-1/Z, 2+1/Z], equal to 1 on [1, 2].
    PlateauOuter,
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BumpProfile {
    pub kind: ProfileKind,
    /// Transition sharpness; ignored by the reference profile.
    pub z: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransformValue {
    pub at: C64,
    pub value: C64,
    pub est_error: f64,
}

/// `σ(x) = e(x)/(e(x)+e(1-x))`, `e(x) = exp(-1/x)` for `x > 0`.
pub fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let g = 1.0 / x - 1.0 / (1.0 - x);
        if g > 0.0 {
            let e = (-g).exp();
            e / (1.0 + e)
        } else {
            1.0 / (1.0 + g.exp())
        }
    }
}

const STEP_FLAT: f64 = 1.0 / 700.0;

fn smooth_step_jet(x: &Jet) -> Jet {
    let x0 = x.value();
    let order = x.order();
    if x0 <= STEP_FLAT {
        return Jet::zero(order);
    }
    if x0 >= 1.0 - STEP_FLAT {
        return Jet::constant(1.0, order);
    }
    let one_minus = (-x).add_scalar(1.0);
    let g = &x.recip() - &one_minus.recip();
    if g.value() > 0.0 {
        let e = (-&g).exp();
        &e / &e.add_scalar(1.0)
    } else {
        g.exp().add_scalar(1.0).recip()
    }
}

impl BumpProfile {
    pub fn reference() -> Self {
        Self {
            kind: ProfileKind::Reference,
            z: 1.0,
        }
    }

    pub fn plateau_inner(z: f64) -> Result<Self> {
        Self::check_z(z)?;
        Ok(Self {
            kind: ProfileKind::PlateauInner,
            z,
        })
    }

    pub fn plateau_outer(z: f64) -> Result<Self> {
        Self::check_z(z)?;
        Ok(Self {
            kind: ProfileKind::PlateauOuter,
            z,
        })
    }

    fn check_z(z: f64) -> Result<()> {
        if !(z >= 2.0 && z.is_finite()) {
            return Err(Error::InvalidInput(format!("profile sharpness Z = {z} must be >= 2")));
        }
        Ok(())
    }

    /// `(t0, t1, A)` with `Φ(t) = σ(A(t - t0)) σ(A(t1 - t))`.
    fn shape(&self) -> (f64, f64, f64) {
        match self.kind {
            ProfileKind::Reference => (0.5, 2.5, 1.0),
            ProfileKind::PlateauInner => (1.0, 2.0, self.z),
            ProfileKind::PlateauOuter => (1.0 - 1.0 / self.z, 2.0 + 1.0 / self.z, self.z),
        }
    }

    pub fn support(&self) -> (f64, f64) {
        let (t0, t1, _) = self.shape();
        (t0, t1)
    }

    /// Support ends and the ends of the two transition zones.
    pub fn breaks(&self) -> Vec<f64> {
        let (t0, t1, a) = self.shape();
        let mut b = vec![t0, t0 + 1.0 / a, t1 - 1.0 / a, t1];
        b.dedup_by(|x, y| (*x - *y).abs() < 1e-15);
        b
    }

    pub fn eval(&self, t: f64) -> f64 {
        let (t0, t1, a) = self.shape();
        if t <= t0 || t >= t1 {
            return 0.0;
        }
        smooth_step(a * (t - t0)) * smooth_step(a * (t1 - t))
    }

    /// Taylor jet of Φ at `t` to the given order.
    pub fn jet(&self, t: f64, order: usize) -> Jet {
        let (t0, t1, a) = self.shape();
        if t <= t0 || t >= t1 {
            return Jet::zero(order);
        }
        let x = Jet::variable(t, order);
        let rise = smooth_step_jet(&x.add_scalar(-t0).scale(a));
        let fall = smooth_step_jet(&(-&x).add_scalar(t1).scale(a));
        &rise * &fall
    }

    pub fn derivative(&self, t: f64, k: usize) -> f64 {
        self.jet(t, k).derivative(k)
    }
}

pub fn phi_eval(profile: &BumpProfile, t: f64) -> f64 {
    profile.eval(t)
}

fn refine(breaks: &[f64], width: f64) -> Vec<f64> {
    let mut out = vec![breaks[0]];
    for w in breaks.windows(2) {
        let n = ((w[1] - w[0]) / width).ceil().max(1.0) as usize;
        for i in 1..=n {
            out.push(w[0] + (w[1] - w[0]) * i as f64 / n as f64);
        }
    }
    out
}

/// `f̃(s) = ∫₀^∞ Φ(x) x^{s-1} dx`.
pub fn mellin_tilde(profile: &BumpProfile, s: C64) -> Result<TransformValue> {
    let base = profile.breaks();
    let (a, b) = profile.support();
    // one panel per 2π of phase in s.im·log x
    let panels = (s.im.abs() * (b / a).ln() / (2.0 * PI)).ceil().max(1.0);
    let breaks = refine(&base, (b - a) / panels);
    let sm1 = s - 1.0;
    let est = integrate_breaks(
        |x| (sm1 * x.ln()).exp() * profile.eval(x),
        &breaks,
        TRANSFORM_TOL,
        MAX_PANELS,
    )?;
    Ok(TransformValue {
        at: s,
        value: est.value,
        est_error: est.error,
    })
}

/// `čΦ(s) = ∫₀^∞ Φ(t) t^{-s} dt = Φ̃(1-s)`.
pub fn cech(profile: &BumpProfile, s: C64) -> Result<TransformValue> {
    let mut v = mellin_tilde(profile, 1.0 - s)?;
    v.at = s;
    Ok(v)
}

fn oscillatory_breaks(profile: &BumpProfile, y: f64) -> Vec<f64> {
    let base = profile.breaks();
    if y.abs() > OSCILLATION_SPLIT {
        refine(&base, 1.0 / y.abs())
    } else {
        base
    }
}

/// `Φ̂(y) = ∫ (cos + sin)(2πxy) Φ(x) dx`.
pub fn fourier_hat(profile: &BumpProfile, y: f64) -> Result<TransformValue> {
    let w = 2.0 * PI * y;
    let est = integrate_breaks(
        |x| {
            let (s, c) = (w * x).sin_cos();
            (c + s) * profile.eval(x)
        },
        &oscillatory_breaks(profile, y),
        TRANSFORM_TOL,
        MAX_PANELS,
    )?;
    Ok(TransformValue {
        at: C64::new(y, 0.0),
        value: C64::new(est.value, 0.0),
        est_error: est.error,
    })
}

/// `∫ Φ(x) cos(2πxy) dx` or the `sin` analogue.
pub fn trig_transform(profile: &BumpProfile, y: f64, kind: TrigKind) -> Result<TransformValue> {
    let w = 2.0 * PI * y;
    let est = integrate_breaks(
        |x| {
            let p = profile.eval(x);
            match kind {
                TrigKind::Cos => (w * x).cos() * p,
                TrigKind::Sin => (w * x).sin() * p,
            }
        },
        &oscillatory_breaks(profile, y),
        TRANSFORM_TOL,
        MAX_PANELS,
    )?;
    Ok(TransformValue {
        at: C64::new(y, 0.0),
        value: C64::new(est.value, 0.0),
        est_error: est.error,
    })
}

/// Equally spaced rule over the support. Φ and all its derivatives vanish at
/// both ends, so the error decays faster than any power of the spacing.
pub fn trapezoid_transform<F: Fn(f64) -> C64>(profile: &BumpProfile, kernel: F, intervals: usize) -> C64 {
    let (a, b) = profile.support();
    let h = (b - a) / intervals as f64;
    let mut acc = C64::new(0.0, 0.0);
    for j in 1..intervals {
        let x = a + h * j as f64;
        acc += kernel(x) * profile.eval(x);
    }
    acc * h
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrigKind {
    Cos,
    Sin,
}

/// `Γ(s)·cos(sgn(y)πs/2)` or `Γ(s)·sin(sgn(y)πs/2)`, combined in log space so the
/// growth of the trig factor and the decay of Γ never overflow separately.
fn gamma_trig(s: C64, kind: TrigKind, sign: f64) -> Result<C64> {
    let lg = log_gamma(s)?;
    let ihalf = C64::new(0.0, PI / 2.0) * s;
    let v = if s.im >= 0.0 {
        let lead = (lg - ihalf).exp();
        let rot = (ihalf * 2.0).exp();
        match kind {
            TrigKind::Cos => lead * (1.0 + rot) * 0.5,
            TrigKind::Sin => lead * (rot - 1.0) / C64::new(0.0, 2.0),
        }
    } else {
        let lead = (lg + ihalf).exp();
        let rot = (-ihalf * 2.0).exp();
        match kind {
            TrigKind::Cos => lead * (1.0 + rot) * 0.5,
            TrigKind::Sin => lead * (1.0 - rot) / C64::new(0.0, 2.0),
        }
    };
    Ok(match kind {
        TrigKind::Cos => v,
        TrigKind::Sin => v * sign,
    })
}

/// Samples of `u ↦ Φ(e^u) e^u` for Mellin transforms along vertical lines:
/// `f̃(1-s) = ∫ Φ(e^u) e^{u(1-s)} du`.
pub struct MellinSampler {
    u: Vec<f64>,
    g: Vec<f64>,
    h: f64,
}

impl MellinSampler {
    pub fn new(profile: &BumpProfile, intervals: usize) -> Self {
        let (a, b) = profile.support();
        let (la, lb) = (a.ln(), b.ln());
        let h = (lb - la) / intervals as f64;
        let mut u = Vec::with_capacity(intervals);
        let mut g = Vec::with_capacity(intervals);
        for j in 1..intervals {
            let uj = la + h * j as f64;
            u.push(uj);
            g.push(profile.eval(uj.exp()) * uj.exp());
        }
        Self { u, g, h }
    }

    /// `f̃(1-s)`.
    pub fn mellin_one_minus(&self, s: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (&u, &g) in self.u.iter().zip(&self.g) {
            acc += (-s * u).exp() * g;
        }
        acc * self.h
    }
}

pub const CONTOUR_TAIL_TOL: f64 = 1e-9;

/// Default contour for [`check_cos_mellin`].
pub const COS_MELLIN_PARAMS: QuadratureParams = QuadratureParams {
    line_re: 0.5,
    half_height: 600.0,
    step: 0.1,
};

/// Both sides of the cos/sin Mellin identity: the direct integral
/// `∫ f(x) cos(2πxy) dx` and the contour integral of
/// `f̃(1-s) Γ(s) cos(sgn(y)πs/2) (2π|y|)^{-s}` over `Re(s) = c`.
pub fn cos_mellin_sides(f: &BumpProfile, y: f64, q: QuadratureParams, kind: TrigKind) -> Result<(f64, f64)> {
    if y == 0.0 || !y.is_finite() {
        return Err(Error::InvalidInput(format!("cos/sin Mellin check needs y != 0, got {y}")));
    }
    if !(q.line_re > 0.0 && q.step > 0.0 && q.half_height > 0.0) {
        return Err(Error::InvalidInput(format!("bad contour {q:?}")));
    }
    let lhs = trig_transform(f, y, kind)?.value.re;
    let sampler = MellinSampler::new(f, 4096);
    let ln_w = (2.0 * PI * y.abs()).ln();
    let sign = y.signum();
    let term = |t: f64| -> Result<C64> {
        let s = C64::new(q.line_re, t);
        Ok(sampler.mellin_one_minus(s) * gamma_trig(s, kind, sign)? * (-s * ln_w).exp())
    };
    let n = q.nodes_per_side();
    // the integrand at -t is the conjugate of the integrand at t
    let mut acc = term(0.0)?.re;
    for k in 1..=n {
        acc += 2.0 * term(k as f64 * q.step)?.re;
    }
    // f̃(1-s) decays like exp(-c√|t|), so the cut-off tail is about edge·2√T/c
    let tail = term(q.half_height)?.norm() * 2.0 * q.half_height.sqrt();
    if tail > CONTOUR_TAIL_TOL {
        return Err(Error::Convergence {
            tail,
            tol: CONTOUR_TAIL_TOL,
        });
    }
    Ok((lhs, acc * q.step / (2.0 * PI)))
}

/// `|LHS - RHS|` of the cos (or sin) Mellin identity.
pub fn check_cos_mellin(f: &BumpProfile, y: f64, q: QuadratureParams, kind: TrigKind) -> Result<f64> {
    let (l, r) = cos_mellin_sides(f, y, q, kind)?;
    Ok((l - r).abs())
}

/// `∫ |Φ^{(j)}(t)| dt`.
pub fn derivative_l1(profile: &BumpProfile, j: usize) -> Result<f64> {
    let breaks = refine(&profile.breaks(), 0.05 / profile.shape().2);
    let f = |t: f64| profile.derivative(t, j).abs();
    let rough: f64 = breaks.windows(2).map(|w| crate::quad::gk15(&f, w[0], w[1]).value).sum();
    let est = integrate_breaks(f, &breaks, 1e-10f64.max(1e-12 * rough), MAX_PANELS)?;
    Ok(est.value)
}

/// `Φ_(ν) = max_{0≤j≤ν} ∫ |Φ^{(j)}(t)| dt`.
pub fn phi_norm(profile: &BumpProfile, nu: usize) -> Result<f64> {
    let mut best: f64 = 0.0;
    for j in 0..=nu {
        best = best.max(derivative_l1(profile, j)?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_is_symmetric_and_bounded() {
        for i in 0..=1000 {
            let x = i as f64 / 1000.0;
            let s = smooth_step(x);
            assert!((0.0..=1.0).contains(&s));
            assert!((s + smooth_step(1.0 - x) - 1.0).abs() < 1e-15);
        }
        assert_eq!(smooth_step(0.5), 0.5);
    }

    #[test]
    fn profiles_basic_values() {
        let r = BumpProfile::reference();
        assert_eq!(r.eval(0.0), 0.0);
        assert_eq!(r.eval(1.5), 1.0);
        let p = BumpProfile::plateau_inner(10.0).unwrap();
        assert_eq!(p.eval(1.5), 1.0);
        assert_eq!(p.eval(1.1), 1.0);
        assert_eq!(p.eval(0.0), 0.0);
        assert_eq!(p.eval(1.0), 0.0);
        let o = BumpProfile::plateau_outer(10.0).unwrap();
        assert_eq!(o.eval(1.0), 1.0);
        assert_eq!(o.eval(2.0), 1.0);
        assert!(o.eval(0.95) > 0.0);
        assert!(BumpProfile::plateau_inner(1.0).is_err());
        for i in 0..=200 {
            let x = i as f64 / 200.0;
            assert!((r.eval(1.5 + x) - r.eval(1.5 - x)).abs() < 1e-15);
        }
    }

    #[test]
    fn jets_match_finite_differences() {
        let r = BumpProfile::reference();
        let h = 1e-4;
        for &t in &[0.7, 1.2, 1.9, 2.3] {
            let d1 = (r.eval(t + h) - r.eval(t - h)) / (2.0 * h);
            let d2 = (r.eval(t + h) - 2.0 * r.eval(t) + r.eval(t - h)) / (h * h);
            assert!((r.derivative(t, 1) - d1).abs() < 1e-7);
            assert!((r.derivative(t, 2) - d2).abs() < 1e-5);
            let j3 = r.derivative(t, 3);
            let fd3 = (r.derivative(t + h, 2) - r.derivative(t - h, 2)) / (2.0 * h);
            assert!((j3 - fd3).abs() < 1e-5 * j3.abs().max(1.0));
        }
    }

    #[test]
    fn mellin_at_one_is_mass() {
        let r = BumpProfile::reference();
        let m = mellin_tilde(&r, C64::new(1.0, 0.0)).unwrap();
        assert!((m.value.re - 1.0).abs() < 1e-12);
        assert!(m.est_error <= 1e-10);
        for z in [2.0, 10.0, 100.0] {
            let p = BumpProfile::plateau_inner(z).unwrap();
            let v = mellin_tilde(&p, C64::new(1.0, 0.0)).unwrap().value.re;
            assert!((v - (1.0 - 1.0 / z)).abs() < 1e-12, "Z={z}: {v}");
            let o = BumpProfile::plateau_outer(z).unwrap();
            let v = mellin_tilde(&o, C64::new(1.0, 0.0)).unwrap().value.re;
            assert!((v - (1.0 + 1.0 / z)).abs() < 1e-12, "Z={z}: {v}");
        }
        let p = BumpProfile::plateau_inner(100.0).unwrap();
        assert!((mellin_tilde(&p, C64::new(1.0, 0.0)).unwrap().value.re - 1.0).abs() < 0.02);
    }

    #[test]
    fn cech_is_reflected_mellin() {
        let r = BumpProfile::reference();
        let s = C64::new(0.3, 2.0);
        let a = cech(&r, s).unwrap().value;
        let direct = trapezoid_transform(&r, |t| (-s * t.ln()).exp(), 4000);
        assert!((a - direct).norm() < 1e-12);
        assert!((a - mellin_tilde(&r, 1.0 - s).unwrap().value).norm() == 0.0);
    }

    #[test]
    fn fourier_hat_basic() {
        let r = BumpProfile::reference();
        let mass = mellin_tilde(&r, C64::new(1.0, 0.0)).unwrap().value.re;
        assert!((fourier_hat(&r, 0.0).unwrap().value.re - mass).abs() < 1e-13);
        for y in [0.5, 1.0, 5.0] {
            assert!(fourier_hat(&r, y).unwrap().value.re.abs() <= 2f64.sqrt() * mass);
        }
        let far = fourier_hat(&r, 100.0).unwrap().value.re;
        let ibp = derivative_l1(&r, 2).unwrap() * 2f64.sqrt() / (2.0 * PI * 100.0).powi(2);
        assert!(far.abs() <= ibp && ibp <= 1e-4);
        assert!(far.abs() < 1e-6);
    }

    #[test]
    fn transforms_match_trapezoid_oracle() {
        let profiles = [
            BumpProfile::reference(),
            BumpProfile::plateau_inner(5.0).unwrap(),
            BumpProfile::plateau_outer(3.0).unwrap(),
        ];
        for p in &profiles {
            for &y in &[0.3, -1.7, 8.0, 25.0, -60.0, 150.0] {
                let gk = fourier_hat(p, y).unwrap().value.re;
                let w = 2.0 * PI * y;
                let tr = trapezoid_transform(p, |x| C64::new((w * x).cos() + (w * x).sin(), 0.0), 20_000).re;
                assert!((gk - tr).abs() < 1e-8, "{p:?} y={y}: {gk} vs {tr}");
            }
            for &s in &[C64::new(0.5, 3.0), C64::new(-2.0, 40.0), C64::new(3.0, -0.5)] {
                let gk = mellin_tilde(p, s).unwrap().value;
                let tr = trapezoid_transform(p, |x| ((s - 1.0) * x.ln()).exp(), 20_000);
                assert!((gk - tr).norm() < 1e-8, "{p:?} s={s}");
            }
        }
    }

    #[test]
    fn cos_and_sin_mellin_identities() {
        let r = BumpProfile::reference();
        let q = COS_MELLIN_PARAMS;
        for (y, kind) in [(1.0, TrigKind::Cos), (-2.0, TrigKind::Cos), (1.0, TrigKind::Sin), (-2.0, TrigKind::Sin)] {
            let res = check_cos_mellin(&r, y, q, kind).unwrap();
            assert!(res < 1e-8, "y={y} {kind:?}: {res}");
        }
        assert!(check_cos_mellin(&r, 0.0, q, TrigKind::Cos).is_err());
    }

    #[test]
    fn norms() {
        let r = BumpProfile::reference();
        let n0 = phi_norm(&r, 0).unwrap();
        assert!((n0 - 1.0).abs() < 1e-9);
        let n1 = derivative_l1(&r, 1).unwrap();
        assert!((n1 - 2.0).abs() < 1e-9, "{n1}");
        let mut prev = 0.0;
        for nu in 0..6 {
            let v = phi_norm(&r, nu).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn plateau_norms_grow_like_z_power() {
        for nu in 1..=4usize {
            let a = derivative_l1(&BumpProfile::plateau_inner(10.0).unwrap(), nu).unwrap();
            let b = derivative_l1(&BumpProfile::plateau_inner(40.0).unwrap(), nu).unwrap();
            // ∫|Φ^{(ν)}| scales exactly like Z^{ν-1} for this family
            let growth = b / a;
            let expected = 4f64.powi(nu as i32 - 1);
            assert!((growth - expected).abs() < 1e-6 * expected, "nu={nu}: {growth}");
        }
    }

    fn bound_ratio(p: &BumpProfile, s: C64, nu: usize, norm: f64) -> f64 {
        let v = cech(p, s).unwrap().value.norm();
        v * (s - 1.0).norm().powi(nu as i32) / (3f64.powf(s.re.abs()) * norm)
    }

    #[test]
    fn integration_by_parts_bound() {
        // |s - j| ≥ |s - 1| for Re s < 1, and t^{ν - Re s} ≤ (5/2)^ν 3^{|Re s|} on the support,
        // so the ratio never exceeds (5/2)^ν.
        let profiles = [BumpProfile::reference(), BumpProfile::plateau_inner(10.0).unwrap()];
        for p in &profiles {
            for nu in [1usize, 2, 5] {
                let norm = phi_norm(p, nu).unwrap();
                let mut worst: f64 = 0.0;
                for re in [-3.0, -1.0, 0.0, 0.5, 0.9] {
                    for im in [0.0, 1.0, 5.0, 30.0, 100.0, 400.0] {
                        worst = worst.max(bound_ratio(p, C64::new(re, im), nu, norm));
                    }
                }
                assert!(worst <= 2.5f64.powi(nu as i32), "{p:?} nu={nu}: {worst}");
                if nu <= 2 {
                    assert!(worst <= 10.0);
                }
            }
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::test_runner::Config::with_cases(48))]
        #[test]
        fn integration_by_parts_bound_random(re in -3.0f64..0.99, im in -300.0f64..300.0, pick in 0usize..3) {
            let nu = [1usize, 2, 5][pick];
            let p = BumpProfile::reference();
            let norm = phi_norm(&p, nu).unwrap();
            proptest::prop_assert!(bound_ratio(&p, C64::new(re, im), nu, norm) <= 2.5f64.powi(nu as i32));
        }

        #[test]
        fn profile_values_in_unit_interval(t in -1.0f64..4.0, z in 2.0f64..200.0) {
            for p in [BumpProfile::reference(), BumpProfile::plateau_inner(z).unwrap(), BumpProfile::plateau_outer(z).unwrap()] {
                let v = p.eval(t);
                proptest::prop_assert!((0.0..=1.0).contains(&v));
                let (a, b) = p.support();
                if t <= a || t >= b {
                    proptest::prop_assert_eq!(v, 0.0);
                }
            }
        }
    }
}
