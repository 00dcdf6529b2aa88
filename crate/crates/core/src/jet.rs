//! Third-order jets: a value together with its first three time derivatives.
//!
//! Every coefficient that enters a Lyapunov certificate (θ, σ, ξ, c²b, w) is
//! built from the damping and rescaling schedules with ordinary arithmetic on
//! jets, so derivatives of products such as `d/dt(βθσ)` come out of the
//! product rule instead of finite differences.
//!
//! A jet also carries a separate natural-log scale. Coefficients such as
//! `p_γ^{2r} b^{-2/3}` with `b = e^{μt}` leave the `f64` range long before the
//! verification horizon; they are kept as `exp(log_scale) * c` and only
//! exponentiated when a plain value is requested.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Beyond this magnitude of `log_scale + ln|c|` the jet stays in scaled form.
const FOLD_LIMIT: f64 = 600.0;
// e^±FOLD_LIMIT, slightly inside so the ln-based test still decides near the edge
const FOLD_HI: f64 = 1e260;
const FOLD_LO: f64 = 1e-260;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    /// Natural logarithm of a common factor applied to every coefficient.
    pub log_scale: f64,
    /// Value and derivatives `[f, f', f'', f''']`, divided by `exp(log_scale)`.
    pub c: [f64; 4],
}

impl Jet {
    pub const ZERO: Jet = Jet { log_scale: 0.0, c: [0.0; 4] };

    pub fn new(v: f64, d1: f64, d2: f64, d3: f64) -> Self {
        Jet { log_scale: 0.0, c: [v, d1, d2, d3] }
    }

    pub fn constant(v: f64) -> Self {
        Jet::new(v, 0.0, 0.0, 0.0)
    }

    /// The identity function evaluated at `t`.
    pub fn variable(t: f64) -> Self {
        Jet::new(t, 1.0, 0.0, 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0.0)
    }

    fn factor(&self) -> f64 {
        if self.log_scale == 0.0 {
            1.0
        } else {
            self.log_scale.exp()
        }
    }

    /// Plain value; overflows to ±inf when the scale is out of range.
    pub fn value(&self) -> f64 {
        self.c[0] * self.factor()
    }

    pub fn d1(&self) -> f64 {
        self.c[1] * self.factor()
    }

    pub fn d2(&self) -> f64 {
        self.c[2] * self.factor()
    }

    pub fn d3(&self) -> f64 {
        self.c[3] * self.factor()
    }

    /// `k`-th coefficient as a log-scaled scalar.
    pub fn coeff(&self, k: usize) -> Scaled {
        Scaled::new(self.c[k], self.log_scale)
    }

    /// Value as a log-scaled scalar.
    pub fn scaled_value(&self) -> Scaled {
        self.coeff(0)
    }

    /// Time derivative as a jet. The top coefficient is unknown and set to NaN;
    /// lower orders never read it.
    pub fn derivative(&self) -> Jet {
        Jet { log_scale: self.log_scale, c: [self.c[1], self.c[2], self.c[3], f64::NAN] }
    }

    /// `ln` of the largest finite coefficient magnitude plus the scale.
    fn magnitude(&self) -> f64 {
        let m = self.c.iter().filter(|x| x.is_finite()).fold(0.0f64, |a, &x| a.max(x.abs()));
        if m == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.log_scale + m.ln()
        }
    }

    fn normalized(mut self) -> Jet {
        if self.log_scale == 0.0 {
            let m = self.c.iter().filter(|x| x.is_finite()).fold(0.0f64, |a, &x| a.max(x.abs()));
            if m == 0.0 || (m < FOLD_HI && m > FOLD_LO) {
                return self;
            }
            let mag = self.magnitude();
            if mag.is_finite() && mag.abs() > FOLD_LIMIT {
                let shift = mag.round();
                let f = (-shift).exp();
                for x in self.c.iter_mut() {
                    *x *= f;
                }
                self.log_scale = shift;
            }
            return self;
        }
        let mag = self.magnitude();
        if !mag.is_finite() || mag.abs() < FOLD_LIMIT {
            let f = self.log_scale.exp();
            for x in self.c.iter_mut() {
                *x *= f;
            }
            self.log_scale = 0.0;
        }
        self
    }

    fn rescaled_to(&self, log_scale: f64) -> [f64; 4] {
        if self.log_scale == log_scale {
            return self.c;
        }
        let f = (self.log_scale - log_scale).exp();
        [self.c[0] * f, self.c[1] * f, self.c[2] * f, self.c[3] * f]
    }

    /// Composition `φ ∘ self` given `φ` and its first three derivatives at the
    /// (unscaled) value. Only valid for `log_scale == 0`.
    fn compose(c: [f64; 4], phi: [f64; 4]) -> [f64; 4] {
        let [_, g1, g2, g3] = c;
        [
            phi[0],
            phi[1] * g1,
            phi[2] * g1 * g1 + phi[1] * g2,
            phi[3] * g1 * g1 * g1 + 3.0 * phi[2] * g1 * g2 + phi[1] * g3,
        ]
    }

    pub fn exp(self) -> Jet {
        let l = self.materialize();
        let e = Jet::compose(l, [1.0; 4]);
        Jet { log_scale: l[0], c: e }.normalized()
    }

    /// Natural logarithm; the value must be positive.
    pub fn ln(self) -> Jet {
        let [y, ..] = self.c;
        let phi = [y.ln(), 1.0 / y, -1.0 / (y * y), 2.0 / (y * y * y)];
        let mut out = Jet::compose(self.c, phi);
        out[0] += self.log_scale;
        Jet { log_scale: 0.0, c: out }
    }

    pub fn recip(self) -> Jet {
        let [y, ..] = self.c;
        let phi = [1.0 / y, -1.0 / (y * y), 2.0 / (y * y * y), -6.0 / (y * y * y * y)];
        Jet { log_scale: -self.log_scale, c: Jet::compose(self.c, phi) }.normalized()
    }

    /// Real power of a positive jet.
    pub fn powf(self, a: f64) -> Jet {
        if a == 0.0 {
            return Jet::constant(1.0);
        }
        if a == 1.0 {
            return self;
        }
        let [y, ..] = self.c;
        if self.log_scale != 0.0 || (y > 0.0 && (a * y.ln()).abs() > FOLD_LIMIT) {
            return (self.ln() * a).exp();
        }
        // a falling factorial of zero kills the term even where y^(a-k) blows up
        let phi = if y > 0.0 && y.is_finite() {
            let ya = y.powf(a);
            let inv = 1.0 / y;
            [ya, a * ya * inv, a * (a - 1.0) * ya * inv * inv, a * (a - 1.0) * (a - 2.0) * ya * inv * inv * inv]
        } else {
            let term = |c: f64, e: f64| if c == 0.0 { 0.0 } else { c * y.powf(e) };
            [y.powf(a), term(a, a - 1.0), term(a * (a - 1.0), a - 2.0), term(a * (a - 1.0) * (a - 2.0), a - 3.0)]
        };
        Jet { log_scale: 0.0, c: Jet::compose(self.c, phi) }.normalized()
    }

    pub fn sqrt(self) -> Jet {
        self.powf(0.5)
    }

    pub fn square(self) -> Jet {
        self * self
    }

    /// Coefficients with the scale multiplied out (may overflow).
    pub fn materialize(&self) -> [f64; 4] {
        self.rescaled_to(0.0)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        if rhs.is_zero() {
            return self;
        }
        if self.is_zero() {
            return rhs;
        }
        let target = if self.log_scale == rhs.log_scale || self.magnitude() >= rhs.magnitude() {
            self.log_scale
        } else {
            rhs.log_scale
        };
        let a = self.rescaled_to(target);
        let b = rhs.rescaled_to(target);
        Jet { log_scale: target, c: [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]] }.normalized()
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self + (-rhs)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet { log_scale: self.log_scale, c: [-self.c[0], -self.c[1], -self.c[2], -self.c[3]] }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let [f0, f1, f2, f3] = self.c;
        let [g0, g1, g2, g3] = rhs.c;
        Jet {
            log_scale: self.log_scale + rhs.log_scale,
            c: [
                f0 * g0,
                f1 * g0 + f0 * g1,
                f2 * g0 + 2.0 * f1 * g1 + f0 * g2,
                f3 * g0 + 3.0 * f2 * g1 + 3.0 * f1 * g2 + f0 * g3,
            ],
        }
        .normalized()
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, k: f64) -> Jet {
        Jet { log_scale: self.log_scale, c: [self.c[0] * k, self.c[1] * k, self.c[2] * k, self.c[3] * k] }
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, j: Jet) -> Jet {
        j * self
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, k: f64) -> Jet {
        self + Jet::constant(k)
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(self, k: f64) -> Jet {
        self - Jet::constant(k)
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet) -> Jet {
        self * rhs.recip()
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, k: f64) -> Jet {
        self * (1.0 / k)
    }
}

/// A real number stored as `m * exp(k)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scaled {
    pub m: f64,
    pub k: f64,
}

impl Scaled {
    pub const ZERO: Scaled = Scaled { m: 0.0, k: 0.0 };

    pub fn new(m: f64, k: f64) -> Self {
        Scaled { m, k }
    }

    pub fn from_f64(x: f64) -> Self {
        Scaled { m: x, k: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        if self.k == 0.0 {
            self.m
        } else {
            self.m * self.k.exp()
        }
    }

    pub fn abs(self) -> Self {
        Scaled { m: self.m.abs(), k: self.k }
    }

    /// `ln|x|`, `-inf` for zero.
    pub fn ln_abs(self) -> f64 {
        if self.m == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.m.abs().ln() + self.k
        }
    }

    pub fn is_sign_negative(self) -> bool {
        self.m < 0.0
    }

    /// Larger of two magnitudes.
    pub fn max_abs(self, other: Scaled) -> Scaled {
        if self.ln_abs() >= other.ln_abs() {
            self.abs()
        } else {
            other.abs()
        }
    }

    /// `self / (1 + scale)` for a nonnegative `scale`, computed without
    /// leaving the floating range.
    pub fn relative_to(self, scale: Scaled) -> f64 {
        let ls = scale.ln_abs();
        if ls < 30.0 {
            let s = 1.0 + scale.abs().to_f64();
            let lm = self.ln_abs();
            if lm.is_finite() && lm > 700.0 {
                return self.m.signum() * (lm - s.ln()).exp();
            }
            self.to_f64() / s
        } else {
            // 1 + scale == scale to working precision
            let lr = self.ln_abs() - ls;
            if self.m == 0.0 {
                0.0
            } else {
                self.m.signum() * lr.exp()
            }
        }
    }
}

impl Scaled {
    /// Sum computed relative to the largest magnitude.
    pub fn sum(terms: &[Scaled]) -> Scaled {
        let top = terms.iter().map(|s| s.ln_abs()).fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return Scaled::ZERO;
        }
        if !top.is_finite() {
            return Scaled::from_f64(terms.iter().map(|s| s.to_f64()).sum());
        }
        let m = terms
            .iter()
            .filter(|s| s.m != 0.0)
            .map(|s| s.m.signum() * (s.ln_abs() - top).exp())
            .sum();
        Scaled { m, k: top }
    }

    /// Largest magnitude among `terms`.
    pub fn max_magnitude(terms: &[Scaled]) -> Scaled {
        terms.iter().fold(Scaled::ZERO, |a, b| a.max_abs(*b))
    }
}

impl Neg for Scaled {
    type Output = Scaled;
    fn neg(self) -> Scaled {
        Scaled { m: -self.m, k: self.k }
    }
}

impl Mul<f64> for Scaled {
    type Output = Scaled;
    fn mul(self, x: f64) -> Scaled {
        Scaled { m: self.m * x, k: self.k }
    }
}

impl From<f64> for Scaled {
    fn from(x: f64) -> Self {
        Scaled::from_f64(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fd(f: impl Fn(f64) -> f64, t: f64) -> (f64, f64) {
        let h = 1e-4 * t.abs().max(1.0);
        let d1 = (f(t + h) - f(t - h)) / (2.0 * h);
        let d2 = (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
        (d1, d2)
    }

    #[test]
    fn product_and_quotient_rules() {
        let t = Jet::variable(1.7);
        let j = (t * t + 1.0) / (t.exp() + t.sqrt());
        let f = |t: f64| (t * t + 1.0) / (t.exp() + t.sqrt());
        let (d1, d2) = fd(f, 1.7);
        assert_relative_eq!(j.value(), f(1.7), max_relative = 1e-14);
        assert_relative_eq!(j.d1(), d1, max_relative = 1e-7);
        assert_relative_eq!(j.d2(), d2, max_relative = 1e-5);
    }

    #[test]
    fn third_derivative_of_power() {
        let j = Jet::variable(2.0).powf(2.5);
        // 2.5 * 1.5 * 0.5 * t^-0.5
        assert_relative_eq!(j.d3(), 1.875 / 2f64.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn integer_power_is_exact() {
        let j = Jet::variable(2.0).powf(2.0);
        assert_eq!([j.value(), j.d1(), j.d2(), j.d3()], [4.0, 4.0, 2.0, 0.0]);
    }

    #[test]
    fn large_exponentials_stay_scaled() {
        let t = Jet::variable(2000.0);
        let b = t.exp();
        assert!(b.log_scale > 1000.0);
        let bm = b.powf(-2.0 / 3.0);
        let prod = b * bm; // b^{1/3}
        assert_relative_eq!(prod.scaled_value().ln_abs(), 2000.0 / 3.0, max_relative = 1e-12);
        let l = b.ln();
        assert_relative_eq!(l.value(), 2000.0, max_relative = 1e-14);
        assert_relative_eq!(l.d1(), 1.0, max_relative = 1e-14);
        assert_eq!(l.d2(), 0.0);
    }

    #[test]
    fn addition_keeps_dominant_scale() {
        let big = Jet::variable(1000.0).exp();
        let s = big + Jet::constant(1.0);
        assert_relative_eq!(s.scaled_value().ln_abs(), 1000.0, max_relative = 1e-14);
        let z = Jet::ZERO + big;
        assert_eq!(z, big);
    }

    #[test]
    fn scaled_sum_cancels_in_log_space() {
        let a = Scaled::new(1.0, 800.0);
        let b = Scaled::new(-0.5, 800.0 + 2f64.ln());
        assert!(Scaled::sum(&[a, b]).m.abs() < 1e-14);
        let s = Scaled::sum(&[Scaled::from_f64(2.0), Scaled::from_f64(3.0)]);
        assert_relative_eq!(s.to_f64(), 5.0, max_relative = 1e-15);
    }

    #[test]
    fn relative_to_handles_overflowing_scales() {
        let v = Scaled::new(-2.0, 900.0);
        let s = Scaled::new(4.0, 900.0);
        assert_relative_eq!(v.relative_to(s), -0.5, max_relative = 1e-12);
        assert_relative_eq!(Scaled::from_f64(-1.0).relative_to(Scaled::from_f64(3.0)), -0.25);
    }
}
