//! Minimal complex arithmetic on pairs of `f64`.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

pub const I: Complex = Complex { re: 0.0, im: 1.0 };
pub const ONE: Complex = Complex { re: 1.0, im: 0.0 };
pub const ZERO: Complex = Complex { re: 0.0, im: 0.0 };

impl Complex {
    pub const fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub const fn real(re: f64) -> Self {
        Self { re, im: 0.0 }
    }

    pub fn conj(self) -> Self {
        Self::new(self.re, -self.im)
    }

    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }

    /// Principal argument in (−π, π].
    pub fn arg(self) -> f64 {
        self.im.atan2(self.re)
    }

    pub fn from_polar(r: f64, theta: f64) -> Self {
        Self::new(r * theta.cos(), r * theta.sin())
    }

    pub fn exp(self) -> Self {
        Self::from_polar(self.re.exp(), self.im)
    }

    /// Principal logarithm.
    pub fn ln(self) -> Self {
        Self::new(self.abs().ln(), self.arg())
    }

    /// Principal square root.
    pub fn sqrt(self) -> Self {
        if self.im == 0.0 {
            return if self.re >= 0.0 { Self::real(self.re.sqrt()) } else { Self::new(0.0, (-self.re).sqrt()) };
        }
        let r = self.abs();
        let re = ((r + self.re) * 0.5).sqrt();
        let im = ((r - self.re) * 0.5).sqrt().copysign(self.im);
        Self::new(re, im)
    }

    /// Principal power `self^p` for real `p`.
    pub fn powf(self, p: f64) -> Self {
        if self == ZERO {
            return if p == 0.0 { ONE } else { ZERO };
        }
        Self::from_polar(self.abs().powf(p), self.arg() * p)
    }

    pub fn powi(self, k: i32) -> Self {
        let mut base = if k < 0 { ONE / self } else { self };
        let mut e = k.unsigned_abs();
        let mut acc = ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base *= base;
            e >>= 1;
        }
        acc
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(self.re * k, self.im * k)
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl From<f64> for Complex {
    fn from(re: f64) -> Self {
        Self::real(re)
    }
}

impl fmt::Display for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im < 0.0 {
            write!(f, "{}-{}i", self.re, -self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl Add for Complex {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for Complex {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for Complex {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
}

impl Div for Complex {
    type Output = Self;
    /// Smith's algorithm; avoids overflow in the denominator.
    fn div(self, o: Self) -> Self {
        if o.im == 0.0 {
            return Self::new(self.re / o.re, self.im / o.re);
        }
        if o.re.abs() >= o.im.abs() {
            let r = o.im / o.re;
            let d = o.re + o.im * r;
            Self::new((self.re + self.im * r) / d, (self.im - self.re * r) / d)
        } else {
            let r = o.re / o.im;
            let d = o.re * r + o.im;
            Self::new((self.re * r + self.im) / d, (self.im * r - self.re) / d)
        }
    }
}

impl Neg for Complex {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl Add<f64> for Complex {
    type Output = Self;
    fn add(self, o: f64) -> Self {
        Self::new(self.re + o, self.im)
    }
}

impl Sub<f64> for Complex {
    type Output = Self;
    fn sub(self, o: f64) -> Self {
        Self::new(self.re - o, self.im)
    }
}

impl Mul<f64> for Complex {
    type Output = Self;
    fn mul(self, o: f64) -> Self {
        self.scale(o)
    }
}

impl Div<f64> for Complex {
    type Output = Self;
    fn div(self, o: f64) -> Self {
        Self::new(self.re / o, self.im / o)
    }
}

impl Mul<Complex> for f64 {
    type Output = Complex;
    fn mul(self, o: Complex) -> Complex {
        o.scale(self)
    }
}

impl Add<Complex> for f64 {
    type Output = Complex;
    fn add(self, o: Complex) -> Complex {
        Complex::new(self + o.re, o.im)
    }
}

impl Sub<Complex> for f64 {
    type Output = Complex;
    fn sub(self, o: Complex) -> Complex {
        Complex::new(self - o.re, -o.im)
    }
}

impl AddAssign for Complex {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl SubAssign for Complex {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl MulAssign for Complex {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex, b: Complex, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn i_squared_is_minus_one() {
        assert_eq!(I * I, Complex::real(-1.0));
    }

    #[test]
    fn division_inverts_multiplication() {
        let a = Complex::new(1.5, -2.25);
        let b = Complex::new(-0.3, 4.0);
        assert!(close(a * b / b, a, 1e-14));
        assert!(close(a / Complex::new(1e-3, 1e3) * Complex::new(1e-3, 1e3), a, 1e-13));
    }

    #[test]
    fn sqrt_branch() {
        assert_eq!(Complex::real(-4.0).sqrt(), Complex::new(0.0, 2.0));
        let z = Complex::new(-3.0, -4.0);
        let r = z.sqrt();
        assert!(close(r * r, z, 1e-14));
        assert!(r.re >= 0.0);
    }

    #[test]
    fn exp_ln_roundtrip() {
        let z = Complex::new(0.7, -2.1);
        assert!(close(z.ln().exp(), z, 1e-14));
        assert!(close(I.scale(std::f64::consts::PI).exp(), Complex::real(-1.0), 1e-15));
    }

    #[test]
    fn integer_powers() {
        let z = Complex::new(0.5, 1.25);
        assert!(close(z.powi(3), z * z * z, 1e-14));
        assert!(close(z.powi(-2), ONE / (z * z), 1e-14));
        assert_eq!(z.powi(0), ONE);
        assert!(close(z.powf(3.0), z.powi(3), 1e-13));
    }
}
