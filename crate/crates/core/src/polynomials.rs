//! Jacobi (complex parameters and argument), Hermite and generalized Laguerre polynomials.
//!
//! Series are summed in double-double arithmetic: the alternating terms of the terminating
//! hypergeometric sums cancel by several orders of magnitude at moderate degree.

use crate::complex::Complex;
use crate::error::{PdmError, Result};

pub const MAX_DEGREE: usize = 60;

fn check_degree(n: usize) -> Result<()> {
    if n > MAX_DEGREE {
        return Err(PdmError::Precision { n, max: MAX_DEGREE });
    }
    Ok(())
}

/// Unevaluated sum hi + lo with |lo| ≤ ulp(hi)/2.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

impl Dd {
    const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    fn from(v: f64) -> Dd {
        Dd { hi: v, lo: 0.0 }
    }

    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let r = quick_two_sum(s, e + t);
        quick_two_sum(r.hi, r.lo + f)
    }

    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        quick_two_sum(p, e + (self.hi * o.lo + self.lo * o.hi))
    }

    fn div_f64(self, b: f64) -> Dd {
        let q1 = self.hi / b;
        let p = q1 * b;
        let pe = q1.mul_add(b, -p);
        let (s, e) = two_sum(self.hi, -p);
        let r = s + (e - pe + self.lo);
        quick_two_sum(q1, r / b)
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

#[derive(Debug, Clone, Copy)]
struct Cdd {
    re: Dd,
    im: Dd,
}

impl Cdd {
    fn from(z: Complex) -> Cdd {
        Cdd { re: Dd::from(z.re), im: Dd::from(z.im) }
    }

    fn one() -> Cdd {
        Cdd { re: Dd::ONE, im: Dd::ZERO }
    }

    fn zero() -> Cdd {
        Cdd { re: Dd::ZERO, im: Dd::ZERO }
    }

    fn add(self, o: Cdd) -> Cdd {
        Cdd { re: self.re.add(o.re), im: self.im.add(o.im) }
    }

    fn add_real(self, v: f64) -> Cdd {
        Cdd { re: self.re.add(Dd::from(v)), im: self.im }
    }

    fn mul(self, o: Cdd) -> Cdd {
        Cdd { re: self.re.mul(o.re).sub(self.im.mul(o.im)), im: self.re.mul(o.im).add(self.im.mul(o.re)) }
    }

    fn div_f64(self, b: f64) -> Cdd {
        Cdd { re: self.re.div_f64(b), im: self.im.div_f64(b) }
    }

    fn to_complex(self) -> Complex {
        Complex::new(self.re.to_f64(), self.im.to_f64())
    }
}

/// Σ_k [(−n)_k (n+α+β+1)_k / k!] · (α+k+1)_{n−k} / n! · w^k, the expansion about z = 1
/// with the (α+1)_n/(α+1)_k ratio kept as a product so no Pochhammer symbol is divided by.
fn jacobi_series(n: usize, alpha: Complex, beta: Complex, w: Complex) -> Complex {
    // tail[k] = Π_{j=k+1}^{n} (α + j)
    let a = Cdd::from(alpha);
    let mut tail = vec![Cdd::one(); n + 1];
    for k in (0..n).rev() {
        tail[k] = tail[k + 1].mul(a.add_real((k + 1) as f64));
    }
    let c = Cdd::from(alpha + beta).add_real((n + 1) as f64);
    let wd = Cdd::from(w);
    let mut coef = Cdd::one();
    let mut sum = Cdd::zero();
    for k in 0..=n {
        sum = sum.add(coef.mul(tail[k]));
        if k < n {
            let kf = k as f64;
            coef = coef
                .mul(c.add_real(kf))
                .mul(wd)
                .mul(Cdd { re: Dd::from(kf - n as f64), im: Dd::ZERO })
                .div_f64(kf + 1.0);
        }
    }
    for j in 2..=n {
        sum = sum.div_f64(j as f64);
    }
    sum.to_complex()
}

/// P_n^{(α,β)}(z) for complex α, β, z.
///
/// Sums about z = 1 when Re z ≥ 0 and uses P_n^{(α,β)}(z) = (−1)ⁿ P_n^{(β,α)}(−z) otherwise,
/// so the expansion variable has modulus at most (1 + |z|)/2 on the unit disk.
pub fn jacobi_eval(n: usize, alpha: Complex, beta: Complex, z: Complex) -> Result<Complex> {
    check_degree(n)?;
    if !(alpha.is_finite() && beta.is_finite() && z.is_finite()) {
        return Err(PdmError::InvalidParameter("non-finite Jacobi argument".into()));
    }
    if n == 0 {
        return Ok(Complex::real(1.0));
    }
    let v = if z.re >= 0.0 {
        jacobi_series(n, alpha, beta, (1.0 - z) * 0.5)
    } else {
        let s = jacobi_series(n, beta, alpha, (1.0 + z) * 0.5);
        if n % 2 == 1 {
            -s
        } else {
            s
        }
    };
    if !v.is_finite() {
        return Err(PdmError::Degenerate(format!(
            "Jacobi series overflowed for n = {n}, alpha = {alpha}, beta = {beta}, z = {z}"
        )));
    }
    // Real inputs stay exactly real: the imaginary lanes are identically zero throughout.
    Ok(v)
}

/// Physicists' Hermite polynomial H_n(x).
pub fn hermite_eval(n: usize, x: f64) -> Result<f64> {
    check_degree(n)?;
    let (mut prev, mut cur) = (1.0, 2.0 * x);
    if n == 0 {
        return Ok(prev);
    }
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Generalized Laguerre polynomial L_n^{(α)}(x); α may not be a negative integer.
pub fn laguerre_eval(n: usize, alpha: f64, x: f64) -> Result<f64> {
    check_degree(n)?;
    if !alpha.is_finite() || (alpha < 0.0 && alpha.fract() == 0.0) {
        return Err(PdmError::InvalidParameter(format!(
            "Laguerre parameter alpha = {alpha} must not be a negative integer"
        )));
    }
    // term_k = (−1)^k C(n+α, n−k) x^k / k!, C(n+α, n−k) = Π_{j=1}^{n−k} (α+k+j)/j.
    let mut binom = Dd::ONE;
    for j in 1..=n {
        binom = binom.mul(Dd::from(alpha + j as f64)).div_f64(j as f64);
    }
    let xd = Dd::from(x);
    let mut term = binom;
    let mut sum = term;
    for k in 0..n {
        // C(n+α, n−k−1)/C(n+α, n−k) = (n−k)/(α+k+1)
        let kf = k as f64;
        let ratio_den = alpha + kf + 1.0;
        term = term.mul(xd).mul(Dd::from(-((n - k) as f64))).div_f64(kf + 1.0).div_f64(ratio_den);
        sum = sum.add(term);
    }
    Ok(sum.to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex {
        Complex::real(re)
    }

    #[test]
    fn jacobi_degree_zero() {
        let v = jacobi_eval(0, Complex::new(0.3, 2.0), c(-5.0), Complex::new(7.0, 1.0)).unwrap();
        assert_eq!(v, c(1.0));
    }

    #[test]
    fn jacobi_legendre() {
        assert!((jacobi_eval(1, c(0.0), c(0.0), c(0.5)).unwrap() - c(0.5)).abs() < 1e-16);
        // P_2 = (3z² − 1)/2
        let z = 0.3;
        assert!((jacobi_eval(2, c(0.0), c(0.0), c(z)).unwrap().re - (3.0 * z * z - 1.0) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn jacobi_reflection() {
        let a = jacobi_eval(2, c(1.0), c(0.0), c(-0.3)).unwrap();
        let b = jacobi_eval(2, c(0.0), c(1.0), c(0.3)).unwrap();
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn jacobi_negative_integer_alpha_is_regular() {
        // (α+1)_k vanishes at k = 2 for α = −2; the division-free sum stays defined.
        // P_2^{(−2,0)}(z) = ((z − 1)/2)²
        let z = 0.4;
        let v = jacobi_eval(2, c(-2.0), c(0.0), c(z)).unwrap().re;
        assert!((v - ((z - 1.0) / 2.0).powi(2)).abs() < 1e-15);
    }

    #[test]
    fn jacobi_real_inputs_yield_exact_zero_imaginary() {
        for z in [-0.9, -0.1, 0.0, 0.5, 3.0] {
            assert_eq!(jacobi_eval(7, c(0.25), c(-0.5), c(z)).unwrap().im, 0.0);
        }
    }

    #[test]
    fn precision_limit() {
        assert!(matches!(jacobi_eval(61, c(0.0), c(0.0), c(0.0)), Err(PdmError::Precision { .. })));
        assert!(hermite_eval(61, 0.0).is_err());
        assert!(laguerre_eval(61, 0.0, 0.0).is_err());
        assert!(jacobi_eval(60, c(0.0), c(0.0), c(0.9)).is_ok());
    }

    #[test]
    fn hermite_values() {
        assert_eq!(hermite_eval(0, 3.0).unwrap(), 1.0);
        assert_eq!(hermite_eval(1, 2.0).unwrap(), 4.0);
        assert_eq!(hermite_eval(3, 1.0).unwrap(), -4.0);
    }

    #[test]
    fn laguerre_values() {
        assert_eq!(laguerre_eval(0, 2.5, 9.0).unwrap(), 1.0);
        assert_eq!(laguerre_eval(1, 0.0, 1.0).unwrap(), 0.0);
        assert_eq!(laguerre_eval(2, 0.0, 0.0).unwrap(), 1.0);
        // L_2^{(α)}(0) = C(2+α, 2)
        let a = 1.5;
        assert!((laguerre_eval(2, a, 0.0).unwrap() - (a + 2.0) * (a + 1.0) / 2.0).abs() < 1e-15);
        assert!(matches!(laguerre_eval(2, -1.0, 0.5), Err(PdmError::InvalidParameter(_))));
        assert!(laguerre_eval(2, -1.5, 0.5).is_ok());
    }
}
