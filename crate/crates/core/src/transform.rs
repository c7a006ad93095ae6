//! The coordinate transformation ψ = f·F(g): g-maps, the G functional, f(x), and a direct
//! evaluation of E − V(x) from Q, R, g and m.
//!
//! All g-map derivatives are taken with respect to μ. x-space derivatives follow from
//! μ′ = √m, μ″ = m′/(2√m), μ‴ = m″/(2√m) − m′²/(4m^{3/2}).

use crate::complex::{Complex, I};
use crate::error::{PdmError, Result};
use crate::families::{self, Basis, FamilyId, FamilyParams};
use crate::mass::{self, MassProfile};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GMapKind {
    /// i·sinh(aμ)
    J1Isinh,
    /// cosh(aμ)
    J1Cosh,
    /// cos(aμ)
    J1Cos,
    /// sin(aμ)
    J1Sin,
    /// tanh(aμ)
    J2Tanh,
    /// coth(aμ)
    J2Coth,
    /// −i·cot(aμ)
    J2Icot,
    /// −i·tan(aμ)
    J2Itan,
    /// √ω·μ
    HLinear,
    /// √(4ω/(2n+1))·√μ
    HSqrt,
    /// ω·μ²
    LQuadratic,
    /// exp(−aμ)
    LExp,
    /// 2ω·μ with ω = a/(n+l+1)
    LLinear,
}

impl GMapKind {
    pub const ALL: [GMapKind; 13] = [
        GMapKind::J1Isinh,
        GMapKind::J1Cosh,
        GMapKind::J1Cos,
        GMapKind::J1Sin,
        GMapKind::J2Tanh,
        GMapKind::J2Coth,
        GMapKind::J2Icot,
        GMapKind::J2Itan,
        GMapKind::HLinear,
        GMapKind::HSqrt,
        GMapKind::LQuadratic,
        GMapKind::LExp,
        GMapKind::LLinear,
    ];

    pub fn is_jacobi_case1(self) -> bool {
        matches!(self, GMapKind::J1Isinh | GMapKind::J1Cosh | GMapKind::J1Cos | GMapKind::J1Sin)
    }

    pub fn is_jacobi_case2(self) -> bool {
        matches!(self, GMapKind::J2Tanh | GMapKind::J2Coth | GMapKind::J2Icot | GMapKind::J2Itan)
    }
}

/// A g-map with its scale: `scale` is a for the Jacobi, L_EXP and L_LINEAR maps and ω for
/// H_LINEAR, H_SQRT and L_QUADRATIC. `l` is read by L_LINEAR only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GMap {
    pub kind: GMapKind,
    pub scale: f64,
    pub l: f64,
}

/// g and its first three μ-derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GDerivs {
    pub g: Complex,
    pub dg: Complex,
    pub d2g: Complex,
    pub d3g: Complex,
    /// 1 − g², evaluated without cancellation for the Jacobi maps.
    pub one_minus_g2: Complex,
}

impl GMap {
    pub fn new(kind: GMapKind, scale: f64) -> Self {
        GMap { kind, scale, l: 0.0 }
    }

    pub fn with_l(mut self, l: f64) -> Self {
        self.l = l;
        self
    }

    /// ω_n = a/(n+l+1) of the L_LINEAR map.
    fn linear_omega(&self, n: usize) -> f64 {
        self.scale / (n as f64 + self.l + 1.0)
    }

    /// The constant C of the map's defining equation.
    pub fn constant(&self, n: usize) -> f64 {
        let a = self.scale;
        match self.kind {
            GMapKind::J1Isinh | GMapKind::J1Cosh | GMapKind::J2Icot | GMapKind::J2Itan => -a * a,
            GMapKind::J1Cos | GMapKind::J1Sin | GMapKind::J2Tanh | GMapKind::J2Coth | GMapKind::LExp => a * a,
            GMapKind::HLinear => a,
            GMapKind::HSqrt => 4.0 * a * a / ((2 * n + 1) as f64).powi(2),
            GMapKind::LQuadratic => 4.0 * a,
            GMapKind::LLinear => {
                let w = self.linear_omega(n);
                4.0 * w * w
            }
        }
    }

    /// Open μ-interval on which the map is used (for scale > 0).
    pub fn mu_domain(&self) -> (f64, f64) {
        let a = self.scale.abs();
        match self.kind {
            GMapKind::J1Isinh | GMapKind::J2Tanh | GMapKind::HLinear | GMapKind::LExp => {
                (f64::NEG_INFINITY, f64::INFINITY)
            }
            GMapKind::J1Cosh | GMapKind::J2Coth | GMapKind::HSqrt | GMapKind::LQuadratic | GMapKind::LLinear => {
                (0.0, f64::INFINITY)
            }
            GMapKind::J1Cos | GMapKind::J2Icot => (0.0, PI / a),
            GMapKind::J1Sin | GMapKind::J2Itan => (-FRAC_PI_2 / a, FRAC_PI_2 / a),
        }
    }

    /// The defining ratio, e.g. (dg/dμ)²/(1−g²) for Case 1 maps; equals `constant(n)`.
    pub fn defining_ratio(&self, d: &GDerivs) -> Complex {
        let one = Complex::real(1.0);
        match self.kind {
            k if k.is_jacobi_case1() => d.dg * d.dg / (one - d.g * d.g),
            k if k.is_jacobi_case2() => {
                let q = one - d.g * d.g;
                d.dg * d.dg / (q * q)
            }
            GMapKind::HLinear | GMapKind::LLinear => d.dg * d.dg,
            GMapKind::HSqrt => d.dg * d.dg * d.g * d.g,
            GMapKind::LQuadratic => d.dg * d.dg / d.g,
            _ => d.dg * d.dg / (d.g * d.g),
        }
    }
}

/// g, dg/dμ, d²g/dμ², d³g/dμ³ at μ.
pub fn g_derivs(map: &GMap, mu: f64, n: usize) -> Result<GDerivs> {
    let (lo, hi) = map.mu_domain();
    if !(mu > lo && mu < hi) {
        return Err(PdmError::Domain { x: mu, lo, hi });
    }
    let a = map.scale;
    let re = Complex::real;
    let x = a * mu;
    let plain =
        |g: Complex, dg: Complex, d2g: Complex, d3g: Complex| GDerivs { g, dg, d2g, d3g, one_minus_g2: 1.0 - g * g };
    Ok(match map.kind {
        GMapKind::J1Isinh => {
            let (s, c) = (x.sinh(), x.cosh());
            GDerivs {
                g: I * s,
                dg: I * (a * c),
                d2g: I * (a * a * s),
                d3g: I * (a * a * a * c),
                one_minus_g2: re(c * c),
            }
        }
        GMapKind::J1Cosh => {
            let (s, c) = (x.sinh(), x.cosh());
            GDerivs { g: re(c), dg: re(a * s), d2g: re(a * a * c), d3g: re(a * a * a * s), one_minus_g2: re(-s * s) }
        }
        GMapKind::J1Cos => {
            let (s, c) = x.sin_cos();
            GDerivs { g: re(c), dg: re(-a * s), d2g: re(-a * a * c), d3g: re(a * a * a * s), one_minus_g2: re(s * s) }
        }
        GMapKind::J1Sin => {
            let (s, c) = x.sin_cos();
            GDerivs { g: re(s), dg: re(a * c), d2g: re(-a * a * s), d3g: re(-a * a * a * c), one_minus_g2: re(c * c) }
        }
        GMapKind::J2Tanh | GMapKind::J2Coth | GMapKind::J2Icot | GMapKind::J2Itan => {
            // g′ = k(1−g²), g″ = −2k²g(1−g²), g‴ = −2k³(1−g²)(1−3g²)
            let (g, k) = match map.kind {
                GMapKind::J2Tanh => (re(x.tanh()), re(a)),
                GMapKind::J2Coth => (re(1.0 / x.tanh()), re(a)),
                GMapKind::J2Icot => (I * (-1.0 / x.tan()), I * a),
                _ => (I * (-x.tan()), I * (-a)),
            };
            // 1 − g² evaluated without cancellation near |g| = 1.
            let q = match map.kind {
                GMapKind::J2Tanh => re(1.0 / x.cosh().powi(2)),
                GMapKind::J2Coth => re(-1.0 / x.sinh().powi(2)),
                GMapKind::J2Icot => re(1.0 / x.sin().powi(2)),
                _ => re(1.0 / x.cos().powi(2)),
            };
            let k2 = k * k;
            GDerivs {
                g,
                dg: k * q,
                d2g: -2.0 * k2 * g * q,
                d3g: -2.0 * k2 * k * q * (1.0 - 3.0 * g * g),
                one_minus_g2: q,
            }
        }
        GMapKind::HLinear => {
            let s = a.sqrt();
            plain(re(s * mu), re(s), re(0.0), re(0.0))
        }
        GMapKind::HSqrt => {
            let c = (4.0 * a / (2 * n + 1) as f64).sqrt();
            let r = mu.sqrt();
            plain(re(c * r), re(c / (2.0 * r)), re(-c / (4.0 * r * mu)), re(3.0 * c / (8.0 * r * mu * mu)))
        }
        GMapKind::LQuadratic => plain(re(a * mu * mu), re(2.0 * a * mu), re(2.0 * a), re(0.0)),
        GMapKind::LExp => {
            let g = (-x).exp();
            plain(re(g), re(-a * g), re(a * a * g), re(-a * a * a * g))
        }
        GMapKind::LLinear => {
            let w = map.linear_omega(n);
            plain(re(2.0 * w * mu), re(2.0 * w), re(0.0), re(0.0))
        }
    })
}

/// G(z) = z″/z − (3/2)(z′/z)².
pub fn big_g(z0: f64, z1: f64, z2: f64) -> Result<f64> {
    if z0 == 0.0 {
        return Err(PdmError::Singularity("G(z) is undefined where z = 0".into()));
    }
    let r = z1 / z0;
    Ok(z2 / z0 - 1.5 * r * r)
}

/// Complex-valued G(z).
pub fn big_g_complex(z0: Complex, z1: Complex, z2: Complex) -> Result<Complex> {
    if z0.norm_sqr() == 0.0 {
        return Err(PdmError::Singularity("G(z) is undefined where z = 0".into()));
    }
    let r = z1 / z0;
    Ok(z2 / z0 - 1.5 * r * r)
}

/// Q(g), dQ/dg and R(g) of the special-function equation F″ + Q F′ + R F = 0.
///
/// `one_minus_g2` is 1 − g², supplied by the caller to avoid cancellation near |g| = 1.
pub fn basis_qr(basis: &Basis, n: usize, g: Complex, one_minus_g2: Complex) -> (Complex, Complex, Complex) {
    let nf = n as f64;
    match *basis {
        Basis::Jacobi { alpha, beta } => {
            let q = one_minus_g2;
            let s2 = alpha + beta + 2.0;
            let num = beta - alpha - s2 * g;
            let qq = num / q;
            let dq = (-(s2 * q) + 2.0 * g * num) / (q * q);
            let r = (nf * (nf + alpha + beta + 1.0)) / q;
            (qq, dq, r)
        }
        Basis::Hermite => (-2.0 * g, Complex::real(-2.0), Complex::real(2.0 * nf)),
        Basis::Laguerre { alpha } => {
            let a1 = alpha + 1.0;
            (Complex::real(a1) / g - 1.0, Complex::real(-a1) / (g * g), Complex::real(nf) / g)
        }
    }
}

/// x-space g′, g″, g‴ from μ-space derivatives and the mass.
pub fn x_derivs(d: &GDerivs, m: &mass::MassDerivs) -> (Complex, Complex, Complex) {
    let sm = m.m.sqrt();
    let mu1 = sm;
    let mu2 = 0.5 * m.l1 * sm;
    let mu3 = sm * (0.5 * m.l2 - 0.25 * m.l1 * m.l1);
    let gx = d.dg * mu1;
    let gxx = d.d2g * (mu1 * mu1) + d.dg * mu2;
    let gxxx = d.d3g * (mu1 * mu1 * mu1) + d.d2g * (3.0 * mu1 * mu2) + d.dg * mu3;
    (gx, gxx, gxxx)
}

/// Right-hand side of E − V(x) = (g′)²/(2m)[R − ½Q′ − ¼Q²] + (1/4m)[G(g′) − G(m)], all in x.
pub fn energy_relation_rhs(
    family: FamilyId,
    params: &FamilyParams,
    profile: &MassProfile,
    n: usize,
    x: f64,
) -> Result<f64> {
    let spec = families::level_spec(family, params, n)?;
    let mu = mass::mu_eval(profile, x)?;
    let d = g_derivs(&spec.map, mu, n)?;
    let m = mass::mass_eval(profile, x)?;
    let (gx, gxx, gxxx) = x_derivs(&d, &m);
    let (q, dq, r) = basis_qr(&spec.basis, n, d.g, d.one_minus_g2);
    let core = r - 0.5 * dq - 0.25 * q * q;
    let g_gp = big_g_complex(gx, gxx, gxxx)?;
    let g_m = m.l2 - 1.5 * m.l1 * m.l1;
    let v = gx * gx / (2.0 * m.m) * core + (g_gp - g_m) / (4.0 * m.m);
    if !v.is_finite() {
        return Err(PdmError::Singularity(format!("E − V is not finite at x = {x}")));
    }
    Ok(v.re)
}

/// f(x) = √(m/g′)·exp(½∫Q dg) in its closed per-family form (real and positive).
pub fn f_transform(
    family: FamilyId,
    params: &FamilyParams,
    profile: &MassProfile,
    n: usize,
    x: f64,
) -> Result<Complex> {
    let mu = mass::mu_eval(profile, x)?;
    let m = mass::mass_eval(profile, x)?.m;
    let lf = families::log_f_mu(family, params, n, mu)?;
    Ok(Complex::real((0.25 * m.ln() + lf).exp()))
}

/// f built literally as √(m/g′)·exp(½∫Q dg) with principal branches; differs from
/// [`f_transform`] by a constant factor on each branch-free interval.
pub fn f_general(family: FamilyId, params: &FamilyParams, profile: &MassProfile, n: usize, x: f64) -> Result<Complex> {
    let spec = families::level_spec(family, params, n)?;
    let mu = mass::mu_eval(profile, x)?;
    let md = mass::mass_eval(profile, x)?;
    let d = g_derivs(&spec.map, mu, n)?;
    let (gx, _, _) = x_derivs(&d, &md);
    let g = d.g;
    let one = Complex::real(1.0);
    let half_int_q = match spec.basis {
        Basis::Jacobi { alpha, beta } => (one - g).ln() * ((alpha + 1.0) * 0.5) + (one + g).ln() * ((beta + 1.0) * 0.5),
        Basis::Hermite => -0.5 * g * g,
        Basis::Laguerre { alpha } => g.ln() * (0.5 * (alpha + 1.0)) - 0.5 * g,
    };
    Ok((Complex::real(md.m) / gx).sqrt() * half_int_q.exp())
}
