//! The thirteen solvable families: potentials, spectra and normalized eigenfunctions for an
//! arbitrary mass profile.
//!
//! Every family is a constant-mass problem in the coordinate u = μ(x). If φ_n(u) solves it,
//! ψ_n(x) = m(x)^{1/4} φ_n(μ(x)) solves the position-dependent-mass problem with the same
//! energy, and ∫|ψ_n|² dx = ∫|φ_n|² du.
//!
//! | id | g(μ) | F | polynomial parameters |
//! |----|------|---|-----------------------|
//! | J1_SCARF2 | i sinh aμ | Jacobi | α = −s−½+iλ, β = −s−½−iλ |
//! | J1_GPT | cosh aμ | Jacobi | α = −s−½+λ, β = −s−½−λ |
//! | J1_TRIG_CSC | cos aμ | Jacobi | α = s−½−λ, β = s−½+λ |
//! | J1_TRIG_SEC | sin aμ | Jacobi | α = s−½−λ, β = s−½+λ |
//! | J2_ROSEN_MORSE | tanh aμ | Jacobi | α = s−n−ā, β = s−n+ā, ā = λ/(s−n) |
//! | J2_ECKART | coth aμ | Jacobi | α = −s−n+ā, β = −s−n−ā, ā = λ/(s+n) |
//! | J2_COT | −i cot aμ | Jacobi | α = s−n+iā, β = s−n−iā, ā = λ/(s−n) |
//! | J2_TAN | −i tan aμ | Jacobi | α = s−n+iā, β = s−n−iā, ā = λ/(s−n) |
//! | H_OSC | √ω μ | Hermite | |
//! | H_SQRT | √(4ω/(2n+1)) √μ | Hermite | |
//! | L_RADIAL_OSC | ω μ² | Laguerre | α = l+½ |
//! | L_MORSE | e^{−aμ} | Laguerre | α = 2s−2n |
//! | L_COULOMB | 2aμ/(n+l+1) | Laguerre | α = 2l+1 |
//!
//! Closed forms of ln f − ¼ ln m (constants dropped), with X = aμ:
//!
//! | id | ln f − ¼ ln m |
//! |----|---------------|
//! | J1_SCARF2 | −s ln cosh X + λ atan(sinh X) |
//! | J1_GPT | (λ−s) ln sinh(X/2) − (λ+s) ln cosh(X/2) |
//! | J1_TRIG_CSC | (s−λ) ln sin(X/2) + (s+λ) ln cos(X/2) |
//! | J1_TRIG_SEC | (s−λ) ln sin y + (s+λ) ln cos y, y = π/4 − X/2 |
//! | J2_ROSEN_MORSE | −(s−n) ln cosh X + āX |
//! | J2_ECKART | (s+n) ln sinh X − āX |
//! | J2_COT | (n−s) ln sin X + āX |
//! | J2_TAN | (n−s) ln cos X − āX |
//! | H_OSC | −g²/2 |
//! | H_SQRT | ¼ ln μ − g²/2 |
//! | L_RADIAL_OSC | (l+1) ln μ − ωμ²/2 |
//! | L_MORSE | −(s−n)aμ − ½e^{−aμ} |
//! | L_COULOMB | (l+1) ln μ − aμ/(n+l+1) |

use crate::complex::Complex;
use crate::error::{PdmError, Result};
use crate::mass::{self, MassProfile};
use crate::polynomials::{self, MAX_DEGREE};
use crate::quadrature;
use crate::transform::{self, GMap, GMapKind};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[allow(non_camel_case_types)]
pub enum FamilyId {
    J1_SCARF2,
    J1_GPT,
    J1_TRIG_CSC,
    J1_TRIG_SEC,
    J2_ROSEN_MORSE,
    J2_ECKART,
    J2_COT,
    J2_TAN,
    H_OSC,
    H_SQRT,
    L_RADIAL_OSC,
    L_MORSE,
    L_COULOMB,
}

impl FamilyId {
    pub const ALL: [FamilyId; 13] = [
        FamilyId::J1_SCARF2,
        FamilyId::J1_GPT,
        FamilyId::J1_TRIG_CSC,
        FamilyId::J1_TRIG_SEC,
        FamilyId::J2_ROSEN_MORSE,
        FamilyId::J2_ECKART,
        FamilyId::J2_COT,
        FamilyId::J2_TAN,
        FamilyId::H_OSC,
        FamilyId::H_SQRT,
        FamilyId::L_RADIAL_OSC,
        FamilyId::L_MORSE,
        FamilyId::L_COULOMB,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyId::J1_SCARF2 => "J1_SCARF2",
            FamilyId::J1_GPT => "J1_GPT",
            FamilyId::J1_TRIG_CSC => "J1_TRIG_CSC",
            FamilyId::J1_TRIG_SEC => "J1_TRIG_SEC",
            FamilyId::J2_ROSEN_MORSE => "J2_ROSEN_MORSE",
            FamilyId::J2_ECKART => "J2_ECKART",
            FamilyId::J2_COT => "J2_COT",
            FamilyId::J2_TAN => "J2_TAN",
            FamilyId::H_OSC => "H_OSC",
            FamilyId::H_SQRT => "H_SQRT",
            FamilyId::L_RADIAL_OSC => "L_RADIAL_OSC",
            FamilyId::L_MORSE => "L_MORSE",
            FamilyId::L_COULOMB => "L_COULOMB",
        }
    }

    pub fn map_kind(self) -> GMapKind {
        match self {
            FamilyId::J1_SCARF2 => GMapKind::J1Isinh,
            FamilyId::J1_GPT => GMapKind::J1Cosh,
            FamilyId::J1_TRIG_CSC => GMapKind::J1Cos,
            FamilyId::J1_TRIG_SEC => GMapKind::J1Sin,
            FamilyId::J2_ROSEN_MORSE => GMapKind::J2Tanh,
            FamilyId::J2_ECKART => GMapKind::J2Coth,
            FamilyId::J2_COT => GMapKind::J2Icot,
            FamilyId::J2_TAN => GMapKind::J2Itan,
            FamilyId::H_OSC => GMapKind::HLinear,
            FamilyId::H_SQRT => GMapKind::HSqrt,
            FamilyId::L_RADIAL_OSC => GMapKind::LQuadratic,
            FamilyId::L_MORSE => GMapKind::LExp,
            FamilyId::L_COULOMB => GMapKind::LLinear,
        }
    }

    /// Parameters the family reads.
    pub fn parameter_names(self) -> &'static [&'static str] {
        match self {
            FamilyId::H_OSC | FamilyId::H_SQRT => &["omega"],
            FamilyId::L_RADIAL_OSC => &["omega", "l"],
            FamilyId::L_MORSE => &["s", "a"],
            FamilyId::L_COULOMB => &["a", "l", "charge"],
            _ => &["s", "lambda", "a"],
        }
    }

    /// Whether the eigenfunction is assembled from complex intermediates.
    pub fn is_complex(self) -> bool {
        matches!(self, FamilyId::J1_SCARF2 | FamilyId::J2_COT | FamilyId::J2_TAN)
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyId {
    type Err = PdmError;
    fn from_str(s: &str) -> Result<Self> {
        let up = s.trim().to_ascii_uppercase();
        FamilyId::ALL
            .into_iter()
            .find(|f| f.name() == up)
            .ok_or_else(|| PdmError::InvalidParameter(format!("unknown family '{s}'")))
    }
}

/// Shared family parameters; each family reads only its own subset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyParams {
    pub s: f64,
    pub lambda: f64,
    pub a: f64,
    pub omega: f64,
    pub l: f64,
    /// Coulomb strength; falls back to `a` when absent.
    pub coulomb_charge: Option<f64>,
}

impl Default for FamilyParams {
    fn default() -> Self {
        FamilyParams { s: 0.0, lambda: 0.0, a: 1.0, omega: 1.0, l: 0.0, coulomb_charge: None }
    }
}

impl FamilyParams {
    pub fn with_s(mut self, s: f64) -> Self {
        self.s = s;
        self
    }
    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }
    pub fn with_a(mut self, a: f64) -> Self {
        self.a = a;
        self
    }
    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }
    pub fn with_l(mut self, l: f64) -> Self {
        self.l = l;
        self
    }
    pub fn with_charge(mut self, z: f64) -> Self {
        self.coulomb_charge = Some(z);
        self
    }

    fn coulomb_strength(&self) -> f64 {
        self.coulomb_charge.unwrap_or(self.a)
    }
}

/// Highest normalizable level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundLevels {
    Finite(usize),
    Unbounded,
}

impl BoundLevels {
    pub fn contains(self, n: usize) -> bool {
        match self {
            BoundLevels::Finite(m) => n <= m,
            BoundLevels::Unbounded => n <= MAX_DEGREE,
        }
    }

    /// Highest level, capped at the polynomial degree limit.
    pub fn max_level(self) -> usize {
        match self {
            BoundLevels::Finite(m) => m,
            BoundLevels::Unbounded => MAX_DEGREE,
        }
    }
}

/// The special-function basis F of a level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Basis {
    Jacobi { alpha: Complex, beta: Complex },
    Hermite,
    Laguerre { alpha: f64 },
}

/// Map and basis for one level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelSpec {
    pub map: GMap,
    pub basis: Basis,
}

fn abar_minus(p: &FamilyParams, n: usize) -> Result<f64> {
    let d = p.s - n as f64;
    if d == 0.0 {
        return Err(PdmError::Degenerate(format!("s − n vanishes at n = {n}")));
    }
    Ok(p.lambda / d)
}

fn abar_plus(p: &FamilyParams, n: usize) -> Result<f64> {
    let d = p.s + n as f64;
    if d == 0.0 {
        return Err(PdmError::Degenerate(format!("s + n vanishes at n = {n}")));
    }
    Ok(p.lambda / d)
}

/// g-map and polynomial parameters of level n.
pub fn level_spec(family: FamilyId, p: &FamilyParams, n: usize) -> Result<LevelSpec> {
    let c = Complex::new;
    let nf = n as f64;
    let kind = family.map_kind();
    let (scale, basis) = match family {
        FamilyId::J1_SCARF2 => (p.a, Basis::Jacobi { alpha: c(-p.s - 0.5, p.lambda), beta: c(-p.s - 0.5, -p.lambda) }),
        FamilyId::J1_GPT => {
            (p.a, Basis::Jacobi { alpha: c(-p.s - 0.5 + p.lambda, 0.0), beta: c(-p.s - 0.5 - p.lambda, 0.0) })
        }
        FamilyId::J1_TRIG_CSC | FamilyId::J1_TRIG_SEC => {
            (p.a, Basis::Jacobi { alpha: c(p.s - 0.5 - p.lambda, 0.0), beta: c(p.s - 0.5 + p.lambda, 0.0) })
        }
        FamilyId::J2_ROSEN_MORSE => {
            let ab = abar_minus(p, n)?;
            (p.a, Basis::Jacobi { alpha: c(p.s - nf - ab, 0.0), beta: c(p.s - nf + ab, 0.0) })
        }
        FamilyId::J2_ECKART => {
            let ab = abar_plus(p, n)?;
            (p.a, Basis::Jacobi { alpha: c(-p.s - nf + ab, 0.0), beta: c(-p.s - nf - ab, 0.0) })
        }
        FamilyId::J2_COT | FamilyId::J2_TAN => {
            let ab = abar_minus(p, n)?;
            (p.a, Basis::Jacobi { alpha: c(p.s - nf, ab), beta: c(p.s - nf, -ab) })
        }
        FamilyId::H_OSC | FamilyId::H_SQRT => (p.omega, Basis::Hermite),
        FamilyId::L_RADIAL_OSC => (p.omega, Basis::Laguerre { alpha: p.l + 0.5 }),
        FamilyId::L_MORSE => (p.a, Basis::Laguerre { alpha: 2.0 * p.s - 2.0 * nf }),
        FamilyId::L_COULOMB => (p.coulomb_strength(), Basis::Laguerre { alpha: 2.0 * p.l + 1.0 }),
    };
    let mut map = GMap::new(kind, scale);
    if family == FamilyId::L_COULOMB {
        map = map.with_l(p.l);
    }
    Ok(LevelSpec { map, basis })
}

/// Well-conditioned demonstration parameters with at least four bound levels.
pub fn reference_params(family: FamilyId) -> FamilyParams {
    let p = FamilyParams::default();
    match family {
        FamilyId::J1_SCARF2 => p.with_s(7.0).with_lambda(1.0).with_a(0.7),
        FamilyId::J1_GPT => p.with_s(5.0).with_lambda(12.0),
        FamilyId::J1_TRIG_CSC | FamilyId::J1_TRIG_SEC => p.with_s(3.0).with_lambda(1.0),
        FamilyId::J2_ROSEN_MORSE => p.with_s(7.0).with_lambda(1.0).with_a(0.7),
        FamilyId::J2_ECKART => p.with_s(5.0).with_lambda(80.0).with_a(0.15),
        FamilyId::J2_COT | FamilyId::J2_TAN => p.with_s(-3.0).with_lambda(1.0),
        FamilyId::H_OSC | FamilyId::H_SQRT => p,
        FamilyId::L_RADIAL_OSC => p.with_l(1.0),
        FamilyId::L_MORSE => p.with_s(7.0),
        FamilyId::L_COULOMB => p.with_l(1.0),
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(PdmError::InvalidParameter(format!("{name} must be finite")));
    }
    Ok(())
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(PdmError::InvalidParameter(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

/// Largest integer n ≥ 0 with n < bound.
fn below(bound: f64) -> Option<usize> {
    if !(bound > 0.0) {
        return None;
    }
    let c = bound.ceil() - 1.0;
    Some(c.min(MAX_DEGREE as f64) as usize)
}

fn none_bound(family: FamilyId, why: &str) -> PdmError {
    PdmError::InvalidParameter(format!("{family}: no normalizable level ({why})"))
}

/// Highest normalizable level on the family's own μ-domain.
///
/// Regularity conditions: every boundary power of φ exceeds ½ at finite endpoints, so the
/// Dirichlet problem is the self-adjoint one the eigenfunctions belong to.
pub fn validate_params(family: FamilyId, p: &FamilyParams) -> Result<BoundLevels> {
    for (k, v) in [("s", p.s), ("lambda", p.lambda), ("a", p.a), ("omega", p.omega), ("l", p.l)] {
        finite(k, v)?;
    }
    let cap = |n: usize| BoundLevels::Finite(n.min(MAX_DEGREE));
    match family {
        FamilyId::J1_SCARF2 => {
            positive("a", p.a)?;
            below(p.s).map(cap).ok_or_else(|| none_bound(family, "requires s > 0"))
        }
        FamilyId::J1_GPT => {
            positive("a", p.a)?;
            if !(p.lambda - p.s > 0.5) {
                return Err(none_bound(family, "requires lambda − s > 1/2"));
            }
            below(p.s).map(cap).ok_or_else(|| none_bound(family, "requires s > 0"))
        }
        FamilyId::J1_TRIG_CSC | FamilyId::J1_TRIG_SEC => {
            positive("a", p.a)?;
            if !(p.s - p.lambda.abs() > 0.5) {
                return Err(none_bound(family, "requires s − |lambda| > 1/2"));
            }
            Ok(BoundLevels::Unbounded)
        }
        FamilyId::J2_ROSEN_MORSE => {
            positive("a", p.a)?;
            if !(p.s > 0.0) {
                return Err(none_bound(family, "requires s > 0"));
            }
            // Largest n < s with (s − n)² > |λ|.
            let top = p.s - p.lambda.abs().sqrt();
            below(top).map(cap).ok_or_else(|| none_bound(family, "requires (s − n)² > |lambda|"))
        }
        FamilyId::J2_ECKART => {
            positive("a", p.a)?;
            if !(p.s > 0.5) {
                return Err(none_bound(family, "requires s > 1/2"));
            }
            if !(p.lambda > 0.0) {
                return Err(none_bound(family, "requires lambda > 0"));
            }
            // Levels with (s + n)² < λ.
            let top = p.lambda.sqrt() - p.s;
            below(top).map(cap).ok_or_else(|| none_bound(family, "requires s² < lambda"))
        }
        FamilyId::J2_COT | FamilyId::J2_TAN => {
            positive("a", p.a)?;
            if !(p.s < -0.5) {
                return Err(none_bound(family, "requires s < −1/2"));
            }
            Ok(BoundLevels::Unbounded)
        }
        FamilyId::H_OSC | FamilyId::H_SQRT => {
            positive("omega", p.omega)?;
            Ok(BoundLevels::Unbounded)
        }
        FamilyId::L_RADIAL_OSC => {
            positive("omega", p.omega)?;
            if !(p.l > -0.5) {
                return Err(PdmError::InvalidParameter(format!("L_RADIAL_OSC requires l > −1/2, got {}", p.l)));
            }
            Ok(BoundLevels::Unbounded)
        }
        FamilyId::L_MORSE => {
            if p.a == 0.0 {
                return Err(PdmError::InvalidParameter("L_MORSE requires a ≠ 0".into()));
            }
            if p.s == 0.0 {
                return Err(PdmError::InvalidParameter("L_MORSE requires s ≠ 0".into()));
            }
            // α = 2s − 2n must avoid the negative integers; with n < s it is positive.
            below(p.s).map(cap).ok_or_else(|| none_bound(family, "requires s > 0"))
        }
        FamilyId::L_COULOMB => {
            positive("a", p.a)?;
            positive("charge", p.coulomb_strength())?;
            if !(p.l > -0.5) {
                return Err(PdmError::InvalidParameter(format!("L_COULOMB requires l > −1/2, got {}", p.l)));
            }
            Ok(BoundLevels::Unbounded)
        }
    }
}

/// Open μ-interval of the family.
pub fn mu_domain(family: FamilyId, p: &FamilyParams) -> (f64, f64) {
    match family {
        FamilyId::J1_SCARF2 | FamilyId::J2_ROSEN_MORSE | FamilyId::H_OSC | FamilyId::L_MORSE => {
            (f64::NEG_INFINITY, f64::INFINITY)
        }
        FamilyId::J1_GPT | FamilyId::J2_ECKART | FamilyId::H_SQRT | FamilyId::L_RADIAL_OSC | FamilyId::L_COULOMB => {
            (0.0, f64::INFINITY)
        }
        FamilyId::J1_TRIG_CSC | FamilyId::J2_COT => (0.0, PI / p.a),
        FamilyId::J1_TRIG_SEC | FamilyId::J2_TAN => (-FRAC_PI_2 / p.a, FRAC_PI_2 / p.a),
    }
}

fn check_level(family: FamilyId, p: &FamilyParams, n: usize) -> Result<()> {
    let levels = validate_params(family, p)?;
    if !levels.contains(n) {
        return Err(PdmError::Level {
            n,
            max: match levels {
                BoundLevels::Finite(m) => Some(m),
                BoundLevels::Unbounded => Some(MAX_DEGREE),
            },
        });
    }
    Ok(())
}

/// E_n; independent of the mass profile.
pub fn energy(family: FamilyId, p: &FamilyParams, n: usize) -> Result<f64> {
    check_level(family, p, n)?;
    let nf = n as f64;
    let (s, lam, a, w) = (p.s, p.lambda, p.a, p.omega);
    let a2 = a * a;
    Ok(match family {
        FamilyId::J1_SCARF2 | FamilyId::J1_GPT => 0.5 * s * s * a2 - 0.5 * a2 * (s - nf).powi(2),
        FamilyId::J1_TRIG_CSC | FamilyId::J1_TRIG_SEC => -0.5 * s * s * a2 + 0.5 * a2 * (s + nf).powi(2),
        FamilyId::J2_ROSEN_MORSE => {
            let d = s - nf;
            0.5 * a2 * ((s * s - d * d) + lam * lam * (1.0 / (s * s) - 1.0 / (d * d)))
        }
        FamilyId::J2_ECKART => {
            let d = s + nf;
            0.5 * a2 * ((s * s - d * d) + lam * lam * (1.0 / (s * s) - 1.0 / (d * d)))
        }
        FamilyId::J2_COT | FamilyId::J2_TAN => {
            let d = s - nf;
            0.5 * a2 * ((d * d - s * s) + lam * lam * (1.0 / (s * s) - 1.0 / (d * d)))
        }
        FamilyId::H_OSC => nf * w,
        FamilyId::H_SQRT => 2.0 * w * w - 2.0 * w * w / (2.0 * nf + 1.0).powi(2),
        FamilyId::L_RADIAL_OSC => 2.0 * nf * w,
        FamilyId::L_MORSE => 0.5 * a2 * s * s - 0.5 * a2 * (s - nf).powi(2),
        FamilyId::L_COULOMB => {
            let z = p.coulomb_strength();
            let l1 = p.l + 1.0;
            z * z / (2.0 * l1 * l1) - z * z / (2.0 * (nf + l1).powi(2))
        }
    })
}

fn singular(family: FamilyId, mu: f64) -> PdmError {
    PdmError::Singularity(format!("{family} potential is singular at mu = {mu}"))
}

/// The family potential as a function of μ, without V_m.
pub fn potential_mu(family: FamilyId, p: &FamilyParams, mu: f64) -> Result<f64> {
    let (lo, hi) = mu_domain(family, p);
    if mu == lo || mu == hi {
        return Err(singular(family, mu));
    }
    if !(mu > lo && mu < hi) {
        return Err(PdmError::Domain { x: mu, lo, hi });
    }
    let (s, lam, a, w, l) = (p.s, p.lambda, p.a, p.omega, p.l);
    let a2 = a * a;
    let x = a * mu;
    Ok(match family {
        FamilyId::J1_SCARF2 => {
            let sech = 1.0 / x.cosh();
            0.5 * s * s * a2 + 0.5 * a2 * (lam * lam - s * s - s) * sech * sech
                - 0.5 * a2 * lam * (2.0 * s + 1.0) * x.tanh() * sech
        }
        FamilyId::J1_GPT => {
            let csch = 1.0 / x.sinh();
            0.5 * s * s * a2 + 0.5 * a2 * (lam * lam + s * s + s) * csch * csch - a2 * lam * (s + 0.5) * csch / x.tanh()
        }
        FamilyId::J1_TRIG_CSC => {
            let (sn, cs) = x.sin_cos();
            let csc = 1.0 / sn;
            -0.5 * s * s * a2 + 0.5 * a2 * (lam * lam + s * s - s) * csc * csc
                - 0.5 * a2 * lam * (2.0 * s - 1.0) * cs * csc * csc
        }
        FamilyId::J1_TRIG_SEC => {
            let (sn, cs) = x.sin_cos();
            let sec = 1.0 / cs;
            -0.5 * s * s * a2 + 0.5 * a2 * (lam * lam + s * s - s) * sec * sec
                - 0.5 * lam * a2 * (2.0 * s - 1.0) * sec * sec * sn
        }
        FamilyId::J2_ROSEN_MORSE => {
            let sech = 1.0 / x.cosh();
            0.5 * s * s * a2 + lam * lam * a2 / (2.0 * s * s)
                - 0.5 * a2 * s * (s + 1.0) * sech * sech
                - lam * a2 * x.tanh()
        }
        FamilyId::J2_ECKART => {
            let csch = 1.0 / x.sinh();
            0.5 * a2 * s * s + lam * lam * a2 / (2.0 * s * s) + 0.5 * a2 * s * (s - 1.0) * csch * csch
                - lam * a2 / x.tanh()
        }
        FamilyId::J2_COT => {
            let csc = 1.0 / x.sin();
            -0.5 * a2 * s * s + lam * lam * a2 / (2.0 * s * s) + 0.5 * a2 * s * (s + 1.0) * csc * csc
                - lam * a2 / x.tan()
        }
        FamilyId::J2_TAN => {
            let sec = 1.0 / x.cos();
            -0.5 * a2 * s * s + lam * lam * a2 / (2.0 * s * s) + 0.5 * a2 * s * (s + 1.0) * sec * sec
                - lam * a2 * x.tan()
        }
        FamilyId::H_OSC => -0.5 * w + 0.5 * w * w * mu * mu,
        FamilyId::H_SQRT => 2.0 * w * w - 0.5 * w / mu - 3.0 / 32.0 / (mu * mu),
        FamilyId::L_RADIAL_OSC => -(l + 1.5) * w + 0.5 * w * w * mu * mu + 0.5 * l * (l + 1.0) / (mu * mu),
        FamilyId::L_MORSE => {
            let e = (-x).exp();
            0.5 * a2 * s * s + a2 / 8.0 * e * e - 0.25 * (2.0 * s + 1.0) * a2 * e
        }
        FamilyId::L_COULOMB => {
            let z = p.coulomb_strength();
            let l1 = l + 1.0;
            z * z / (2.0 * l1 * l1) - z / mu + l * (l + 1.0) / (2.0 * mu * mu)
        }
    })
}

/// V(x) = family potential at μ(x) plus V_m(x).
pub fn potential_eval(family: FamilyId, p: &FamilyParams, profile: &MassProfile, x: f64) -> Result<f64> {
    let mu = mass::mu_eval(profile, x)?;
    Ok(potential_mu(family, p, mu)? + mass::vm_eval(profile, x)?)
}

/// ln f − ¼ ln m in closed form (real; additive constants dropped).
pub fn log_f_mu(family: FamilyId, p: &FamilyParams, n: usize, mu: f64) -> Result<f64> {
    let (lo, hi) = mu_domain(family, p);
    if !(mu > lo && mu < hi) {
        return Err(PdmError::Domain { x: mu, lo, hi });
    }
    let nf = n as f64;
    let (s, lam, a) = (p.s, p.lambda, p.a);
    let x = a * mu;
    Ok(match family {
        FamilyId::J1_SCARF2 => -s * x.cosh().ln() + lam * x.sinh().atan(),
        FamilyId::J1_GPT => (lam - s) * (0.5 * x).sinh().ln() - (lam + s) * (0.5 * x).cosh().ln(),
        FamilyId::J1_TRIG_CSC => (s - lam) * (0.5 * x).sin().ln() + (s + lam) * (0.5 * x).cos().ln(),
        FamilyId::J1_TRIG_SEC => {
            let y = FRAC_PI_4 - 0.5 * x;
            (s - lam) * y.sin().ln() + (s + lam) * y.cos().ln()
        }
        FamilyId::J2_ROSEN_MORSE => -(s - nf) * ln_cosh(x) + abar_minus(p, n)? * x,
        FamilyId::J2_ECKART => (s + nf) * ln_sinh(x) - abar_plus(p, n)? * x,
        FamilyId::J2_COT => (nf - s) * x.sin().ln() + abar_minus(p, n)? * x,
        FamilyId::J2_TAN => (nf - s) * x.cos().ln() - abar_minus(p, n)? * x,
        FamilyId::H_OSC => -0.5 * p.omega * mu * mu,
        FamilyId::H_SQRT => 0.25 * mu.ln() - 2.0 * p.omega * mu / (2.0 * nf + 1.0),
        FamilyId::L_RADIAL_OSC => (p.l + 1.0) * mu.ln() - 0.5 * p.omega * mu * mu,
        FamilyId::L_MORSE => -(s - nf) * x - 0.5 * (-x).exp(),
        FamilyId::L_COULOMB => (p.l + 1.0) * mu.ln() - p.coulomb_strength() * mu / (nf + p.l + 1.0),
    })
}

/// ln cosh without overflow.
fn ln_cosh(x: f64) -> f64 {
    let ax = x.abs();
    ax + (-2.0 * ax).exp().ln_1p() - std::f64::consts::LN_2
}

/// ln sinh for x > 0 without overflow.
fn ln_sinh(x: f64) -> f64 {
    x + (-(-2.0 * x).exp_m1()).ln() - std::f64::consts::LN_2
}

/// Unnormalized complex φ_n(μ) = exp(ln f − ¼ ln m)·F(g(μ)).
pub fn phi_raw(family: FamilyId, p: &FamilyParams, spec: &LevelSpec, n: usize, mu: f64) -> Result<Complex> {
    let lf = log_f_mu(family, p, n, mu)?;
    let d = transform::g_derivs(&spec.map, mu, n)?;
    let poly = match spec.basis {
        Basis::Jacobi { alpha, beta } => polynomials::jacobi_eval(n, alpha, beta, d.g)?,
        Basis::Hermite => Complex::real(polynomials::hermite_eval(n, d.g.re)?),
        Basis::Laguerre { alpha } => Complex::real(polynomials::laguerre_eval(n, alpha, d.g.re)?),
    };
    Ok(poly * lf.exp())
}

/// Characteristic decay length in μ, used to size truncation scans.
fn scan_length(family: FamilyId, p: &FamilyParams, n: usize) -> f64 {
    match family {
        FamilyId::H_OSC | FamilyId::L_RADIAL_OSC => 1.0 / p.omega.sqrt(),
        FamilyId::H_SQRT => (2 * n + 1) as f64 / (2.0 * p.omega),
        FamilyId::L_COULOMB => (n as f64 + p.l + 1.0) / p.coulomb_strength(),
        _ => 1.0 / p.a.abs(),
    }
}

/// Relative amplitude below which an infinite tail is cut.
pub const TAIL_CUTOFF: f64 = 1e-12;

const SCAN_STEPS_MAX: usize = 2_000_000;

/// Samples past a candidate cut that must also lie below the cutoff.
const TAIL_CONFIRM: usize = 40;

/// Scans from `start` in direction `dir` until |φ| < cutoff·max; returns (cut point, running max).
fn scan_tail<F: Fn(f64) -> Result<f64>>(
    amp: &F,
    start: f64,
    step: f64,
    dir: f64,
    mut running: f64,
) -> Result<(f64, f64)> {
    let mut u = start;
    let mut prev = amp(u)?;
    running = running.max(prev);
    for _ in 0..SCAN_STEPS_MAX {
        let next = u + dir * step;
        let v = amp(next)?;
        running = running.max(v);
        if running > 0.0 && v < TAIL_CUTOFF * running && v <= prev {
            // A sample can land on a node; require the tail to stay below the cutoff.
            let confirmed = (1..=TAIL_CONFIRM)
                .map(|k| amp(next + dir * step * k as f64))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .all(|w| w < TAIL_CUTOFF * running);
            if confirmed {
                return Ok((next, running));
            }
        }
        prev = v;
        u = next;
    }
    Err(PdmError::Numeric(format!("eigenfunction tail does not decay within {SCAN_STEPS_MAX} steps")))
}

/// Phase-fixed, normalized eigenfunction of one level on a given mass profile.
#[derive(Debug, Clone)]
pub struct SpectralSolution {
    pub family: FamilyId,
    pub params: FamilyParams,
    pub profile: MassProfile,
    pub n: usize,
    pub energy: f64,
    /// 1/√∫|φ|² after phase rotation.
    pub norm: f64,
    spec: LevelSpec,
    /// Unit phase × sign applied to the raw φ.
    phase: Complex,
    /// Numeric μ-support: infinite tails cut at the relative amplitude `TAIL_CUTOFF`.
    mu_support: (f64, f64),
    /// max |Im ψ| / max |ψ| after the global phase rotation, before discarding Im.
    imag_ratio: f64,
    /// max |φ| over the phase samples, normalized.
    peak: f64,
}

/// Residual imaginary part tolerated before the phase-fixed value is declared inconsistent.
pub const IMAG_TOLERANCE: f64 = 1e-8;

const PHASE_SAMPLES: usize = 2001;

impl SpectralSolution {
    pub fn new(family: FamilyId, params: FamilyParams, profile: &MassProfile, n: usize) -> Result<Self> {
        let energy = energy(family, &params, n)?;
        let spec = level_spec(family, &params, n)?;
        let raw = |u: f64| phi_raw(family, &params, &spec, n, u);
        let amp = |u: f64| raw(u).map(|z| z.abs());
        let (lo, hi) = mu_domain(family, &params);
        let step = scan_length(family, &params, n) / 20.0;
        let support = match (lo.is_finite(), hi.is_finite()) {
            (true, true) => (lo, hi),
            (true, false) => {
                let (cut, _) = scan_tail(&amp, lo + step, step, 1.0, 0.0)?;
                (lo, cut)
            }
            (false, true) => {
                let (cut, _) = scan_tail(&amp, hi - step, step, -1.0, 0.0)?;
                (cut, hi)
            }
            (false, false) => {
                let (right, mx) = scan_tail(&amp, 0.0, step, 1.0, 0.0)?;
                let (left, mx2) = scan_tail(&amp, 0.0, step, -1.0, mx)?;
                // Re-scan right if the left side revealed a larger maximum.
                let right = if mx2 > mx { scan_tail(&amp, 0.0, step, 1.0, mx2)?.0 } else { right };
                (left, right)
            }
        };
        let (ulo, uhi) = support;
        // Sample open interval for phase and sign determination.
        let samples: Vec<(f64, Complex)> = (1..PHASE_SAMPLES)
            .map(|i| {
                let u = ulo + (uhi - ulo) * i as f64 / PHASE_SAMPLES as f64;
                raw(u).map(|z| (u, z))
            })
            .collect::<Result<_>>()?;
        let (_, zmax) =
            samples.iter().copied().max_by(|a, b| a.1.abs().total_cmp(&b.1.abs())).expect("nonempty sample");
        if !(zmax.abs() > 0.0) || !zmax.is_finite() {
            return Err(PdmError::Numeric(format!("{family} level {n}: eigenfunction vanishes or overflows")));
        }
        let rot = zmax.conj() / zmax.abs();
        let rotated: Vec<Complex> = samples.iter().map(|(_, z)| *z * rot).collect();
        let max_abs = rotated.iter().map(|z| z.abs()).fold(0.0, f64::max);
        let max_im = rotated.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        let imag_ratio = max_im / max_abs;
        if imag_ratio > IMAG_TOLERANCE {
            return Err(PdmError::InternalConsistency(format!(
                "{family} level {n}: residual imaginary part {imag_ratio:e} after phase fixing"
            )));
        }
        // Sign: first local extremum from the left is positive.
        let re: Vec<f64> = rotated.iter().map(|z| z.re).collect();
        let floor = 1e-6 * max_abs;
        let first_extremum = (1..re.len() - 1)
            .find(|&i| re[i].abs() > floor && re[i].abs() >= re[i - 1].abs() && re[i].abs() >= re[i + 1].abs())
            .map(|i| re[i])
            .unwrap_or(re[re.len() / 2]);
        let sign = if first_extremum < 0.0 { -1.0 } else { 1.0 };
        let phase = rot * sign;
        // Scale before integrating so the absolute tolerance is meaningful.
        let scale = 1.0 / max_abs;
        let integrand = |u: f64| -> f64 {
            match raw(u) {
                Ok(z) => (z * phase).re.powi(2) * scale * scale,
                Err(_) => f64::NAN,
            }
        };
        let (qa, qb) = inset(support);
        let breaks: Vec<f64> = (0..=16).map(|i| qa + (qb - qa) * i as f64 / 16.0).collect();
        let integral = quadrature::integrate_panels(integrand, &breaks, 1e-12)?;
        if !(integral > 0.0) {
            return Err(PdmError::Numeric(format!("{family} level {n}: zero norm")));
        }
        let norm = scale / integral.sqrt();
        Ok(SpectralSolution {
            family,
            params,
            profile: profile.clone(),
            n,
            energy,
            norm,
            spec,
            phase,
            mu_support: support,
            imag_ratio,
            peak: max_abs * norm,
        })
    }

    pub fn spec(&self) -> &LevelSpec {
        &self.spec
    }

    /// max |Im| / max |ψ| after the unit-phase rotation.
    pub fn imag_ratio(&self) -> f64 {
        self.imag_ratio
    }

    pub fn mu_support(&self) -> (f64, f64) {
        self.mu_support
    }

    /// Normalized complex φ(μ) after the phase rotation, before taking the real part.
    pub fn phi_complex(&self, mu: f64) -> Result<Complex> {
        Ok(phi_raw(self.family, &self.params, &self.spec, self.n, mu)? * self.phase * self.norm)
    }

    /// Normalized real φ(μ) of the constant-mass problem in u = μ.
    pub fn phi(&self, mu: f64) -> Result<f64> {
        let z = self.phi_complex(mu)?;
        if z.im.abs() > IMAG_TOLERANCE * self.peak {
            return Err(PdmError::InternalConsistency(format!(
                "{} level {}: imaginary part {:e} at mu = {mu}",
                self.family, self.n, z.im
            )));
        }
        Ok(z.re)
    }

    /// ψ_n(x) = m^{1/4} φ_n(μ(x)).
    pub fn eval(&self, x: f64) -> Result<f64> {
        let mu = mass::mu_eval(&self.profile, x)?;
        let (lo, hi) = mu_domain(self.family, &self.params);
        if mu == lo || mu == hi {
            return Ok(0.0);
        }
        let m = mass::mass_eval(&self.profile, x)?.m;
        Ok(m.powf(0.25) * self.phi(mu)?)
    }

    /// x-interval corresponding to the numeric μ-support, clipped to the mass's μ-image.
    pub fn x_support(&self) -> Result<(f64, f64)> {
        x_interval(&self.profile, self.mu_support)
    }
}

/// Pulls singular endpoints of a support inward by a relative hair for quadrature.
fn inset(s: (f64, f64)) -> (f64, f64) {
    let w = s.1 - s.0;
    (s.0 + 1e-14 * w, s.1 - 1e-14 * w)
}

/// Maps a μ-interval into x through the continuous μ, clipping to the mass's μ-image.
pub fn x_interval(profile: &MassProfile, (ulo, uhi): (f64, f64)) -> Result<(f64, f64)> {
    let (ilo, ihi) = profile.mu_image();
    let clip = |u: f64, edge: f64, inward: f64| -> f64 {
        if (inward > 0.0 && u <= edge) || (inward < 0.0 && u >= edge) {
            let w = if edge.is_finite() { 1e-9 * (1.0 + edge.abs()) } else { 0.0 };
            edge + inward * w
        } else {
            u
        }
    };
    let lo = clip(ulo, ilo, 1.0);
    let hi = clip(uhi, ihi, -1.0);
    if !(lo < hi) {
        return Err(PdmError::NotApplicable("mass μ-image does not meet the family μ-domain".into()));
    }
    Ok((mass::mu_invert(profile, lo)?, mass::mu_invert(profile, hi)?))
}

/// Level set restricted by the mass profile's μ-image.
///
/// When the image does not cover the family's μ-domain, a level is kept only if its
/// normalized |φ_n| at the image edge is at most 1e-8 of its maximum.
pub fn validate_with_profile(family: FamilyId, p: &FamilyParams, profile: &MassProfile) -> Result<BoundLevels> {
    let levels = validate_params(family, p)?;
    let (dlo, dhi) = mu_domain(family, p);
    let (ilo, ihi) = profile.mu_image();
    if ilo <= dlo && ihi >= dhi {
        return Ok(levels);
    }
    if ihi <= dlo || ilo >= dhi {
        return Err(PdmError::NotApplicable(format!("{} μ-image does not meet the {family} domain", profile.label())));
    }
    let mut top: Option<usize> = None;
    for n in 0..=levels.max_level() {
        let sol = SpectralSolution::new(family, *p, profile, n)?;
        let peak = (1..400)
            .map(|i| {
                let (a, b) = sol.mu_support;
                sol.phi(a + (b - a) * i as f64 / 400.0).map(f64::abs)
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        let mut ok = true;
        for edge in [ilo, ihi] {
            if edge > dlo && edge < dhi && sol.phi(edge)?.abs() > 1e-8 * peak {
                ok = false;
            }
        }
        if !ok {
            break;
        }
        top = Some(n);
    }
    top.map(BoundLevels::Finite)
        .ok_or_else(|| PdmError::NotApplicable(format!("{} leaves no bound {family} level", profile.label())))
}

/// ψ_n(x), real and normalized.
pub fn eigenfunction_eval(family: FamilyId, p: &FamilyParams, profile: &MassProfile, n: usize, x: f64) -> Result<f64> {
    SpectralSolution::new(family, *p, profile, n)?.eval(x)
}
