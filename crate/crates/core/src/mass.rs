//! Mass profiles m(x), the auxiliary coordinate μ(x) = ∫√m dx and the mass-induced
//! potential V_m = (1/8m)[m″/m − (7/4)(m′/m)²].

use crate::error::{PdmError, Result};
use crate::quadrature;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MassKind {
    Constant,
    /// m = ((b + x²)/(1 + x²))²
    RationalSquare,
    /// m = exp(−b|x|)
    ExpAbs,
    /// m = 1/(b + x²)
    InverseQuadratic,
    /// m = 1 + tanh(bx)
    TanhShift,
    CustomTable,
}

impl MassKind {
    pub const ALL: [MassKind; 6] = [
        MassKind::Constant,
        MassKind::RationalSquare,
        MassKind::ExpAbs,
        MassKind::InverseQuadratic,
        MassKind::TanhShift,
        MassKind::CustomTable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MassKind::Constant => "constant",
            MassKind::RationalSquare => "rational_square",
            MassKind::ExpAbs => "exp_abs",
            MassKind::InverseQuadratic => "inverse_quadratic",
            MassKind::TanhShift => "tanh_shift",
            MassKind::CustomTable => "custom_table",
        }
    }
}

impl fmt::Display for MassKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MassKind {
    type Err = PdmError;
    fn from_str(s: &str) -> Result<Self> {
        MassKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| PdmError::InvalidParameter(format!("unknown mass kind '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MuConvention {
    /// The closed forms exactly as printed, including their integration constants.
    ClosedForm,
    /// The closed form shifted so that μ(0) = 0; continuous and strictly increasing.
    #[default]
    ContinuousZeroAtOrigin,
}

/// Mass with its first two derivatives at a point, plus the ratios m′/m and m″/m.
///
/// The ratios stay representable where m, m′ and m″ themselves under- or overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassDerivs {
    pub m: f64,
    pub dm: f64,
    pub d2m: f64,
    /// m′/m
    pub l1: f64,
    /// m″/m
    pub l2: f64,
}

impl MassDerivs {
    pub fn new(m: f64, dm: f64, d2m: f64) -> Self {
        MassDerivs { m, dm, d2m, l1: dm / m, l2: d2m / m }
    }
}

/// Tabulated mass with not-a-knot cubic spline interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct MassTable {
    x: Vec<f64>,
    m: Vec<f64>,
    /// Spline second derivatives at the knots.
    curv: Vec<f64>,
    /// μ at each knot, relative to the reference point.
    mu_knots: Vec<f64>,
    x_ref: f64,
}

impl MassTable {
    /// Needs at least four samples, strictly increasing x and m > 0.
    pub fn new(x: Vec<f64>, m: Vec<f64>) -> Result<Self> {
        if x.len() != m.len() {
            return Err(PdmError::InvalidProfile("x and m columns differ in length".into()));
        }
        if x.len() < 4 {
            return Err(PdmError::InvalidProfile("a mass table needs at least 4 rows".into()));
        }
        if x.iter().chain(&m).any(|v| !v.is_finite()) {
            return Err(PdmError::InvalidProfile("non-finite table entry".into()));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(PdmError::InvalidProfile("x column must be strictly increasing".into()));
        }
        if let Some(bad) = m.iter().find(|&&v| v <= 0.0) {
            return Err(PdmError::InvalidProfile(format!("nonpositive mass {bad} in table")));
        }
        let curv = not_a_knot_curvatures(&x, &m);
        let x_ref = 0f64.clamp(x[0], x[x.len() - 1]);
        let mut t = MassTable { x, m, curv, mu_knots: Vec::new(), x_ref };
        t.mu_knots = t.knot_mu()?;
        Ok(t)
    }

    /// Parses a `x,m` CSV table; the header line is required.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(text.as_bytes());
        let headers = rdr.headers().map_err(|e| PdmError::InvalidProfile(format!("mass table header: {e}")))?;
        if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "m" {
            return Err(PdmError::InvalidProfile("mass table header must be `x,m`".into()));
        }
        let (mut xs, mut ms) = (Vec::new(), Vec::new());
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| PdmError::InvalidProfile(format!("mass table row {}: {e}", i + 2)))?;
            let parse = |j: usize| -> Result<f64> {
                rec.get(j)
                    .and_then(|s| s.parse::<f64>().ok())
                    .ok_or_else(|| PdmError::InvalidProfile(format!("mass table row {}: bad number", i + 2)))
            };
            xs.push(parse(0)?);
            ms.push(parse(1)?);
        }
        MassTable::new(xs, ms)
    }

    pub fn x_range(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    fn segment(&self, x: f64) -> usize {
        let n = self.x.len();
        match self.x.partition_point(|&k| k <= x) {
            0 => 0,
            i if i >= n => n - 2,
            i => i - 1,
        }
    }

    /// Spline value; the end cubics extend past the table.
    fn value(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let (x0, x1) = (self.x[i], self.x[i + 1]);
        let h = x1 - x0;
        let (a, b) = ((x1 - x) / h, (x - x0) / h);
        a * self.m[i]
            + b * self.m[i + 1]
            + ((a * a * a - a) * self.curv[i] + (b * b * b - b) * self.curv[i + 1]) * h * h / 6.0
    }

    fn sqrt_m(&self, x: f64) -> f64 {
        self.value(x).max(0.0).sqrt()
    }

    fn knot_mu(&self) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.x.len()];
        for i in 1..self.x.len() {
            out[i] = out[i - 1] + quadrature::integrate(|t| self.sqrt_m(t), self.x[i - 1], self.x[i], 1e-12)?;
        }
        let shift = self.mu_from_knots(&out, self.x_ref)?;
        out.iter_mut().for_each(|v| *v -= shift);
        Ok(out)
    }

    fn mu_from_knots(&self, knots: &[f64], x: f64) -> Result<f64> {
        let i = self.segment(x);
        Ok(knots[i] + quadrature::integrate(|t| self.sqrt_m(t), self.x[i], x, 1e-11)?)
    }

    fn mu(&self, x: f64) -> Result<f64> {
        self.mu_from_knots(&self.mu_knots, x)
    }
}

/// Not-a-knot end conditions; reduces to a tridiagonal system in the interior curvatures.
fn not_a_knot_curvatures(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let k = n - 2;
    let mut lower = vec![0.0; k];
    let mut diag = vec![0.0; k];
    let mut upper = vec![0.0; k];
    let mut rhs = vec![0.0; k];
    for j in 0..k {
        let i = j + 1;
        lower[j] = h[i - 1];
        diag[j] = 2.0 * (h[i - 1] + h[i]);
        upper[j] = h[i];
        rhs[j] = 6.0 * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1]);
    }
    // M0 = ((h0 + h1) M1 − h0 M2)/h1
    diag[0] = (h[0] + h[1]) * (h[0] + 2.0 * h[1]) / h[1];
    upper[0] = (h[1] * h[1] - h[0] * h[0]) / h[1];
    lower[0] = 0.0;
    // M_{n−1} = ((h_{n−2} + h_{n−3}) M_{n−2} − h_{n−2} M_{n−3})/h_{n−3}
    let (hp, hl) = (h[n - 3], h[n - 2]);
    diag[k - 1] = (hp + hl) * (2.0 * hp + hl) / hp;
    lower[k - 1] = (hp * hp - hl * hl) / hp;
    upper[k - 1] = 0.0;
    for j in 1..k {
        let w = lower[j] / diag[j - 1];
        diag[j] -= w * upper[j - 1];
        rhs[j] -= w * rhs[j - 1];
    }
    let mut mid = vec![0.0; k];
    mid[k - 1] = rhs[k - 1] / diag[k - 1];
    for j in (0..k - 1).rev() {
        mid[j] = (rhs[j] - upper[j] * mid[j + 1]) / diag[j];
    }
    let mut curv = vec![0.0; n];
    curv[1..n - 1].copy_from_slice(&mid);
    curv[0] = ((h[0] + h[1]) * curv[1] - h[0] * curv[2]) / h[1];
    curv[n - 1] = ((hl + hp) * curv[n - 2] - hl * curv[n - 3]) / hp;
    curv
}

/// A mass profile. Built-in kinds are parameterised by `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct MassProfile {
    kind: MassKind,
    b: f64,
    convention: MuConvention,
    table: Option<Arc<MassTable>>,
}

impl MassProfile {
    pub fn constant() -> Self {
        MassProfile { kind: MassKind::Constant, b: 0.0, convention: MuConvention::default(), table: None }
    }

    /// A built-in profile. Enforces m > 0: b > 0 for rational_square and inverse_quadratic,
    /// b ≥ 0 for exp_abs.
    pub fn new(kind: MassKind, b: f64) -> Result<Self> {
        if !b.is_finite() {
            return Err(PdmError::InvalidParameter("b must be finite".into()));
        }
        match kind {
            MassKind::CustomTable => {
                return Err(PdmError::InvalidParameter("custom_table profiles need a table".into()))
            }
            MassKind::RationalSquare | MassKind::InverseQuadratic if b <= 0.0 => {
                return Err(PdmError::InvalidParameter(format!("{kind} requires b > 0, got {b}")))
            }
            MassKind::ExpAbs if b < 0.0 => {
                return Err(PdmError::InvalidParameter(format!("exp_abs requires b >= 0, got {b}")))
            }
            _ => {}
        }
        let b = if kind == MassKind::Constant { 0.0 } else { b };
        Ok(MassProfile { kind, b, convention: MuConvention::default(), table: None })
    }

    pub fn custom(table: MassTable) -> Self {
        MassProfile {
            kind: MassKind::CustomTable,
            b: 0.0,
            convention: MuConvention::default(),
            table: Some(Arc::new(table)),
        }
    }

    pub fn with_convention(mut self, convention: MuConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn kind(&self) -> MassKind {
        self.kind
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn convention(&self) -> MuConvention {
        self.convention
    }

    pub fn table(&self) -> Option<&MassTable> {
        self.table.as_deref()
    }

    /// True when m is identically 1 (constant kind, or a built-in that degenerates to it).
    pub fn is_unit(&self) -> bool {
        match self.kind {
            MassKind::Constant => true,
            MassKind::RationalSquare => self.b == 1.0,
            MassKind::ExpAbs | MassKind::TanhShift => self.b == 0.0,
            MassKind::InverseQuadratic | MassKind::CustomTable => false,
        }
    }

    /// Closed interval for tables, the whole line otherwise.
    pub fn x_domain(&self) -> (f64, f64) {
        match &self.table {
            Some(t) => t.x_range(),
            None => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Image of μ over the domain under the continuous convention.
    pub fn mu_image(&self) -> (f64, f64) {
        let b = self.b;
        match self.kind {
            MassKind::ExpAbs if b > 0.0 => (-2.0 / b, 2.0 / b),
            MassKind::TanhShift if b != 0.0 => {
                let mu0 = tanh_mu0(b.abs());
                if b > 0.0 {
                    (-mu0, f64::INFINITY)
                } else {
                    (f64::NEG_INFINITY, mu0)
                }
            }
            MassKind::CustomTable => {
                let t = self.table.as_ref().expect("custom profile carries a table");
                (t.mu_knots[0], t.mu_knots[t.mu_knots.len() - 1])
            }
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        let (lo, hi) = self.x_domain();
        if x.is_nan() || x < lo || x > hi || !x.is_finite() {
            return Err(PdmError::Domain { x, lo, hi });
        }
        Ok(())
    }

    /// Short human-readable identifier, e.g. `inverse_quadratic(b=2)`.
    pub fn label(&self) -> String {
        match self.kind {
            MassKind::Constant => "constant".into(),
            MassKind::CustomTable => {
                let (lo, hi) = self.x_domain();
                format!("custom_table[{lo},{hi}]")
            }
            k => format!("{k}(b={})", self.b),
        }
    }
}

/// μ(0) of the printed tanh_shift primitive for b > 0.
fn tanh_mu0(b: f64) -> f64 {
    std::f64::consts::SQRT_2 / b * std::f64::consts::FRAC_1_SQRT_2.atanh()
}

/// ln(1 + e^t) without overflow.
fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

/// artanh(1/√(1 + e^{−t})), stable for all t.
fn artanh_logistic_sqrt(t: f64) -> f64 {
    // artanh y = ½ ln((1+y)/(1−y)) = ln(1+y) − ½ ln(1−y²), with 1 − y² = 1/(1 + e^t).
    let y = (-0.5 * softplus(-t)).exp();
    y.ln_1p() + 0.5 * softplus(t)
}

/// m, m′, m″ at x.
pub fn mass_eval(p: &MassProfile, x: f64) -> Result<MassDerivs> {
    p.check_domain(x)?;
    let b = p.b;
    let d = match p.kind {
        MassKind::Constant => MassDerivs::new(1.0, 0.0, 0.0),
        MassKind::RationalSquare => {
            let q = 1.0 + x * x;
            let r = 1.0 + (b - 1.0) / q;
            let r1 = -2.0 * (b - 1.0) * x / (q * q);
            let r2 = (b - 1.0) * (6.0 * x * x - 2.0) / (q * q * q);
            MassDerivs::new(r * r, 2.0 * r * r1, 2.0 * r1 * r1 + 2.0 * r * r2)
        }
        MassKind::ExpAbs => {
            let m = (-b * x.abs()).exp();
            // m′(0) := 0 by symmetry.
            let dm = if x == 0.0 { 0.0 } else { -b * x.signum() * m };
            MassDerivs::new(m, dm, b * b * m)
        }
        MassKind::InverseQuadratic => {
            // Written through m so that no power of b + x² overflows.
            let m = 1.0 / (b + x * x);
            let (l1, l2) = (-2.0 * x * m, (6.0 * x * x - 2.0 * b) * m * m);
            MassDerivs { m, dm: l1 * m, d2m: l2 * m, l1, l2 }
        }
        MassKind::TanhShift => {
            let t = b * x;
            let m = 2.0 / (1.0 + (-2.0 * t).exp());
            let sech2 = m * (2.0 / (1.0 + (2.0 * t).exp()));
            MassDerivs::new(m, b * sech2, -2.0 * b * b * sech2 * t.tanh())
        }
        MassKind::CustomTable => {
            let t = p.table.as_ref().expect("custom profile carries a table");
            let m = t.value(x);
            let h = 1e-5f64.max(1e-5 * x.abs());
            let (fm2, fm1, fp1, fp2) = (t.value(x - 2.0 * h), t.value(x - h), t.value(x + h), t.value(x + 2.0 * h));
            let dm = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
            let d2m = (-fm2 + 16.0 * fm1 - 30.0 * m + 16.0 * fp1 - fp2) / (12.0 * h * h);
            MassDerivs::new(m, dm, d2m)
        }
    };
    if !(d.m > 0.0) || !d.m.is_finite() {
        return Err(PdmError::InvalidProfile(format!("mass {} at x = {x} is not positive", d.m)));
    }
    Ok(d)
}

/// μ(x) under the profile's convention.
pub fn mu_eval(p: &MassProfile, x: f64) -> Result<f64> {
    p.check_domain(x)?;
    let b = p.b;
    let closed = p.convention == MuConvention::ClosedForm;
    Ok(match p.kind {
        MassKind::Constant => x,
        MassKind::RationalSquare => x + (b - 1.0) * x.atan(),
        MassKind::ExpAbs if b == 0.0 => x,
        MassKind::ExpAbs => {
            let e = (-0.5 * b * x.abs()).exp();
            if closed {
                if x >= 0.0 {
                    -2.0 / b * e
                } else {
                    2.0 / b * e
                }
            } else {
                if x == 0.0 {
                    0.0
                } else {
                    x.signum() * (2.0 / b) * -(-0.5 * b * x.abs()).exp_m1()
                }
            }
        }
        MassKind::InverseQuadratic => {
            let sb = b.sqrt();
            let base = (x / sb).asinh();
            if closed {
                base + 0.5 * b.ln()
            } else {
                base
            }
        }
        MassKind::TanhShift if b == 0.0 => x,
        MassKind::TanhShift => {
            let raw = std::f64::consts::SQRT_2 / b * artanh_logistic_sqrt(2.0 * b * x);
            if closed {
                raw
            } else {
                raw - std::f64::consts::SQRT_2 / b * std::f64::consts::FRAC_1_SQRT_2.atanh()
            }
        }
        MassKind::CustomTable => p.table.as_ref().expect("custom profile carries a table").mu(x)?,
    })
}

/// Inverse of μ under the continuous convention, by bisection.
pub fn mu_invert(p: &MassProfile, u: f64) -> Result<f64> {
    let same_in_both = p.is_unit() || matches!(p.kind, MassKind::RationalSquare | MassKind::CustomTable);
    if p.convention == MuConvention::ClosedForm && !same_in_both {
        return Err(PdmError::NotApplicable("mu_invert requires the continuous_zero_at_origin convention".into()));
    }
    let (ulo, uhi) = p.mu_image();
    if !u.is_finite() || u <= ulo && ulo.is_finite() || u >= uhi && uhi.is_finite() {
        let (xlo, xhi) = p.x_domain();
        let at_edge = (p.kind == MassKind::CustomTable) && (u == ulo || u == uhi);
        if at_edge {
            return Ok(if u == ulo { xlo } else { xhi });
        }
        return Err(PdmError::Range { u, lo: ulo, hi: uhi });
    }
    let f = |x: f64| mu_eval(p, x);
    let (dlo, dhi) = p.x_domain();
    let (mut lo, mut hi) = if dlo.is_finite() {
        (dlo, dhi)
    } else {
        let mut lo = -1.0f64.max(u.abs());
        let mut hi = 1.0f64.max(u.abs());
        while f(lo)? > u {
            lo *= 2.0;
            if !lo.is_finite() {
                return Err(PdmError::Range { u, lo: ulo, hi: uhi });
            }
        }
        while f(hi)? < u {
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(PdmError::Range { u, lo: ulo, hi: uhi });
            }
        }
        (lo, hi)
    };
    let tol = 1e-12 * (1.0 + u.abs());
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid)?;
        if v < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (vl, vh) = (f(lo)?, f(hi)?);
    let mut x = if (vl - u).abs() <= (vh - u).abs() { lo } else { hi };
    let mut err = (f(x)? - u).abs();
    // Newton polish with μ′ = √m, kept only while it improves the residual.
    for _ in 0..3 {
        if err == 0.0 {
            break;
        }
        let step = (f(x)? - u) / mass_eval(p, x)?.m.sqrt();
        let cand = (x - step).clamp(dlo, dhi);
        let e = (f(cand)? - u).abs();
        if e >= err {
            break;
        }
        x = cand;
        err = e;
    }
    if err > tol {
        return Err(PdmError::Numeric(format!("mu_invert({u}) only reached |Δμ| = {err:e}")));
    }
    Ok(x)
}

/// V_m from the mass derivatives.
pub fn vm_eval(p: &MassProfile, x: f64) -> Result<f64> {
    let mut d = mass_eval(p, x)?;
    if p.kind == MassKind::ExpAbs && x == 0.0 {
        // One-sided limit: (m′)² = b²m² on both sides of the kink.
        d.dm = p.b * d.m;
        d.l1 = p.b;
    }
    Ok(vm_from_derivs(d))
}

pub fn vm_from_derivs(d: MassDerivs) -> f64 {
    (d.l2 - 1.75 * d.l1 * d.l1) / (8.0 * d.m)
}

/// Printed closed form of V_m for the four parameterised kinds.
pub fn vm_closed_eval(p: &MassProfile, x: f64) -> Result<f64> {
    p.check_domain(x)?;
    let b = p.b;
    match p.kind {
        MassKind::RationalSquare => {
            let x2 = x * x;
            let q = b + x2;
            Ok((b - 1.0) * (3.0 * x2 * x2 + 2.0 * (2.0 - b) * x2 - b) / (2.0 * q.powi(4)))
        }
        MassKind::ExpAbs => Ok(-3.0 / 32.0 * b * b * (b * x.abs()).exp()),
        MassKind::InverseQuadratic => Ok(-(2.0 * b + x * x) / (8.0 * (b + x * x))),
        MassKind::TanhShift => {
            // sech(bx)(7 cosh bx + sinh bx)(cosh 2bx − sinh 2bx) = (7 + tanh bx) e^{−2bx}
            let t = b * x;
            Ok(-b * b / 32.0 * (7.0 + t.tanh()) * (-2.0 * t).exp())
        }
        k => Err(PdmError::NotApplicable(format!("no closed-form V_m for {k}"))),
    }
}

/// Stationary points of V_m for the rational_square mass, ascending.
pub fn vm_stationary_points(b: f64) -> Result<Vec<f64>> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(PdmError::InvalidParameter(format!("stationary points need b > 0, got {b}")));
    }
    if b == 1.0 {
        return Err(PdmError::Degenerate("V_m vanishes identically at b = 1".into()));
    }
    let disc = ((2.0 * b * b - 2.0 * b + 3.0) / 3.0).sqrt();
    let mut pos = vec![(b - 1.0 + disc).sqrt()];
    let minus = b - 1.0 - disc;
    if minus > 0.0 {
        pos.push(minus.sqrt());
    }
    pos.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = pos.iter().rev().map(|r| -r).collect();
    out.push(0.0);
    out.extend(pos);
    out.dedup();
    Ok(out)
}
