//! Finite-difference verification of analytic eigenpairs.
//!
//! H = −½ d/dx (1/m) d/dx + V is discretized in flux form on a uniform grid with Dirichlet
//! ends, giving a symmetric tridiagonal matrix. Its lowest eigenvalues come from Sturm-sequence
//! bisection and its eigenvectors from inverse iteration.

use crate::error::{PdmError, Result};
use crate::families::{self, FamilyId, FamilyParams, SpectralSolution};
use crate::mass::{self, MassProfile};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Uniform grid of `n` interior points; the Dirichlet ends are `x_lo` and `x_hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_lo: f64,
    pub x_hi: f64,
    pub n: usize,
}

pub const MIN_GRID_POINTS: usize = 16;

impl GridSpec {
    pub fn new(x_lo: f64, x_hi: f64, n: usize) -> Result<Self> {
        if !(x_lo.is_finite() && x_hi.is_finite() && x_lo < x_hi) {
            return Err(PdmError::InvalidInput(format!("grid needs finite x_lo < x_hi, got [{x_lo}, {x_hi}]")));
        }
        if n < MIN_GRID_POINTS {
            return Err(PdmError::InvalidInput(format!("grid needs at least {MIN_GRID_POINTS} points, got {n}")));
        }
        let g = GridSpec { x_lo, x_hi, n };
        if !(g.h() > 0.0) {
            return Err(PdmError::InvalidInput("grid spacing underflows".into()));
        }
        Ok(g)
    }

    pub fn h(&self) -> f64 {
        (self.x_hi - self.x_lo) / (self.n + 1) as f64
    }

    /// Interior point i, 0 ≤ i < n.
    pub fn point(&self, i: usize) -> f64 {
        self.x_lo + (i + 1) as f64 * self.h()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }

    /// Same interval at half the spacing.
    pub fn refined(&self) -> GridSpec {
        GridSpec { n: 2 * self.n + 1, ..*self }
    }
}

/// Symmetric tridiagonal matrix; the single off-diagonal array makes symmetry exact.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalOperator {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
    pub h: f64,
}

impl TridiagonalOperator {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s += self.offdiag[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.offdiag[i] * v[i + 1];
                }
                s
            })
            .collect()
    }

    /// Gershgorin interval containing the spectrum.
    fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.offdiag[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.offdiag[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    fn norm_inf(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs())
    }

    /// Number of eigenvalues strictly below `x` (Sturm count via the LDLᵀ pivots).
    fn count_below(&self, x: f64, off2: &[f64]) -> usize {
        let tiny = f64::MIN_POSITIVE.sqrt();
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..self.len() {
            d = self.diag[i] - x - if i > 0 { off2[i - 1] / d } else { 0.0 };
            if d == 0.0 {
                d = -tiny;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }
}

/// Flux-form discretization of −½ d/dx (1/m) d/dx + V with Dirichlet ends.
///
/// A potential that is singular or not finite at a grid point yields a grid-placement error.
pub fn discretize<F>(profile: &MassProfile, potential: F, grid: &GridSpec) -> Result<TridiagonalOperator>
where
    F: Fn(f64) -> Result<f64>,
{
    let n = grid.n;
    let h = grid.h();
    let inv_h2 = 1.0 / (h * h);
    // 1/m at the n + 1 midpoints x_lo + (j + ½)h.
    let inv_m: Vec<f64> = (0..=n)
        .map(|j| mass::mass_eval(profile, grid.x_lo + (j as f64 + 0.5) * h).map(|d| 1.0 / d.m))
        .collect::<Result<_>>()?;
    let mut diag = Vec::with_capacity(n);
    for i in 0..n {
        let x = grid.point(i);
        let v = match potential(x) {
            Ok(v) if v.is_finite() => v,
            Ok(v) => return Err(PdmError::GridPlacement(format!("V = {v} at grid point x = {x}"))),
            Err(PdmError::Singularity(msg)) => {
                return Err(PdmError::GridPlacement(format!(
                    "singular V at grid point x = {x} ({msg}); shift the grid by h/2"
                )))
            }
            Err(e) => return Err(e),
        };
        diag.push(0.5 * (inv_m[i] + inv_m[i + 1]) * inv_h2 + v);
    }
    let offdiag: Vec<f64> = (1..n).map(|j| -0.5 * inv_m[j] * inv_h2).collect();
    if diag.iter().chain(&offdiag).any(|v| !v.is_finite()) {
        return Err(PdmError::GridPlacement("operator entry is not finite".into()));
    }
    Ok(TridiagonalOperator { diag, offdiag, h })
}

/// One eigenvalue with its eigenvector normalized to h·Σv² = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub energy: f64,
    pub vector: Vec<f64>,
}

const BISECTION_TOL: f64 = 1e-12;
const INVERSE_ITERATION_MAX: usize = 50;
const POLISH_STEPS: usize = 2;

/// The `k` lowest eigenpairs in ascending order.
pub fn eigen_lowest(op: &TridiagonalOperator, k: usize) -> Result<Vec<Eigenpair>> {
    let n = op.len();
    if k == 0 || k > n {
        return Err(PdmError::InvalidInput(format!("requested {k} eigenpairs of a {n}×{n} operator")));
    }
    let off2: Vec<f64> = op.offdiag.iter().map(|b| b * b).collect();
    let (glo, ghi) = op.gershgorin();
    let mut out: Vec<Eigenpair> = Vec::with_capacity(k);
    let mut unit: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut lo = glo;
    for j in 0..k {
        let mut hi = ghi;
        // Invariant: count_below(lo) ≤ j < count_below(hi).
        loop {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= BISECTION_TOL || mid <= lo || mid >= hi {
                break;
            }
            if op.count_below(mid, &off2) > j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let lambda = 0.5 * (lo + hi);
        let v = inverse_iteration(op, lambda, &unit, j)?;
        // Rayleigh quotient of the unit vector, kept inside the bisection bracket.
        let rayleigh: f64 = op.apply(&v).iter().zip(&v).map(|(a, b)| a * b).sum();
        let energy = rayleigh.clamp(lo, hi);
        let scale = 1.0 / (op.h * v.iter().map(|x| x * x).sum::<f64>()).sqrt();
        out.push(Eigenpair { energy, vector: v.iter().map(|x| x * scale).collect() });
        unit.push(v);
    }
    Ok(out)
}

/// Pivoted LU of T − σI (the LAPACK gttrf layout).
struct TridiagLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    fn factor(op: &TridiagonalOperator, sigma: f64) -> TridiagLu {
        let n = op.len();
        let mut dl = op.offdiag.clone();
        let mut d: Vec<f64> = op.diag.iter().map(|a| a - sigma).collect();
        let mut du = op.offdiag.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] != 0.0 {
                    let fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        // An exactly singular shift is perturbed to keep the solve defined.
        let floor = f64::EPSILON * op.norm_inf().max(f64::MIN_POSITIVE);
        for di in d.iter_mut() {
            if di.abs() < floor {
                *di = if *di < 0.0 { -floor } else { floor };
            }
        }
        TridiagLu { dl, d, du, du2, swapped }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            if i + 1 < n {
                s -= self.du[i] * b[i + 1];
            }
            if i + 2 < n {
                s -= self.du2[i] * b[i + 2];
            }
            b[i] = s / self.d[i];
        }
    }
}

fn normalize_unit(v: &mut [f64]) -> f64 {
    let nrm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if nrm > 0.0 {
        v.iter_mut().for_each(|x| *x /= nrm);
    }
    nrm
}

/// Inverse iteration at shift `lambda`, orthogonalized against `previous` (unit 2-norm).
fn inverse_iteration(op: &TridiagonalOperator, lambda: f64, previous: &[Vec<f64>], index: usize) -> Result<Vec<f64>> {
    let n = op.len();
    let lu = TridiagLu::factor(op, lambda);
    // Deterministic start vector with components along every eigenvector.
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64 + 1.0) * 0.618_033_988_749_895).fract()).collect();
    normalize_unit(&mut v);
    let tol = 1e3 * f64::EPSILON * op.norm_inf() + 1e-12;
    let step = |v: &[f64]| -> Result<Vec<f64>> {
        let mut y = v.to_vec();
        lu.solve(&mut y);
        for p in previous {
            let c: f64 = y.iter().zip(p).map(|(a, b)| a * b).sum();
            y.iter_mut().zip(p).for_each(|(a, b)| *a -= c * b);
        }
        if !(normalize_unit(&mut y) > 0.0) || y.iter().any(|x| !x.is_finite()) {
            return Err(PdmError::Numeric(format!(
                "inverse iteration for eigenvalue {index} produced a zero or non-finite vector"
            )));
        }
        Ok(y)
    };
    let mut residual = f64::INFINITY;
    for _ in 0..INVERSE_ITERATION_MAX {
        let y = step(&v)?;
        let overlap: f64 = y.iter().zip(&v).map(|(a, b)| a * b).sum();
        let ty = op.apply(&y);
        residual = ty.iter().zip(&y).map(|(t, x)| (t - lambda * x).powi(2)).sum::<f64>().sqrt();
        v = y;
        if residual <= tol || overlap.abs() >= 1.0 - 1e-14 {
            // Two more steps damp the remaining components of other eigenvectors.
            for _ in 0..POLISH_STEPS {
                v = step(&v)?;
            }
            fix_sign(&mut v);
            return Ok(v);
        }
    }
    Err(PdmError::Numeric(format!(
        "inverse iteration for eigenvalue {index} (λ = {lambda}) did not converge in {INVERSE_ITERATION_MAX} steps; residual {residual:e}, tolerance {tol:e}"
    )))
}

/// Makes the first significant local extremum positive, matching the analytic convention.
fn fix_sign(v: &mut [f64]) {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let floor = 1e-6 * max;
    let n = v.len();
    let first = (0..n)
        .find(|&i| {
            let a = v[i].abs();
            a > floor && (i == 0 || a >= v[i - 1].abs()) && (i + 1 == n || a >= v[i + 1].abs())
        })
        .map(|i| v[i])
        .unwrap_or(0.0);
    if first < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// ‖Hψ − Eψ‖₂ / ‖ψ‖₂ on the operator grid.
pub fn residual_norm(op: &TridiagonalOperator, psi: &[f64], e: f64) -> Result<f64> {
    if psi.len() != op.len() {
        return Err(PdmError::InvalidInput(format!("{} samples for a {}-point operator", psi.len(), op.len())));
    }
    let nrm = psi.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(nrm > 0.0) {
        return Err(PdmError::InvalidInput("residual of a zero vector".into()));
    }
    let hp = op.apply(psi);
    let r = hp.iter().zip(psi).map(|(a, p)| (a - e * p).powi(2)).sum::<f64>().sqrt();
    Ok(r / nrm)
}

/// Sign changes, ignoring samples below 1e-12 of the maximum magnitude.
pub fn node_count(psi: &[f64]) -> Result<usize> {
    if psi.len() < 2 {
        return Err(PdmError::InvalidInput("node count needs at least two samples".into()));
    }
    let max = psi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let floor = 1e-12 * max;
    let mut last = 0.0f64;
    let mut nodes = 0;
    for &v in psi.iter().filter(|v| v.abs() > floor) {
        if last != 0.0 && v.signum() != last.signum() {
            nodes += 1;
        }
        last = v;
    }
    Ok(nodes)
}

/// Gram matrix h·Σ ψ_i ψ_j.
pub fn orthogonality_matrix(psis: &[Vec<f64>], h: f64) -> Result<Vec<Vec<f64>>> {
    if let Some(first) = psis.first() {
        if first.len() < 2 || psis.iter().any(|p| p.len() != first.len()) {
            return Err(PdmError::InvalidInput(
                "Gram matrix needs equal-length vectors of at least two samples".into(),
            ));
        }
    }
    Ok(psis
        .iter()
        .map(|a| psis.iter().map(|b| h * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>()).collect())
        .collect())
}

/// log₂(r_h / r_{h/2}).
pub fn convergence_order(r_h: f64, r_h2: f64) -> Result<f64> {
    if !(r_h > 0.0 && r_h2 > 0.0 && r_h.is_finite() && r_h2.is_finite()) {
        return Err(PdmError::InvalidInput(format!(
            "convergence order needs positive residuals, got {r_h:e}, {r_h2:e}"
        )));
    }
    Ok((r_h / r_h2).log2())
}

/// Outcome of checking one analytic level against the finite-difference operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub family: FamilyId,
    pub params_digest: String,
    pub n: usize,
    pub e_analytic: f64,
    pub e_numeric: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub residual_norm: f64,
    pub nodes_expected: usize,
    pub nodes_found: usize,
    pub orthogonality_max: f64,
    pub grid: GridSpec,
    pub convergence_order: Option<f64>,
}

impl VerificationReport {
    /// |E_numeric − E_analytic| ≤ max(1e-3·|E_analytic|, 1e-3).
    pub fn agrees(&self) -> bool {
        self.abs_err <= (1e-3 * self.e_analytic.abs()).max(1e-3)
    }
}

/// First 16 hex digits of SHA-256 over the family name and round-trip parameter values.
pub fn params_digest(family: FamilyId, p: &FamilyParams) -> String {
    let text = format!(
        "{family};s={:?};lambda={:?};a={:?};omega={:?};l={:?};charge={:?}",
        p.s, p.lambda, p.a, p.omega, p.l, p.coulomb_charge
    );
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub points: usize,
    /// Also solve at h/2 and report the residual convergence order.
    pub refine: bool,
    /// Explicit [x_lo, x_hi]; by default the union of the levels' numeric supports.
    pub domain: Option<(f64, f64)>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { points: 4000, refine: false, domain: None }
    }
}

/// Union of the solutions' x-supports, whose infinite tails are cut at
/// [`families::TAIL_CUTOFF`] of the peak amplitude.
///
/// The truncated end contributes about ψ_edge/(2h²) to the residual, so a looser cut would
/// stop the residual from converging at O(h²).
pub fn default_domain(solutions: &[&SpectralSolution]) -> Result<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for s in solutions {
        let (a, b) = s.x_support()?;
        lo = lo.min(a);
        hi = hi.max(b);
    }
    if !(lo < hi) {
        return Err(PdmError::InvalidInput("no level to derive a domain from".into()));
    }
    Ok((lo, hi))
}

fn sample(sol: &SpectralSolution, grid: &GridSpec) -> Result<Vec<f64>> {
    grid.points().into_iter().map(|x| sol.eval(x)).collect()
}

/// Verifies each requested level; one result per level, in the order given.
pub fn verify_levels(
    family: FamilyId,
    params: &FamilyParams,
    profile: &MassProfile,
    levels: &[usize],
    opts: &VerifyOptions,
) -> Vec<Result<VerificationReport>> {
    let bound = families::validate_with_profile(family, params, profile);
    let sols: Vec<Result<SpectralSolution>> = levels
        .iter()
        .map(|&n| match &bound {
            Err(e) => Err(e.clone()),
            Ok(b) if !b.contains(n) => Err(PdmError::Level { n, max: Some(b.max_level()) }),
            Ok(_) => SpectralSolution::new(family, *params, profile, n),
        })
        .collect();
    let valid: Vec<&SpectralSolution> = sols.iter().filter_map(|s| s.as_ref().ok()).collect();
    if valid.is_empty() {
        return sols.into_iter().map(|s| Err(s.expect_err("every level failed"))).collect();
    }
    let shared = (|| -> Result<_> {
        let (lo, hi) = match opts.domain {
            Some(d) => d,
            None => default_domain(&valid)?,
        };
        let grid = GridSpec::new(lo, hi, opts.points)?;
        let stage = |g: &GridSpec| -> Result<(TridiagonalOperator, Vec<Vec<f64>>)> {
            let op = discretize(profile, |x| families::potential_eval(family, params, profile, x), g)?;
            let samples = valid.iter().map(|s| sample(s, g)).collect::<Result<Vec<_>>>()?;
            Ok((op, samples))
        };
        let (op, samples) = stage(&grid)?;
        let top = valid.iter().map(|s| s.n).max().expect("nonempty");
        let eig = eigen_lowest(&op, top + 1)?;
        let fine = if opts.refine { Some(stage(&grid.refined())?) } else { None };
        Ok((grid, op, samples, eig, fine))
    })();
    let (grid, op, samples, eig, fine) = match shared {
        Ok(v) => v,
        Err(e) => return sols.into_iter().map(|s| s.and(Err(e.clone()))).collect(),
    };
    let h = grid.h();
    let digest = params_digest(family, params);
    let mut k = 0;
    sols.into_iter()
        .map(|s| {
            let sol = s?;
            let idx = k;
            k += 1;
            let psi = &samples[idx];
            let e = sol.energy;
            let e_num = eig[sol.n].energy;
            let abs_err = (e_num - e).abs();
            let residual = residual_norm(&op, psi, e)?;
            let orthogonality_max = samples
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != idx)
                .map(|(_, q)| (h * psi.iter().zip(q).map(|(a, b)| a * b).sum::<f64>()).abs())
                .fold(0.0, f64::max);
            let convergence_order = match &fine {
                Some((op2, s2)) => Some(convergence_order(residual, residual_norm(op2, &s2[idx], e)?)?),
                None => None,
            };
            Ok(VerificationReport {
                family,
                params_digest: digest.clone(),
                n: sol.n,
                e_analytic: e,
                e_numeric: e_num,
                abs_err,
                rel_err: abs_err / e.abs().max(1.0),
                residual_norm: residual,
                nodes_expected: sol.n,
                nodes_found: node_count(psi)?,
                orthogonality_max,
                grid,
                convergence_order,
            })
        })
        .collect()
}
