//! End-to-end acceptance criteria. Each criterion prints one PASS/FAIL line on stderr
//! (written directly, so it shows without `--nocapture`), followed by up to eight
//! failure details.
//!
//! Criteria listed in `KNOWN_FAILURES` are evaluated at their stated tolerances and are
//! expected to print FAIL; the test asserts that the set of failing criteria is exactly
//! that list, so any regression or any newly passing criterion turns the test red.

use std::collections::BTreeSet;
use std::io::Write;
use std::time::Instant;

use pdm_cli::figure::{figure_table, FigureId, FIGURE_POINTS};
use pdm_core::families::{self, FamilyId, FamilyParams, SpectralSolution};
use pdm_core::mass::{self, MassKind, MassProfile};
use pdm_core::oracle::{self, GridSpec, VerificationReport, VerifyOptions};
use pdm_core::ordering::{self, OrderingParams};
use pdm_core::transform;

/// Criteria that cannot pass as stated:
/// 2 and 7: H_SQRT, whose two interleaved Coulomb-like branches break the node ordering.
/// 6: V_m + 1/8 = −1/808 at |x| = 10√b for the inverse-quadratic mass, beyond 1e-3.
/// 8: for β = 0 the printed effective potential is twice the operator value.
const KNOWN_FAILURES: [u32; 4] = [2, 6, 7, 8];

#[derive(Default)]
struct Check {
    failures: Vec<String>,
}

impl Check {
    fn require(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(detail());
        }
    }

    fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn say(line: &str) {
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{line}");
}

fn prof(kind: MassKind, b: f64) -> MassProfile {
    MassProfile::new(kind, b).unwrap()
}

fn interior_samples(sol: &SpectralSolution, count: usize) -> Vec<f64> {
    let (lo, hi) = sol.x_support().unwrap();
    (0..count).map(|k| lo + (hi - lo) * (k as f64 + 0.5) / count as f64).collect()
}

/// Family and mass pairs verified numerically: the constant mass and one or two
/// position-dependent examples compatible with the family's μ-domain.
fn verified_pairs() -> Vec<(FamilyId, MassProfile)> {
    let mut out = Vec::new();
    for f in FamilyId::ALL {
        out.push((f, MassProfile::constant()));
        out.push((f, prof(MassKind::RationalSquare, 0.5)));
        match f {
            FamilyId::J1_TRIG_CSC | FamilyId::J1_TRIG_SEC | FamilyId::J2_COT | FamilyId::J2_TAN => {
                out.push((f, prof(MassKind::InverseQuadratic, 2.0)))
            }
            FamilyId::J1_GPT | FamilyId::J2_ECKART | FamilyId::L_RADIAL_OSC | FamilyId::L_COULOMB => {
                out.push((f, prof(MassKind::TanhShift, 0.3)))
            }
            _ => {}
        }
    }
    out
}

type Verified = Vec<(FamilyId, MassProfile, Vec<pdm_core::Result<VerificationReport>>)>;

fn run_verification() -> Verified {
    let opts = VerifyOptions { points: 8000, refine: true, domain: None };
    verified_pairs()
        .into_iter()
        .map(|(f, p)| {
            let params = families::reference_params(f);
            let r = oracle::verify_levels(f, &params, &p, &[0, 1, 2, 3], &opts);
            (f, p, r)
        })
        .collect()
}

/// Textbook potential, up to an additive constant, and textbook E_n − E_0 for m ≡ 1.
///
/// Shape-invariant forms with ħ = m = 1; A = s·a and α = a where the family has a scale.
fn textbook(f: FamilyId, p: &FamilyParams) -> (Box<dyn Fn(f64) -> f64>, Box<dyn Fn(usize) -> f64>) {
    let (s, lam, a, w, l) = (p.s, p.lambda, p.a, p.omega, p.l);
    let a2 = a * a;
    let big_a = s * a;
    match f {
        FamilyId::J1_SCARF2 => (
            // ½[(B² − A² − Aα)sech² + B(2A+α)sech·tanh], B = −λa
            Box::new(move |x| {
                let (b, t) = (-lam * a, a * x);
                0.5 * ((b * b - big_a * big_a - big_a * a) / t.cosh().powi(2)
                    + b * (2.0 * big_a + a) * t.tanh() / t.cosh())
            }),
            Box::new(move |n| 0.5 * (big_a * big_a - (big_a - n as f64 * a).powi(2))),
        ),
        FamilyId::J1_GPT => (
            Box::new(move |x| {
                let (b, t) = (lam * a, a * x);
                0.5 * ((b * b + big_a * big_a + big_a * a) / t.sinh().powi(2)
                    - b * (2.0 * big_a + a) / (t.tanh() * t.sinh()))
            }),
            Box::new(move |n| 0.5 * (big_a * big_a - (big_a - n as f64 * a).powi(2))),
        ),
        FamilyId::J1_TRIG_CSC => (
            Box::new(move |x| {
                let (b, t) = (lam * a, a * x);
                0.5 * ((big_a * big_a + b * b - big_a * a) / t.sin().powi(2)
                    - b * (2.0 * big_a - a) / (t.tan() * t.sin()))
            }),
            Box::new(move |n| 0.5 * ((big_a + n as f64 * a).powi(2) - big_a * big_a)),
        ),
        FamilyId::J1_TRIG_SEC => (
            Box::new(move |x| {
                let (b, t) = (lam * a, a * x);
                0.5 * ((big_a * big_a + b * b - big_a * a) / t.cos().powi(2)
                    - b * (2.0 * big_a - a) * t.tan() / t.cos())
            }),
            Box::new(move |n| 0.5 * ((big_a + n as f64 * a).powi(2) - big_a * big_a)),
        ),
        FamilyId::J2_ROSEN_MORSE => (
            Box::new(move |x| {
                let t = a * x;
                0.5 * (-big_a * (big_a + a) / t.cosh().powi(2) - 2.0 * lam * a2 * t.tanh())
            }),
            Box::new(move |n| {
                let (b, an) = (lam * a2, big_a - n as f64 * a);
                0.5 * (big_a * big_a - an * an + b * b / (big_a * big_a) - b * b / (an * an))
            }),
        ),
        FamilyId::J2_ECKART => (
            Box::new(move |x| {
                let t = a * x;
                0.5 * (big_a * (big_a - a) / t.sinh().powi(2) - 2.0 * lam * a2 / t.tanh())
            }),
            Box::new(move |n| {
                let (b, an) = (lam * a2, big_a + n as f64 * a);
                0.5 * (big_a * big_a - an * an + b * b / (big_a * big_a) - b * b / (an * an))
            }),
        ),
        FamilyId::J2_COT | FamilyId::J2_TAN => {
            // Trigonometric Rosen–Morse with A = −s·a > 0; the tan form is the cot form under t → π/2 − t.
            let big_a = -s * a;
            let tan = f == FamilyId::J2_TAN;
            (
                Box::new(move |x| {
                    let t = a * x;
                    let (csc2, cot) =
                        if tan { (1.0 / t.cos().powi(2), t.tan()) } else { (1.0 / t.sin().powi(2), 1.0 / t.tan()) };
                    0.5 * (big_a * (big_a - a) * csc2 - 2.0 * lam * a2 * cot)
                }),
                Box::new(move |n| {
                    let (b, an) = (lam * a2, big_a + n as f64 * a);
                    0.5 * (an * an - big_a * big_a + b * b / (big_a * big_a) - b * b / (an * an))
                }),
            )
        }
        FamilyId::H_OSC => (Box::new(move |x| 0.5 * w * w * x * x), Box::new(move |n| n as f64 * w)),
        FamilyId::H_SQRT => {
            // Coulomb problem −Z/r + l(l+1)/(2r²) with Z = ω/2 and l(l+1) = −3/16; levels
            // alternate between the branches l = −3/4 and l = −1/4, ν = n' + l + 1 = (2n+1)/4.
            let z = 0.5 * w;
            let e = move |n: usize| -z * z / (2.0 * ((2 * n + 1) as f64 / 4.0).powi(2));
            (Box::new(move |r| -z / r - 3.0 / 32.0 / (r * r)), Box::new(move |n| e(n) - e(0)))
        }
        FamilyId::L_RADIAL_OSC => (
            Box::new(move |r| 0.5 * w * w * r * r + 0.5 * l * (l + 1.0) / (r * r)),
            Box::new(move |n| 2.0 * n as f64 * w),
        ),
        FamilyId::L_MORSE => (
            // ½[B²e^{−2x} − 2B(A + α/2)e^{−x}], B = a/2
            Box::new(move |x| {
                let (b, y) = (0.5 * a, (-a * x).exp());
                0.5 * (b * b * y * y - 2.0 * b * (big_a + 0.5 * a) * y)
            }),
            Box::new(move |n| 0.5 * (big_a * big_a - (big_a - n as f64 * a).powi(2))),
        ),
        FamilyId::L_COULOMB => {
            let z = p.coulomb_charge.unwrap_or(a);
            let e = move |n: usize| -z * z / (2.0 * (n as f64 + l + 1.0).powi(2));
            (Box::new(move |r| -z / r + 0.5 * l * (l + 1.0) / (r * r)), Box::new(move |n| e(n) - e(0)))
        }
    }
}

fn criterion_1() -> Check {
    let mut c = Check::default();
    let unit = MassProfile::constant();
    for f in FamilyId::ALL {
        let p = families::reference_params(f);
        let (v_book, e_book) = textbook(f, &p);
        let sol = SpectralSolution::new(f, p, &unit, 0).unwrap();
        let xs = interior_samples(&sol, 40);
        let offset = |x: f64| families::potential_eval(f, &p, &unit, x).unwrap() - v_book(x);
        let c0 = offset(xs[0]);
        for &x in &xs {
            let d = offset(x) - c0;
            c.require(d.abs() <= 1e-10 * (1.0 + c0.abs()), || format!("{f}: V − V_textbook varies by {d:e} at x={x}"));
        }
        let e0 = families::energy(f, &p, 0).unwrap();
        for n in 0..=3 {
            let de = families::energy(f, &p, n).unwrap() - e0;
            let want = e_book(n);
            c.require((de - want).abs() <= 1e-10 * (1.0 + want.abs()), || {
                format!("{f} n={n}: E_n − E_0 = {de} vs {want}")
            });
        }
    }
    let p = FamilyParams::default().with_omega(1.0);
    for x in [-3.0, -0.4, 0.0, 1.7, 5.0] {
        let v = families::potential_eval(FamilyId::H_OSC, &p, &unit, x).unwrap();
        c.require((v - (-0.5 + 0.5 * x * x)).abs() <= 1e-14 * (1.0 + v.abs()), || format!("H_OSC V({x}) = {v}"));
    }
    let grid = GridSpec::new(-12.0, 12.0, 4000).unwrap();
    let op = oracle::discretize(&unit, |x| families::potential_eval(FamilyId::H_OSC, &p, &unit, x), &grid).unwrap();
    let eig = oracle::eigen_lowest(&op, 6).unwrap();
    for n in 0..=5 {
        let e = families::energy(FamilyId::H_OSC, &p, n).unwrap();
        c.require(e == n as f64, || format!("H_OSC E_{n} = {e}"));
        let d = (eig[n].energy - e).abs();
        c.require(d <= 5e-4, || format!("H_OSC n={n}: oracle off by {d:e}"));
    }
    c
}

fn criterion_2(verified: &Verified) -> Check {
    let mut c = Check::default();
    for (f, p, reports) in verified {
        for (n, r) in reports.iter().enumerate() {
            let tag = format!("{f}/{} n={n}", p.label());
            match r {
                Err(e) => c.require(false, || format!("{tag}: {e}")),
                Ok(r) => {
                    c.require(r.residual_norm <= 1e-4, || format!("{tag}: residual {:.3e}", r.residual_norm));
                    let order = r.convergence_order.unwrap_or(f64::NAN);
                    c.require(order >= 1.8, || format!("{tag}: convergence order {order:.3}"));
                    c.require(r.agrees(), || format!("{tag}: E {} vs oracle {}", r.e_analytic, r.e_numeric));
                }
            }
        }
    }
    c
}

fn criterion_3() -> Check {
    let mut c = Check::default();
    for (f, profile) in verified_pairs() {
        let params = families::reference_params(f);
        for n in 0..=3 {
            let sol = SpectralSolution::new(f, params, &profile, n).unwrap();
            let e = families::energy(f, &params, n).unwrap();
            for x in interior_samples(&sol, 25) {
                let lhs = transform::energy_relation_rhs(f, &params, &profile, n, x).unwrap();
                let v = families::potential_eval(f, &params, &profile, x).unwrap();
                let d = (lhs - (e - v)).abs();
                c.require(d <= 1e-9, || format!("{f}/{} n={n} x={x}: mismatch {d:e}", profile.label()));
            }
        }
    }
    c
}

fn criterion_4() -> Check {
    let mut c = Check::default();
    for id in FigureId::ALL {
        let def = id.def();
        for b in def.b {
            let p = prof(def.kind, b);
            for k in 0..1000 {
                let x = def.range.0 + (def.range.1 - def.range.0) * (k as f64 + 0.5) / 1000.0;
                let closed = mass::vm_closed_eval(&p, x).unwrap();
                let derived = mass::vm_eval(&p, x).unwrap();
                c.require((closed - derived).abs() <= 1e-6, || {
                    format!("{}: x={x} closed {closed} vs {derived}", p.label())
                });
            }
        }
    }
    let one = prof(MassKind::RationalSquare, 1.0);
    for k in 0..1000 {
        let x = -10.0 + 20.0 * (k as f64 + 0.5) / 1000.0;
        let closed = mass::vm_closed_eval(&one, x).unwrap();
        let derived = mass::vm_eval(&one, x).unwrap();
        c.require(closed == 0.0 && derived == 0.0, || format!("b=1 x={x}: {closed}, {derived}"));
    }
    c
}

fn criterion_5() -> Check {
    let mut c = Check::default();
    for (b, count) in [(0.5, 3), (2.5, 3), (9.0, 5)] {
        let roots = mass::vm_stationary_points(b).unwrap();
        c.require(roots.len() == count, || format!("b={b}: {} roots", roots.len()));
        let disc = ((2.0 * b * b - 2.0 * b + 3.0) / 3.0).sqrt();
        let mut closed = vec![0.0, (b - 1.0 + disc).sqrt(), -(b - 1.0 + disc).sqrt()];
        if b - 1.0 - disc > 0.0 {
            closed.push((b - 1.0 - disc).sqrt());
            closed.push(-(b - 1.0 - disc).sqrt());
        }
        closed.sort_by(f64::total_cmp);
        c.require(
            closed.len() == roots.len() && closed.iter().zip(&roots).all(|(u, v)| (u - v).abs() <= 1e-12),
            || format!("b={b}: roots {roots:?} vs {closed:?}"),
        );
        let p = prof(MassKind::RationalSquare, b);
        for &x in &roots {
            let h = 1e-5;
            let slope = (mass::vm_eval(&p, x + h).unwrap() - mass::vm_eval(&p, x - h).unwrap()) / (2.0 * h);
            c.require(slope.abs() <= 1e-6, || format!("b={b} x={x}: dV_m/dx = {slope:e}"));
        }
    }
    c
}

/// Index of the sample closest to x.
fn index_of(xs: &[f64], x: f64) -> usize {
    xs.iter().enumerate().min_by(|a, b| (a.1 - x).abs().total_cmp(&(b.1 - x).abs())).unwrap().0
}

fn criterion_6() -> Check {
    let mut c = Check::default();
    let captions: [(FigureId, [f64; 3], (f64, f64)); 6] = [
        (FigureId::Fig1a, [0.5, 0.6, 0.7], (-4.0, 4.0)),
        (FigureId::Fig1b, [2.5, 3.0, 3.5], (-4.0, 4.0)),
        (FigureId::Fig1c, [9.0, 10.0, 11.0], (-4.0, 4.0)),
        (FigureId::Fig2, [0.4, 0.7, 1.0], (-4.0, 4.0)),
        (FigureId::Fig3, [2.0, 4.0, 6.0], (-10.0, 10.0)),
        (FigureId::Fig4, [0.15, 0.2, 0.3], (-20.0, 20.0)),
    ];
    for (id, b, range) in captions {
        let def = id.def();
        c.require(def.b == b && def.range == range, || format!("{id}: parameters {:?} on {:?}", def.b, def.range));
        let t = figure_table(id).unwrap();
        c.require(t.header == ["x", "Vm_b1", "Vm_b2", "Vm_b3"], || format!("{id}: header {:?}", t.header));
        c.require(t.rows.len() == FIGURE_POINTS && t.omitted == 0, || format!("{id}: {} rows", t.rows.len()));
        let xs = t.column("x").unwrap();
        c.require(xs[0] == range.0 && xs[FIGURE_POINTS - 1] == range.1, || {
            format!("{id}: x from {} to {}", xs[0], xs[1000])
        });
        let mid = index_of(&xs, 0.0);
        for (k, &bk) in b.iter().enumerate() {
            let v = t.column(&format!("Vm_b{}", k + 1)).unwrap();
            match id {
                FigureId::Fig1a => {
                    // Barrier: positive maximum at the origin, negative side lobes at the outer extreme points.
                    let peak = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    c.require(v[mid] > 0.0 && v[mid] == peak, || {
                        format!("{id} b={bk}: V_m(0) = {} max {peak}", v[mid])
                    });
                    let lobe = (bk - 1.0 + ((2.0 * bk * bk - 2.0 * bk + 3.0) / 3.0).sqrt()).sqrt();
                    for x in [-lobe, lobe] {
                        let i = index_of(&xs, x);
                        let local_min = v[i] <= v[i - 1] && v[i] <= v[i + 1];
                        c.require(v[i] < 0.0 && local_min, || format!("{id} b={bk}: no negative lobe at x={x}"));
                    }
                }
                FigureId::Fig1b | FigureId::Fig1c => {
                    c.require(v[mid] < 0.0, || format!("{id} b={bk}: V_m(0) = {} is not a well", v[mid]));
                }
                FigureId::Fig2 => {
                    let grows = (mid..FIGURE_POINTS - 1).all(|i| v[i + 1].abs() > v[i].abs())
                        && (1..=mid).all(|i| v[i - 1].abs() > v[i].abs());
                    c.require(grows, || format!("{id} b={bk}: |V_m| not monotone in |x|"));
                }
                FigureId::Fig3 => {
                    c.require(v.iter().all(|&y| y < 0.0), || format!("{id} b={bk}: positive V_m"));
                    let p = prof(MassKind::InverseQuadratic, bk);
                    for x in [-10.0 * bk.sqrt(), 10.0 * bk.sqrt()] {
                        let tail = mass::vm_eval(&p, x).unwrap();
                        c.require((tail + 0.125).abs() <= 1e-3, || {
                            format!(
                                "{id} b={bk}: V_m({x:.3}) = {tail:.6}, |V_m + 1/8| = {:.3e} > 1e-3",
                                (tail + 0.125).abs()
                            )
                        });
                    }
                }
                FigureId::Fig4 => {
                    let decays = v.windows(2).all(|w| w[1].abs() < w[0].abs()) && v.iter().all(|&y| y < 0.0);
                    let ratio = v[FIGURE_POINTS - 1].abs() / v[0].abs();
                    c.require(decays && ratio < 1e-3, || format!("{id} b={bk}: decays={decays} ratio={ratio:e}"));
                }
            }
        }
        if id == FigureId::Fig1a {
            let origin: Vec<f64> = (1..=3).map(|k| t.column(&format!("Vm_b{k}")).unwrap()[mid]).collect();
            c.require(origin[0] > origin[1] && origin[1] > origin[2], || {
                format!("{id}: V_m(0) {origin:?} not decreasing in b")
            });
        }
    }
    c
}

fn criterion_7(verified: &Verified) -> Check {
    let mut c = Check::default();
    for (f, p, reports) in verified {
        for (n, r) in reports.iter().enumerate() {
            let Ok(r) = r else { continue };
            let tag = format!("{f}/{} n={n}", p.label());
            c.require(r.orthogonality_max <= 1e-6, || format!("{tag}: overlap {:.3e}", r.orthogonality_max));
            c.require(r.nodes_found == n, || format!("{tag}: {} nodes", r.nodes_found));
        }
    }
    c
}

fn criterion_8() -> Check {
    let mut c = Check::default();
    let masses = [
        prof(MassKind::RationalSquare, 0.5),
        prof(MassKind::ExpAbs, 0.6),
        prof(MassKind::InverseQuadratic, 2.0),
        prof(MassKind::TanhShift, 0.3),
    ];
    // 50 points on [−3, 3] avoiding the exp_abs kink at 0.
    let xs: Vec<f64> = (0..50).map(|i| -3.0 + 6.0 * (i as f64 + 0.5) / 50.0).collect();
    let bdd = OrderingParams::bendaniel_duke();
    let beta_zero: Vec<OrderingParams> =
        [-0.5, 0.0, -1.0, -0.25].iter().map(|&a| OrderingParams::new(a, 0.0, -1.0 - a).unwrap()).collect();
    for p in &masses {
        for &x in &xs {
            let o = ordering::veff_oracle(&bdd, p, x).unwrap();
            c.require(o.abs() <= 1e-10, || format!("BenDaniel-Duke oracle {o:e} at {} x={x}", p.label()));

            let cmp = ordering::compare(&bdd, p, x).unwrap();
            let d = mass::mass_eval(p, x).unwrap();
            let term = 0.5 * d.d2m / (d.m * d.m);
            c.require((cmp.printed - term).abs() <= 1e-12 * (1.0 + term.abs()), || {
                format!("printed BDD term at x={x}")
            });
            c.require(cmp.flagged == (term.abs() > ordering::DISCREPANCY_FLAG), || {
                format!("BDD discrepancy {term:e} at {} x={x} flagged={}", p.label(), cmp.flagged)
            });

            for ord in &beta_zero {
                let printed = ordering::veff_printed(ord, p, |_| Ok(0.0), x).unwrap();
                let oracle = ordering::veff_oracle(ord, p, x).unwrap();
                c.require((printed - oracle).abs() <= 1e-5, || {
                    format!(
                        "alpha={} beta=0 {} x={x}: printed {printed:.6} vs oracle {oracle:.6}",
                        ord.alpha,
                        p.label()
                    )
                });
            }
        }
    }
    c
}

fn criterion_9() -> Check {
    let mut c = Check::default();
    for f in [FamilyId::J1_SCARF2, FamilyId::J2_COT, FamilyId::J2_TAN] {
        let params = families::reference_params(f);
        for profile in [MassProfile::constant(), prof(MassKind::RationalSquare, 0.5)] {
            for n in 0..=3 {
                let sol = SpectralSolution::new(f, params, &profile, n).unwrap();
                let r = sol.imag_ratio();
                c.require(r <= 1e-10, || format!("{f}/{} n={n}: |Im psi|/max|psi| = {r:e}", profile.label()));
            }
        }
    }
    c
}

#[test]
fn acceptance_criteria() {
    let names = [
        "constant-mass reduction",
        "PDM eigen-verification",
        "energy relation consistency",
        "V_m closed forms",
        "extreme points",
        "figure data",
        "spectral structure",
        "ordering oracle",
        "complex-to-real collapse",
    ];
    let t0 = Instant::now();
    let verified = run_verification();
    let verify_secs = t0.elapsed().as_secs_f64();

    let mut failed = BTreeSet::new();
    for (i, name) in names.iter().enumerate() {
        let id = i as u32 + 1;
        let start = Instant::now();
        let check = match id {
            1 => criterion_1(),
            2 => criterion_2(&verified),
            3 => criterion_3(),
            4 => criterion_4(),
            5 => criterion_5(),
            6 => criterion_6(),
            7 => criterion_7(&verified),
            8 => criterion_8(),
            _ => criterion_9(),
        };
        let mut secs = start.elapsed().as_secs_f64();
        if id == 2 || id == 7 {
            secs += verify_secs;
        }
        let status = if check.passed() { "PASS" } else { "FAIL" };
        say(&format!("{status} criterion {id}: {name} ({secs:.1} s)"));
        for detail in check.failures.iter().take(8) {
            say(&format!("    {detail}"));
        }
        if check.failures.len() > 8 {
            say(&format!("    ... {} more", check.failures.len() - 8));
        }
        if !check.passed() {
            failed.insert(id);
        }
    }
    say(&format!("acceptance total {:.1} s", t0.elapsed().as_secs_f64()));
    let expected: BTreeSet<u32> = KNOWN_FAILURES.into_iter().collect();
    assert_eq!(failed, expected, "failing criteria differ from the documented known failures");
}
