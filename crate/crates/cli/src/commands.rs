use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use pdm_core::families::{self, FamilyId, SpectralSolution};
use pdm_core::mass::{self, MassProfile};
use pdm_core::oracle::{self, GridSpec, VerificationReport};
use pdm_core::ordering;
use pdm_core::{PdmError, Result};
use serde_json::Value;

use crate::config::{RunConfig, Task};
use crate::error::{CliError, CliResult};
use crate::figure;
use crate::table::{linspace, Cell, Table};

/// Messages for stderr from a successful run.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Outcome {
    pub notes: Vec<String>,
}

/// Points where the model is undefined; such rows are left out, not fatal.
fn is_skippable(e: &PdmError) -> bool {
    matches!(e, PdmError::Singularity(_) | PdmError::Domain { .. })
}

/// Appends the row built by `f`, or counts it as omitted when `f` hits a skippable point.
fn push_row<F>(table: &mut Table, f: F) -> Result<()>
where
    F: FnOnce() -> Result<Vec<Cell>>,
{
    match f() {
        Ok(row) => table.push(row),
        Err(e) if is_skippable(&e) => table.omitted += 1,
        Err(e) => return Err(e),
    }
    Ok(())
}

pub fn families_table() -> Table {
    let mut t = Table::new(["family", "g_map", "complex", "parameters", "reference_params", "bound_levels"]);
    for f in FamilyId::ALL {
        let p = families::reference_params(f);
        let bound = match families::validate_params(f, &p) {
            Ok(families::BoundLevels::Finite(m)) => format!("0..{m}"),
            Ok(families::BoundLevels::Unbounded) => "unbounded".into(),
            Err(e) => format!("invalid: {e}"),
        };
        let g_map =
            serde_json::to_value(f.map_kind()).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        let names = f.parameter_names();
        let reference = names
            .iter()
            .map(|&n| {
                let v = match n {
                    "s" => p.s,
                    "lambda" => p.lambda,
                    "a" => p.a,
                    "omega" => p.omega,
                    "l" => p.l,
                    "charge" => p.coulomb_charge.unwrap_or(p.a),
                    _ => f64::NAN,
                };
                format!("{n}={v}")
            })
            .collect::<Vec<_>>()
            .join(";");
        t.push(vec![
            Cell::Text(f.name().into()),
            Cell::Text(g_map),
            Cell::Bool(f.is_complex()),
            Cell::Text(names.join(";")),
            Cell::Text(reference),
            Cell::Text(bound),
        ]);
    }
    t
}

/// Header `x,V,Vm,psi<n>...` over the grid.
pub fn eval_table(
    family: FamilyId,
    params: &families::FamilyParams,
    profile: &MassProfile,
    levels: &[usize],
    grid: Option<GridSpec>,
    points: usize,
) -> Result<Table> {
    let sols =
        levels.iter().map(|&n| SpectralSolution::new(family, *params, profile, n)).collect::<Result<Vec<_>>>()?;
    let grid = match grid {
        Some(g) => g,
        None => {
            let (lo, hi) = oracle::default_domain(&sols.iter().collect::<Vec<_>>())?;
            GridSpec::new(lo, hi, points)?
        }
    };
    let mut header = vec!["x".to_string(), "V".into(), "Vm".into()];
    header.extend(levels.iter().map(|n| format!("psi{n}")));
    let mut t = Table::new(header);
    for x in grid.points() {
        push_row(&mut t, || {
            let mut row = vec![
                Cell::Num(x),
                Cell::Num(families::potential_eval(family, params, profile, x)?),
                Cell::Num(mass::vm_eval(profile, x)?),
            ];
            for s in &sols {
                row.push(Cell::Num(s.eval(x)?));
            }
            Ok(row)
        })?;
    }
    Ok(t)
}

/// One JSON entry per level: the report, or `{"n", "error"}` for a level that failed.
pub fn verify_entries(levels: &[usize], results: &[Result<VerificationReport>]) -> Vec<Value> {
    levels
        .iter()
        .zip(results)
        .map(|(&n, r)| match r {
            Ok(rep) => serde_json::to_value(rep).expect("report serializes"),
            Err(e) => serde_json::json!({ "n": n, "error": e.to_string() }),
        })
        .collect()
}

pub fn vm_table(profile: &MassProfile, lo: f64, hi: f64, points: usize) -> Result<Table> {
    let mut t = Table::new(["x", "Vm"]);
    for x in linspace(lo, hi, points) {
        push_row(&mut t, || Ok(vec![Cell::Num(x), Cell::Num(mass::vm_eval(profile, x)?)]))?;
    }
    Ok(t)
}

/// Header `x,printed,oracle,expanded,flagged`; every value is V_eff − V.
pub fn ordering_table(
    ord: &ordering::OrderingParams,
    profile: &MassProfile,
    lo: f64,
    hi: f64,
    points: usize,
) -> Result<Table> {
    let mut t = Table::new(["x", "printed", "oracle", "expanded", "flagged"]);
    for x in linspace(lo, hi, points) {
        match ordering::compare(ord, profile, x) {
            Ok(c) => t.push(vec![
                Cell::Num(x),
                Cell::Num(c.printed),
                Cell::Num(c.oracle),
                Cell::Num(c.expanded),
                Cell::Bool(c.flagged),
            ]),
            Err(e) if is_skippable(&e) || matches!(e, PdmError::InconsistentExtraction { .. }) => t.omitted += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(t)
}

fn open(out: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|source| CliError::Io { path: p.display().to_string(), source })?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn io_err(out: Option<&Path>) -> impl Fn(io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: out.map_or("stdout".into(), |p| p.display().to_string()), source }
}

fn emit(table: &Table, cfg: &RunConfig, notes: &mut Vec<String>) -> CliResult<()> {
    let out = cfg.out.as_deref();
    table.write(cfg.format, open(out)?).map_err(io_err(out))?;
    if table.omitted > 0 {
        notes.push(format!("warning: omitted {} singular rows", table.omitted));
    }
    Ok(())
}

/// Executes a validated configuration; output is complete before a verification failure is returned.
pub fn execute(cfg: &RunConfig) -> CliResult<Outcome> {
    let mut notes = Vec::new();
    match &cfg.task {
        Task::Families => emit(&families_table(), cfg, &mut notes)?,
        Task::Eval { family, params, profile, levels, grid, points } => {
            emit(&eval_table(*family, params, profile, levels, *grid, *points)?, cfg, &mut notes)?
        }
        Task::Verify { family, params, profile, levels, opts } => {
            let results = oracle::verify_levels(*family, params, profile, levels, opts);
            let entries = verify_entries(levels, &results);
            let out = cfg.out.as_deref();
            let mut w = open(out)?;
            serde_json::to_writer_pretty(&mut w, &entries).map_err(|e| io_err(out)(e.into()))?;
            writeln!(w).and_then(|_| w.flush()).map_err(io_err(out))?;
            let failed: Vec<String> = levels
                .iter()
                .zip(&results)
                .filter_map(|(n, r)| match r {
                    Ok(rep) if rep.agrees() => None,
                    Ok(rep) => Some(format!("n={n}: |ΔE| = {:e}", rep.abs_err)),
                    Err(e) => Some(format!("n={n}: {e}")),
                })
                .collect();
            if !failed.is_empty() {
                return Err(CliError::Verification(failed.join("; ")));
            }
        }
        Task::Vm { profile, range, points } => emit(&vm_table(profile, range.lo, range.hi, *points)?, cfg, &mut notes)?,
        Task::Figure { id } => emit(&figure::figure_table(*id)?, cfg, &mut notes)?,
        Task::Ordering { ordering, profile, range, points } => {
            let t = ordering_table(ordering, profile, range.lo, range.hi, *points)?;
            emit(&t, cfg, &mut notes)?;
            let flagged = t.rows.iter().filter(|r| r[4] == Cell::Bool(true)).count();
            if flagged > 0 {
                notes.push(format!(
                    "printed V_eff disagrees with the operator oracle at {flagged} of {} samples",
                    t.rows.len()
                ));
            }
        }
    }
    Ok(Outcome { notes })
}
