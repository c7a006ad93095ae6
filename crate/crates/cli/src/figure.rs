use std::fmt;
use std::str::FromStr;

use pdm_core::mass::{self, MassKind, MassProfile};

use crate::error::{CliError, CliResult};
use crate::table::{linspace, Cell, Table};

/// Samples per curve.
pub const FIGURE_POINTS: usize = 1001;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    Fig1a,
    Fig1b,
    Fig1c,
    Fig2,
    Fig3,
    Fig4,
}

/// Mass kind, the three caption values of b and the plotted x-range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureDef {
    pub kind: MassKind,
    pub b: [f64; 3],
    pub range: (f64, f64),
}

impl FigureId {
    pub const ALL: [FigureId; 6] =
        [FigureId::Fig1a, FigureId::Fig1b, FigureId::Fig1c, FigureId::Fig2, FigureId::Fig3, FigureId::Fig4];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig1a => "fig1a",
            FigureId::Fig1b => "fig1b",
            FigureId::Fig1c => "fig1c",
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
        }
    }

    pub fn def(self) -> FigureDef {
        let (kind, b, range) = match self {
            FigureId::Fig1a => (MassKind::RationalSquare, [0.5, 0.6, 0.7], (-4.0, 4.0)),
            FigureId::Fig1b => (MassKind::RationalSquare, [2.5, 3.0, 3.5], (-4.0, 4.0)),
            FigureId::Fig1c => (MassKind::RationalSquare, [9.0, 10.0, 11.0], (-4.0, 4.0)),
            FigureId::Fig2 => (MassKind::ExpAbs, [0.4, 0.7, 1.0], (-4.0, 4.0)),
            FigureId::Fig3 => (MassKind::InverseQuadratic, [2.0, 4.0, 6.0], (-10.0, 10.0)),
            FigureId::Fig4 => (MassKind::TanhShift, [0.15, 0.2, 0.3], (-20.0, 20.0)),
        };
        FigureDef { kind, b, range }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureId {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        FigureId::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| CliError::Config(format!("unknown figure id '{s}'")))
    }
}

/// V_m curves for the three caption values, header `x,Vm_b1,Vm_b2,Vm_b3`.
pub fn figure_table(id: FigureId) -> CliResult<Table> {
    let def = id.def();
    let profiles = def.b.map(|b| MassProfile::new(def.kind, b));
    let profiles = profiles.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(["x", "Vm_b1", "Vm_b2", "Vm_b3"]);
    for x in linspace(def.range.0, def.range.1, FIGURE_POINTS) {
        let mut row = vec![Cell::Num(x)];
        for p in &profiles {
            row.push(Cell::Num(mass::vm_eval(p, x)?));
        }
        table.push(row);
    }
    Ok(table)
}
