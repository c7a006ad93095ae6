use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "pdm", version, about = "Exactly solvable position-dependent-mass Schrödinger problems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    Families,
    Eval,
    Verify,
    Vm,
    Figure,
    Ordering,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the solvable families and their parameters.
    Families(Options),
    /// Sample V, V_m and eigenfunctions on a grid.
    Eval(Options),
    /// Check analytic levels against the finite-difference oracle.
    Verify(Options),
    /// Sample V_m for one mass profile.
    Vm(Options),
    /// Regenerate the data behind one V_m figure.
    Figure(Options),
    /// Compare the effective potential of an ordering against the operator oracle.
    Ordering(Options),
}

impl Command {
    pub fn split(self) -> (CommandKind, Options) {
        match self {
            Command::Families(o) => (CommandKind::Families, o),
            Command::Eval(o) => (CommandKind::Eval, o),
            Command::Verify(o) => (CommandKind::Verify, o),
            Command::Vm(o) => (CommandKind::Vm, o),
            Command::Figure(o) => (CommandKind::Figure, o),
            Command::Ordering(o) => (CommandKind::Ordering, o),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    ClosedForm,
    ContinuousZeroAtOrigin,
}

/// Every option of every command; a JSON config file uses the same keys.
///
/// Flags override values read from `--config`.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
#[serde(default, deny_unknown_fields)]
pub struct Options {
    /// JSON file with any of these options.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Command named in a config file; the subcommand on the command line wins.
    #[arg(skip)]
    pub command: Option<CommandKind>,

    #[arg(long)]
    pub family: Option<String>,
    /// constant, rational_square, exp_abs, inverse_quadratic, tanh_shift or custom_table.
    #[arg(long)]
    pub mass: Option<String>,
    #[arg(long)]
    pub b: Option<f64>,
    /// Two-column x,m CSV for the custom_table mass.
    #[arg(long)]
    pub mass_table: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub convention: Option<Convention>,

    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub l: Option<f64>,
    #[arg(long)]
    pub charge: Option<f64>,

    /// Inclusive level range `lo..hi`, or a single level.
    #[arg(long)]
    pub levels: Option<LevelRange>,
    /// `lo:hi:N`
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<GridArg>,
    /// `lo:hi`
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<RangeArg>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Also solve at h/2 and report the convergence order.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub refine: Option<bool>,

    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,

    /// Figure id: fig1a, fig1b, fig1c, fig2, fig3 or fig4.
    #[arg(long)]
    pub id: Option<String>,

    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($f:ident),*) => {
        Options { config: $top.config.or($base.config), $($f: $top.$f.or($base.$f)),* }
    };
}

impl Options {
    /// Values set on `self` win over those of `base`.
    pub fn over(self, base: Options) -> Options {
        let top = self;
        overlay!(base, top; command, family, mass, b, mass_table, convention, s, lambda, a, omega, l, charge,
            levels, grid, range, points, refine, alpha, beta, gamma, id, out, format)
    }
}

fn parse_f64(s: &str, what: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("{what}: '{s}' is not a number"))?;
    if !v.is_finite() {
        return Err(format!("{what}: '{s}' is not finite"));
    }
    Ok(v)
}

/// Inclusive range of levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct LevelRange {
    pub lo: usize,
    pub hi: usize,
}

impl LevelRange {
    pub fn levels(&self) -> Vec<usize> {
        (self.lo..=self.hi).collect()
    }
}

impl FromStr for LevelRange {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("levels: '{t}' is not a level"));
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.strip_prefix('=').unwrap_or(b))?),
            None => {
                let n = parse(s)?;
                (n, n)
            }
        };
        if lo > hi {
            return Err(format!("levels: empty range '{s}'"));
        }
        Ok(LevelRange { lo, hi })
    }
}

impl fmt::Display for LevelRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

impl TryFrom<String> for LevelRange {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<LevelRange> for String {
    fn from(r: LevelRange) -> String {
        r.to_string()
    }
}

/// `lo:hi:N`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct GridArg {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl FromStr for GridArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, n] = parts.as_slice() else {
            return Err(format!("grid: expected lo:hi:N, got '{s}'"));
        };
        let n = n.trim().parse().map_err(|_| format!("grid: '{n}' is not a point count"))?;
        Ok(GridArg { lo: parse_f64(lo, "grid")?, hi: parse_f64(hi, "grid")?, n })
    }
}

impl fmt::Display for GridArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}:{:?}:{}", self.lo, self.hi, self.n)
    }
}

impl TryFrom<String> for GridArg {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<GridArg> for String {
    fn from(g: GridArg) -> String {
        g.to_string()
    }
}

/// `lo:hi`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct RangeArg {
    pub lo: f64,
    pub hi: f64,
}

impl FromStr for RangeArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let Some((lo, hi)) = s.split_once(':') else {
            return Err(format!("range: expected lo:hi, got '{s}'"));
        };
        let r = RangeArg { lo: parse_f64(lo, "range")?, hi: parse_f64(hi, "range")? };
        if !(r.lo < r.hi) {
            return Err(format!("range: need lo < hi, got '{s}'"));
        }
        Ok(r)
    }
}

impl fmt::Display for RangeArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}:{:?}", self.lo, self.hi)
    }
}

impl TryFrom<String> for RangeArg {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<RangeArg> for String {
    fn from(r: RangeArg) -> String {
        r.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_syntax() {
        assert_eq!("0..3".parse::<LevelRange>().unwrap().levels(), vec![0, 1, 2, 3]);
        assert_eq!("2..=4".parse::<LevelRange>().unwrap().levels(), vec![2, 3, 4]);
        assert_eq!("5".parse::<LevelRange>().unwrap().levels(), vec![5]);
        assert!("3..1".parse::<LevelRange>().is_err());
        assert!("a..b".parse::<LevelRange>().is_err());
    }

    #[test]
    fn grid_and_range_syntax() {
        let g: GridArg = "-12:12.5:4000".parse().unwrap();
        assert_eq!((g.lo, g.hi, g.n), (-12.0, 12.5, 4000));
        assert!("1:2".parse::<GridArg>().is_err());
        assert!("1:2:x".parse::<GridArg>().is_err());
        assert!("nan:2:10".parse::<GridArg>().is_err());
        let r: RangeArg = "-4:4".parse().unwrap();
        assert_eq!((r.lo, r.hi), (-4.0, 4.0));
        assert!("4:-4".parse::<RangeArg>().is_err());
        assert_eq!(g.to_string().parse::<GridArg>().unwrap(), g);
    }

    #[test]
    fn config_rejects_unknown_keys() {
        let ok: Options = serde_json::from_str(r#"{"family":"H_OSC","levels":"0..2","grid":"-5:5:100"}"#).unwrap();
        assert_eq!(ok.levels.unwrap().hi, 2);
        assert!(serde_json::from_str::<Options>(r#"{"famly":"H_OSC"}"#).is_err());
        assert!(serde_json::from_str::<Options>(r#"{"grid":"1:2"}"#).is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = Options { family: Some("H_OSC".into()), b: Some(1.0), omega: Some(2.0), ..Default::default() };
        let flags = Options { omega: Some(3.0), ..Default::default() };
        let merged = flags.over(file);
        assert_eq!(merged.family.as_deref(), Some("H_OSC"));
        assert_eq!(merged.omega, Some(3.0));
        assert_eq!(merged.b, Some(1.0));
    }
}
