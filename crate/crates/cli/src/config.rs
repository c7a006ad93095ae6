use std::fs;
use std::path::PathBuf;

use pdm_core::families::{self, FamilyId, FamilyParams};
use pdm_core::mass::{MassKind, MassProfile, MassTable, MuConvention};
use pdm_core::oracle::{GridSpec, VerifyOptions};
use pdm_core::ordering::OrderingParams;

use crate::args::{CommandKind, Convention, Format, LevelRange, Options, RangeArg};
use crate::error::{CliError, CliResult};
use crate::figure::FigureId;

pub const DEFAULT_SAMPLES: usize = 1001;
pub const DEFAULT_VERIFY_POINTS: usize = 4000;
pub const DEFAULT_ORDERING_POINTS: usize = 201;
pub const DEFAULT_LEVELS: LevelRange = LevelRange { lo: 0, hi: 3 };
pub const DEFAULT_RANGE: RangeArg = RangeArg { lo: -4.0, hi: 4.0 };

/// A fully validated invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub task: Task,
}

#[derive(Debug, Clone)]
pub enum Task {
    Families,
    Eval {
        family: FamilyId,
        params: FamilyParams,
        profile: MassProfile,
        levels: Vec<usize>,
        /// None: the union of the levels' supports sampled at `points`.
        grid: Option<GridSpec>,
        points: usize,
    },
    Verify {
        family: FamilyId,
        params: FamilyParams,
        profile: MassProfile,
        levels: Vec<usize>,
        opts: VerifyOptions,
    },
    Vm {
        profile: MassProfile,
        range: RangeArg,
        points: usize,
    },
    Figure {
        id: FigureId,
    },
    Ordering {
        ordering: OrderingParams,
        profile: MassProfile,
        range: RangeArg,
        points: usize,
    },
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Reads `--config` if given and lays the flags over it.
pub fn load(flags: Options) -> CliResult<Options> {
    let Some(path) = flags.config.clone() else {
        return Ok(flags);
    };
    let text = fs::read_to_string(&path).map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
    let file: Options =
        serde_json::from_str(&text).map_err(|e| config_err(format!("config {}: {e}", path.display())))?;
    Ok(flags.over(file))
}

fn family(o: &Options) -> CliResult<FamilyId> {
    let name = o.family.as_deref().ok_or_else(|| config_err("--family is required"))?;
    name.parse().map_err(CliError::config_from)
}

/// Reference parameters of the family with every given value laid over them.
fn family_params(family: FamilyId, o: &Options) -> FamilyParams {
    let mut p = families::reference_params(family);
    if let Some(v) = o.s {
        p = p.with_s(v);
    }
    if let Some(v) = o.lambda {
        p = p.with_lambda(v);
    }
    if let Some(v) = o.a {
        p = p.with_a(v);
    }
    if let Some(v) = o.omega {
        p = p.with_omega(v);
    }
    if let Some(v) = o.l {
        p = p.with_l(v);
    }
    if let Some(v) = o.charge {
        p = p.with_charge(v);
    }
    p
}

fn profile(o: &Options) -> CliResult<MassProfile> {
    let kind: MassKind = o.mass.as_deref().unwrap_or("constant").parse().map_err(CliError::config_from)?;
    let p = match kind {
        MassKind::Constant => MassProfile::constant(),
        MassKind::CustomTable => {
            let path = o.mass_table.as_ref().ok_or_else(|| config_err("custom_table needs --mass-table"))?;
            let text =
                fs::read_to_string(path).map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
            MassProfile::custom(MassTable::from_csv_str(&text).map_err(CliError::config_from)?)
        }
        k => {
            let b = o.b.ok_or_else(|| config_err(format!("mass {k} needs --b")))?;
            MassProfile::new(k, b).map_err(CliError::config_from)?
        }
    };
    Ok(match o.convention {
        Some(Convention::ClosedForm) => p.with_convention(MuConvention::ClosedForm),
        Some(Convention::ContinuousZeroAtOrigin) => p.with_convention(MuConvention::ContinuousZeroAtOrigin),
        None => p,
    })
}

fn grid(o: &Options) -> CliResult<Option<GridSpec>> {
    o.grid.map(|g| GridSpec::new(g.lo, g.hi, g.n).map_err(CliError::config_from)).transpose()
}

fn samples(o: &Options, default: usize) -> CliResult<usize> {
    let n = o.points.unwrap_or(default);
    if n < 2 {
        return Err(config_err(format!("--points must be at least 2, got {n}")));
    }
    Ok(n)
}

impl RunConfig {
    /// Checks every precondition of the target command before any computation.
    pub fn resolve(command: CommandKind, o: Options) -> CliResult<RunConfig> {
        let default_format = if command == CommandKind::Verify { Format::Json } else { Format::Csv };
        let format = o.format.unwrap_or(default_format);
        let task = match command {
            CommandKind::Families => Task::Families,
            CommandKind::Eval => {
                let family = family(&o)?;
                let params = family_params(family, &o);
                let profile = profile(&o)?;
                let bound =
                    families::validate_with_profile(family, &params, &profile).map_err(CliError::config_from)?;
                let levels = o.levels.unwrap_or(DEFAULT_LEVELS).levels();
                if let Some(&n) = levels.iter().find(|&&n| !bound.contains(n)) {
                    return Err(config_err(format!(
                        "level {n} is not bound for {family} (highest {})",
                        bound.max_level()
                    )));
                }
                Task::Eval { family, params, profile, levels, grid: grid(&o)?, points: samples(&o, DEFAULT_SAMPLES)? }
            }
            CommandKind::Verify => {
                if format != Format::Json {
                    return Err(config_err("verify writes JSON only"));
                }
                let family = family(&o)?;
                let params = family_params(family, &o);
                let profile = profile(&o)?;
                families::validate_with_profile(family, &params, &profile).map_err(CliError::config_from)?;
                let levels = o.levels.unwrap_or(DEFAULT_LEVELS).levels();
                let opts = match grid(&o)? {
                    Some(g) => {
                        VerifyOptions { points: g.n, refine: o.refine.unwrap_or(false), domain: Some((g.x_lo, g.x_hi)) }
                    }
                    None => VerifyOptions {
                        points: o.points.unwrap_or(DEFAULT_VERIFY_POINTS),
                        refine: o.refine.unwrap_or(false),
                        domain: None,
                    },
                };
                Task::Verify { family, params, profile, levels, opts }
            }
            CommandKind::Vm => Task::Vm {
                profile: profile(&o)?,
                range: o.range.unwrap_or(DEFAULT_RANGE),
                points: samples(&o, DEFAULT_SAMPLES)?,
            },
            CommandKind::Figure => {
                let id = o.id.as_deref().ok_or_else(|| config_err("--id is required"))?;
                Task::Figure { id: id.parse()? }
            }
            CommandKind::Ordering => {
                let (Some(a), Some(b), Some(c)) = (o.alpha, o.beta, o.gamma) else {
                    return Err(config_err("ordering needs --alpha, --beta and --gamma"));
                };
                Task::Ordering {
                    ordering: OrderingParams::new(a, b, c).map_err(CliError::config_from)?,
                    profile: profile(&o)?,
                    range: o.range.unwrap_or(DEFAULT_RANGE),
                    points: samples(&o, DEFAULT_ORDERING_POINTS)?,
                }
            }
        };
        Ok(RunConfig { command, out: o.out, format, task })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(json: &str) -> Options {
        serde_json::from_str(json).unwrap()
    }

    #[test]
    fn family_defaults_are_reference_params() {
        let c =
            RunConfig::resolve(CommandKind::Eval, opts(r#"{"family":"J2_ECKART","mass":"constant","s":5}"#)).unwrap();
        let Task::Eval { params, levels, .. } = c.task else { panic!() };
        let r = families::reference_params(FamilyId::J2_ECKART);
        assert_eq!(params.s, 5.0);
        assert_eq!(params.lambda, r.lambda);
        assert_eq!(levels, vec![0, 1, 2, 3]);
    }

    #[test]
    fn preconditions_are_config_errors() {
        let bad = [
            (CommandKind::Eval, r#"{"mass":"constant"}"#),
            (CommandKind::Eval, r#"{"family":"NOPE"}"#),
            (CommandKind::Eval, r#"{"family":"H_OSC","mass":"rational_square"}"#),
            (CommandKind::Eval, r#"{"family":"H_OSC","mass":"rational_square","b":-1}"#),
            (CommandKind::Eval, r#"{"family":"H_OSC","omega":-1}"#),
            (CommandKind::Eval, r#"{"family":"J2_ECKART","s":2,"lambda":10,"levels":"0..3"}"#),
            (CommandKind::Eval, r#"{"family":"H_OSC","grid":"1:0:100"}"#),
            (CommandKind::Verify, r#"{"family":"H_OSC","format":"csv"}"#),
            (CommandKind::Vm, r#"{"mass":"exp_abs","b":1,"points":1}"#),
            (CommandKind::Figure, r#"{"id":"fig9"}"#),
            (CommandKind::Figure, r#"{}"#),
            (CommandKind::Ordering, r#"{"alpha":0,"beta":0,"gamma":0}"#),
            (CommandKind::Ordering, r#"{"alpha":0,"beta":-1}"#),
        ];
        for (cmd, json) in bad {
            let r = RunConfig::resolve(cmd, opts(json));
            assert!(matches!(r, Err(CliError::Config(_))), "{json}: {r:?}");
        }
    }

    #[test]
    fn verify_keeps_unbound_levels_for_per_level_reporting() {
        let c = RunConfig::resolve(
            CommandKind::Verify,
            opts(r#"{"family":"J2_ECKART","s":2,"lambda":10,"levels":"0..3"}"#),
        )
        .unwrap();
        let Task::Verify { levels, opts, .. } = c.task else { panic!() };
        assert_eq!(levels.len(), 4);
        assert_eq!(opts.points, DEFAULT_VERIFY_POINTS);
        assert_eq!(c.format, Format::Json);
    }
}
