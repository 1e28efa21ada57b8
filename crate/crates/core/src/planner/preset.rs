use std::fmt;
use std::str::FromStr;

use crate::error::{PlanError, Result};

use super::{PlannerConfig, PlannerKind};

/// Tuned parameter sets for the two reference environments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Preset {
    Vine,
    Cubicle,
}

impl Preset {
    pub const ALL: [Preset; 2] = [Preset::Vine, Preset::Cubicle];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Vine => "vine",
            Preset::Cubicle => "cubicle",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = PlanError;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| PlanError::UnknownName {
                what: "preset",
                name: s.to_string(),
            })
    }
}

/// One row of a preset table. `None` marks a parameter the planner lacks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PresetRow {
    pub planner: PlannerKind,
    pub range: f64,
    pub scf: Option<f64>,
    pub opt_threshold: Option<f64>,
}

const fn row(
    planner: PlannerKind,
    range: f64,
    scf: Option<f64>,
    opt_threshold: Option<f64>,
) -> PresetRow {
    PresetRow {
        planner,
        range,
        scf,
        opt_threshold,
    }
}

const VINE: [PresetRow; 4] = [
    row(PlannerKind::RrtConnectStar, 2.5, None, None),
    row(PlannerKind::RrtConnectStarS, 2.5, Some(3.0), Some(0.01)),
    row(PlannerKind::RrtConnectS, 0.5, Some(4.0), None),
    row(PlannerKind::MRrtConnectS, 0.5, Some(4.0), None),
];

const CUBICLE: [PresetRow; 4] = [
    row(PlannerKind::RrtConnectStar, 0.5, None, None),
    row(PlannerKind::RrtConnectStarS, 3.0, Some(3.0), Some(0.11)),
    row(PlannerKind::RrtConnectS, 0.5, Some(3.0), None),
    row(PlannerKind::MRrtConnectS, 0.5, Some(3.0), None),
];

pub fn preset_table(preset: Preset) -> &'static [PresetRow] {
    match preset {
        Preset::Vine => &VINE,
        Preset::Cubicle => &CUBICLE,
    }
}

/// Planner configuration for `planner` under the named preset. Plain
/// RRTConnect borrows the range of the RRTConnect+S row.
pub fn make_preset(name: &str, planner: PlannerKind) -> Result<PlannerConfig> {
    let preset: Preset = name.parse()?;
    let lookup = match planner {
        PlannerKind::RrtConnect => PlannerKind::RrtConnectS,
        k => k,
    };
    let r = preset_table(preset)
        .iter()
        .find(|r| r.planner == lookup)
        .expect("every planner has a preset row");
    let base = PlannerConfig::default();
    Ok(PlannerConfig {
        range: r.range,
        scf: r.scf.unwrap_or(base.scf),
        opt_threshold: r.opt_threshold.unwrap_or(base.opt_threshold),
        ..base
    })
}
