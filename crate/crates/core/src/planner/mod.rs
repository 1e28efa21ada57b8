//! The planner family: feasible RRTConnect with and without shortcutting,
//! multiple restarts of it, the asymptotically optimal RRTConnect*, and
//! RRTConnect* with shortcut-path reinsertion.

mod connect;
mod connect_star;
mod preset;
mod restart;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

pub use connect::rrt_connect;
pub use connect_star::{rrt_connect_star, rrt_connect_star_s, IterationOutcome, RrtConnectStar};
pub use preset::{make_preset, preset_table, Preset, PresetRow};
pub use restart::{m_rrt_connect_s, restart_seed, rrt_connect_s};

use crate::error::{PlanError, Result};
use crate::path::PathSolution;
use crate::space::{
    distance, lerp, sample_informed, Config, InformedRegion, RandomStream, SpaceBounds,
};
use crate::trace::{MetricsTrace, Snapshot, TraceSample};
use crate::world::Scenario;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Heuristics {
    /// Sample the informed hyperspheroid once a solution exists.
    pub informed_sampling: bool,
    /// Reject new states whose straight-line heuristic cannot beat the
    /// current best.
    pub sample_rejection: bool,
}

impl Default for Heuristics {
    fn default() -> Self {
        Heuristics {
            informed_sampling: true,
            sample_rejection: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlannerConfig {
    /// Steering step in configuration-space units.
    pub range: f64,
    /// Replaces the bounds-derived rewiring constant when set.
    pub gamma_override: Option<f64>,
    /// Relative improvement that triggers another local optimisation.
    pub opt_threshold: f64,
    /// Shortcut count factor: iterations per path vertex.
    pub scf: f64,
    pub heuristics: Heuristics,
    pub seed: u64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            range: 1.0,
            gamma_override: None,
            opt_threshold: 0.01,
            scf: 3.0,
            heuristics: Heuristics::default(),
            seed: 0,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.range.is_finite() && self.range > 0.0) {
            return Err(PlanError::InvalidArgument(format!(
                "range must be positive, got {}",
                self.range
            )));
        }
        if !(0.0..1.0).contains(&self.opt_threshold) {
            return Err(PlanError::InvalidArgument(format!(
                "opt_threshold must lie in [0, 1), got {}",
                self.opt_threshold
            )));
        }
        if !(self.scf.is_finite() && self.scf > 0.0) {
            return Err(PlanError::InvalidArgument(format!(
                "scf must be positive, got {}",
                self.scf
            )));
        }
        if let Some(g) = self.gamma_override {
            if !(g.is_finite() && g > 0.0) {
                return Err(PlanError::InvalidArgument(format!(
                    "gamma must be positive, got {g}"
                )));
            }
        }
        Ok(())
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        PlannerConfig {
            seed,
            ..self.clone()
        }
    }
}

/// When a planner run stops.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Termination {
    TimeBudget(f64),
    IterationBudget(u64),
    /// Runs for the budget, or past it until the first solution. The
    /// overrun is capped at [`OVERRUN_CAP`] times the budget.
    FirstSolutionThenBudget(f64),
}

/// Hard limit on how far a first-solution overrun may extend a time budget.
pub const OVERRUN_CAP: f64 = 20.0;

impl Termination {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Termination::TimeBudget(s) | Termination::FirstSolutionThenBudget(s) => {
                s.is_finite() && s > 0.0
            }
            Termination::IterationBudget(n) => n > 0,
        };
        if ok {
            Ok(())
        } else {
            Err(PlanError::InvalidArgument(format!(
                "termination budget must be positive: {self:?}"
            )))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlanResult {
    pub path: Option<PathSolution>,
    pub trace: MetricsTrace,
    pub local_opt_count: u64,
    pub first_solution_time: Option<f64>,
    pub iterations: u64,
    /// Wall-clock seconds the run took.
    pub planning_time: f64,
}

impl PlanResult {
    pub fn length(&self) -> Option<f64> {
        self.path.as_ref().map(PathSolution::length)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PlannerKind {
    RrtConnect,
    RrtConnectS,
    MRrtConnectS,
    RrtConnectStar,
    RrtConnectStarS,
}

impl PlannerKind {
    pub const ALL: [PlannerKind; 5] = [
        PlannerKind::RrtConnect,
        PlannerKind::RrtConnectS,
        PlannerKind::MRrtConnectS,
        PlannerKind::RrtConnectStar,
        PlannerKind::RrtConnectStarS,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PlannerKind::RrtConnect => "rrt-connect",
            PlannerKind::RrtConnectS => "rrt-connect-s",
            PlannerKind::MRrtConnectS => "m-rrt-connect-s",
            PlannerKind::RrtConnectStar => "rrt-connect-star",
            PlannerKind::RrtConnectStarS => "rrt-connect-star-s",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            PlannerKind::RrtConnect => "RRTConnect",
            PlannerKind::RrtConnectS => "RRTConnect+S",
            PlannerKind::MRrtConnectS => "MRRTConnect+S",
            PlannerKind::RrtConnectStar => "RRTConnect*",
            PlannerKind::RrtConnectStarS => "RRTConnect*+S",
        }
    }
}

impl fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PlannerKind {
    type Err = PlanError;

    /// Accepts the kebab-case names and the display names, ignoring case.
    fn from_str(s: &str) -> Result<Self> {
        PlannerKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s) || k.display_name().eq_ignore_ascii_case(s))
            .ok_or_else(|| PlanError::UnknownName {
                what: "planner",
                name: s.to_string(),
            })
    }
}

pub fn plan(
    kind: PlannerKind,
    scenario: &Scenario,
    cfg: &PlannerConfig,
    termination: Termination,
) -> Result<PlanResult> {
    plan_observed(kind, scenario, cfg, termination, None)
}

/// Runs a planner, publishing progress to `snapshot` if given.
pub fn plan_observed(
    kind: PlannerKind,
    scenario: &Scenario,
    cfg: &PlannerConfig,
    termination: Termination,
    snapshot: Option<&Snapshot>,
) -> Result<PlanResult> {
    cfg.validate()?;
    termination.validate()?;
    let clock = RunClock::new(termination, snapshot);
    let result = match kind {
        PlannerKind::RrtConnect => connect::run_rrt_connect(scenario, cfg, clock),
        PlannerKind::RrtConnectS => restart::run_rrt_connect_s(scenario, cfg, clock),
        PlannerKind::MRrtConnectS => restart::run_m_rrt_connect_s(scenario, cfg, clock),
        PlannerKind::RrtConnectStar => connect_star::run(scenario, cfg, clock, false),
        PlannerKind::RrtConnectStarS => connect_star::run(scenario, cfg, clock, true),
    };
    if let Some(s) = snapshot {
        s.finish();
    }
    Ok(result)
}

/// Termination bookkeeping plus the planner-side event trace.
pub(crate) struct RunClock<'a> {
    start: Instant,
    termination: Termination,
    iterations: u64,
    snapshot: Option<&'a Snapshot>,
    trace: MetricsTrace,
    best: f64,
    local_opts: u64,
}

impl<'a> RunClock<'a> {
    pub(crate) fn new(termination: Termination, snapshot: Option<&'a Snapshot>) -> Self {
        let mut trace = MetricsTrace::default();
        trace.samples.push(TraceSample {
            t: 0.0,
            iteration: 0,
            best_length: f64::INFINITY,
            local_opt_count: 0,
        });
        RunClock {
            start: Instant::now(),
            termination,
            iterations: 0,
            snapshot,
            trace,
            best: f64::INFINITY,
            local_opts: 0,
        }
    }

    pub(crate) fn elapsed(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }

    pub(crate) fn should_continue(&self, has_solution: bool) -> bool {
        match self.termination {
            Termination::IterationBudget(n) => self.iterations < n,
            Termination::TimeBudget(s) => self.elapsed() < s,
            Termination::FirstSolutionThenBudget(s) => {
                let t = self.elapsed();
                t < s || (!has_solution && t < s * OVERRUN_CAP)
            }
        }
    }

    pub(crate) fn tick(&mut self) {
        self.iterations += 1;
        if let Some(s) = self.snapshot {
            s.set_iteration(self.iterations);
        }
    }

    /// Records the current best length and local-optimisation count.
    pub(crate) fn observe(&mut self, best: f64, local_opts: u64) {
        let best = best.min(self.best);
        if best == self.best && local_opts == self.local_opts {
            return;
        }
        let t = self.elapsed();
        if best.is_finite() && self.trace.first_solution_time.is_none() {
            self.trace.first_solution_time = Some(t);
            self.trace.first_solution_iteration = Some(self.iterations);
        }
        self.best = best;
        self.local_opts = local_opts;
        let sample = TraceSample {
            t,
            iteration: self.iterations,
            best_length: best,
            local_opt_count: local_opts,
        };
        // keep one sample per iteration
        match self.trace.samples.last_mut() {
            Some(last) if last.iteration == sample.iteration && last.iteration > 0 => {
                *last = sample
            }
            _ => self.trace.samples.push(sample),
        }
        if let Some(s) = self.snapshot {
            s.set_best_cost(best);
            s.set_local_opt_count(local_opts);
        }
    }

    pub(crate) fn publish_vertices(&self, n: usize) {
        if let Some(s) = self.snapshot {
            s.set_vertex_count(n);
        }
    }

    pub(crate) fn finish(self, path: Option<PathSolution>, local_opt_count: u64) -> PlanResult {
        let planning_time = self.elapsed();
        let first_solution_time = self.trace.first_solution_time;
        PlanResult {
            path,
            trace: self.trace,
            local_opt_count,
            first_solution_time,
            iterations: self.iterations,
            planning_time,
        }
    }
}

/// Moves from `from` toward `to` by at most `range`.
pub(crate) fn steer(from: &Config, to: &Config, range: f64) -> Config {
    let d = distance(from, to);
    if d <= range {
        to.clone()
    } else {
        lerp(from, to, range / d)
    }
}

/// Admissible straight-line cost of any start-goal path through `x`.
pub(crate) fn focus_heuristic(scenario: &Scenario, x: &Config) -> f64 {
    distance(scenario.start(), x)
        + scenario
            .goals()
            .iter()
            .map(|g| distance(x, g))
            .fold(f64::INFINITY, f64::min)
}

/// Uniform sample over the union of the informed hyperspheroids of every
/// goal, intersected with the bounds.
pub(crate) fn sample_informed_goals(
    start: &Config,
    goals: &[Config],
    c_best: f64,
    bounds: &SpaceBounds,
    rng: &mut RandomStream,
) -> Config {
    let regions: Vec<InformedRegion> = goals
        .iter()
        .filter(|g| distance(start, g) <= c_best)
        .map(|g| InformedRegion {
            start: start.clone(),
            goal: g.clone(),
            c_best,
        })
        .collect();
    match regions.len() {
        0 => crate::space::sample_uniform(bounds, rng),
        1 => sample_informed(&regions[0], bounds, rng),
        _ => {
            let weights: Vec<f64> = regions
                .iter()
                .map(InformedRegion::relative_volume)
                .collect();
            let total: f64 = weights.iter().sum();
            let mut x = sample_informed(&regions[0], bounds, rng);
            for _ in 0..1000 {
                let mut pick = rng.unit() * total;
                let mut k = 0;
                while k + 1 < regions.len() && pick >= weights[k] {
                    pick -= weights[k];
                    k += 1;
                }
                x = sample_informed(&regions[k], bounds, rng);
                // thin overlaps so the union is covered uniformly
                let cover = regions.iter().filter(|r| r.contains(&x)).count().max(1);
                if rng.unit() * cover as f64 <= 1.0 {
                    break;
                }
            }
            x
        }
    }
}
