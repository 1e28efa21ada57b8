//! Benchmark harness: seeded runs over scenarios × planners × budgets,
//! anytime traces, summary statistics and CSV output.

mod output;
mod stats;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

pub use output::{
    format_float, read_traces, write_summary, write_summary_file, write_traces, write_traces_file,
};
pub use stats::{mean_ci95, summarize, Estimate, SummaryRow};

use crate::error::{PlanError, Result};
use crate::path::PathSolution;
use crate::planner::{plan_observed, PlannerConfig, PlannerKind, Termination};
use crate::trace::{MetricsTrace, Snapshot, TraceSample};
use crate::world::Scenario;

/// Budgets used when none are given, in seconds.
pub const DEFAULT_BUDGETS: [f64; 5] = [0.3, 1.0, 3.0, 10.0, 30.0];

/// Interval between trace samples in time-budget mode.
pub const POLL_INTERVAL: Duration = Duration::from_millis(100);

/// Run length limit. Time budgets run past the limit until the first
/// solution; iteration budgets are exact and fully reproducible.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Budget {
    Seconds(f64),
    Iterations(u64),
}

impl Budget {
    pub fn termination(self) -> Termination {
        match self {
            Budget::Seconds(s) => Termination::FirstSolutionThenBudget(s),
            Budget::Iterations(n) => Termination::IterationBudget(n),
        }
    }

    pub fn is_time(self) -> bool {
        matches!(self, Budget::Seconds(_))
    }

    pub fn defaults() -> Vec<Budget> {
        DEFAULT_BUDGETS
            .iter()
            .map(|&s| Budget::Seconds(s))
            .collect()
    }
}

impl Eq for Budget {}

impl Ord for Budget {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Budget::Seconds(a), Budget::Seconds(b)) => a.total_cmp(b),
            (Budget::Iterations(a), Budget::Iterations(b)) => a.cmp(b),
            (Budget::Seconds(_), Budget::Iterations(_)) => Ordering::Less,
            (Budget::Iterations(_), Budget::Seconds(_)) => Ordering::Greater,
        }
    }
}

impl PartialOrd for Budget {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Budget::Seconds(s) => write!(f, "{}s", format_float(*s)),
            Budget::Iterations(n) => write!(f, "{n}it"),
        }
    }
}

impl FromStr for Budget {
    type Err = PlanError;

    /// `3`, `3s` and `0.3s` are seconds; `5000it` is an iteration count.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || {
            PlanError::InvalidArgument(format!("bad budget `{s}`: expected e.g. 3, 3s or 5000it"))
        };
        let budget = if let Some(n) = s.strip_suffix("it") {
            Budget::Iterations(n.parse().map_err(|_| bad())?)
        } else {
            Budget::Seconds(
                s.strip_suffix('s')
                    .unwrap_or(s)
                    .parse()
                    .map_err(|_| bad())?,
            )
        };
        budget.termination().validate().map_err(|_| bad())?;
        Ok(budget)
    }
}

/// Seconds to traverse `path` at constant `speed`.
pub fn execution_time(path: &PathSolution, speed: f64) -> f64 {
    path.length() / speed
}

/// Planning time plus execution time. The planning time is the budget, or
/// the first solution time when that came later. `None` without a
/// solution.
pub fn cycle_time(budget: f64, first_solution_time: Option<f64>, exec: f64) -> Option<f64> {
    first_solution_time.map(|t| budget.max(t) + exec)
}

/// A named planner configuration to benchmark.
#[derive(Clone, Debug, PartialEq)]
pub struct PlannerSpec {
    pub label: String,
    pub kind: PlannerKind,
    pub config: PlannerConfig,
}

impl PlannerSpec {
    pub fn new(kind: PlannerKind, config: PlannerConfig) -> Self {
        PlannerSpec {
            label: kind.name().to_string(),
            kind,
            config,
        }
    }
}

/// The trace of one (scenario, planner, budget, seed) run. In iteration
/// mode `t` and `first_solution_time` count iterations, not seconds.
#[derive(Clone, Debug, PartialEq)]
pub struct RunTrace {
    pub scenario: String,
    pub planner: String,
    pub seed: u64,
    pub budget: Budget,
    pub trace: MetricsTrace,
    pub first_solution_time: Option<f64>,
}

impl RunTrace {
    pub fn final_length(&self) -> f64 {
        self.trace.final_length()
    }

    pub fn local_opt_count(&self) -> u64 {
        self.trace.last().map_or(0, |s| s.local_opt_count)
    }
}

/// Runs every combination, scenario-major, with seeds `0..seeds`.
pub fn run_benchmark(
    suite: &[Scenario],
    planners: &[PlannerSpec],
    budgets: &[Budget],
    seeds: u64,
) -> Result<Vec<RunTrace>> {
    if suite.is_empty() || planners.is_empty() || budgets.is_empty() || seeds == 0 {
        return Err(PlanError::InvalidArgument(
            "benchmark needs at least one scenario, planner, budget and seed".into(),
        ));
    }
    let mut out = Vec::new();
    for scenario in suite {
        for spec in planners {
            for &budget in budgets {
                for seed in 0..seeds {
                    out.push(run_one(scenario, spec, budget, seed)?);
                }
            }
        }
    }
    Ok(out)
}

pub fn run_one(
    scenario: &Scenario,
    spec: &PlannerSpec,
    budget: Budget,
    seed: u64,
) -> Result<RunTrace> {
    let cfg = spec.config.with_seed(seed);
    let (trace, first_solution_time) = match budget {
        Budget::Iterations(_) => iteration_trace(scenario, spec.kind, &cfg, budget)?,
        Budget::Seconds(_) => polled_trace(scenario, spec.kind, &cfg, budget)?,
    };
    trace.check_monotone().map_err(|e| {
        PlanError::Runtime(format!(
            "{} on {} (seed {seed}): {e}",
            spec.label,
            scenario.name()
        ))
    })?;
    Ok(RunTrace {
        scenario: scenario.name().to_string(),
        planner: spec.label.clone(),
        seed,
        budget,
        trace,
        first_solution_time,
    })
}

fn iteration_trace(
    scenario: &Scenario,
    kind: PlannerKind,
    cfg: &PlannerConfig,
    budget: Budget,
) -> Result<(MetricsTrace, Option<f64>)> {
    let result = plan_observed(kind, scenario, cfg, budget.termination(), None)?;
    let mut trace = MetricsTrace::default();
    for s in &result.trace.samples {
        trace.record(TraceSample {
            t: s.iteration as f64,
            ..*s
        });
    }
    let first = result.trace.first_solution_iteration.map(|i| i as f64);
    trace.first_solution_time = first;
    trace.first_solution_iteration = result.trace.first_solution_iteration;
    Ok((trace, first))
}

/// Runs the planner while a second thread samples its snapshot every
/// [`POLL_INTERVAL`], failing as soon as the best length goes up.
fn polled_trace(
    scenario: &Scenario,
    kind: PlannerKind,
    cfg: &PlannerConfig,
    budget: Budget,
) -> Result<(MetricsTrace, Option<f64>)> {
    let snapshot = Snapshot::new();
    let start = Instant::now();
    let (result, polled) = std::thread::scope(|scope| {
        let poller = scope.spawn(|| {
            let mut trace = MetricsTrace::default();
            let mut violation = None;
            loop {
                let view = snapshot.read();
                let sample = TraceSample {
                    t: start.elapsed().as_secs_f64(),
                    iteration: view.iteration,
                    best_length: view.best_cost,
                    local_opt_count: view.local_opt_count,
                };
                if let Some(last) = trace.last() {
                    if last.best_length.is_finite()
                        && sample.best_length > last.best_length
                        && violation.is_none()
                    {
                        violation = Some(format!(
                            "best length rose from {} to {} at t = {}",
                            last.best_length, sample.best_length, sample.t
                        ));
                    }
                }
                trace.record(sample);
                if view.finished {
                    break;
                }
                std::thread::sleep(POLL_INTERVAL);
            }
            (trace, violation)
        });
        let result = plan_observed(kind, scenario, cfg, budget.termination(), Some(&snapshot));
        if result.is_err() {
            snapshot.finish();
        }
        (result, poller.join().expect("poller thread panicked"))
    });
    let result = result?;
    let (mut trace, violation) = polled;
    if let Some(v) = violation {
        return Err(PlanError::Runtime(v));
    }
    trace.record(TraceSample {
        t: start.elapsed().as_secs_f64(),
        iteration: result.iterations,
        best_length: result.length().unwrap_or(f64::INFINITY),
        local_opt_count: result.local_opt_count,
    });
    trace.first_solution_time = result.first_solution_time;
    trace.first_solution_iteration = result.trace.first_solution_iteration;
    Ok((trace, result.first_solution_time))
}
