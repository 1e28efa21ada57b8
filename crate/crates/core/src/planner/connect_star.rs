use crate::graph::{default_gamma, NeighborhoodRule, PlanGraph, VertexId, DUPLICATE_EPS};
use crate::path::PathSolution;
use crate::shortcut::{shortcut, ShortcutBudget};
use crate::space::{distance, sample_uniform, Config, RandomStream};
use crate::world::Scenario;

use super::connect::join;
use super::{
    focus_heuristic, plan, sample_informed_goals, steer, Heuristics, PlanResult, PlannerConfig,
    PlannerKind, RunClock, Termination,
};

/// What a single iteration did.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IterationOutcome {
    /// The steered state could not beat the current best.
    Rejected,
    /// The extension collided or landed on an existing vertex.
    Trapped,
    /// The active tree grew but the other tree did not reach it.
    Extended,
    /// The trees met. `improved` is set when the joined path beat the best.
    Connected { improved: bool },
}

enum Step {
    Rejected,
    Trapped,
    Added(VertexId),
}

/// Bidirectional RRT* state: a start tree that tracks goal vertices and a
/// goal forest. Connections are written back into the start tree, which
/// owns the best solution.
pub struct RrtConnectStar {
    start_tree: PlanGraph,
    goal_tree: PlanGraph,
    rng: RandomStream,
    range: f64,
    heuristics: Heuristics,
    start_active: bool,
}

impl RrtConnectStar {
    pub fn new(scenario: &Scenario, cfg: &PlannerConfig) -> Self {
        let rule = NeighborhoodRule {
            gamma: cfg
                .gamma_override
                .unwrap_or_else(|| default_gamma(scenario.space())),
            range: cfg.range,
        };
        let start_tree = PlanGraph::new(scenario.start().clone(), scenario.goals().to_vec(), rule);
        let goal_tree =
            PlanGraph::forest(scenario.goals().to_vec(), rule).expect("scenarios have goals");
        RrtConnectStar {
            start_tree,
            goal_tree,
            rng: RandomStream::from_seed(cfg.seed),
            range: cfg.range,
            heuristics: cfg.heuristics,
            start_active: true,
        }
    }

    pub fn best_cost(&self) -> f64 {
        self.start_tree.best_cost()
    }

    pub fn best_path(&self) -> Option<PathSolution> {
        self.start_tree.best_path()
    }

    pub fn start_tree(&self) -> &PlanGraph {
        &self.start_tree
    }

    pub fn goal_tree(&self) -> &PlanGraph {
        &self.goal_tree
    }

    pub fn vertex_count(&self) -> usize {
        self.start_tree.len() + self.goal_tree.len()
    }

    /// Checks both trees after every mutation from now on.
    pub fn enable_audit(&mut self) {
        self.start_tree.enable_audit();
        self.goal_tree.enable_audit();
    }

    pub fn rng_mut(&mut self) -> &mut RandomStream {
        &mut self.rng
    }

    /// Writes `path` into the start tree. See [`PlanGraph::insert_path`].
    pub fn insert_path(&mut self, path: &PathSolution, scenario: &Scenario) -> crate::Result<()> {
        self.start_tree.insert_path(path, scenario)
    }

    pub fn iterate(&mut self, scenario: &Scenario) -> IterationOutcome {
        let c_best = self.best_cost();
        let x = if self.heuristics.informed_sampling && c_best.is_finite() {
            sample_informed_goals(
                scenario.start(),
                scenario.goals(),
                c_best,
                scenario.space(),
                &mut self.rng,
            )
        } else {
            sample_uniform(scenario.space(), &mut self.rng)
        };
        let growth = Growth {
            scenario,
            range: self.range,
            heuristics: self.heuristics,
            c_best,
        };
        let start_active = self.start_active;
        self.start_active = !start_active;
        let (a, b) = if start_active {
            (&mut self.start_tree, &mut self.goal_tree)
        } else {
            (&mut self.goal_tree, &mut self.start_tree)
        };
        let v = match growth.step(a, &x) {
            Step::Rejected => return IterationOutcome::Rejected,
            Step::Trapped => return IterationOutcome::Trapped,
            Step::Added(v) => v,
        };
        let target = a.config(v).clone();
        let Some(w) = growth.connect(b, &target) else {
            return IterationOutcome::Extended;
        };
        let path = if start_active {
            join(&self.start_tree, v, &self.goal_tree, w)
        } else {
            join(&self.start_tree, w, &self.goal_tree, v)
        };
        let improved = path.length() < c_best - DUPLICATE_EPS;
        if improved {
            self.start_tree
                .insert_path(&path, scenario)
                .expect("joined paths start at the root");
        }
        IterationOutcome::Connected { improved }
    }
}

struct Growth<'s> {
    scenario: &'s Scenario,
    range: f64,
    heuristics: Heuristics,
    c_best: f64,
}

impl Growth<'_> {
    fn rejects(&self, q: &Config) -> bool {
        self.heuristics.sample_rejection
            && self.c_best.is_finite()
            && focus_heuristic(self.scenario, q) >= self.c_best
    }

    /// Steers `tree` one step toward `target` and inserts with rewiring.
    fn step(&self, tree: &mut PlanGraph, target: &Config) -> Step {
        let near = tree.nearest(target).expect("trees always hold a root");
        let from = tree.config(near);
        let q = steer(from, target, self.range);
        if distance(from, &q) < DUPLICATE_EPS {
            return Step::Trapped;
        }
        if self.rejects(&q) {
            return Step::Rejected;
        }
        if !self.scenario.motion_valid(from, &q) {
            return Step::Trapped;
        }
        Step::Added(tree.rewire_insert(q, self.scenario))
    }

    /// Steps `tree` toward `target` until it lands there or stalls.
    fn connect(&self, tree: &mut PlanGraph, target: &Config) -> Option<VertexId> {
        loop {
            let near = tree.nearest(target).expect("trees always hold a root");
            if distance(tree.config(near), target) < DUPLICATE_EPS {
                return Some(near);
            }
            if !matches!(self.step(tree, target), Step::Added(_)) {
                return None;
            }
        }
    }
}

pub(crate) fn run(
    scenario: &Scenario,
    cfg: &PlannerConfig,
    mut clock: RunClock<'_>,
    with_shortcut: bool,
) -> PlanResult {
    let mut planner = RrtConnectStar::new(scenario, cfg);
    let mut c_last_opt = f64::INFINITY;
    let mut local_opts = 0u64;
    while clock.should_continue(planner.best_cost().is_finite()) {
        clock.tick();
        planner.iterate(scenario);
        let c_best = planner.best_cost();
        if with_shortcut && c_best.is_finite() {
            let ratio = if c_last_opt.is_finite() {
                (c_last_opt - c_best) / c_last_opt
            } else {
                1.0
            };
            if ratio > cfg.opt_threshold {
                let best = planner.best_path().expect("finite best cost has a path");
                let budget = ShortcutBudget::for_path(cfg.scf, best.len()).expect("validated scf");
                let short = shortcut(&best, scenario, &budget, planner.rng_mut());
                planner
                    .insert_path(&short, scenario)
                    .expect("shortcut keeps the start");
                c_last_opt = c_best;
                local_opts += 1;
            }
        }
        clock.observe(planner.best_cost(), local_opts);
        clock.publish_vertices(planner.vertex_count());
    }
    clock.finish(planner.best_path(), local_opts)
}

/// Bidirectional RRT* with informed sampling and sample rejection.
pub fn rrt_connect_star(
    scenario: &Scenario,
    cfg: &PlannerConfig,
    termination: Termination,
) -> crate::Result<PlanResult> {
    plan(PlannerKind::RrtConnectStar, scenario, cfg, termination)
}

/// RRTConnect* that shortcuts its best path and reinserts it whenever the
/// cost has dropped by more than `opt_threshold` since the last time.
pub fn rrt_connect_star_s(
    scenario: &Scenario,
    cfg: &PlannerConfig,
    termination: Termination,
) -> crate::Result<PlanResult> {
    plan(PlannerKind::RrtConnectStarS, scenario, cfg, termination)
}
