use crate::graph::{NeighborhoodRule, PlanGraph, VertexId, DUPLICATE_EPS};
use crate::path::PathSolution;
use crate::space::{distance, sample_uniform, RandomStream};
use crate::world::Scenario;

use super::{steer, PlanResult, PlannerConfig, RunClock, Termination};

pub(crate) enum Extend {
    Trapped,
    Advanced(VertexId),
    Reached(VertexId),
}

/// One RRT extension of `tree` toward `target` without rewiring.
fn extend(
    tree: &mut PlanGraph,
    scenario: &Scenario,
    target: &crate::space::Config,
    range: f64,
) -> Extend {
    let near = tree.nearest(target).expect("trees always hold a root");
    let from = tree.config(near);
    if distance(from, target) < DUPLICATE_EPS {
        return Extend::Reached(near);
    }
    let q = steer(from, target, range);
    if !scenario.motion_valid(from, &q) {
        return Extend::Trapped;
    }
    let reached = distance(&q, target) < DUPLICATE_EPS;
    let v = tree.add_leaf(q, near);
    if reached {
        Extend::Reached(v)
    } else {
        Extend::Advanced(v)
    }
}

fn connect(
    tree: &mut PlanGraph,
    scenario: &Scenario,
    target: &crate::space::Config,
    range: f64,
) -> Extend {
    loop {
        match extend(tree, scenario, target, range) {
            Extend::Advanced(_) => continue,
            other => return other,
        }
    }
}

/// Path through the two trees meeting at `s` (start tree) and `g` (goal
/// forest), whose configs coincide.
pub(crate) fn join(start: &PlanGraph, s: VertexId, goal: &PlanGraph, g: VertexId) -> PathSolution {
    let mut configs = start.path_to(s);
    let mut tail = goal.path_to(g);
    tail.reverse();
    configs.extend(tail.into_iter().skip(1));
    if configs.len() < 2 {
        configs.push(configs[0].clone());
    }
    PathSolution::new(configs).expect("joined path has two or more vertices")
}

/// Bidirectional RRT: alternately extend one tree toward a random sample
/// and connect the other tree to the new vertex. Returns the first path.
pub(crate) fn connect_until_solved(
    scenario: &Scenario,
    range: f64,
    rng: &mut RandomStream,
    clock: &mut RunClock<'_>,
    has_solution: bool,
) -> Option<PathSolution> {
    // neighborhoods are never queried by plain RRT
    let rule = NeighborhoodRule { gamma: 1.0, range };
    let mut start = PlanGraph::new(scenario.start().clone(), Vec::new(), rule);
    let mut goal =
        PlanGraph::forest(scenario.goals().to_vec(), rule).expect("scenarios have goals");
    // trivially solved when the start is itself a goal
    if let Some(g) = goal.find(scenario.start()) {
        return Some(join(&start, start.root(), &goal, g));
    }
    let mut start_active = true;
    while clock.should_continue(has_solution) {
        clock.tick();
        let x = sample_uniform(scenario.space(), rng);
        let (a, b) = if start_active {
            (&mut start, &mut goal)
        } else {
            (&mut goal, &mut start)
        };
        if let Extend::Advanced(v) | Extend::Reached(v) = extend(a, scenario, &x, range) {
            let target = a.config(v).clone();
            if let Extend::Reached(w) = connect(b, scenario, &target, range) {
                let path = if start_active {
                    join(&start, v, &goal, w)
                } else {
                    join(&start, w, &goal, v)
                };
                clock.publish_vertices(start.len() + goal.len());
                return Some(path);
            }
        }
        start_active = !start_active;
    }
    None
}

pub(crate) fn run_rrt_connect(
    scenario: &Scenario,
    cfg: &PlannerConfig,
    mut clock: RunClock<'_>,
) -> PlanResult {
    let mut rng = RandomStream::from_seed(cfg.seed);
    let path = connect_until_solved(scenario, cfg.range, &mut rng, &mut clock, false);
    if let Some(p) = &path {
        clock.observe(p.length(), 0);
    }
    clock.finish(path, 0)
}

/// Feasible bidirectional RRT; stops at the first solution.
pub fn rrt_connect(
    scenario: &Scenario,
    cfg: &PlannerConfig,
    termination: Termination,
) -> crate::Result<PlanResult> {
    super::plan(super::PlannerKind::RrtConnect, scenario, cfg, termination)
}
