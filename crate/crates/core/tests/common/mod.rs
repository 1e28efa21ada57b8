//! Randomized property harnesses shared by the integration tests and the
//! acceptance runner.
#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use plan_core::nn::{KdIndex, LinearIndex, NearestIndex};
use plan_core::planner::{rrt_connect, RrtConnectStar};
use plan_core::shortcut::{shortcut, ShortcutBudget};
use plan_core::space::{distance, sample_uniform};
use plan_core::{
    Config, PathSolution, PlanGraph, PlannerConfig, RandomStream, Scenario, Termination,
};

/// Valid start-to-goal paths from independent RRTConnect runs.
pub fn random_valid_paths(scenario: &Scenario, count: usize, seed: u64) -> Vec<PathSolution> {
    let mut out = Vec::with_capacity(count);
    let mut k = 0;
    while out.len() < count {
        let cfg = PlannerConfig {
            range: 0.5 + (k % 4) as f64 * 0.5,
            seed: seed.wrapping_mul(1_000_003).wrapping_add(k),
            ..PlannerConfig::default()
        };
        k += 1;
        let r = rrt_connect(scenario, &cfg, Termination::IterationBudget(50_000)).unwrap();
        if let Some(p) = r.path {
            out.push(p);
        }
        assert!(
            k < 10 * count as u64 + 10,
            "{} keeps failing",
            scenario.name()
        );
    }
    out
}

#[derive(Debug, Default)]
pub struct Eq1Report {
    pub insertions: usize,
    pub violations: Vec<String>,
}

/// Interleaves planner iterations with insertions of random valid paths
/// (raw or shortcut) and records every insertion that leaves the best
/// cost above `min(before, path length) + 1e-9`.
pub fn eq1_trials(scenario: &Scenario, insertions: usize, seed: u64) -> Eq1Report {
    let pool = random_valid_paths(scenario, 12, seed);
    let mut rng = RandomStream::from_seed(seed ^ 0xE01);
    let mut planner = RrtConnectStar::new(scenario, &PlannerConfig::default().with_seed(seed));
    let mut report = Eq1Report::default();
    for n in 0..insertions {
        for _ in 0..rng.below(40) {
            planner.iterate(scenario);
        }
        let raw = &pool[rng.below(pool.len())];
        let path = if rng.unit() < 0.5 {
            let budget = ShortcutBudget::iterations(1 + rng.below(50));
            shortcut(raw, scenario, &budget, &mut rng)
        } else {
            raw.clone()
        };
        let before = planner.best_cost();
        planner.insert_path(&path, scenario).unwrap();
        let after = planner.best_cost();
        report.insertions += 1;
        let bound = before.min(path.length()) + 1e-9;
        let within = after <= bound; // false for NaN
        if !within {
            report.violations.push(format!(
                "{} insertion {n}: before {before}, path {}, after {after}",
                scenario.name(),
                path.length()
            ));
        }
        if let Err(e) = planner.start_tree().check_invariants() {
            report
                .violations
                .push(format!("{} insertion {n}: {e}", scenario.name()));
        }
    }
    report
}

/// Shortest distances from the roots over every examined edge.
pub fn dijkstra(g: &PlanGraph) -> Vec<f64> {
    let n = g.len();
    let mut adj = vec![Vec::new(); n];
    for (a, b, d) in g.examined_edges() {
        adj[a.index()].push((b.index(), d));
        adj[b.index()].push((a.index(), d));
    }
    let mut dist = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    for r in g.roots() {
        dist[r.index()] = 0.0;
        heap.push(Reverse((OrdF64(0.0), r.index())));
    }
    while let Some(Reverse((OrdF64(d), u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, w) in &adj[u] {
            if d + w < dist[v] {
                dist[v] = d + w;
                heap.push(Reverse((OrdF64(d + w), v)));
            }
        }
    }
    dist
}

#[derive(Clone, Copy, PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Grows `graphs` RRT* trees of up to `max_vertices` vertices in
/// `scenario`, with a random path insertion part way, comparing every
/// cost with the Dijkstra oracle after every insertion.
pub fn dijkstra_trials(scenario: &Scenario, graphs: u64, max_vertices: usize) -> Vec<String> {
    let mut mismatches = Vec::new();
    let paths = random_valid_paths(scenario, 4, 77);
    for seed in 0..graphs {
        let mut rng = RandomStream::from_seed(seed);
        let mut planner = RrtConnectStar::new(scenario, &PlannerConfig::default().with_seed(seed));
        let mut inserted = false;
        let mut attempts = 0;
        while planner.start_tree().len() < max_vertices && attempts < 20 * max_vertices {
            attempts += 1;
            if !inserted && planner.start_tree().len() > max_vertices / 2 {
                let p = &paths[rng.below(paths.len())];
                if planner.start_tree().len() + p.len() <= max_vertices {
                    planner.insert_path(p, scenario).unwrap();
                }
                inserted = true;
            } else {
                planner.iterate(scenario);
            }
            for g in [planner.start_tree(), planner.goal_tree()] {
                let oracle = dijkstra(g);
                for (id, v) in g.vertices() {
                    if (v.cost_to_come - oracle[id.index()]).abs() > 1e-9 {
                        mismatches.push(format!(
                            "{} seed {seed}: vertex {} cost {} vs oracle {}",
                            scenario.name(),
                            id.index(),
                            v.cost_to_come,
                            oracle[id.index()]
                        ));
                    }
                }
            }
        }
    }
    mismatches
}

/// k-d tree against linear scan on random inserts and queries in several
/// dimensions. Returns mismatch descriptions.
pub fn nn_trials(queries: usize, seed: u64) -> Vec<String> {
    let mut rng = RandomStream::from_seed(seed);
    let mut mismatches = Vec::new();
    let dims = [2usize, 4, 6];
    let per_dim = queries.div_ceil(dims.len());
    for &d in &dims {
        let mut kd = KdIndex::new(d);
        let mut lin = LinearIndex::new(d);
        let point = |rng: &mut RandomStream| -> Config {
            // a coarse grid component forces exact ties now and then
            Config::new(
                (0..d)
                    .map(|_| {
                        if rng.unit() < 0.2 {
                            rng.below(5) as f64
                        } else {
                            rng.unit() * 4.0
                        }
                    })
                    .collect(),
            )
        };
        for q in 0..per_dim {
            if q % 2 == 0 || kd.is_empty() {
                let p = point(&mut rng);
                let id = kd.len();
                kd.insert(id, &p);
                lin.insert(id, &p);
            }
            let x = point(&mut rng);
            if kd.nearest(&x) != lin.nearest(&x) {
                mismatches.push(format!(
                    "d={d} nearest {x:?}: {:?} vs {:?}",
                    kd.nearest(&x),
                    lin.nearest(&x)
                ));
            }
            let r = rng.unit() * 1.5;
            if kd.near(&x, r) != lin.near(&x, r) {
                mismatches.push(format!("d={d} near {x:?} r={r}"));
            }
        }
    }
    mismatches
}

#[derive(Debug, Default)]
pub struct ShortcutReport {
    pub paths: usize,
    pub violations: Vec<String>,
}

/// Shortcuts random valid paths (RRTConnect output with random detours
/// spliced in) and checks length, validity and endpoints.
pub fn shortcut_trials(scenario: &Scenario, paths: usize, seed: u64) -> ShortcutReport {
    let pool = random_valid_paths(scenario, 25, seed);
    let mut rng = RandomStream::from_seed(seed ^ 0x5C);
    let mut report = ShortcutReport::default();
    for n in 0..paths {
        let base = &pool[n % pool.len()];
        let path = with_detours(base, scenario, &mut rng);
        let budget = ShortcutBudget::for_path(1.0 + rng.unit() * 4.0, path.len()).unwrap();
        let out = shortcut(&path, scenario, &budget, &mut rng);
        report.paths += 1;
        let tag = format!("{} path {n}", scenario.name());
        if out.length() > path.length() {
            report.violations.push(format!(
                "{tag}: length {} > {}",
                out.length(),
                path.length()
            ));
        }
        if !out.is_motion_valid(scenario) {
            report.violations.push(format!("{tag}: invalid segment"));
        }
        if out.first() != path.first() || out.last() != path.last() {
            report.violations.push(format!("{tag}: endpoints moved"));
        }
    }
    report
}

/// Inserts out-and-back excursions to random valid states, keeping the
/// path valid but giving shortcutting something to remove.
fn with_detours(p: &PathSolution, scenario: &Scenario, rng: &mut RandomStream) -> PathSolution {
    let mut pts = Vec::new();
    for (i, q) in p.configs().iter().enumerate() {
        pts.push(q.clone());
        if i + 1 < p.len() && rng.unit() < 0.3 {
            let x = sample_uniform(scenario.space(), rng);
            let step = (0.5 / distance(q, &x).max(1e-9)).min(1.0);
            let y = plan_core::space::interpolate(q, &x, step).unwrap();
            if scenario.motion_valid(q, &y) {
                pts.push(y);
                pts.push(q.clone());
            }
        }
    }
    PathSolution::new(pts).unwrap()
}
