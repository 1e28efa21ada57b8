//! The planner's tree: vertices with parent links and cost-to-come, RRT*
//! insertion with rewiring, and reinsertion of whole paths.
//!
//! Every collision-free edge the tree examines is remembered. Whenever a
//! vertex's cost drops, the decrease is relaxed through those edges as well
//! as through its subtree, so at rest every cost-to-come equals the
//! shortest-path distance from the roots over the examined edges.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::io::{self, Write};

use crate::error::{PlanError, Result};
use crate::nn::{KdIndex, NearestIndex};
use crate::path::PathSolution;
use crate::space::{distance, unit_ball_volume, Config, SpaceBounds};
use crate::trace::Snapshot;
use crate::world::Scenario;

/// Two configs closer than this are the same vertex.
pub const DUPLICATE_EPS: f64 = 1e-12;

/// A cost must drop by more than this for a re-parenting to happen.
const RELAX_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(usize);

impl VertexId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Clone, Debug)]
pub struct Vertex {
    pub config: Config,
    pub parent: Option<VertexId>,
    pub cost_to_come: f64,
    pub children: Vec<VertexId>,
    parent_dist: f64,
}

/// `min(range, gamma * (ln(max(n, 2)) / n)^(1/d))`.
pub fn neighborhood_radius(n: usize, d: usize, gamma: f64, range: f64) -> f64 {
    let n = n.max(1) as f64;
    let r = gamma * ((n.max(2.0)).ln() / n).powf(1.0 / d as f64);
    r.min(range)
}

/// `2 (1 + 1/d)^(1/d) (mu / zeta_d)^(1/d)` with `mu` the bounding-box measure.
pub fn default_gamma(bounds: &SpaceBounds) -> f64 {
    let d = bounds.dim() as f64;
    2.0 * (1.0 + 1.0 / d).powf(1.0 / d)
        * (bounds.measure() / unit_ball_volume(bounds.dim())).powf(1.0 / d)
}

/// How the neighborhood radius shrinks with the vertex count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NeighborhoodRule {
    pub gamma: f64,
    pub range: f64,
}

impl NeighborhoodRule {
    pub fn for_bounds(bounds: &SpaceBounds, range: f64) -> Self {
        NeighborhoodRule {
            gamma: default_gamma(bounds),
            range,
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Pending(f64, VertexId);

impl Eq for Pending {}

impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Pending {
    // reversed: BinaryHeap pops the cheapest first
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

/// Outcome of invariant checks run after every mutation while auditing.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Audit {
    pub checks: u64,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct PlanGraph {
    dim: usize,
    vertices: Vec<Vertex>,
    roots: Vec<VertexId>,
    index: KdIndex,
    edges: Vec<Vec<(VertexId, f64)>>,
    goals: Vec<Config>,
    goal_ids: Vec<VertexId>,
    rule: NeighborhoodRule,
    audit: Option<Audit>,
}

impl PlanGraph {
    /// Tree rooted at `root`. Vertices landing on any of `goals` are
    /// tracked as goal vertices.
    pub fn new(root: Config, goals: Vec<Config>, rule: NeighborhoodRule) -> Self {
        let mut g = PlanGraph::empty(root.dim(), goals, rule);
        g.add_root(root);
        g
    }

    /// A forest of zero-cost roots, treated as one tree under a virtual root.
    pub fn forest(roots: Vec<Config>, rule: NeighborhoodRule) -> Result<Self> {
        let dim = roots
            .first()
            .map(Config::dim)
            .ok_or_else(|| PlanError::Contract("forest needs at least one root".into()))?;
        let mut g = PlanGraph::empty(dim, Vec::new(), rule);
        for r in roots {
            if r.dim() != dim {
                return Err(PlanError::DimensionMismatch {
                    expected: dim,
                    actual: r.dim(),
                });
            }
            g.add_root(r);
        }
        Ok(g)
    }

    fn empty(dim: usize, goals: Vec<Config>, rule: NeighborhoodRule) -> Self {
        PlanGraph {
            dim,
            vertices: Vec::new(),
            roots: Vec::new(),
            index: KdIndex::new(dim),
            edges: Vec::new(),
            goals,
            goal_ids: Vec::new(),
            rule,
            audit: None,
        }
    }

    fn add_root(&mut self, q: Config) -> VertexId {
        let id = self.push_vertex(q, None, 0.0, 0.0);
        self.roots.push(id);
        id
    }

    fn push_vertex(
        &mut self,
        q: Config,
        parent: Option<VertexId>,
        cost: f64,
        parent_dist: f64,
    ) -> VertexId {
        let id = VertexId(self.vertices.len());
        self.index.insert(id.0, &q);
        if self.goals.iter().any(|g| distance(g, &q) < DUPLICATE_EPS) {
            self.goal_ids.push(id);
        }
        self.vertices.push(Vertex {
            config: q,
            parent,
            cost_to_come: cost,
            children: Vec::new(),
            parent_dist,
        });
        self.edges.push(Vec::new());
        if let Some(p) = parent {
            self.vertices[p.0].children.push(id);
            self.record_edge(p, id, parent_dist);
        }
        id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn rule(&self) -> NeighborhoodRule {
        self.rule
    }

    pub fn vertex(&self, id: VertexId) -> &Vertex {
        &self.vertices[id.0]
    }

    pub fn vertices(&self) -> impl Iterator<Item = (VertexId, &Vertex)> {
        self.vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (VertexId(i), v))
    }

    pub fn roots(&self) -> &[VertexId] {
        &self.roots
    }

    /// The first root; for a start tree, the start vertex.
    pub fn root(&self) -> VertexId {
        self.roots[0]
    }

    pub fn goal_ids(&self) -> &[VertexId] {
        &self.goal_ids
    }

    pub fn id_from_index(&self, i: usize) -> Option<VertexId> {
        (i < self.vertices.len()).then_some(VertexId(i))
    }

    pub fn cost(&self, id: VertexId) -> f64 {
        self.vertices[id.0].cost_to_come
    }

    pub fn config(&self, id: VertexId) -> &Config {
        &self.vertices[id.0].config
    }

    /// Radius used for an insertion that makes the graph `n` vertices big.
    pub fn radius_for(&self, n: usize) -> f64 {
        neighborhood_radius(n, self.dim, self.rule.gamma, self.rule.range)
    }

    pub fn nearest(&self, q: &Config) -> Result<VertexId> {
        self.index
            .nearest(q)
            .map(|(i, _)| VertexId(i))
            .ok_or_else(|| PlanError::Contract("nearest query on an empty graph".into()))
    }

    pub fn near(&self, q: &Config, r: f64) -> Vec<VertexId> {
        self.index.near(q, r).into_iter().map(VertexId).collect()
    }

    /// Vertex whose config coincides with `q`, if any.
    pub fn find(&self, q: &Config) -> Option<VertexId> {
        self.index
            .nearest(q)
            .filter(|(_, d)| *d < DUPLICATE_EPS)
            .map(|(i, _)| VertexId(i))
    }

    /// Plain tree extension: `q` hangs off `parent` with no rewiring. The
    /// caller has checked the edge.
    pub fn add_leaf(&mut self, q: Config, parent: VertexId) -> VertexId {
        let d = distance(self.config(parent), &q);
        let cost = self.cost(parent) + d;
        let id = self.push_vertex(q, Some(parent), cost, d);
        self.audit_point("add_leaf");
        id
    }

    /// RRT* insertion of a steered config. The caller guarantees that the
    /// motion from the nearest vertex to `q` is valid.
    pub fn rewire_insert(&mut self, q: Config, scenario: &Scenario) -> VertexId {
        let r = self.radius_for(self.len() + 1);
        self.rewire_insert_with_radius(q, scenario, r)
    }

    pub fn rewire_insert_with_radius(
        &mut self,
        q: Config,
        scenario: &Scenario,
        r: f64,
    ) -> VertexId {
        let nearest = self.nearest(&q).expect("rewire_insert on an empty graph");
        self.insert_with_candidates(q, scenario, r, nearest, &[nearest])
            .expect("nearest vertex is a known-valid parent")
    }

    /// Chooses the cheapest collision-free parent among `{nearest} ∪ near ∪
    /// known_valid`, adds `q`, then re-parents every candidate that becomes
    /// cheaper through `q`. Returns `None` if no candidate connects.
    fn insert_with_candidates(
        &mut self,
        q: Config,
        scenario: &Scenario,
        r: f64,
        nearest: VertexId,
        known_valid: &[VertexId],
    ) -> Option<VertexId> {
        let mut ids = self.near(&q, r);
        ids.push(nearest);
        ids.extend_from_slice(known_valid);
        ids.sort_unstable();
        ids.dedup();

        let mut cands: Vec<(f64, VertexId, f64)> = ids
            .iter()
            .map(|&id| {
                let d = distance(self.config(id), &q);
                (self.cost(id) + d, id, d)
            })
            .collect();
        cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        // collision results; `None` = never checked
        let mut checked: Vec<Option<bool>> = vec![None; cands.len()];
        let mut parent = None;
        for (k, &(_, id, _)) in cands.iter().enumerate() {
            let ok = known_valid.contains(&id) || scenario.motion_valid(self.config(id), &q);
            checked[k] = Some(ok);
            if ok {
                parent = Some(k);
                break;
            }
        }
        let pk = parent?;
        let (cost, pid, pd) = cands[pk];
        let new = self.push_vertex(q, Some(pid), cost, pd);

        let mut rewired = Vec::new();
        for (k, &(_, u, d)) in cands.iter().enumerate() {
            if k == pk {
                continue;
            }
            let improves = self.cost(new) + d < self.cost(u) - RELAX_EPS;
            let ok = match checked[k] {
                Some(ok) => ok,
                None if known_valid.contains(&u) => true,
                None if improves => scenario.motion_valid(self.config(new), self.config(u)),
                None => continue,
            };
            if !ok {
                continue;
            }
            self.record_edge(new, u, d);
            if improves {
                self.reparent(u, new, d);
                rewired.push(u);
            }
        }
        self.propagate(rewired);
        self.audit_point("insert");
        Some(new)
    }

    fn record_edge(&mut self, a: VertexId, b: VertexId, d: f64) {
        if !self.edges[a.0].iter().any(|&(x, _)| x == b) {
            self.edges[a.0].push((b, d));
            self.edges[b.0].push((a, d));
        }
    }

    fn is_ancestor(&self, anc: VertexId, mut v: VertexId) -> bool {
        loop {
            if v == anc {
                return true;
            }
            match self.vertices[v.0].parent {
                Some(p) => v = p,
                None => return false,
            }
        }
    }

    fn reparent(&mut self, v: VertexId, new_parent: VertexId, d: f64) {
        debug_assert!(!self.is_ancestor(v, new_parent));
        if let Some(old) = self.vertices[v.0].parent {
            let ch = &mut self.vertices[old.0].children;
            if let Some(pos) = ch.iter().position(|&c| c == v) {
                ch.swap_remove(pos);
            }
        }
        self.vertices[new_parent.0].children.push(v);
        let cost = self.cost(new_parent) + d;
        let vert = &mut self.vertices[v.0];
        vert.parent = Some(new_parent);
        vert.parent_dist = d;
        vert.cost_to_come = cost;
    }

    /// Pushes cost decreases of `seeds` through their subtrees and through
    /// every examined edge, cheapest first.
    fn propagate(&mut self, seeds: Vec<VertexId>) {
        let mut heap: BinaryHeap<Pending> = seeds
            .into_iter()
            .map(|v| Pending(self.cost(v), v))
            .collect();
        while let Some(Pending(c, x)) = heap.pop() {
            if c != self.cost(x) {
                continue;
            }
            for k in 0..self.vertices[x.0].children.len() {
                let child = self.vertices[x.0].children[k];
                let updated = c + self.vertices[child.0].parent_dist;
                if updated != self.cost(child) {
                    self.vertices[child.0].cost_to_come = updated;
                    heap.push(Pending(updated, child));
                }
            }
            for k in 0..self.edges[x.0].len() {
                let (y, d) = self.edges[x.0][k];
                if self.vertices[y.0].parent == Some(x) {
                    continue;
                }
                let cand = c + d;
                if cand < self.cost(y) - RELAX_EPS && !self.is_ancestor(y, x) {
                    self.reparent(y, x, d);
                    heap.push(Pending(cand, y));
                }
            }
        }
    }

    /// Records a known collision-free edge between two existing vertices
    /// and relaxes it in both directions.
    fn connect_existing(&mut self, a: VertexId, b: VertexId) {
        if a == b {
            return;
        }
        let d = distance(self.config(a), self.config(b));
        self.record_edge(a, b, d);
        for (from, to) in [(a, b), (b, a)] {
            if self.vertices[to.0].parent == Some(from) {
                continue;
            }
            let cand = self.cost(from) + d;
            if cand < self.cost(to) - RELAX_EPS && !self.is_ancestor(to, from) {
                self.reparent(to, from, d);
                self.propagate(vec![to]);
            }
        }
        self.audit_point("connect_existing");
    }

    /// Runs [`PlanGraph::check_invariants`] after every later mutation.
    /// Slow; meant for tests.
    pub fn enable_audit(&mut self) {
        self.audit.get_or_insert_with(Audit::default);
    }

    pub fn audit(&self) -> Option<&Audit> {
        self.audit.as_ref()
    }

    fn audit_point(&mut self, op: &str) {
        if self.audit.is_none() {
            return;
        }
        let result = self.check_invariants();
        let audit = self.audit.as_mut().expect("checked above");
        audit.checks += 1;
        if let Err(e) = result {
            audit
                .failures
                .push(format!("after {op} #{}: {e}", audit.checks));
        }
    }

    /// Inserts every vertex of `path` in order with RRT* insertion, adding
    /// the previously processed path vertex to each one's neighborhood.
    /// Path vertices that already exist are reused as the anchor. The best
    /// goal cost afterwards is at most `min(before, path length)`.
    pub fn insert_path(&mut self, path: &PathSolution, scenario: &Scenario) -> Result<()> {
        let root = self.root();
        if distance(path.first(), self.config(root)) >= DUPLICATE_EPS {
            return Err(PlanError::Contract(
                "inserted path must start at the root configuration".into(),
            ));
        }
        if path.first().dim() != self.dim {
            return Err(PlanError::DimensionMismatch {
                expected: self.dim,
                actual: path.first().dim(),
            });
        }
        let mut prev = root;
        for q in &path.configs()[1..] {
            prev = match self.find(q) {
                Some(existing) => {
                    self.connect_existing(prev, existing);
                    existing
                }
                None => {
                    let nearest = self.nearest(q)?;
                    let r = self.radius_for(self.len() + 1);
                    self.insert_with_candidates(q.clone(), scenario, r, nearest, &[prev])
                        .expect("previous path vertex is a known-valid parent")
                }
            };
        }
        Ok(())
    }

    /// Configs from the root of `id`'s tree down to `id`.
    pub fn path_to(&self, id: VertexId) -> Vec<Config> {
        let mut out = Vec::new();
        let mut cur = Some(id);
        while let Some(v) = cur {
            out.push(self.vertices[v.0].config.clone());
            cur = self.vertices[v.0].parent;
        }
        out.reverse();
        out
    }

    /// Cheapest tracked goal vertex.
    pub fn best_goal(&self) -> Option<VertexId> {
        self.best_among(&self.goal_ids)
    }

    fn best_among(&self, ids: &[VertexId]) -> Option<VertexId> {
        ids.iter()
            .copied()
            .filter(|&g| self.cost(g).is_finite())
            .min_by(|&a, &b| self.cost(a).total_cmp(&self.cost(b)).then(a.cmp(&b)))
    }

    pub fn best_cost(&self) -> f64 {
        self.best_goal().map_or(f64::INFINITY, |g| self.cost(g))
    }

    pub fn best_path(&self) -> Option<PathSolution> {
        self.best_path_among(&self.goal_ids.clone())
    }

    /// Minimum cost-to-come path from the root to any of `goal_ids`.
    pub fn best_path_among(&self, goal_ids: &[VertexId]) -> Option<PathSolution> {
        let g = self.best_among(goal_ids)?;
        let mut configs = self.path_to(g);
        if configs.len() == 1 {
            // goal coincides with the root
            configs.push(configs[0].clone());
        }
        PathSolution::new(configs).ok()
    }

    /// Every collision-free edge examined so far, once each as `(a, b, len)`
    /// with `a < b`.
    pub fn examined_edges(&self) -> Vec<(VertexId, VertexId, f64)> {
        let mut out = Vec::new();
        for (i, list) in self.edges.iter().enumerate() {
            for &(j, d) in list {
                if i < j.0 {
                    out.push((VertexId(i), j, d));
                }
            }
        }
        out
    }

    pub fn publish(&self, snapshot: &Snapshot) {
        snapshot.set_vertex_count(self.len());
        snapshot.set_best_cost(self.best_cost());
    }

    /// Full structural check: parent/child symmetry, acyclicity, cost
    /// consistency within `1e-9`, and index contents.
    pub fn check_invariants(&self) -> Result<(), String> {
        let n = self.vertices.len();
        if self.index.len() != n {
            return Err(format!(
                "index holds {} entries for {n} vertices",
                self.index.len()
            ));
        }
        for (i, v) in self.vertices.iter().enumerate() {
            let id = VertexId(i);
            match v.parent {
                None => {
                    if !self.roots.contains(&id) {
                        return Err(format!("vertex {i} has no parent but is not a root"));
                    }
                    if v.cost_to_come != 0.0 {
                        return Err(format!("root {i} has cost {}", v.cost_to_come));
                    }
                }
                Some(p) => {
                    if !self.vertices[p.0].children.contains(&id) {
                        return Err(format!("vertex {i} missing from children of {}", p.0));
                    }
                    let expect = self.vertices[p.0].cost_to_come
                        + distance(&self.vertices[p.0].config, &v.config);
                    if (expect - v.cost_to_come).abs() > 1e-9 {
                        return Err(format!(
                            "vertex {i}: cost {} but parent implies {expect}",
                            v.cost_to_come
                        ));
                    }
                }
            }
            for &c in &v.children {
                if self.vertices[c.0].parent != Some(id) {
                    return Err(format!("child {} of {i} points elsewhere", c.0));
                }
            }
        }
        self.check_acyclic()
    }

    /// Every parent walk ends at a root: linear-time colouring.
    fn check_acyclic(&self) -> Result<(), String> {
        const OPEN: u8 = 1;
        const DONE: u8 = 2;
        let mut state = vec![0u8; self.vertices.len()];
        let mut walk = Vec::new();
        for i in 0..self.vertices.len() {
            let mut cur = i;
            while state[cur] == 0 {
                state[cur] = OPEN;
                walk.push(cur);
                match self.vertices[cur].parent {
                    Some(p) => cur = p.0,
                    None => break,
                }
            }
            if state[cur] == OPEN && self.vertices[cur].parent.is_some() {
                return Err(format!("cycle through vertex {cur}"));
            }
            for &w in &walk {
                state[w] = DONE;
            }
            walk.clear();
        }
        Ok(())
    }

    /// Edge-list dump: `id parent_id cost x0 x1 ...`, `-` for roots.
    pub fn dump<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (i, v) in self.vertices.iter().enumerate() {
            match v.parent {
                Some(p) => write!(out, "{i} {} {}", p.0, v.cost_to_come)?,
                None => write!(out, "{i} - {}", v.cost_to_come)?,
            }
            for x in v.config.as_slice() {
                write!(out, " {x}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}
