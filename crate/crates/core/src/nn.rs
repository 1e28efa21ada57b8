//! Exact nearest-neighbor indices over vertex configurations.
//!
//! [`LinearIndex`] is the reference; [`KdIndex`] is an incremental k-d tree
//! that must return identical answers, including the tie-break on lowest
//! insertion id.

use crate::space::Config;

pub trait NearestIndex {
    fn insert(&mut self, id: usize, q: &Config);
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    /// Closest entry to `q`; ties go to the lowest id.
    fn nearest(&self, q: &Config) -> Option<(usize, f64)>;
    /// Ids within distance `r` of `q` (inclusive), ascending.
    fn near(&self, q: &Config, r: f64) -> Vec<usize>;
}

#[inline]
fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[inline]
fn better(d: f64, id: usize, best: Option<(usize, f64)>) -> bool {
    match best {
        None => true,
        Some((bid, bd)) => d < bd || (d == bd && id < bid),
    }
}

#[derive(Clone, Debug, Default)]
pub struct LinearIndex {
    dim: usize,
    ids: Vec<usize>,
    coords: Vec<f64>,
}

impl LinearIndex {
    pub fn new(dim: usize) -> Self {
        LinearIndex {
            dim,
            ..Default::default()
        }
    }

    fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }
}

impl NearestIndex for LinearIndex {
    fn insert(&mut self, id: usize, q: &Config) {
        assert_eq!(q.dim(), self.dim);
        self.ids.push(id);
        self.coords.extend_from_slice(q.as_slice());
    }

    fn len(&self) -> usize {
        self.ids.len()
    }

    fn nearest(&self, q: &Config) -> Option<(usize, f64)> {
        let mut best = None;
        for (i, &id) in self.ids.iter().enumerate() {
            let d = dist(q.as_slice(), self.point(i));
            if better(d, id, best) {
                best = Some((id, d));
            }
        }
        best
    }

    fn near(&self, q: &Config, r: f64) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .ids
            .iter()
            .enumerate()
            .filter(|(i, _)| dist(q.as_slice(), self.point(*i)) <= r)
            .map(|(_, &id)| id)
            .collect();
        out.sort_unstable();
        out
    }
}

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct KdNode {
    id: usize,
    axis: u32,
    left: u32,
    right: u32,
}

/// Incremental, unbalanced k-d tree. Splits cycle through the axes by depth.
#[derive(Clone, Debug)]
pub struct KdIndex {
    dim: usize,
    nodes: Vec<KdNode>,
    coords: Vec<f64>,
}

/// Slack on pruning bounds so floating-point rounding never prunes a
/// subtree holding an exact tie.
const PRUNE_SLACK: f64 = 1.0 + 1e-12;

impl KdIndex {
    pub fn new(dim: usize) -> Self {
        KdIndex {
            dim,
            nodes: Vec::new(),
            coords: Vec::new(),
        }
    }

    fn point(&self, node: usize) -> &[f64] {
        &self.coords[node * self.dim..(node + 1) * self.dim]
    }
}

impl NearestIndex for KdIndex {
    fn insert(&mut self, id: usize, q: &Config) {
        assert_eq!(q.dim(), self.dim);
        let new = self.nodes.len() as u32;
        let mut axis = 0;
        if !self.nodes.is_empty() {
            let mut cur = 0usize;
            loop {
                let node = &self.nodes[cur];
                let a = node.axis as usize;
                let go_left = q[a] < self.point(cur)[a];
                let next = if go_left { node.left } else { node.right };
                if next == NONE {
                    axis = (node.axis + 1) % self.dim as u32;
                    let node = &mut self.nodes[cur];
                    if go_left {
                        node.left = new;
                    } else {
                        node.right = new;
                    }
                    break;
                }
                cur = next as usize;
            }
        }
        self.nodes.push(KdNode {
            id,
            axis,
            left: NONE,
            right: NONE,
        });
        self.coords.extend_from_slice(q.as_slice());
    }

    fn len(&self) -> usize {
        self.nodes.len()
    }

    fn nearest(&self, q: &Config) -> Option<(usize, f64)> {
        if self.nodes.is_empty() {
            return None;
        }
        let q = q.as_slice();
        let mut best: Option<(usize, f64)> = None;
        let mut stack: Vec<(u32, f64)> = vec![(0, 0.0)];
        while let Some((n, bound)) = stack.pop() {
            if let Some((_, bd)) = best {
                if bound > bd * PRUNE_SLACK {
                    continue;
                }
            }
            let node = &self.nodes[n as usize];
            let p = self.point(n as usize);
            let d = dist(q, p);
            if better(d, node.id, best) {
                best = Some((node.id, d));
            }
            let a = node.axis as usize;
            let diff = q[a] - p[a];
            let (near, far) = if diff < 0.0 {
                (node.left, node.right)
            } else {
                (node.right, node.left)
            };
            if far != NONE {
                stack.push((far, bound.max(diff.abs())));
            }
            if near != NONE {
                stack.push((near, bound));
            }
        }
        best
    }

    fn near(&self, q: &Config, r: f64) -> Vec<usize> {
        let mut out = Vec::new();
        if self.nodes.is_empty() {
            return out;
        }
        let q = q.as_slice();
        let limit = r * PRUNE_SLACK;
        let mut stack: Vec<u32> = vec![0];
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n as usize];
            let p = self.point(n as usize);
            if dist(q, p) <= r {
                out.push(node.id);
            }
            let a = node.axis as usize;
            let diff = q[a] - p[a];
            let (near, far) = if diff < 0.0 {
                (node.left, node.right)
            } else {
                (node.right, node.left)
            };
            if near != NONE {
                stack.push(near);
            }
            if far != NONE && diff.abs() <= limit {
                stack.push(far);
            }
        }
        out.sort_unstable();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::RandomStream;

    fn random_config(rng: &mut RandomStream, d: usize) -> Config {
        Config::new((0..d).map(|_| rng.unit()).collect())
    }

    #[test]
    fn nearest_examples() {
        let mut kd = KdIndex::new(2);
        assert!(kd.nearest(&Config::from([0.0, 0.0])).is_none());
        kd.insert(0, &Config::from([0.0, 0.0]));
        assert_eq!(kd.nearest(&Config::from([5.0, 5.0])).unwrap().0, 0);
        kd.insert(1, &Config::from([10.0, 0.0]));
        assert_eq!(kd.nearest(&Config::from([1.0, 0.0])).unwrap().0, 0);
    }

    #[test]
    fn ties_go_to_lowest_id() {
        let mut kd = KdIndex::new(2);
        let mut lin = LinearIndex::new(2);
        for (id, p) in [[2.0, 0.0], [0.0, 0.0], [1.0, 1.0], [1.0, -1.0]]
            .iter()
            .enumerate()
        {
            kd.insert(id, &Config::from(*p));
            lin.insert(id, &Config::from(*p));
        }
        let q = Config::from([1.0, 0.0]);
        assert_eq!(kd.nearest(&q).unwrap().0, 0);
        assert_eq!(lin.nearest(&q).unwrap().0, 0);
        // duplicates
        kd.insert(4, &Config::from([0.0, 0.0]));
        assert_eq!(kd.nearest(&Config::from([-1.0, 0.0])).unwrap().0, 1);
    }

    #[test]
    fn near_examples() {
        let mut kd = KdIndex::new(2);
        for id in 0..5 {
            kd.insert(id, &Config::from([id as f64, 0.0]));
        }
        assert_eq!(kd.near(&Config::from([2.0, 0.0]), 0.0), vec![2]);
        assert_eq!(
            kd.near(&Config::from([2.0, 0.0]), f64::INFINITY),
            vec![0, 1, 2, 3, 4]
        );
        assert_eq!(kd.near(&Config::from([2.0, 0.0]), 1.0), vec![1, 2, 3]);
    }

    #[test]
    fn kd_matches_linear_scan() {
        let mut rng = RandomStream::from_seed(1);
        for d in [1usize, 2, 4] {
            let mut kd = KdIndex::new(d);
            let mut lin = LinearIndex::new(d);
            for id in 0..100 {
                let q = random_config(&mut rng, d);
                kd.insert(id, &q);
                lin.insert(id, &q);
            }
            for _ in 0..500 {
                let q = random_config(&mut rng, d);
                assert_eq!(kd.nearest(&q), lin.nearest(&q));
                assert_eq!(kd.near(&q, 0.3), lin.near(&q, 0.3));
            }
        }
    }

    #[test]
    fn kd_handles_grid_ties() {
        let mut kd = KdIndex::new(2);
        let mut lin = LinearIndex::new(2);
        let mut id = 0;
        for i in 0..10 {
            for j in 0..10 {
                let q = Config::from([i as f64 * 0.1, j as f64 * 0.1]);
                kd.insert(id, &q);
                lin.insert(id, &q);
                id += 1;
            }
        }
        for i in 0..19 {
            for j in 0..19 {
                let q = Config::from([i as f64 * 0.05, j as f64 * 0.05]);
                assert_eq!(kd.nearest(&q), lin.nearest(&q));
                assert_eq!(kd.near(&q, 0.1), lin.near(&q, 0.1));
            }
        }
    }
}
