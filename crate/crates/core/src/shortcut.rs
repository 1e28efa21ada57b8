//! Random shortcutting: repeatedly pick two points along the path by arc
//! length and splice in the straight chord between them when it is
//! collision-free and strictly shorter.

use crate::error::{PlanError, Result};
use crate::path::PathSolution;
use crate::space::{distance, lerp, polyline_length, Config, RandomStream};
use crate::world::Scenario;

/// Minimum length gain for a chord to be spliced in.
const GAIN_EPS: f64 = 1e-12;

/// `round(scf * n_vertices)`, at least 1.
pub fn shortcut_iterations(scf: f64, n_vertices: usize) -> Result<usize> {
    if n_vertices < 2 {
        return Err(PlanError::Contract(format!(
            "shortcut budget needs a path of at least 2 vertices, got {n_vertices}"
        )));
    }
    if !(scf.is_finite() && scf > 0.0) {
        return Err(PlanError::InvalidArgument(format!(
            "shortcut count factor must be positive, got {scf}"
        )));
    }
    Ok(((scf * n_vertices as f64).round() as usize).max(1))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShortcutBudget {
    pub scf: f64,
    pub iterations: usize,
}

impl ShortcutBudget {
    /// Budget for a path with `n_vertices` vertices, fixed at invocation.
    pub fn for_path(scf: f64, n_vertices: usize) -> Result<Self> {
        Ok(ShortcutBudget {
            scf,
            iterations: shortcut_iterations(scf, n_vertices)?,
        })
    }

    pub fn iterations(iterations: usize) -> Self {
        ShortcutBudget {
            scf: f64::NAN,
            iterations: iterations.max(1),
        }
    }
}

fn cumulative(pts: &[Config]) -> Vec<f64> {
    let mut cum = Vec::with_capacity(pts.len());
    let mut acc = 0.0;
    cum.push(0.0);
    for w in pts.windows(2) {
        acc += distance(&w[0], &w[1]);
        cum.push(acc);
    }
    cum
}

/// Segment index holding arc length `s` and the point there.
fn locate(pts: &[Config], cum: &[f64], s: f64) -> (usize, Config) {
    let last_seg = pts.len() - 2;
    let i = cum
        .partition_point(|&c| c <= s)
        .saturating_sub(1)
        .min(last_seg);
    let seg = cum[i + 1] - cum[i];
    let t = if seg > 0.0 {
        ((s - cum[i]) / seg).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (i, lerp(&pts[i], &pts[i + 1], t))
}

pub fn shortcut(
    path: &PathSolution,
    scenario: &Scenario,
    budget: &ShortcutBudget,
    rng: &mut RandomStream,
) -> PathSolution {
    let mut pts = path.configs().to_vec();
    let mut total = path.length();

    for _ in 0..budget.iterations {
        let cum = cumulative(&pts);
        let len = cum[cum.len() - 1];
        if len <= 0.0 {
            break;
        }
        let (mut s1, mut s2) = (rng.unit() * len, rng.unit() * len);
        if s1 > s2 {
            std::mem::swap(&mut s1, &mut s2);
        }
        let (i, p1) = locate(&pts, &cum, s1);
        let (j, p2) = locate(&pts, &cum, s2);
        if i >= j {
            continue;
        }
        let replaced = distance(&p1, &pts[i + 1]) + (cum[j] - cum[i + 1]) + distance(&pts[j], &p2);
        let chord = distance(&p1, &p2);
        if chord >= replaced - GAIN_EPS {
            continue;
        }
        if !scenario.motion_valid(&p1, &p2)
            || !scenario.motion_valid(&pts[i], &p1)
            || !scenario.motion_valid(&p2, &pts[j + 1])
        {
            continue;
        }
        let mut next = Vec::with_capacity(pts.len() + 2);
        next.extend_from_slice(&pts[..=i]);
        next.push(p1);
        next.push(p2);
        next.extend_from_slice(&pts[j + 1..]);
        let next_total = polyline_length(&next);
        if next_total < total {
            pts = next;
            total = next_total;
        }
    }

    let cleaned = remove_collinear(pts, scenario);
    let cleaned_total = polyline_length(&cleaned);
    if cleaned_total > path.length() {
        return path.clone();
    }
    PathSolution::new(cleaned).expect("shortcut keeps both endpoints")
}

fn point_segment_distance(p: &Config, a: &Config, b: &Config) -> f64 {
    let ab: Vec<f64> = a
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| y - x)
        .collect();
    let len2: f64 = ab.iter().map(|x| x * x).sum();
    let t = if len2 > 0.0 {
        let ap: f64 = a
            .as_slice()
            .iter()
            .zip(p.as_slice())
            .zip(&ab)
            .map(|((x, y), d)| (y - x) * d)
            .sum();
        (ap / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    distance(p, &lerp(a, b, t))
}

/// Drops interior vertices lying within `1e-12` of the segment joining
/// their neighbors, when the merged segment is still valid.
fn remove_collinear(pts: Vec<Config>, scenario: &Scenario) -> Vec<Config> {
    let n = pts.len();
    let mut out: Vec<Config> = Vec::with_capacity(n);
    for (k, q) in pts.iter().enumerate() {
        if k == 0 || k == n - 1 {
            out.push(q.clone());
            continue;
        }
        let prev = &out[out.len() - 1];
        let next = &pts[k + 1];
        let redundant = point_segment_distance(q, prev, next) < 1e-12
            && (distance(prev, q) < 1e-12 || scenario.motion_valid(prev, next));
        if !redundant {
            out.push(q.clone());
        }
    }
    out
}
