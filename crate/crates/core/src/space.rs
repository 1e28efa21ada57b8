//! Configuration space: points, bounds, the Euclidean metric and the two
//! samplers (uniform over the bounding box, and informed sampling of the
//! prolate hyperspheroid that bounds every improving path).

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{PlanError, Result};

/// A point in configuration space. Joint angles are plain reals; there is no
/// wraparound.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Config(Vec<f64>);

impl Config {
    pub fn new(coords: Vec<f64>) -> Self {
        Config(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

impl From<Vec<f64>> for Config {
    fn from(v: Vec<f64>) -> Self {
        Config(v)
    }
}

impl<const N: usize> From<[f64; N]> for Config {
    fn from(v: [f64; N]) -> Self {
        Config(v.to_vec())
    }
}

impl std::ops::Index<usize> for Config {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl fmt::Debug for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// Axis-aligned box bounding the sampling domain.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpaceBounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl SpaceBounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(PlanError::InvalidArgument(
                "bounds must have at least one dimension".into(),
            ));
        }
        if lower.len() != upper.len() {
            return Err(PlanError::DimensionMismatch {
                expected: lower.len(),
                actual: upper.len(),
            });
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(PlanError::InvalidArgument(format!(
                    "bounds dimension {i}: lower {lo} must be < upper {hi}"
                )));
            }
        }
        Ok(SpaceBounds { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, q: &Config) -> bool {
        q.dim() == self.dim()
            && q.0
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(x, (lo, hi))| *x >= *lo && *x <= *hi)
    }

    /// Lebesgue measure of the box.
    pub fn measure(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| hi - lo)
            .product()
    }
}

impl<'de> Deserialize<'de> for SpaceBounds {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            lower: Vec<f64>,
            upper: Vec<f64>,
        }
        let raw = Raw::deserialize(de)?;
        SpaceBounds::new(raw.lower, raw.upper).map_err(serde::de::Error::custom)
    }
}

/// Seeded random stream. All randomness in the crate flows through one of
/// these; there is no global generator.
#[derive(Clone, Debug)]
pub struct RandomStream(ChaCha8Rng);

impl RandomStream {
    pub fn from_seed(seed: u64) -> Self {
        RandomStream(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn unit(&mut self) -> f64 {
        self.0.random::<f64>()
    }

    pub fn normal(&mut self) -> f64 {
        self.0.sample(StandardNormal)
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.0.random_range(0..n)
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }
    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}

/// Euclidean distance.
///
/// Panics if the dimensions differ; see [`try_distance`] for the checked form.
#[inline]
pub fn distance(a: &Config, b: &Config) -> f64 {
    assert_eq!(
        a.dim(),
        b.dim(),
        "distance between configs of different dimension"
    );
    a.0.iter()
        .zip(&b.0)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn try_distance(a: &Config, b: &Config) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(PlanError::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    Ok(distance(a, b))
}

#[inline]
pub(crate) fn lerp(a: &Config, b: &Config, t: f64) -> Config {
    Config(a.0.iter().zip(&b.0).map(|(x, y)| x + t * (y - x)).collect())
}

/// `a + t (b - a)`, with exact endpoints at `t = 0` and `t = 1`.
pub fn interpolate(a: &Config, b: &Config, t: f64) -> Result<Config> {
    if a.dim() != b.dim() {
        return Err(PlanError::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(PlanError::Contract(format!(
            "interpolation parameter {t} outside [0, 1]"
        )));
    }
    if t == 1.0 {
        return Ok(b.clone());
    }
    Ok(lerp(a, b, t))
}

pub fn sample_uniform(bounds: &SpaceBounds, rng: &mut RandomStream) -> Config {
    Config(
        bounds
            .lower
            .iter()
            .zip(&bounds.upper)
            .map(|(lo, hi)| lo + rng.unit() * (hi - lo))
            .collect(),
    )
}

/// Sum of segment lengths. Requires at least two configs.
pub fn path_length(configs: &[Config]) -> Result<f64> {
    if configs.len() < 2 {
        return Err(PlanError::Contract(format!(
            "path needs at least 2 vertices, got {}",
            configs.len()
        )));
    }
    Ok(polyline_length(configs))
}

pub(crate) fn polyline_length(configs: &[Config]) -> f64 {
    configs.windows(2).map(|w| distance(&w[0], &w[1])).sum()
}

/// Volume of the unit ball in `d` dimensions.
pub fn unit_ball_volume(d: usize) -> f64 {
    // V_0 = 1, V_1 = 2, V_d = 2 pi / d * V_{d-2}
    let mut v = [1.0, 2.0];
    for k in 2..=d {
        v[k % 2] *= 2.0 * PI / k as f64;
    }
    v[d % 2]
}

/// The set of configurations whose straight-line heuristic through
/// `start` and `goal` does not exceed `c_best`.
#[derive(Clone, Debug)]
pub struct InformedRegion {
    pub start: Config,
    pub goal: Config,
    pub c_best: f64,
}

impl InformedRegion {
    pub fn new(start: Config, goal: Config, c_best: f64) -> Result<Self> {
        if start.dim() != goal.dim() {
            return Err(PlanError::DimensionMismatch {
                expected: start.dim(),
                actual: goal.dim(),
            });
        }
        if c_best.is_nan() || c_best < 0.0 {
            return Err(PlanError::InvalidArgument(format!(
                "c_best must be nonnegative, got {c_best}"
            )));
        }
        Ok(InformedRegion {
            start,
            goal,
            c_best,
        })
    }

    pub fn c_min(&self) -> f64 {
        distance(&self.start, &self.goal)
    }

    /// `c_best` clamped to the admissible minimum.
    pub fn effective_c_best(&self) -> f64 {
        self.c_best.max(self.c_min())
    }

    pub fn focus_cost(&self, x: &Config) -> f64 {
        distance(&self.start, x) + distance(x, &self.goal)
    }

    pub fn contains(&self, x: &Config) -> bool {
        self.focus_cost(x) <= self.effective_c_best()
    }

    /// Volume of the hyperspheroid up to the unit-ball constant.
    pub(crate) fn relative_volume(&self) -> f64 {
        let c = self.effective_c_best();
        let (major, minor) = self.radii(c);
        major * minor.powi(self.start.dim() as i32 - 1)
    }

    fn radii(&self, c: f64) -> (f64, f64) {
        let c_min = self.c_min();
        (c / 2.0, (c * c - c_min * c_min).max(0.0).sqrt() / 2.0)
    }

    fn is_degenerate(&self, c: f64) -> bool {
        c - self.c_min() <= 1e-9 * c.max(1.0)
    }

    /// Direct sample of the hyperspheroid: unit-ball sample, scaled by the
    /// radii, rotated so the major axis points from start to goal, and
    /// translated to the foci midpoint.
    fn sample_spheroid(&self, c: f64, rng: &mut RandomStream) -> Config {
        let d = self.start.dim();
        let c_min = self.c_min();
        let (major, minor) = self.radii(c);

        let mut ball: Vec<f64> = (0..d).map(|_| rng.normal()).collect();
        let norm = ball.iter().map(|x| x * x).sum::<f64>().sqrt();
        let radius = rng.unit().powf(1.0 / d as f64);
        let scale = if norm > 0.0 { radius / norm } else { 0.0 };
        ball.iter_mut().for_each(|x| *x *= scale);

        ball[0] *= major;
        ball[1..].iter_mut().for_each(|x| *x *= minor);

        // Householder reflection taking e1 onto the start->goal axis.
        if c_min > 0.0 {
            let mut v: Vec<f64> = self
                .start
                .0
                .iter()
                .zip(&self.goal.0)
                .map(|(s, g)| (g - s) / c_min)
                .collect();
            v[0] -= 1.0;
            let vv: f64 = v.iter().map(|x| x * x).sum();
            if vv > 1e-24 {
                let vw: f64 = v.iter().zip(&ball).map(|(a, b)| a * b).sum();
                let k = 2.0 * vw / vv;
                ball.iter_mut().zip(&v).for_each(|(w, vi)| *w -= k * vi);
            }
        }

        Config(
            ball.iter()
                .zip(self.start.0.iter().zip(&self.goal.0))
                .map(|(w, (s, g))| w + 0.5 * (s + g))
                .collect(),
        )
    }
}

const INFORMED_MAX_ATTEMPTS: usize = 10_000;

/// Uniform sample of the informed region intersected with the bounds.
/// Falls back to uniform sampling when `c_best` is infinite.
pub fn sample_informed(
    region: &InformedRegion,
    bounds: &SpaceBounds,
    rng: &mut RandomStream,
) -> Config {
    if !region.c_best.is_finite() {
        return sample_uniform(bounds, rng);
    }
    let c = region.effective_c_best();
    if region.is_degenerate(c) {
        return lerp(&region.start, &region.goal, rng.unit());
    }
    for _ in 0..INFORMED_MAX_ATTEMPTS {
        let x = region.sample_spheroid(c, rng);
        if bounds.contains(&x) && region.focus_cost(&x) <= c {
            return x;
        }
    }
    // The start-goal segment always lies in both sets.
    lerp(&region.start, &region.goal, rng.unit())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn cfg(v: &[f64]) -> Config {
        Config::new(v.to_vec())
    }

    #[test]
    fn distance_examples() {
        assert_eq!(distance(&cfg(&[0.0, 0.0]), &cfg(&[0.0, 0.0])), 0.0);
        assert_eq!(distance(&cfg(&[0.0, 0.0]), &cfg(&[3.0, 4.0])), 5.0);
        assert_eq!(
            distance(&cfg(&[1.0, 2.0, 3.0]), &cfg(&[4.0, 6.0, 3.0])),
            5.0
        );
    }

    #[test]
    fn distance_dimension_mismatch() {
        let err = try_distance(&cfg(&[0.0]), &cfg(&[0.0, 1.0])).unwrap_err();
        assert!(matches!(err, PlanError::DimensionMismatch { .. }));
    }

    #[test]
    fn interpolate_examples() {
        let a = cfg(&[0.0, 0.0]);
        let b = cfg(&[2.0, 2.0]);
        assert_eq!(interpolate(&a, &b, 0.5).unwrap(), cfg(&[1.0, 1.0]));
        assert_eq!(interpolate(&a, &b, 0.0).unwrap(), a);
        assert_eq!(interpolate(&a, &b, 1.0).unwrap(), b);
        assert_eq!(
            interpolate(&cfg(&[1.0, 0.0]), &cfg(&[3.0, 4.0]), 0.25).unwrap(),
            cfg(&[1.5, 1.0])
        );
        assert!(matches!(
            interpolate(&a, &b, 1.5),
            Err(PlanError::Contract(_))
        ));
    }

    #[test]
    fn bounds_reject_degenerate_width() {
        assert!(SpaceBounds::new(vec![0.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(SpaceBounds::new(vec![0.0], vec![1.0, 1.0]).is_err());
        assert!(SpaceBounds::new(vec![], vec![]).is_err());
    }

    #[test]
    fn uniform_samples_in_bounds_and_reproducible() {
        let bounds = SpaceBounds::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let mut rng = RandomStream::from_seed(7);
        for _ in 0..1000 {
            assert!(bounds.contains(&sample_uniform(&bounds, &mut rng)));
        }
        let a = sample_uniform(&bounds, &mut RandomStream::from_seed(42));
        let b = sample_uniform(&bounds, &mut RandomStream::from_seed(42));
        assert_eq!(a, b);
    }

    /// Chi-square over 10 bins for each marginal; critical value for 9
    /// degrees of freedom at p = 0.001 is 27.877.
    #[test]
    fn uniform_fallback_marginals_pass_chi_square() {
        let bounds = SpaceBounds::new(vec![-1.0, 2.0], vec![3.0, 2.5]).unwrap();
        let region =
            InformedRegion::new(cfg(&[0.0, 2.1]), cfg(&[1.0, 2.2]), f64::INFINITY).unwrap();
        let mut rng = RandomStream::from_seed(11);
        let n = 10_000;
        let mut bins = vec![[0usize; 10]; 2];
        for _ in 0..n {
            let x = sample_informed(&region, &bounds, &mut rng);
            for d in 0..2 {
                let u = (x[d] - bounds.lower[d]) / (bounds.upper[d] - bounds.lower[d]);
                bins[d][((u * 10.0) as usize).min(9)] += 1;
            }
        }
        let expected = n as f64 / 10.0;
        for b in &bins {
            let chi2: f64 = b
                .iter()
                .map(|&o| (o as f64 - expected).powi(2) / expected)
                .sum();
            assert!(chi2 < 27.877, "chi2 = {chi2}");
        }
    }

    #[test]
    fn informed_degenerate_lies_on_segment() {
        let bounds = SpaceBounds::new(vec![0.0; 3], vec![10.0; 3]).unwrap();
        let s = cfg(&[1.0, 2.0, 3.0]);
        let g = cfg(&[7.0, 5.0, 4.0]);
        let c_min = distance(&s, &g);
        let region = InformedRegion::new(s.clone(), g.clone(), c_min).unwrap();
        let mut rng = RandomStream::from_seed(3);
        for _ in 0..1000 {
            let x = sample_informed(&region, &bounds, &mut rng);
            assert!(distance(&s, &x) + distance(&x, &g) - c_min <= 1e-9);
        }
        // Numeric noise below c_min is clamped rather than rejected.
        let region = InformedRegion::new(s.clone(), g.clone(), c_min * (1.0 - 1e-13)).unwrap();
        let x = sample_informed(&region, &bounds, &mut rng);
        assert!(distance(&s, &x) + distance(&x, &g) - c_min <= 1e-9);
    }

    #[test]
    fn informed_samples_satisfy_ellipse_inequality() {
        for d in [2usize, 4, 6] {
            let bounds = SpaceBounds::new(vec![-5.0; d], vec![5.0; d]).unwrap();
            let mut rng = RandomStream::from_seed(d as u64);
            let s = sample_uniform(&bounds, &mut rng);
            let g = sample_uniform(&bounds, &mut rng);
            let c_best = 1.5 * distance(&s, &g);
            let region = InformedRegion::new(s.clone(), g.clone(), c_best).unwrap();
            for _ in 0..10_000 {
                let x = sample_informed(&region, &bounds, &mut rng);
                assert!(distance(&s, &x) + distance(&x, &g) <= c_best);
                assert!(bounds.contains(&x));
            }
        }
    }

    /// The direct sampler must cover the ellipse uniformly: compare the
    /// fraction of samples inside an inner concentric ellipse with its
    /// volume ratio.
    #[test]
    fn informed_sampler_is_uniform_in_ellipse() {
        let bounds = SpaceBounds::new(vec![-10.0; 2], vec![10.0; 2]).unwrap();
        let s = cfg(&[-1.0, -1.0]);
        let g = cfg(&[1.0, 1.0]);
        let c_min = distance(&s, &g);
        let region = InformedRegion::new(s.clone(), g.clone(), 2.0 * c_min).unwrap();
        let mut rng = RandomStream::from_seed(5);
        let n = 20_000;
        // Inner ellipse obtained by scaling about the center by 1/2: area ratio 1/4.
        let inside = (0..n)
            .filter(|_| {
                let x = sample_informed(&region, &bounds, &mut rng);
                let scaled = cfg(&[2.0 * x[0], 2.0 * x[1]]);
                region.contains(&scaled)
            })
            .count();
        let frac = inside as f64 / n as f64;
        assert!((frac - 0.25).abs() < 0.015, "frac = {frac}");
    }

    #[test]
    fn path_length_examples() {
        let p = [cfg(&[0.0, 0.0]), cfg(&[1.0, 0.0]), cfg(&[1.0, 1.0])];
        assert_eq!(path_length(&p).unwrap(), 2.0);
        assert_eq!(
            path_length(&[cfg(&[0.0, 0.0]), cfg(&[0.0, 0.0])]).unwrap(),
            0.0
        );
        let p = [cfg(&[0.0, 0.0]), cfg(&[3.0, 4.0]), cfg(&[6.0, 8.0])];
        assert_eq!(path_length(&p).unwrap(), 10.0);
        assert!(path_length(&[cfg(&[0.0])]).is_err());
    }

    #[test]
    fn unit_ball_volumes() {
        assert_relative_eq!(unit_ball_volume(1), 2.0);
        assert_relative_eq!(unit_ball_volume(2), PI);
        assert_relative_eq!(unit_ball_volume(3), 4.0 / 3.0 * PI);
        assert_relative_eq!(unit_ball_volume(4), PI * PI / 2.0);
    }

    fn arb_config(d: usize) -> impl Strategy<Value = Config> {
        proptest::collection::vec(-100.0f64..100.0, d).prop_map(Config::new)
    }

    proptest! {
        #[test]
        fn distance_is_a_metric((a, b, c) in (1usize..6).prop_flat_map(|d| (arb_config(d), arb_config(d), arb_config(d)))) {
            let ab = distance(&a, &b);
            prop_assert!(ab >= 0.0);
            prop_assert_eq!(ab, distance(&b, &a));
            prop_assert_eq!(distance(&a, &a), 0.0);
            prop_assert!(ab <= distance(&a, &c) + distance(&c, &b) + 1e-9);
        }

        #[test]
        fn path_length_reversal_invariant(pts in proptest::collection::vec(arb_config(3), 2..20)) {
            let fwd = path_length(&pts).unwrap();
            let rev: Vec<Config> = pts.iter().rev().cloned().collect();
            prop_assert!((fwd - path_length(&rev).unwrap()).abs() <= 1e-9 * fwd.max(1.0));
        }
    }
}
