//! Desk-scale worlds: a 2D point robot or a planar N-link arm among convex
//! polygon and circle obstacles, plus the JSON scenario format.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{PlanError, Result};
use crate::geometry::{segments_intersect, Circle, ConvexPolygon, Point2, Segment};
use crate::space::{distance, lerp, Config, SpaceBounds};

#[derive(Clone, Debug, PartialEq)]
pub enum Obstacle {
    Polygon(ConvexPolygon),
    Circle(Circle),
}

impl Obstacle {
    fn contains(&self, p: Point2) -> bool {
        match self {
            Obstacle::Polygon(poly) => poly.contains(p),
            Obstacle::Circle(c) => c.contains(p),
        }
    }

    fn intersects_segment(&self, s: &Segment) -> bool {
        match self {
            Obstacle::Polygon(poly) => poly.intersects_segment(s),
            Obstacle::Circle(c) => c.intersects_segment(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Robot {
    Point2d,
    PlanarArm {
        link_lengths: Vec<f64>,
        base: Point2,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct WorldGeometry {
    pub robot: Robot,
    pub obstacles: Vec<Obstacle>,
}

impl WorldGeometry {
    /// Configuration-space dimension implied by the robot, if fixed.
    fn robot_dim(&self) -> usize {
        match &self.robot {
            Robot::Point2d => 2,
            Robot::PlanarArm { link_lengths, .. } => link_lengths.len(),
        }
    }
}

/// Link segments of a planar arm. Joint angles are cumulative: link `i`
/// points along `angles[0] + ... + angles[i]` in the world frame.
pub fn arm_forward_kinematics(
    link_lengths: &[f64],
    base: Point2,
    angles: &[f64],
) -> Result<Vec<Segment>> {
    if link_lengths.len() != angles.len() {
        return Err(PlanError::DimensionMismatch {
            expected: link_lengths.len(),
            actual: angles.len(),
        });
    }
    Ok(arm_segments(link_lengths, base, angles).collect())
}

fn arm_segments<'a>(
    link_lengths: &'a [f64],
    base: Point2,
    angles: &'a [f64],
) -> impl Iterator<Item = Segment> + 'a {
    let mut joint = base;
    let mut heading = 0.0;
    link_lengths.iter().zip(angles).map(move |(len, a)| {
        heading += a;
        let next = Point2::new(joint.x + len * heading.cos(), joint.y + len * heading.sin());
        let seg = Segment::new(joint, next);
        joint = next;
        seg
    })
}

/// A planning query: world, bounds, start, goal set and motion-check step.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    name: String,
    space: SpaceBounds,
    world: WorldGeometry,
    start: Config,
    goals: Vec<Config>,
    resolution: f64,
}

impl Scenario {
    /// Builds a scenario, checking every invariant. Errors name the
    /// offending element (`start`, `goals[1]`, `obstacles[0]`, ...).
    pub fn new(
        name: impl Into<String>,
        space: SpaceBounds,
        world: WorldGeometry,
        start: Config,
        goals: Vec<Config>,
        resolution: f64,
    ) -> Result<Self> {
        let scenario = Scenario {
            name: name.into(),
            space,
            world,
            start,
            goals,
            resolution,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    fn validate(&self) -> Result<()> {
        if !(self.resolution.is_finite() && self.resolution > 0.0) {
            return Err(PlanError::validation(
                "resolution",
                "must be a positive real",
            ));
        }
        let dim = self.world.robot_dim();
        if let Robot::PlanarArm { link_lengths, base } = &self.world.robot {
            if link_lengths.is_empty() {
                return Err(PlanError::validation(
                    "link_lengths",
                    "arm needs at least one link",
                ));
            }
            if let Some(i) = link_lengths
                .iter()
                .position(|l| !(l.is_finite() && *l > 0.0))
            {
                return Err(PlanError::validation(
                    format!("link_lengths[{i}]"),
                    "link lengths must be positive",
                ));
            }
            if !(base.x.is_finite() && base.y.is_finite()) {
                return Err(PlanError::validation("base", "must be finite"));
            }
        }
        if self.space.dim() != dim {
            return Err(PlanError::validation(
                "bounds",
                format!(
                    "dimension {} does not match robot dimension {dim}",
                    self.space.dim()
                ),
            ));
        }
        for (i, obs) in self.world.obstacles.iter().enumerate() {
            if let Obstacle::Circle(c) = obs {
                if !(c.radius.is_finite()
                    && c.radius > 0.0
                    && c.center.x.is_finite()
                    && c.center.y.is_finite())
                {
                    return Err(PlanError::validation(
                        format!("obstacles[{i}]"),
                        "circle radius must be positive",
                    ));
                }
            }
        }
        self.validate_config("start", &self.start)?;
        if self.goals.is_empty() {
            return Err(PlanError::validation(
                "goals",
                "at least one goal is required",
            ));
        }
        for (i, g) in self.goals.iter().enumerate() {
            self.validate_config(&format!("goals[{i}]"), g)?;
        }
        Ok(())
    }

    fn validate_config(&self, element: &str, q: &Config) -> Result<()> {
        if q.dim() != self.space.dim() {
            return Err(PlanError::validation(
                element,
                format!("has dimension {}, expected {}", q.dim(), self.space.dim()),
            ));
        }
        if !self.space.contains(q) {
            return Err(PlanError::validation(element, "lies outside the bounds"));
        }
        if !self.is_valid(q) {
            return Err(PlanError::validation(element, "is in collision"));
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn space(&self) -> &SpaceBounds {
        &self.space
    }

    pub fn world(&self) -> &WorldGeometry {
        &self.world
    }

    pub fn start(&self) -> &Config {
        &self.start
    }

    pub fn goals(&self) -> &[Config] {
        &self.goals
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// True iff `q` is in free space. Configurations outside the bounds
    /// or of the wrong dimension are reported invalid.
    pub fn is_valid(&self, q: &Config) -> bool {
        if !self.space.contains(q) {
            return false;
        }
        let obstacles = &self.world.obstacles;
        match &self.world.robot {
            Robot::Point2d => {
                let p = Point2::new(q[0], q[1]);
                !obstacles.iter().any(|o| o.contains(p))
            }
            Robot::PlanarArm { link_lengths, base } => {
                let links: Vec<Segment> = arm_segments(link_lengths, *base, q.as_slice()).collect();
                if links
                    .iter()
                    .any(|l| obstacles.iter().any(|o| o.intersects_segment(l)))
                {
                    return false;
                }
                // adjacent links share a joint and are never tested
                for i in 0..links.len() {
                    for j in i + 2..links.len() {
                        if segments_intersect(&links[i], &links[j]) {
                            return false;
                        }
                    }
                }
                true
            }
        }
    }

    /// Discretized straight-line check. Both endpoints and every point at a
    /// uniform spacing of at most `resolution` are tested. The step count
    /// is a power of two so that halving the resolution only adds points.
    pub fn motion_valid(&self, a: &Config, b: &Config) -> bool {
        let (a, b) = if a.as_slice() <= b.as_slice() {
            (a, b)
        } else {
            (b, a)
        };
        if !self.is_valid(a) || !self.is_valid(b) {
            return false;
        }
        let steps = self.motion_steps(distance(a, b));
        // coarse-to-fine order finds blockages early
        let mut stride = steps;
        while stride > 1 {
            let half = stride / 2;
            let mut i = half;
            while i < steps {
                if !self.is_valid(&lerp(a, b, i as f64 / steps as f64)) {
                    return false;
                }
                i += stride;
            }
            stride = half;
        }
        true
    }

    fn motion_steps(&self, d: f64) -> u64 {
        let mut n: u64 = 1;
        while d / n as f64 > self.resolution && n < (1 << 40) {
            n *= 2;
        }
        n
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ScenarioDoc = serde_json::from_str(text).map_err(|e| PlanError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        doc.into_scenario()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| PlanError::io(path, e))?;
        Scenario::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ScenarioDoc::from_scenario(self))
            .expect("scenario documents always serialize")
    }
}

/// Parses and validates a scenario document.
pub fn load_scenario(text: &str) -> Result<Scenario> {
    Scenario::from_json(text)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum WorldKind {
    Point2d,
    PlanarArm,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundsDoc {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum ObstacleDoc {
    Polygon { points: Vec<[f64; 2]> },
    Circle { center: [f64; 2], radius: f64 },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    name: String,
    kind: WorldKind,
    bounds: BoundsDoc,
    resolution: f64,
    obstacles: Vec<ObstacleDoc>,
    start: Vec<f64>,
    goals: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    link_lengths: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    base: Option<[f64; 2]>,
}

impl ScenarioDoc {
    fn into_scenario(self) -> Result<Scenario> {
        let space = SpaceBounds::new(self.bounds.lower, self.bounds.upper)
            .map_err(|e| PlanError::validation("bounds", e.to_string()))?;
        let robot = match self.kind {
            WorldKind::Point2d => {
                if self.link_lengths.is_some() || self.base.is_some() {
                    return Err(PlanError::validation(
                        "kind",
                        "point2d worlds take no link_lengths or base",
                    ));
                }
                Robot::Point2d
            }
            WorldKind::PlanarArm => Robot::PlanarArm {
                link_lengths: self.link_lengths.ok_or_else(|| {
                    PlanError::validation("link_lengths", "required for planar_arm")
                })?,
                base: self
                    .base
                    .ok_or_else(|| PlanError::validation("base", "required for planar_arm"))?
                    .into(),
            },
        };
        let obstacles = self
            .obstacles
            .into_iter()
            .enumerate()
            .map(|(i, o)| match o {
                ObstacleDoc::Polygon { points } => {
                    ConvexPolygon::new(points.into_iter().map(Point2::from).collect())
                        .map(Obstacle::Polygon)
                        .map_err(|d| {
                            PlanError::validation(format!("obstacles[{i}]"), d.to_string())
                        })
                }
                ObstacleDoc::Circle { center, radius } => Ok(Obstacle::Circle(Circle {
                    center: center.into(),
                    radius,
                })),
            })
            .collect::<Result<Vec<_>>>()?;
        Scenario::new(
            self.name,
            space,
            WorldGeometry { robot, obstacles },
            Config::new(self.start),
            self.goals.into_iter().map(Config::new).collect(),
            self.resolution,
        )
    }

    fn from_scenario(s: &Scenario) -> Self {
        let (kind, link_lengths, base) = match &s.world.robot {
            Robot::Point2d => (WorldKind::Point2d, None, None),
            Robot::PlanarArm { link_lengths, base } => (
                WorldKind::PlanarArm,
                Some(link_lengths.clone()),
                Some((*base).into()),
            ),
        };
        ScenarioDoc {
            name: s.name.clone(),
            kind,
            bounds: BoundsDoc {
                lower: s.space.lower().to_vec(),
                upper: s.space.upper().to_vec(),
            },
            resolution: s.resolution,
            obstacles: s
                .world
                .obstacles
                .iter()
                .map(|o| match o {
                    Obstacle::Polygon(p) => ObstacleDoc::Polygon {
                        points: p.points().iter().map(|&q| q.into()).collect(),
                    },
                    Obstacle::Circle(c) => ObstacleDoc::Circle {
                        center: c.center.into(),
                        radius: c.radius,
                    },
                })
                .collect(),
            start: s.start.as_slice().to_vec(),
            goals: s.goals.iter().map(|g| g.as_slice().to_vec()).collect(),
            link_lengths,
            base,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    const MINIMAL: &str = r#"{
        "name": "tiny",
        "kind": "point2d",
        "bounds": {"lower": [0, 0], "upper": [4, 4]},
        "resolution": 0.05,
        "obstacles": [{"type": "polygon", "points": [[1,1],[2,1],[2,2],[1,2]]}],
        "start": [0.5, 0.5],
        "goals": [[3.5, 3.5]]
    }"#;

    fn empty_point_world() -> Scenario {
        Scenario::new(
            "empty",
            SpaceBounds::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap(),
            WorldGeometry {
                robot: Robot::Point2d,
                obstacles: vec![],
            },
            Config::from([0.1, 0.1]),
            vec![Config::from([0.9, 0.9])],
            0.01,
        )
        .unwrap()
    }

    #[test]
    fn load_minimal_document() {
        let s = load_scenario(MINIMAL).unwrap();
        assert_eq!(s.goals().len(), 1);
        assert_eq!(s.name(), "tiny");
        assert_eq!(s.dim(), 2);
    }

    #[test]
    fn start_in_collision_is_named() {
        let doc = MINIMAL.replace("\"start\": [0.5, 0.5]", "\"start\": [1.5, 1.5]");
        match load_scenario(&doc).unwrap_err() {
            PlanError::Validation { element, .. } => assert_eq!(element, "start"),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn goal_errors_are_indexed() {
        let doc = MINIMAL.replace("[[3.5, 3.5]]", "[[3.5, 3.5], [9, 9]]");
        match load_scenario(&doc).unwrap_err() {
            PlanError::Validation { element, .. } => assert_eq!(element, "goals[1]"),
            e => panic!("unexpected {e:?}"),
        }
        let doc = MINIMAL.replace("[[3.5, 3.5]]", "[]");
        assert!(matches!(
            load_scenario(&doc),
            Err(PlanError::Validation { .. })
        ));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let doc = MINIMAL.replace("\"name\": \"tiny\",", "\"name\": \"tiny\", \"color\": 3,");
        assert!(matches!(load_scenario(&doc), Err(PlanError::Parse { .. })));
        let doc = MINIMAL.replace("\"type\": \"polygon\",", "\"type\": \"polygon\", \"z\": 1,");
        assert!(matches!(load_scenario(&doc), Err(PlanError::Parse { .. })));
    }

    #[test]
    fn parse_errors_carry_position() {
        match load_scenario("{\n  \"name\": 3\n}").unwrap_err() {
            PlanError::Parse { line, .. } => assert_eq!(line, 2),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn clockwise_polygon_is_rejected() {
        let doc = MINIMAL.replace("[[1,1],[2,1],[2,2],[1,2]]", "[[1,1],[1,2],[2,2],[2,1]]");
        match load_scenario(&doc).unwrap_err() {
            PlanError::Validation { element, .. } => assert_eq!(element, "obstacles[0]"),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn json_round_trip() {
        let s = load_scenario(MINIMAL).unwrap();
        assert_eq!(load_scenario(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn point_validity() {
        let s = empty_point_world();
        assert!(s.is_valid(&Config::from([0.3, 0.7])));
        let s = load_scenario(MINIMAL).unwrap();
        assert!(!s.is_valid(&Config::from([1.5, 1.5])));
        assert!(!s.is_valid(&Config::from([1.0, 1.5])));
        assert!(s.is_valid(&Config::from([0.5, 1.5])));
    }

    #[test]
    fn motion_checks() {
        let s = empty_point_world();
        assert!(s.motion_valid(&Config::from([0.1, 0.1]), &Config::from([0.9, 0.2])));

        let s = load_scenario(MINIMAL).unwrap();
        let a = Config::from([0.5, 1.5]);
        let b = Config::from([3.0, 1.5]);
        assert!(!s.motion_valid(&a, &b));
        assert!(!s.motion_valid(&b, &a));
        assert!(!s.motion_valid(&a, &Config::from([1.5, 1.5])));
        assert!(s.motion_valid(&a, &Config::from([0.5, 3.5])));
    }

    #[test]
    fn forward_kinematics_examples() {
        let o = Point2::new(0.0, 0.0);
        let segs = arm_forward_kinematics(&[1.0, 1.0], o, &[0.0, 0.0]).unwrap();
        assert_eq!(segs[0], Segment::new(o, Point2::new(1.0, 0.0)));
        assert_eq!(
            segs[1],
            Segment::new(Point2::new(1.0, 0.0), Point2::new(2.0, 0.0))
        );

        let segs = arm_forward_kinematics(&[1.0], o, &[FRAC_PI_2]).unwrap();
        assert!((segs[0].b.x).abs() < 1e-15 && (segs[0].b.y - 1.0).abs() < 1e-15);

        let segs = arm_forward_kinematics(&[1.0, 1.0], o, &[FRAC_PI_2, -FRAC_PI_2]).unwrap();
        assert!((segs[1].a.x).abs() < 1e-15 && (segs[1].a.y - 1.0).abs() < 1e-15);
        assert!((segs[1].b.x - 1.0).abs() < 1e-15 && (segs[1].b.y - 1.0).abs() < 1e-15);

        assert!(arm_forward_kinematics(&[1.0], o, &[0.0, 0.0]).is_err());
    }

    fn arm_world(obstacles: Vec<Obstacle>, n: usize) -> WorldGeometry {
        WorldGeometry {
            robot: Robot::PlanarArm {
                link_lengths: vec![1.0; n],
                base: Point2::new(0.0, 0.0),
            },
            obstacles,
        }
    }

    #[test]
    fn arm_crossing_a_wall_is_invalid() {
        // thin wall around x = 1.5 covering y in [-5, 5]
        let wall = Obstacle::Polygon(ConvexPolygon::rect(1.49, -5.0, 1.51, 5.0).unwrap());
        let world = arm_world(vec![wall], 2);
        let s = Scenario {
            name: "wall".into(),
            space: SpaceBounds::new(vec![-3.2; 2], vec![3.2; 2]).unwrap(),
            world,
            start: Config::from([FRAC_PI_2 + 0.5, 0.0]),
            goals: vec![Config::from([-FRAC_PI_2 - 0.5, 0.0])],
            resolution: 0.01,
        };
        assert!(!s.is_valid(&Config::from([0.0, 0.0])));
        assert!(s.is_valid(&Config::from([FRAC_PI_2, 0.0])));
    }

    #[test]
    fn arm_self_collision() {
        let s = Scenario {
            name: "fold".into(),
            space: SpaceBounds::new(vec![-3.2; 3], vec![3.2; 3]).unwrap(),
            world: arm_world(vec![], 3),
            start: Config::from([0.0, 0.0, 0.0]),
            goals: vec![Config::from([0.0, 0.0, 0.0])],
            resolution: 0.01,
        };
        // link 2 folds back across link 0 (non-adjacent)
        assert!(!s.is_valid(&Config::from([0.0, 2.5, 2.5])));
        // adjacent links folding flat onto each other are not tested
        assert!(s.is_valid(&Config::from([0.0, 0.5, 0.5])));
    }
}
