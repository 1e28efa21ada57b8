//! The built-in benchmark scenarios and loading of scenario directories.
//!
//! The same scenarios ship as JSON under `suite/` in this crate; a test
//! keeps the two in sync.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::{Path, PathBuf};

use crate::error::{PlanError, Result};
use crate::geometry::{ConvexPolygon, Point2};
use crate::space::{Config, SpaceBounds};
use crate::world::{Obstacle, Robot, Scenario, WorldGeometry};

pub const BUILTIN_NAMES: [&str; 4] = ["empty2d", "narrow-gap2d", "thin-posts2d", "arm4-slot"];

fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Obstacle {
    Obstacle::Polygon(
        ConvexPolygon::rect(x0, y0, x1, y1).expect("built-in rectangles are well formed"),
    )
}

fn square_room() -> SpaceBounds {
    SpaceBounds::new(vec![0.0, 0.0], vec![10.0, 10.0]).expect("valid bounds")
}

fn point_world(obstacles: Vec<Obstacle>) -> WorldGeometry {
    WorldGeometry {
        robot: Robot::Point2d,
        obstacles,
    }
}

/// Open square; the optimum is the straight segment of length `8√2`.
pub fn empty2d() -> Scenario {
    Scenario::new(
        "empty2d",
        square_room(),
        point_world(Vec::new()),
        Config::from([1.0, 1.0]),
        vec![Config::from([9.0, 9.0])],
        0.05,
    )
    .expect("valid built-in")
}

/// Two rooms split by a wall at `x ∈ [4.8, 5.2]` with a slot at
/// `y ∈ [4.75, 5.25]`.
pub fn narrow_gap2d() -> Scenario {
    Scenario::new(
        "narrow-gap2d",
        square_room(),
        point_world(vec![rect(4.8, 0.0, 5.2, 4.75), rect(4.8, 5.25, 5.2, 10.0)]),
        Config::from([2.0, 8.0]),
        vec![Config::from([8.0, 8.0])],
        0.05,
    )
    .expect("valid built-in")
}

/// Staggered columns of thin posts between the start and goal sides.
pub fn thin_posts2d() -> Scenario {
    let mut posts = Vec::new();
    for col in 0..6 {
        let x = 2.0 + 1.2 * col as f64;
        let offset = if col % 2 == 0 { 0.0 } else { 0.9 };
        for row in 0..6 {
            let y = 0.3 + offset + 1.8 * row as f64;
            if y + 1.2 <= 10.0 {
                posts.push(rect(x, y, x + 0.08, y + 1.2));
            }
        }
    }
    Scenario::new(
        "thin-posts2d",
        square_room(),
        point_world(posts),
        Config::from([0.5, 5.0]),
        vec![Config::from([9.5, 5.0])],
        0.02,
    )
    .expect("valid built-in")
}

/// Four unit links reaching from straight up to straight ahead through a
/// slot of half-width 0.35 in a wall at `x ∈ [2.0, 2.3]`.
pub fn arm4_slot() -> Scenario {
    Scenario::new(
        "arm4-slot",
        SpaceBounds::new(vec![-PI; 4], vec![PI; 4]).expect("valid bounds"),
        WorldGeometry {
            robot: Robot::PlanarArm {
                link_lengths: vec![1.0; 4],
                base: Point2::new(0.0, 0.0),
            },
            obstacles: vec![rect(2.0, -5.0, 2.3, -0.35), rect(2.0, 0.35, 2.3, 5.0)],
        },
        Config::from([FRAC_PI_2, 0.0, 0.0, 0.0]),
        vec![Config::from([0.0, 0.0, 0.0, 0.0])],
        0.01,
    )
    .expect("valid built-in")
}

pub fn builtin(name: &str) -> Result<Scenario> {
    match name {
        "empty2d" => Ok(empty2d()),
        "narrow-gap2d" => Ok(narrow_gap2d()),
        "thin-posts2d" => Ok(thin_posts2d()),
        "arm4-slot" => Ok(arm4_slot()),
        _ => Err(PlanError::UnknownName {
            what: "scenario",
            name: name.to_string(),
        }),
    }
}

pub fn builtin_suite() -> Vec<Scenario> {
    BUILTIN_NAMES
        .iter()
        .map(|n| builtin(n).expect("listed"))
        .collect()
}

/// Loads every `*.json` file in `dir`, sorted by file name. Any bad file
/// fails the whole load.
pub fn load_suite(dir: impl AsRef<Path>) -> Result<Vec<Scenario>> {
    let dir = dir.as_ref();
    let entries = std::fs::read_dir(dir).map_err(|e| PlanError::io(dir, e))?;
    let mut files: Vec<PathBuf> = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| PlanError::io(dir, e))?.path();
        if path.extension().is_some_and(|x| x == "json") {
            files.push(path);
        }
    }
    files.sort();
    if files.is_empty() {
        return Err(PlanError::InvalidArgument(format!(
            "no scenario files in {}",
            dir.display()
        )));
    }
    files
        .iter()
        .map(|p| {
            Scenario::load(p).map_err(|e| match e {
                PlanError::Io { .. } => e,
                other => PlanError::Runtime(format!("{}: {other}", p.display())),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::distance;

    fn suite_dir() -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("suite")
    }

    #[test]
    fn shipped_files_match_builtins() {
        // PLAN_WRITE_SUITE=1 regenerates the files
        if std::env::var_os("PLAN_WRITE_SUITE").is_some() {
            for s in builtin_suite() {
                std::fs::write(
                    suite_dir().join(format!("{}.json", s.name())),
                    s.to_json() + "\n",
                )
                .unwrap();
            }
        }
        for s in builtin_suite() {
            let loaded = Scenario::load(suite_dir().join(format!("{}.json", s.name()))).unwrap();
            assert_eq!(loaded, s);
        }
    }

    #[test]
    fn load_suite_sorts_by_file_name() {
        let names: Vec<String> = load_suite(suite_dir())
            .unwrap()
            .iter()
            .map(|s| s.name().to_string())
            .collect();
        assert_eq!(
            names,
            ["arm4-slot", "empty2d", "narrow-gap2d", "thin-posts2d"]
        );
    }

    #[test]
    fn straight_lines_are_blocked_where_expected() {
        let ng = narrow_gap2d();
        assert!(!ng.motion_valid(ng.start(), &ng.goals()[0]));
        assert!(ng.motion_valid(&Config::from([1.0, 5.0]), &Config::from([9.0, 5.0])));
        let tp = thin_posts2d();
        assert!(!tp.motion_valid(tp.start(), &tp.goals()[0]));
        let arm = arm4_slot();
        assert!(!arm.motion_valid(arm.start(), &arm.goals()[0]));
        let e = empty2d();
        assert!((distance(e.start(), &e.goals()[0]) - 8.0 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn unknown_builtin() {
        assert!(builtin("maze").is_err());
    }
}
