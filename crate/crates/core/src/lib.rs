//! Sampling-based motion planning: RRTConnect, RRTConnect* and
//! RRTConnect* with shortcut reinsertion, plus the scenario model and
//! benchmark harness they run on.

pub mod bench;
pub mod error;
pub mod geometry;
pub mod graph;
pub mod nn;
pub mod path;
pub mod planner;
pub mod shortcut;
pub mod space;
pub mod suite;
pub mod trace;
pub mod world;

pub use error::{PlanError, Result};
pub use graph::{PlanGraph, VertexId};
pub use path::PathSolution;
pub use planner::{plan, plan_observed, PlanResult, PlannerConfig, PlannerKind, Termination};
pub use space::{Config, RandomStream, SpaceBounds};
pub use world::Scenario;
