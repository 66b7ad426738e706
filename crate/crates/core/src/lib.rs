//! Minimum-length curvature–straight interception paths that tour an
//! ordered list of circular obstacles.
//!
//! The pursuer path is a chain of blocks, one per turning circle (its own
//! circle, then each obstacle). Each block is a left arc, a right arc and a
//! straight, so a scenario with `n` obstacles has `3n + 3` pursuer lengths
//! plus the target's travelled length. [`solver::plan`] finds the shortest
//! feasible length vector; [`validate`] replays it under the kinematics.

pub mod error;
pub mod exec;
pub mod geo;
pub mod geometry;
pub mod model;
pub mod report;
pub mod scenario;
pub mod solution;
pub mod solver;
pub mod validate;

pub use error::{Error, Result};
pub use geometry::{ObstacleSpec, Point, Pose, SegmentSpec, SignedCurvature};
pub use model::{LengthVector, ScenarioConfig, Turn, TurnPattern};
pub use solution::{PathSolution, SolutionSource};
pub use solver::{plan, PlanReport, SolveMode, SolverSettings};
