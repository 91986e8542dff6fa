//! Grid-based motion planning with convex-corner guided RRT*.
//!
//! The crate is organised around the planning pipeline:
//!
//! * [`gridworld`] owns the occupancy grid, safety inflation, collision
//!   queries, convex-corner extraction, map generation and Netpbm I/O.
//! * [`geometry`] holds continuous primitives and path metrics.
//! * [`planners`] implements visibility-graph A*, RRT* with pluggable
//!   samplers, and the convex-corner guided planner.
//! * [`guidance`] produces and perturbs guidance masks and exports datasets.
//! * [`bench`] runs repeated trials and writes reports.

pub mod bench;
pub mod error;
pub mod geometry;
pub mod gridworld;
pub mod guidance;
pub mod planners;
pub mod rng;

pub use error::{Error, Result};
pub use geometry::{EllipseSpec, HullPolygon, PathPlan, Point};
pub use gridworld::{CornerSet, Difficulty, GridMap};
pub use guidance::{GuidanceMask, NoiseKind, NoiseSpec};
pub use planners::{PlannerConfig, PlannerKind, RunRecord};
