//! Simultaneous collision-free 3D path planning for swarms of unlabeled
//! agents.
//!
//! Start and goal positions are quantized onto a cubic grid over their
//! bounding box, the grid becomes a flow network in which every cell admits
//! at most one transit (node splitting with unit capacities), and a
//! min-cost max-flow solve yields one vertex-disjoint path per agent — the
//! paths cannot collide because they never share a cell. Waypoints sampled
//! along each path drive the agents.
//!
//! Main entry points: [`planner::Scenario`] and [`planner::solve`] for
//! planning, [`verifier::check_plan`] for independent validation, and
//! [`format`] for the JSON document formats.

pub mod error;
pub mod flow;
pub mod format;
pub mod geometry;
pub mod patterns;
pub mod planner;
pub mod space_graph;
pub mod state_graph;
pub mod verifier;

pub use error::{Error, Result};
