//! Versioned JSON documents for scenarios and plans.
//!
//! Field names mirror the in-memory types one to one. Start and goal points
//! are self-describing: `{x, y, z}` objects are local-frame meters,
//! `{latitude, longitude, altitude}` objects are geodetic fixes. Wall-clock
//! timings live only in the plan's `metadata` object, which consumers must
//! ignore when comparing plans.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{GeoCoord, GridSpec, LocalPoint};
use crate::planner::{
    AgentPlan, Plan, PointSet, Scenario, SolverStats, Timings, DEFAULT_CELL_SIZE,
    DEFAULT_WAYPOINT_COUNT,
};
use crate::space_graph::{Obstacle, DEFAULT_VERTICAL_MULTIPLIER};

pub const SCENARIO_VERSION: u32 = 1;
pub const PLAN_VERSION: u32 = 1;

/// A start/goal entry; the field names decide the coordinate kind.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
enum PointDoc {
    Geodetic(GeoCoord),
    Local(LocalPoint),
}

fn default_cell_size() -> f64 {
    DEFAULT_CELL_SIZE
}

fn default_multiplier() -> u32 {
    DEFAULT_VERTICAL_MULTIPLIER
}

fn default_waypoints() -> usize {
    DEFAULT_WAYPOINT_COUNT
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    version: u32,
    starts: Vec<PointDoc>,
    goals: Vec<PointDoc>,
    #[serde(default)]
    obstacles: Vec<Obstacle>,
    #[serde(default = "default_cell_size")]
    cell_size: f64,
    #[serde(default = "default_multiplier")]
    vertical_multiplier: u32,
    #[serde(default)]
    padding: usize,
    #[serde(default = "default_waypoints")]
    waypoint_count: usize,
    #[serde(default)]
    clamp_ground: bool,
}

fn collect_points(docs: &[PointDoc], what: &str) -> Result<PointSet> {
    let mut local = Vec::new();
    let mut geodetic = Vec::new();
    for d in docs {
        match d {
            PointDoc::Local(p) => local.push(*p),
            PointDoc::Geodetic(p) => geodetic.push(*p),
        }
    }
    match (local.is_empty(), geodetic.is_empty()) {
        (false, true) => Ok(PointSet::Local(local)),
        (true, false) => Ok(PointSet::Geodetic(geodetic)),
        (true, true) => Ok(PointSet::Local(Vec::new())),
        (false, false) => Err(Error::Format(format!(
            "{what} mixes local and geodetic points"
        ))),
    }
}

fn emit_points(set: &PointSet) -> Vec<PointDoc> {
    match set {
        PointSet::Local(v) => v.iter().map(|&p| PointDoc::Local(p)).collect(),
        PointSet::Geodetic(v) => v.iter().map(|&p| PointDoc::Geodetic(p)).collect(),
    }
}

/// Parses and schema-checks a scenario document.
pub fn scenario_from_json(text: &str) -> Result<Scenario> {
    let doc: ScenarioDoc =
        serde_json::from_str(text).map_err(|e| Error::Format(format!("scenario: {e}")))?;
    if doc.version != SCENARIO_VERSION {
        return Err(Error::Format(format!(
            "unsupported scenario version {}, expected {SCENARIO_VERSION}",
            doc.version
        )));
    }
    Ok(Scenario {
        starts: collect_points(&doc.starts, "starts")?,
        goals: collect_points(&doc.goals, "goals")?,
        obstacles: doc.obstacles,
        cell_size: doc.cell_size,
        vertical_multiplier: doc.vertical_multiplier,
        padding: doc.padding,
        waypoint_count: doc.waypoint_count,
        clamp_ground: doc.clamp_ground,
    })
}

/// Serializes a scenario as pretty JSON with a trailing newline.
pub fn scenario_to_json(scenario: &Scenario) -> String {
    let doc = ScenarioDoc {
        version: SCENARIO_VERSION,
        starts: emit_points(&scenario.starts),
        goals: emit_points(&scenario.goals),
        obstacles: scenario.obstacles.clone(),
        cell_size: scenario.cell_size,
        vertical_multiplier: scenario.vertical_multiplier,
        padding: scenario.padding,
        waypoint_count: scenario.waypoint_count,
        clamp_ground: scenario.clamp_ground,
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("scenario serialization");
    out.push('\n');
    out
}

/// Wall-clock phase timings; everything here is ignored by comparisons.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct PlanMetadata {
    pub total_ms: f64,
    pub build_ms: f64,
    pub solve_ms: f64,
    pub decompose_ms: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanDoc {
    version: u32,
    metadata: PlanMetadata,
    grid: GridSpec,
    stats: SolverStats,
    agents: Vec<AgentPlan>,
}

/// Serializes a plan as pretty JSON with a trailing newline. Deterministic
/// except for the `metadata` object.
pub fn plan_to_json(plan: &Plan) -> String {
    let doc = PlanDoc {
        version: PLAN_VERSION,
        metadata: PlanMetadata {
            total_ms: plan.timings.total_ms,
            build_ms: plan.timings.build_ms,
            solve_ms: plan.timings.solve_ms,
            decompose_ms: plan.timings.decompose_ms,
        },
        grid: plan.grid,
        stats: plan.stats,
        agents: plan.agents.clone(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("plan serialization");
    out.push('\n');
    out
}

/// Parses and schema-checks a plan document.
pub fn plan_from_json(text: &str) -> Result<Plan> {
    let doc: PlanDoc =
        serde_json::from_str(text).map_err(|e| Error::Format(format!("plan: {e}")))?;
    if doc.version != PLAN_VERSION {
        return Err(Error::Format(format!(
            "unsupported plan version {}, expected {PLAN_VERSION}",
            doc.version
        )));
    }
    Ok(Plan {
        grid: doc.grid,
        agents: doc.agents,
        stats: doc.stats,
        timings: Timings {
            total_ms: doc.metadata.total_ms,
            build_ms: doc.metadata.build_ms,
            solve_ms: doc.metadata.solve_ms,
            decompose_ms: doc.metadata.decompose_ms,
        },
    })
}
