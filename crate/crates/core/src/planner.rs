//! End-to-end orchestration: scenario in, per-agent waypoint plan out.
//!
//! The pipeline is anchor (geodetic inputs only) -> local frame -> bounding
//! box -> grid -> space graph -> state graph -> max flow -> path
//! decomposition -> agent assignment -> waypoint sampling. Planning succeeds
//! exactly when the flow value reaches the agent count.

use std::collections::HashMap;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::flow::{self, CellPath, Network, Solver, StepReport};
use crate::geometry::{
    self, cell_center, find_bounding_box, lla_to_local, median_anchor, point_to_cell, GeoCoord,
    GridIndex, GridSpec, LocalPoint,
};
use crate::space_graph::{create_space_graph, Obstacle, SpaceGraph};
use crate::state_graph::{create_state_graph, StateGraph};

/// Default grid cell side in meters, sized to consumer GPS tolerance.
pub const DEFAULT_CELL_SIZE: f64 = 2.0;
/// Default number of waypoints sampled per agent path.
pub const DEFAULT_WAYPOINT_COUNT: usize = 10;

/// Start or goal positions; the two sets of a scenario must use the same kind.
#[derive(Debug, Clone, PartialEq)]
pub enum PointSet {
    Local(Vec<LocalPoint>),
    Geodetic(Vec<GeoCoord>),
}

impl PointSet {
    pub fn len(&self) -> usize {
        match self {
            PointSet::Local(v) => v.len(),
            PointSet::Geodetic(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// The planner's sole input.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub starts: PointSet,
    pub goals: PointSet,
    /// Obstacle boxes, always in the local frame (for geodetic scenarios the
    /// frame is anchored at the median start position).
    pub obstacles: Vec<Obstacle>,
    pub cell_size: f64,
    pub vertical_multiplier: u32,
    pub padding: usize,
    pub waypoint_count: usize,
    pub clamp_ground: bool,
}

impl Scenario {
    /// Local-frame scenario with default knobs.
    pub fn local(starts: Vec<LocalPoint>, goals: Vec<LocalPoint>) -> Self {
        Self {
            starts: PointSet::Local(starts),
            goals: PointSet::Local(goals),
            obstacles: Vec::new(),
            cell_size: DEFAULT_CELL_SIZE,
            vertical_multiplier: crate::space_graph::DEFAULT_VERTICAL_MULTIPLIER,
            padding: 0,
            waypoint_count: DEFAULT_WAYPOINT_COUNT,
            clamp_ground: false,
        }
    }

    /// Geodetic scenario with default knobs.
    pub fn geodetic(starts: Vec<GeoCoord>, goals: Vec<GeoCoord>) -> Self {
        Self {
            starts: PointSet::Geodetic(starts),
            goals: PointSet::Geodetic(goals),
            ..Self::local(Vec::new(), Vec::new())
        }
    }

    pub fn agent_count(&self) -> usize {
        self.starts.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.starts.is_empty() {
            return Err(Error::InvalidScenario("at least one agent required".into()));
        }
        if self.starts.len() != self.goals.len() {
            return Err(Error::InvalidScenario(format!(
                "start count {} differs from goal count {}",
                self.starts.len(),
                self.goals.len()
            )));
        }
        match (&self.starts, &self.goals) {
            (PointSet::Local(s), PointSet::Local(g)) => {
                for p in s.iter().chain(g) {
                    if !p.is_finite() {
                        return Err(Error::InvalidScenario("position is not finite".into()));
                    }
                }
            }
            (PointSet::Geodetic(s), PointSet::Geodetic(g)) => {
                for p in s.iter().chain(g) {
                    p.validate()?;
                }
            }
            _ => {
                return Err(Error::InvalidScenario(
                    "starts and goals must use the same coordinate kind".into(),
                ))
            }
        }
        if !(self.cell_size > 0.0) || !self.cell_size.is_finite() {
            return Err(Error::InvalidCellSize(self.cell_size));
        }
        if self.vertical_multiplier < 1 {
            return Err(Error::InvalidMultiplier(self.vertical_multiplier));
        }
        if self.waypoint_count < 1 {
            return Err(Error::InvalidWaypointCount(self.waypoint_count));
        }
        for o in &self.obstacles {
            o.validate()?;
        }
        Ok(())
    }
}

/// Everything derived from a scenario up to (but not including) the flow solve.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub anchor: Option<GeoCoord>,
    pub starts_local: Vec<LocalPoint>,
    pub goals_local: Vec<LocalPoint>,
    pub grid: GridSpec,
    pub space: SpaceGraph,
    pub state: StateGraph,
    pub start_cells: Vec<GridIndex>,
    pub goal_cells: Vec<GridIndex>,
}

/// Builds grid, space graph, and state graph for a scenario.
pub fn prepare(scenario: &Scenario) -> Result<Prepared> {
    scenario.validate()?;

    let (anchor, starts_local, goals_local) = match (&scenario.starts, &scenario.goals) {
        (PointSet::Local(s), PointSet::Local(g)) => (None, s.clone(), g.clone()),
        (PointSet::Geodetic(s), PointSet::Geodetic(g)) => {
            let anchor = median_anchor(s)?;
            let to_local = |points: &[GeoCoord]| -> Result<Vec<LocalPoint>> {
                points.iter().map(|&p| lla_to_local(p, anchor)).collect()
            };
            (Some(anchor), to_local(s)?, to_local(g)?)
        }
        _ => unreachable!("validate() rejects mixed kinds"),
    };

    let mut all_points = starts_local.clone();
    all_points.extend_from_slice(&goals_local);
    let bbox = find_bounding_box(&all_points)?;
    let grid = geometry::subdivide(&bbox, scenario.cell_size, scenario.padding, scenario.clamp_ground)?;

    let start_cells: Vec<GridIndex> =
        starts_local.iter().map(|&p| point_to_cell(p, &grid)).collect::<Result<_>>()?;
    let goal_cells: Vec<GridIndex> =
        goals_local.iter().map(|&p| point_to_cell(p, &grid)).collect::<Result<_>>()?;

    let space = create_space_graph(&grid, &scenario.obstacles, scenario.vertical_multiplier)?;
    let state = create_state_graph(&space, &start_cells, &goal_cells)?;

    Ok(Prepared { anchor, starts_local, goals_local, grid, space, state, start_cells, goal_cells })
}

/// One agent's routed plan.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AgentPlan {
    pub index: usize,
    /// Raw input position, kept so an executor can add a final fine-positioning move.
    pub start_position: LocalPoint,
    pub goal_position: LocalPoint,
    pub start_cell: GridIndex,
    pub goal_cell: GridIndex,
    pub cells: Vec<GridIndex>,
    pub waypoints: Vec<LocalPoint>,
    pub cost: u64,
}

/// Deterministic solver statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SolverStats {
    pub flow_value: u64,
    pub total_cost: u64,
    pub iterations: usize,
    pub state_nodes: usize,
    pub state_edges: usize,
}

/// Wall-clock phase timings in milliseconds. Non-deterministic; excluded
/// from plan comparisons.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Timings {
    pub total_ms: f64,
    pub build_ms: f64,
    pub solve_ms: f64,
    pub decompose_ms: f64,
}

/// The planner's sole output.
#[derive(Debug, Clone)]
pub struct Plan {
    pub grid: GridSpec,
    pub agents: Vec<AgentPlan>,
    pub stats: SolverStats,
    pub timings: Timings,
}

impl Plan {
    /// Equality over the deterministic payload (timings excluded).
    pub fn same_routes(&self, other: &Plan) -> bool {
        self.grid == other.grid && self.agents == other.agents && self.stats == other.stats
    }
}

/// Plans a scenario.
pub fn solve(scenario: &Scenario) -> Result<Plan> {
    solve_traced(scenario, &mut |_| {})
}

/// Plans a scenario, reporting each augmentation to `observer`.
pub fn solve_traced(
    scenario: &Scenario,
    observer: &mut dyn FnMut(&StepReport),
) -> Result<Plan> {
    let t_total = Instant::now();
    let t_build = Instant::now();
    let prep = prepare(scenario)?;
    let net = Network::from_state_graph(&prep.state);
    let build_ms = t_build.elapsed().as_secs_f64() * 1e3;

    let t_solve = Instant::now();
    let mut solver = Solver::new(&net);
    while let Some(report) = solver.step()? {
        observer(&report);
    }
    let solve_ms = t_solve.elapsed().as_secs_f64() * 1e3;

    let agents = scenario.agent_count();
    let flow = solver.flow_state();
    if flow.value < agents as u64 {
        return Err(Error::Infeasible { value: flow.value, agents });
    }

    let t_decompose = Instant::now();
    let paths = flow::decompose_paths(&prep.state, flow)?;
    let assignment = assign_agents(&prep.starts_local, &paths, &prep.grid)?;

    // Each goal cell is claimed by exactly one path tail.
    let goal_by_cell: HashMap<GridIndex, usize> =
        prep.goal_cells.iter().enumerate().map(|(i, &c)| (c, i)).collect();

    let mut agent_plans = Vec::with_capacity(agents);
    for (agent, &path_idx) in assignment.iter().enumerate() {
        let path = &paths[path_idx];
        let goal_cell = *path.cells.last().expect("paths are never empty");
        let goal_idx = *goal_by_cell
            .get(&goal_cell)
            .ok_or_else(|| Error::AssignmentFailed("path tail is not a goal cell".into()))?;
        let waypoints = sample_waypoints(&path.cells, &prep.grid, scenario.waypoint_count)?;
        agent_plans.push(AgentPlan {
            index: agent,
            start_position: prep.starts_local[agent],
            goal_position: prep.goals_local[goal_idx],
            start_cell: prep.start_cells[agent],
            goal_cell,
            cells: path.cells.clone(),
            waypoints,
            cost: path.cost,
        });
    }
    let decompose_ms = t_decompose.elapsed().as_secs_f64() * 1e3;

    debug_assert!(flow.cost >= 0);
    Ok(Plan {
        grid: prep.grid,
        agents: agent_plans,
        stats: SolverStats {
            flow_value: flow.value,
            total_cost: flow.cost as u64,
            iterations: solver.iterations(),
            state_nodes: prep.state.node_count(),
            state_edges: prep.state.edges().len(),
        },
        timings: Timings {
            total_ms: t_total.elapsed().as_secs_f64() * 1e3,
            build_ms,
            solve_ms,
            decompose_ms,
        },
    })
}

/// Samples `n` points at equal arc length along the polyline of cell
/// centers, endpoints included. Single-cell paths yield `n` copies of the
/// cell center.
pub fn sample_waypoints(path: &[GridIndex], grid: &GridSpec, n: usize) -> Result<Vec<LocalPoint>> {
    if path.is_empty() {
        return Err(Error::AssignmentFailed("cannot sample an empty path".into()));
    }
    if n < 1 || (path.len() > 1 && n < 2) {
        return Err(Error::InvalidWaypointCount(n));
    }
    let centers: Vec<LocalPoint> =
        path.iter().map(|&c| cell_center(c, grid)).collect::<Result<_>>()?;
    if centers.len() == 1 {
        return Ok(vec![centers[0]; n]);
    }

    // Every segment has length cell_size, so arc length is linear in the
    // segment index.
    let segments = centers.len() - 1;
    let total = segments as f64 * grid.cell_size;
    let mut out = Vec::with_capacity(n);
    out.push(centers[0]);
    for k in 1..n - 1 {
        let arc = total * k as f64 / (n - 1) as f64;
        let mut seg = (arc / grid.cell_size).floor() as usize;
        if seg >= segments {
            seg = segments - 1;
        }
        let frac = arc / grid.cell_size - seg as f64;
        let (a, b) = (centers[seg], centers[seg + 1]);
        out.push(LocalPoint::new(
            a.x + frac * (b.x - a.x),
            a.y + frac * (b.y - a.y),
            a.z + frac * (b.z - a.z),
        ));
    }
    out.push(centers[segments]);
    Ok(out)
}

/// Matches each agent to the path whose first cell contains its start
/// position. Returns the path index per agent; the mapping is bijective.
pub fn assign_agents(
    starts: &[LocalPoint],
    paths: &[CellPath],
    grid: &GridSpec,
) -> Result<Vec<usize>> {
    let mut by_head: HashMap<GridIndex, usize> = HashMap::new();
    for (i, p) in paths.iter().enumerate() {
        let head = *p
            .cells
            .first()
            .ok_or_else(|| Error::AssignmentFailed("path with no cells".into()))?;
        if by_head.insert(head, i).is_some() {
            return Err(Error::AssignmentFailed(format!(
                "two paths start in cell ({}, {}, {})",
                head.ix, head.iy, head.iz
            )));
        }
    }
    if starts.len() != paths.len() {
        return Err(Error::AssignmentFailed(format!(
            "{} starts for {} paths",
            starts.len(),
            paths.len()
        )));
    }
    starts
        .iter()
        .map(|&p| {
            let cell = point_to_cell(p, grid)?;
            by_head.get(&cell).copied().ok_or_else(|| {
                Error::AssignmentFailed(format!(
                    "no path starts in cell ({}, {}, {})",
                    cell.ix, cell.iy, cell.iz
                ))
            })
        })
        .collect()
}
