//! Independent plan validation and the exhaustive optimality oracle.
//!
//! Nothing here reuses the solver's path machinery: the grid frame is
//! rederived from the scenario, obstacle blocking is recomputed with a local
//! predicate, and the oracle enumerates vertex-disjoint path tuples by plain
//! depth-first search. This module is the correctness anchor the solver is
//! tested against.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{
    find_bounding_box, lla_to_local, median_anchor, point_to_cell, subdivide, GridIndex, GridSpec,
    LocalPoint,
};
use crate::planner::{Plan, PointSet, Scenario};

/// Outcome of a single plan check.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// All check outcomes for one plan.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_names(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            if c.passed {
                writeln!(f, "{}: PASS", c.name)?;
            } else {
                writeln!(f, "{}: FAIL - {}", c.name, c.detail)?;
            }
        }
        Ok(())
    }
}

/// Scenario-derived facts the checks run against.
struct Frame {
    starts_local: Vec<LocalPoint>,
    goals_local: Vec<LocalPoint>,
    grid: GridSpec,
}

fn derive_frame(scenario: &Scenario) -> Result<Frame> {
    scenario.validate()?;
    let (starts_local, goals_local) = match (&scenario.starts, &scenario.goals) {
        (PointSet::Local(s), PointSet::Local(g)) => (s.clone(), g.clone()),
        (PointSet::Geodetic(s), PointSet::Geodetic(g)) => {
            let anchor = median_anchor(s)?;
            (
                s.iter().map(|&p| lla_to_local(p, anchor)).collect::<Result<Vec<_>>>()?,
                g.iter().map(|&p| lla_to_local(p, anchor)).collect::<Result<Vec<_>>>()?,
            )
        }
        _ => unreachable!("validate() rejects mixed kinds"),
    };
    let mut all = starts_local.clone();
    all.extend_from_slice(&goals_local);
    let bbox = find_bounding_box(&all)?;
    let grid = subdivide(&bbox, scenario.cell_size, scenario.padding, scenario.clamp_ground)?;
    Ok(Frame { starts_local, goals_local, grid })
}

/// Inclusive cell-volume vs. obstacle-box test, written here on purpose so
/// the verifier does not inherit a space-graph bug.
fn cell_blocked(grid: &GridSpec, cell: GridIndex, scenario: &Scenario) -> bool {
    let d = grid.cell_size;
    let lo = [
        grid.origin.x + cell.ix as f64 * d,
        grid.origin.y + cell.iy as f64 * d,
        grid.origin.z + cell.iz as f64 * d,
    ];
    scenario.obstacles.iter().any(|o| {
        let omin = [o.min_corner.x, o.min_corner.y, o.min_corner.z];
        let omax = [o.max_corner.x, o.max_corner.y, o.max_corner.z];
        (0..3).all(|a| lo[a] <= omax[a] && omin[a] <= lo[a] + d)
    })
}

fn axis_adjacent(a: GridIndex, b: GridIndex) -> bool {
    let dx = (a.ix as i64 - b.ix as i64).abs();
    let dy = (a.iy as i64 - b.iy as i64).abs();
    let dz = (a.iz as i64 - b.iz as i64).abs();
    dx + dy + dz == 1
}

/// Validates a plan against its scenario: cell-disjointness, continuity,
/// endpoint correctness, obstacle avoidance, and cost accounting.
pub fn check_plan(plan: &Plan, scenario: &Scenario) -> Result<Report> {
    let frame = derive_frame(scenario)?;
    if frame.grid != plan.grid {
        return Err(Error::GridMismatch(format!(
            "scenario derives dims {:?} cell {} origin ({}, {}, {}), plan carries dims {:?} cell {}",
            frame.grid.dims,
            frame.grid.cell_size,
            frame.grid.origin.x,
            frame.grid.origin.y,
            frame.grid.origin.z,
            plan.grid.dims,
            plan.grid.cell_size,
        )));
    }

    let mut checks = Vec::new();

    // (a) No grid cell in two paths (or twice in one).
    let mut seen: HashMap<GridIndex, usize> = HashMap::new();
    let mut clash = None;
    for agent in &plan.agents {
        for &c in &agent.cells {
            if let Some(&other) = seen.get(&c) {
                clash = Some((c, other, agent.index));
                break;
            }
            seen.insert(c, agent.index);
        }
    }
    checks.push(match clash {
        None => Check { name: "disjointness", passed: true, detail: String::new() },
        Some((c, a, b)) => Check {
            name: "disjointness",
            passed: false,
            detail: format!("cell ({}, {}, {}) used by agents {a} and {b}", c.ix, c.iy, c.iz),
        },
    });

    // (b) Consecutive cells differ by one step along one axis.
    let mut discontinuity = None;
    for agent in &plan.agents {
        if agent.cells.is_empty() {
            discontinuity = Some(format!("agent {} has an empty path", agent.index));
            break;
        }
        for pair in agent.cells.windows(2) {
            if !axis_adjacent(pair[0], pair[1]) {
                discontinuity = Some(format!(
                    "agent {} jumps from ({}, {}, {}) to ({}, {}, {})",
                    agent.index, pair[0].ix, pair[0].iy, pair[0].iz, pair[1].ix, pair[1].iy,
                    pair[1].iz
                ));
                break;
            }
        }
    }
    checks.push(Check {
        name: "continuity",
        passed: discontinuity.is_none(),
        detail: discontinuity.unwrap_or_default(),
    });

    // (c) Heads are the start cells agent by agent; tails hit every goal cell
    // exactly once.
    let mut endpoint_issue = None;
    if plan.agents.len() != frame.starts_local.len() {
        endpoint_issue =
            Some(format!("plan has {} agents, scenario {}", plan.agents.len(), frame.starts_local.len()));
    } else {
        let mut tails = Vec::new();
        for agent in &plan.agents {
            let derived_start = point_to_cell(frame.starts_local[agent.index], &frame.grid)?;
            match (agent.cells.first(), agent.cells.last()) {
                (Some(&head), Some(&tail)) => {
                    if head != derived_start || head != agent.start_cell {
                        endpoint_issue = Some(format!(
                            "agent {} head ({}, {}, {}) does not match its start cell",
                            agent.index, head.ix, head.iy, head.iz
                        ));
                        break;
                    }
                    if tail != agent.goal_cell {
                        endpoint_issue =
                            Some(format!("agent {} tail differs from recorded goal cell", agent.index));
                        break;
                    }
                    tails.push(tail);
                }
                _ => {
                    endpoint_issue = Some(format!("agent {} has an empty path", agent.index));
                    break;
                }
            }
        }
        if endpoint_issue.is_none() {
            let goal_cells: HashSet<GridIndex> = frame
                .goals_local
                .iter()
                .map(|&p| point_to_cell(p, &frame.grid))
                .collect::<Result<_>>()?;
            let tail_set: HashSet<GridIndex> = tails.iter().copied().collect();
            if tail_set.len() != tails.len() || tail_set != goal_cells {
                endpoint_issue = Some("path tails are not a bijection onto the goal cells".into());
            }
        }
    }
    checks.push(Check {
        name: "endpoints",
        passed: endpoint_issue.is_none(),
        detail: endpoint_issue.unwrap_or_default(),
    });

    // (d) No path cell blocked or outside the grid.
    let mut obstacle_issue = None;
    for agent in &plan.agents {
        for &c in &agent.cells {
            if !frame.grid.contains_index(c) {
                obstacle_issue = Some(format!(
                    "agent {} leaves the grid at ({}, {}, {})",
                    agent.index, c.ix, c.iy, c.iz
                ));
                break;
            }
            if cell_blocked(&frame.grid, c, scenario) {
                obstacle_issue = Some(format!(
                    "agent {} crosses blocked cell ({}, {}, {})",
                    agent.index, c.ix, c.iy, c.iz
                ));
                break;
            }
        }
    }
    checks.push(Check {
        name: "obstacles",
        passed: obstacle_issue.is_none(),
        detail: obstacle_issue.unwrap_or_default(),
    });

    // (e) Recomputed step costs match the recorded ones.
    let h = scenario.vertical_multiplier as u64;
    let mut cost_issue = None;
    let mut total = 0u64;
    for agent in &plan.agents {
        let mut cost = 0u64;
        for pair in agent.cells.windows(2) {
            cost += if pair[0].iz != pair[1].iz { h } else { 1 };
        }
        total += cost;
        if cost != agent.cost {
            cost_issue =
                Some(format!("agent {} recorded cost {}, recomputed {}", agent.index, agent.cost, cost));
            break;
        }
    }
    if cost_issue.is_none() && total != plan.stats.total_cost {
        cost_issue = Some(format!(
            "plan total cost {} but path costs sum to {total}",
            plan.stats.total_cost
        ));
    }
    checks.push(Check {
        name: "cost",
        passed: cost_issue.is_none(),
        detail: cost_issue.unwrap_or_default(),
    });

    Ok(Report { checks })
}

/// Size guards for the exhaustive oracle.
#[derive(Debug, Clone, Copy)]
pub struct OracleLimits {
    pub max_cells: usize,
    pub max_agents: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self { max_cells: 40, max_agents: 3 }
    }
}

/// What the oracle found: how many agents can be routed simultaneously, and
/// the minimum total cost when all of them can.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleOutcome {
    pub routable: usize,
    pub min_total_cost: Option<u64>,
}

/// Scenario-level entry: derives the grid frame, recomputes blocking, and
/// runs the cell-level oracle.
pub fn brute_force_optimum(scenario: &Scenario, limits: OracleLimits) -> Result<OracleOutcome> {
    let frame = derive_frame(scenario)?;
    let cells = frame.grid.cell_count();
    let blocked: Vec<bool> = (0..cells)
        .map(|lin| cell_blocked(&frame.grid, frame.grid.from_linear(lin), scenario))
        .collect();
    let starts: Vec<usize> = frame
        .starts_local
        .iter()
        .map(|&p| Ok(frame.grid.linear_index(point_to_cell(p, &frame.grid)?)))
        .collect::<Result<_>>()?;
    let goals: Vec<usize> = frame
        .goals_local
        .iter()
        .map(|&p| Ok(frame.grid.linear_index(point_to_cell(p, &frame.grid)?)))
        .collect::<Result<_>>()?;
    brute_force_optimum_cells(
        frame.grid.dims,
        &blocked,
        &starts,
        &goals,
        scenario.vertical_multiplier,
        limits,
    )
}

/// Exhaustive search over every goal assignment and every tuple of simple
/// vertex-disjoint paths, with admissible cost pruning. Exponential, hence
/// the hard limits.
pub fn brute_force_optimum_cells(
    dims: [usize; 3],
    blocked: &[bool],
    starts: &[usize],
    goals: &[usize],
    vertical_multiplier: u32,
    limits: OracleLimits,
) -> Result<OracleOutcome> {
    let cells = dims[0] * dims[1] * dims[2];
    if cells > limits.max_cells {
        return Err(Error::OracleLimit(format!(
            "{cells} cells exceeds the {}-cell cap",
            limits.max_cells
        )));
    }
    if starts.len() > limits.max_agents {
        return Err(Error::OracleLimit(format!(
            "{} agents exceeds the {}-agent cap",
            starts.len(),
            limits.max_agents
        )));
    }
    if blocked.len() != cells || starts.len() != goals.len() {
        return Err(Error::InvalidScenario("oracle inputs are inconsistent".into()));
    }

    let n = starts.len();
    let search = OracleSearch { dims, blocked, h: vertical_multiplier as u64 };
    for k in (1..=n).rev() {
        let minimize = k == n;
        let mut best: Option<u64> = None;
        let mut feasible = false;
        for start_subset in combinations(n, k) {
            for goal_subset in combinations(n, k) {
                for perm in permutations(k) {
                    let agents: Vec<(usize, usize)> = (0..k)
                        .map(|i| (starts[start_subset[i]], goals[goal_subset[perm[i]]]))
                        .collect();
                    if search.route_tuple(&agents, minimize, &mut best) {
                        feasible = true;
                        if !minimize {
                            return Ok(OracleOutcome { routable: k, min_total_cost: None });
                        }
                    }
                }
            }
        }
        if feasible {
            return Ok(OracleOutcome { routable: k, min_total_cost: best });
        }
    }
    Ok(OracleOutcome { routable: 0, min_total_cost: None })
}

struct OracleSearch<'a> {
    dims: [usize; 3],
    blocked: &'a [bool],
    h: u64,
}

impl OracleSearch<'_> {
    fn coords(&self, cell: usize) -> (usize, usize, usize) {
        let x = cell % self.dims[0];
        let rest = cell / self.dims[0];
        (x, rest % self.dims[1], rest / self.dims[1])
    }

    /// Admissible lower bound: obstacle-free weighted Manhattan distance.
    fn manhattan(&self, a: usize, b: usize) -> u64 {
        let (ax, ay, az) = self.coords(a);
        let (bx, by, bz) = self.coords(b);
        let dx = ax.abs_diff(bx) as u64;
        let dy = ay.abs_diff(by) as u64;
        let dz = az.abs_diff(bz) as u64;
        dx + dy + self.h * dz
    }

    fn neighbors(&self, cell: usize, goal: usize) -> Vec<(usize, u64)> {
        let (x, y, z) = self.coords(cell);
        let mut out = Vec::with_capacity(6);
        let dims = self.dims;
        let mut push = |nx: i64, ny: i64, nz: i64, w: u64| {
            if nx >= 0
                && (nx as usize) < dims[0]
                && ny >= 0
                && (ny as usize) < dims[1]
                && nz >= 0
                && (nz as usize) < dims[2]
            {
                let lin = ((nz as usize * dims[1]) + ny as usize) * dims[0] + nx as usize;
                out.push((lin, w));
            }
        };
        let (x, y, z) = (x as i64, y as i64, z as i64);
        push(x + 1, y, z, 1);
        push(x - 1, y, z, 1);
        push(x, y + 1, z, 1);
        push(x, y - 1, z, 1);
        push(x, y, z + 1, self.h);
        push(x, y, z - 1, self.h);
        // Goal-directed order makes the first complete tuple near-optimal,
        // which tightens the pruning bound early. Stable, so deterministic.
        out.sort_by_key(|&(lin, _)| self.manhattan(lin, goal));
        out
    }

    /// Returns true when at least one disjoint routing of `agents` exists.
    /// With `minimize`, explores everything below the best known cost and
    /// updates it.
    fn route_tuple(&self, agents: &[(usize, usize)], minimize: bool, best: &mut Option<u64>) -> bool {
        let mut used = vec![false; self.blocked.len()];
        // Every endpoint ends up on its own path, so no other path may touch
        // it; two agents claiming the same endpoint cell is already fatal.
        let mut owner: HashMap<usize, usize> = HashMap::new();
        for (i, &(s, g)) in agents.iter().enumerate() {
            if self.blocked[s] || self.blocked[g] {
                return false;
            }
            for c in [s, g] {
                match owner.get(&c) {
                    Some(&previous) if previous != i => return false,
                    _ => {
                        owner.insert(c, i);
                    }
                }
            }
            used[s] = true;
            used[g] = true;
        }
        let suffix_bounds: Vec<u64> = {
            let mut acc = vec![0u64; agents.len() + 1];
            for i in (0..agents.len()).rev() {
                acc[i] = acc[i + 1] + self.manhattan(agents[i].0, agents[i].1);
            }
            acc
        };
        let mut found = false;
        self.route_agent(agents, 0, 0, &mut used, &suffix_bounds, minimize, best, &mut found);
        found
    }

    #[allow(clippy::too_many_arguments)]
    fn route_agent(
        &self,
        agents: &[(usize, usize)],
        agent: usize,
        cost_so_far: u64,
        used: &mut Vec<bool>,
        suffix_bounds: &[u64],
        minimize: bool,
        best: &mut Option<u64>,
        found: &mut bool,
    ) {
        if agent == agents.len() {
            *found = true;
            if minimize {
                *best = Some(best.map_or(cost_so_far, |b| b.min(cost_so_far)));
            }
            return;
        }
        if !minimize && *found {
            return;
        }
        let (s, _) = agents[agent];
        self.extend_path(agents, agent, s, cost_so_far, used, suffix_bounds, minimize, best, found);
    }

    #[allow(clippy::too_many_arguments)]
    fn extend_path(
        &self,
        agents: &[(usize, usize)],
        agent: usize,
        cur: usize,
        cost_so_far: u64,
        used: &mut Vec<bool>,
        suffix_bounds: &[u64],
        minimize: bool,
        best: &mut Option<u64>,
        found: &mut bool,
    ) {
        if !minimize && *found {
            return;
        }
        let (_, g) = agents[agent];
        if minimize {
            if let Some(b) = *best {
                if cost_so_far + self.manhattan(cur, g) + suffix_bounds[agent + 1] >= b {
                    return;
                }
            }
        }
        if cur == g {
            self.route_agent(agents, agent + 1, cost_so_far, used, suffix_bounds, minimize, best, found);
            return;
        }
        for (nbr, w) in self.neighbors(cur, g) {
            if self.blocked[nbr] {
                continue;
            }
            // Endpoints are pre-marked; stepping onto the own goal is the one
            // legal way into a marked cell.
            if used[nbr] && nbr != g {
                continue;
            }
            if nbr == g {
                self.route_agent(
                    agents,
                    agent + 1,
                    cost_so_far + w,
                    used,
                    suffix_bounds,
                    minimize,
                    best,
                    found,
                );
                if !minimize && *found {
                    return;
                }
                continue;
            }
            used[nbr] = true;
            self.extend_path(
                agents,
                agent,
                nbr,
                cost_so_far + w,
                used,
                suffix_bounds,
                minimize,
                best,
                found,
            );
            used[nbr] = false;
        }
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn recurse(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            recurse(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    recurse(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn recurse(remaining: &mut Vec<usize>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if remaining.is_empty() {
            out.push(cur.clone());
            return;
        }
        for i in 0..remaining.len() {
            let v = remaining.remove(i);
            cur.push(v);
            recurse(remaining, cur, out);
            cur.pop();
            remaining.insert(i, v);
        }
    }
    let mut out = Vec::new();
    recurse(&mut (0..k).collect(), &mut Vec::new(), &mut out);
    out
}
