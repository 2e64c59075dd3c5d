//! Acceptance suite: one test per shipping criterion. Each test prints a
//! `ACCEPTANCE <n> ...: PASS` line (visible with `--nocapture`) once its
//! assertions hold.
//!
//! Criteria covered:
//!   1. worked-example reproduction (two augmentations, 20 then 10, flow 30)
//!   2. oracle equivalence over 500 seeded random scenarios
//!   3. flow invariants after every augmentation, zero violations
//!   4. 64-agent cube formation: max flow 64 and a fully verified plan
//!   5. runtime envelope: >= 100k-node state graph end-to-end within 300 s
//!   6. structural node/edge count formulas on 100+ random grids
//!   7. vertical-cost flip: flat detour beats the climb exactly when H > 2
//!   8. byte-identical plan documents modulo the metadata field

use std::process::Command;
use std::time::Instant;

use flowplan_core::error::Error;
use flowplan_core::flow::{check_invariants, decompose_paths, max_flow, Network, Solver};
use flowplan_core::geometry::{GridIndex, GridSpec, LocalPoint};
use flowplan_core::patterns::{generate, FormationSpec};
use flowplan_core::planner::{prepare, solve, PointSet, Scenario};
use flowplan_core::space_graph::{create_space_graph, Obstacle};
use flowplan_core::state_graph::create_state_graph;
use flowplan_core::verifier::{brute_force_optimum, brute_force_optimum_cells, check_plan, OracleLimits};

/// SplitMix64; deterministic corpus without external crates.
struct SplitMix64(u64);

impl SplitMix64 {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }
}

fn center(cell: (u64, u64, u64)) -> LocalPoint {
    LocalPoint::new(cell.0 as f64 + 0.5, cell.1 as f64 + 0.5, cell.2 as f64 + 0.5)
}

fn distinct_cells(rng: &mut SplitMix64, dims: (u64, u64, u64), n: usize) -> Vec<(u64, u64, u64)> {
    let mut cells = Vec::new();
    while cells.len() < n {
        let c = (rng.below(dims.0), rng.below(dims.1), rng.below(dims.2));
        if !cells.contains(&c) {
            cells.push(c);
        }
    }
    cells
}

/// Random scenario inside the oracle envelope: grid at most 4 x 4 x 2,
/// at most 3 agents, up to two single-cell obstacles.
fn oracle_sized_scenario(seed: u64) -> Scenario {
    let mut rng = SplitMix64(seed);
    let dims = (1 + rng.below(4), 1 + rng.below(4), 1 + rng.below(2));
    let cell_total = dims.0 * dims.1 * dims.2;
    let n = 1 + rng.below(3.min(cell_total)) as usize;
    let start_cells = distinct_cells(&mut rng, dims, n);
    let goal_cells = distinct_cells(&mut rng, dims, n);

    let mut obstacles = Vec::new();
    for _ in 0..rng.below(3) {
        let c = (rng.below(dims.0), rng.below(dims.1), rng.below(dims.2));
        if start_cells.contains(&c) || goal_cells.contains(&c) {
            continue;
        }
        let p = center(c);
        obstacles.push(Obstacle::new(
            LocalPoint::new(p.x - 0.3, p.y - 0.3, p.z - 0.3),
            LocalPoint::new(p.x + 0.3, p.y + 0.3, p.z + 0.3),
        ));
    }

    Scenario {
        starts: PointSet::Local(start_cells.into_iter().map(center).collect()),
        goals: PointSet::Local(goal_cells.into_iter().map(center).collect()),
        obstacles,
        cell_size: 1.0,
        vertical_multiplier: 1 + rng.below(6) as u32,
        padding: 0,
        waypoint_count: 2 + rng.below(8) as usize,
        clamp_ground: false,
    }
}

/// The four-node capacity fixture: edges (s->a, 20), (s->b, 10), (a->b, 30),
/// (a->t, 10), (b->t, 20), with costs that make s->a->b->t the cheapest
/// route.
fn four_node_fixture() -> Network {
    let mut net = Network::new(4, 0, 3);
    net.add_edge(0, 1, 20, 1);
    net.add_edge(0, 2, 10, 3);
    net.add_edge(1, 2, 30, 1);
    net.add_edge(1, 3, 10, 4);
    net.add_edge(2, 3, 20, 1);
    net
}

/// Cube-64 scenario: agents launch from an 8 x 8 ground lattice and form a
/// 4 x 4 x 4 cube overhead.
fn cube64_scenario(cell_size: f64, padding: usize) -> Scenario {
    let starts = generate(&FormationSpec::grid(8, 8, 5.0, 0.0)).unwrap();
    let goals = generate(&FormationSpec::cube(4, 5.0, 20.0)).unwrap();
    let mut s = Scenario::local(starts, goals);
    s.cell_size = cell_size;
    s.padding = padding;
    s
}

#[test]
fn acceptance_1_worked_example() {
    let net = four_node_fixture();
    let mut solver = Solver::new(&net);
    let started = Instant::now();
    solver.run().unwrap();
    let elapsed = started.elapsed();

    assert_eq!(solver.iterations(), 2, "expected exactly two augmentations");
    assert_eq!(solver.bottlenecks(), &[20, 10]);
    assert_eq!(solver.flow_state().value, 30);
    assert!(
        elapsed.as_secs_f64() < 1e-3,
        "worked example took {:.3} ms",
        elapsed.as_secs_f64() * 1e3
    );
    println!("ACCEPTANCE 1 (worked-example reproduction): PASS ({:.1} us)", elapsed.as_secs_f64() * 1e6);
}

#[test]
fn acceptance_2_oracle_equivalence() {
    let started = Instant::now();
    let mut feasible = 0usize;
    for seed in 0..500u64 {
        let scenario = oracle_sized_scenario(seed);
        let n = scenario.agent_count();
        let oracle = brute_force_optimum(&scenario, OracleLimits::default())
            .unwrap_or_else(|e| panic!("seed {seed}: oracle refused: {e}"));
        match solve(&scenario) {
            Ok(plan) => {
                feasible += 1;
                assert_eq!(oracle.routable, n, "seed {seed}: solver routed {n}, oracle disagrees");
                assert_eq!(
                    Some(plan.stats.total_cost),
                    oracle.min_total_cost,
                    "seed {seed}: cost mismatch"
                );
                let report = check_plan(&plan, &scenario).unwrap();
                assert!(report.all_passed(), "seed {seed}:\n{report}");
            }
            Err(
                Error::Infeasible { .. }
                | Error::StartsCollide(_)
                | Error::GoalsCollide(_)
                | Error::EndpointBlocked(_),
            ) => {
                assert!(oracle.routable < n, "seed {seed}: solver failed but oracle routes all {n}");
            }
            Err(other) => panic!("seed {seed}: unexpected error {other}"),
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 300, "oracle sweep took {elapsed:?}, budget is 5 min");
    println!(
        "ACCEPTANCE 2 (oracle equivalence, 500 scenarios, {feasible} feasible): PASS ({:.1} s)",
        elapsed.as_secs_f64()
    );
}

#[test]
fn acceptance_3_flow_invariants() {
    let mut augmentations = 0usize;

    // The capacity fixture first.
    let net = four_node_fixture();
    let mut solver = Solver::new(&net);
    while solver.step().unwrap().is_some() {
        augmentations += 1;
        check_invariants(&net, &solver).unwrap();
    }

    // Then every constructible state graph from the random corpus.
    for seed in 0..200u64 {
        let scenario = oracle_sized_scenario(seed);
        let prep = match prepare(&scenario) {
            Ok(p) => p,
            Err(_) => continue, // collide/blocked seeds have no state graph to audit
        };
        let net = Network::from_state_graph(&prep.state);
        let mut solver = Solver::new(&net);
        while solver.step().unwrap().is_some() {
            augmentations += 1;
            check_invariants(&net, &solver)
                .unwrap_or_else(|m| panic!("seed {seed}: invariant violated: {m}"));
        }
    }
    assert!(augmentations > 200, "only {augmentations} augmentations audited");
    println!("ACCEPTANCE 3 (flow invariants, {augmentations} augmentations, 0 violations): PASS");
}

#[test]
fn acceptance_4_disjointness_at_scale() {
    let scenario = cube64_scenario(2.0, 0);
    let plan = solve(&scenario).unwrap();
    assert_eq!(plan.stats.flow_value, 64, "cube formation must route all 64 agents");
    assert_eq!(plan.agents.len(), 64);
    let report = check_plan(&plan, &scenario).unwrap();
    assert!(report.all_passed(), "{report}");
    println!(
        "ACCEPTANCE 4 (cube-64 disjointness, {} nodes, {} edges): PASS",
        plan.stats.state_nodes, plan.stats.state_edges
    );
}

#[test]
fn acceptance_5_runtime_envelope() {
    let scenario = cube64_scenario(1.0, 1);
    let started = Instant::now();
    let plan = solve(&scenario).unwrap();
    let report = check_plan(&plan, &scenario).unwrap();
    let elapsed = started.elapsed();

    assert!(
        plan.stats.state_nodes >= 100_000,
        "state graph has only {} nodes",
        plan.stats.state_nodes
    );
    assert_eq!(plan.stats.flow_value, 64);
    assert!(report.all_passed(), "{report}");
    assert!(
        elapsed.as_secs_f64() <= 300.0,
        "end-to-end took {:.1} s, budget is 300 s",
        elapsed.as_secs_f64()
    );
    println!(
        "ACCEPTANCE 5 (runtime envelope, {} nodes, {} edges): PASS ({:.1} s)",
        plan.stats.state_nodes,
        plan.stats.state_edges,
        elapsed.as_secs_f64()
    );
}

#[test]
fn acceptance_6_structural_counts() {
    let mut checked = 0usize;
    for seed in 1000..1140u64 {
        let scenario = oracle_sized_scenario(seed);
        let prep = match prepare(&scenario) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let cells = prep.grid.cell_count();
        assert_eq!(prep.state.node_count(), 2 * cells + 2, "seed {seed}: node formula");
        let expected_edges = cells
            + 2 * prep.space.edge_count()
            + prep.start_cells.len()
            + prep.goal_cells.len();
        assert_eq!(prep.state.edges().len(), expected_edges, "seed {seed}: edge formula");
        checked += 1;
    }
    assert!(checked >= 100, "only {checked} grids checked");
    println!("ACCEPTANCE 6 (structural counts on {checked} random grids): PASS");
}

#[test]
fn acceptance_7_vertical_cost_flip() {
    // 3 x 3 x 2 grid with a two-cell wall at x = 1, y in {0, 1}, z = 0.
    // From (0,0,0) to (2,0,0) the flat detour costs 4 more horizontal moves,
    // the climb costs 2 vertical moves: total 6 versus 2H + 2.
    let grid = GridSpec { origin: LocalPoint::new(0.0, 0.0, 0.0), cell_size: 1.0, dims: [3, 3, 2] };
    let wall = |x: f64, y: f64| {
        Obstacle::new(
            LocalPoint::new(x + 0.3, y + 0.3, 0.3),
            LocalPoint::new(x + 0.7, y + 0.7, 0.7),
        )
    };
    let obstacles = [wall(1.0, 0.0), wall(1.0, 1.0)];
    let start = GridIndex::new(0, 0, 0);
    let goal = GridIndex::new(2, 0, 0);

    // Independent oracle on a hand-marked blocked set.
    let mut blocked = vec![false; 18];
    blocked[1] = true; // (1,0,0)
    blocked[4] = true; // (1,1,0)

    let route = |h: u32| -> (u64, usize) {
        let space = create_space_graph(&grid, &obstacles, h).unwrap();
        let state = create_state_graph(&space, &[start], &[goal]).unwrap();
        let flow = max_flow(&Network::from_state_graph(&state)).unwrap();
        assert_eq!(flow.value, 1);
        let paths = decompose_paths(&state, &flow).unwrap();
        let vertical_steps = paths[0]
            .cells
            .windows(2)
            .filter(|pair| pair[0].iz != pair[1].iz)
            .count();
        (paths[0].cost, vertical_steps)
    };

    for h in [1u32, 2, 3, 5] {
        let oracle =
            brute_force_optimum_cells([3, 3, 2], &blocked, &[0], &[2], h, OracleLimits::default())
                .unwrap();
        let expected = (2 * h as u64 + 2).min(6);
        assert_eq!(oracle.min_total_cost, Some(expected), "oracle cost at H = {h}");
        let (cost, vertical) = route(h);
        assert_eq!(cost, expected, "solver cost at H = {h}");
        match h {
            1 => assert_eq!(vertical, 2, "H = 1 must climb over the wall"),
            3 | 5 => assert_eq!(vertical, 0, "H = {h} must take the flat detour"),
            _ => {
                // Tie at H = 2: either shape costs 6; the choice only has to
                // be deterministic.
                let (cost2, vertical2) = route(h);
                assert_eq!((cost, vertical), (cost2, vertical2));
            }
        }
    }
    println!("ACCEPTANCE 7 (vertical-cost flip at H = 2): PASS");
}

#[test]
fn acceptance_8_determinism() {
    let dir = std::env::temp_dir().join(format!("flowplan-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let scenario_path = dir.join("scenario.json");
    let mut scenario = Scenario::local(
        vec![
            LocalPoint::new(0.2, 0.2, 0.0),
            LocalPoint::new(6.5, 0.2, 0.0),
            LocalPoint::new(3.3, 4.4, 0.0),
        ],
        vec![
            LocalPoint::new(6.5, 4.4, 2.2),
            LocalPoint::new(0.2, 4.4, 0.0),
            LocalPoint::new(3.3, 0.2, 2.2),
        ],
    );
    scenario.cell_size = 1.0;
    scenario.padding = 1;
    scenario.obstacles.push(Obstacle::new(
        LocalPoint::new(2.0, 2.0, 0.0),
        LocalPoint::new(2.4, 2.4, 0.4),
    ));
    std::fs::write(&scenario_path, flowplan_core::format::scenario_to_json(&scenario)).unwrap();

    let run = |output: &std::path::Path| {
        let status = Command::new(env!("CARGO_BIN_EXE_flowplan"))
            .arg("plan")
            .arg(&scenario_path)
            .arg("--output")
            .arg(output)
            .status()
            .expect("binary runs");
        assert!(status.success());
        let text = std::fs::read_to_string(output).unwrap();
        let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        doc.as_object_mut().unwrap().remove("metadata").expect("plans carry metadata");
        serde_json::to_string(&doc).unwrap()
    };

    let first = run(&dir.join("a.plan.json"));
    let second = run(&dir.join("b.plan.json"));
    assert_eq!(first.into_bytes(), second.into_bytes(), "plan bytes differ outside metadata");
    std::fs::remove_dir_all(&dir).ok();
    println!("ACCEPTANCE 8 (byte-identical plans modulo metadata): PASS");
}
