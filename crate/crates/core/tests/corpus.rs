//! Randomized scenario corpus: every plan the solver emits must pass the
//! independent verifier, and planning must be deterministic.

use flowplan_core::error::Error;
use flowplan_core::geometry::LocalPoint;
use flowplan_core::planner::{solve, PointSet, Scenario};
use flowplan_core::space_graph::Obstacle;
use flowplan_core::verifier::check_plan;

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

pub fn random_scenario(seed: u64) -> Scenario {
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
        padding: rng.below(2) as usize,
        waypoint_count: 2 + rng.below(8) as usize,
        clamp_ground: false,
    }
}

#[test]
fn solver_output_always_verifies() {
    let mut feasible = 0usize;
    let mut infeasible = 0usize;
    for seed in 0..500u64 {
        let scenario = random_scenario(seed);
        match solve(&scenario) {
            Ok(plan) => {
                feasible += 1;
                let report = check_plan(&plan, &scenario)
                    .unwrap_or_else(|e| panic!("seed {seed}: verifier error {e}"));
                assert!(report.all_passed(), "seed {seed}:\n{report}");
            }
            Err(Error::Infeasible { value, agents }) => {
                infeasible += 1;
                assert!(value < agents as u64, "seed {seed}: bogus infeasibility");
            }
            Err(Error::StartsCollide(_)) | Err(Error::GoalsCollide(_)) | Err(Error::EndpointBlocked(_)) => {
                // Legal generator outcomes: boundary clamping can merge the
                // outermost cells, and an obstacle can graze an endpoint cell.
                infeasible += 1;
            }
            Err(other) => panic!("seed {seed}: unexpected error {other}"),
        }
    }
    println!("corpus: {feasible} feasible, {infeasible} not routable");
    assert!(feasible >= 100, "corpus degenerated: only {feasible} feasible scenarios");
}

#[test]
fn planning_is_deterministic_across_the_corpus() {
    for seed in (0..500u64).step_by(25) {
        let scenario = random_scenario(seed);
        let a = solve(&scenario);
        let b = solve(&scenario);
        match (a, b) {
            (Ok(pa), Ok(pb)) => assert!(pa.same_routes(&pb), "seed {seed}: plans differ"),
            (Err(ea), Err(eb)) => assert_eq!(ea, eb, "seed {seed}: errors differ"),
            _ => panic!("seed {seed}: feasibility flipped between runs"),
        }
    }
}
