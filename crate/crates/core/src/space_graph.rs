//! Undirected 6-connected graph over grid cells.
//!
//! Horizontal moves cost 1, vertical moves cost the configurable multiplier
//! so agents only climb when it pays off. Cells whose volume touches an
//! obstacle box get no edges at all.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{GridIndex, GridSpec, LocalPoint};

/// Default vertical movement cost multiplier.
pub const DEFAULT_VERTICAL_MULTIPLIER: u32 = 5;

/// Axis-aligned obstacle box in the local frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    pub min_corner: LocalPoint,
    pub max_corner: LocalPoint,
}

impl Obstacle {
    pub fn new(min_corner: LocalPoint, max_corner: LocalPoint) -> Self {
        Self { min_corner, max_corner }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.min_corner.is_finite() || !self.max_corner.is_finite() {
            return Err(Error::InvalidScenario("obstacle corner is not finite".into()));
        }
        if self.min_corner.x > self.max_corner.x
            || self.min_corner.y > self.max_corner.y
            || self.min_corner.z > self.max_corner.z
        {
            return Err(Error::InvalidScenario(
                "obstacle min corner exceeds max corner".into(),
            ));
        }
        Ok(())
    }
}

/// Neighbor offsets in the fixed scan order +x, -x, +y, -y, +z, -z.
pub const DIRECTIONS: [(i64, i64, i64); 6] =
    [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)];

/// Undirected weighted grid graph. Immutable once built.
#[derive(Debug, Clone)]
pub struct SpaceGraph {
    grid: GridSpec,
    vertical_multiplier: u32,
    /// Per linear cell id: (neighbor linear id, edge weight), in direction order.
    adjacency: Vec<Vec<(u32, u32)>>,
    blocked: Vec<bool>,
    edge_count: usize,
}

impl SpaceGraph {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    /// Undirected edge count.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn vertical_multiplier(&self) -> u32 {
        self.vertical_multiplier
    }

    pub fn is_blocked(&self, idx: GridIndex) -> bool {
        self.blocked[self.grid.linear_index(idx)]
    }

    pub fn blocked_cells(&self) -> &[bool] {
        &self.blocked
    }

    /// Neighbors of a cell with edge weights, in the fixed direction order.
    pub fn neighbors(&self, c: GridIndex) -> Result<Vec<(GridIndex, u32)>> {
        if !self.grid.contains_index(c) {
            return Err(Error::IndexOutOfRange { index: c, dims: self.grid.dims });
        }
        Ok(self.adjacency[self.grid.linear_index(c)]
            .iter()
            .map(|&(nbr, w)| (self.grid.from_linear(nbr as usize), w))
            .collect())
    }

    /// Raw adjacency of a linear cell id, in the fixed direction order.
    pub fn neighbors_linear(&self, linear: usize) -> &[(u32, u32)] {
        &self.adjacency[linear]
    }
}

/// Marks every cell whose closed volume intersects the obstacle box.
fn mark_blocked(grid: &GridSpec, obstacle: &Obstacle, blocked: &mut [bool]) {
    let d = grid.cell_size;
    let origin = [grid.origin.x, grid.origin.y, grid.origin.z];
    let omin = [obstacle.min_corner.x, obstacle.min_corner.y, obstacle.min_corner.z];
    let omax = [obstacle.max_corner.x, obstacle.max_corner.y, obstacle.max_corner.z];

    // Candidate index range per axis, then the exact inclusive test per cell.
    let mut lo = [0usize; 3];
    let mut hi = [0usize; 3];
    for axis in 0..3 {
        let lo_f = ((omin[axis] - origin[axis]) / d).floor() - 1.0;
        let hi_f = ((omax[axis] - origin[axis]) / d).floor() + 1.0;
        if hi_f < 0.0 || lo_f >= grid.dims[axis] as f64 {
            return;
        }
        lo[axis] = lo_f.max(0.0) as usize;
        hi[axis] = (hi_f as usize).min(grid.dims[axis] - 1);
    }
    for iz in lo[2]..=hi[2] {
        for iy in lo[1]..=hi[1] {
            for ix in lo[0]..=hi[0] {
                let idx = [ix, iy, iz];
                let intersects = (0..3).all(|axis| {
                    let cell_min = origin[axis] + idx[axis] as f64 * d;
                    let cell_max = cell_min + d;
                    cell_min <= omax[axis] && omin[axis] <= cell_max
                });
                if intersects {
                    let linear = (iz * grid.dims[1] + iy) * grid.dims[0] + ix;
                    blocked[linear] = true;
                }
            }
        }
    }
}

/// Builds the space graph: one node per cell, edges between axis-adjacent
/// unblocked cells, vertical edges weighted by `vertical_multiplier`.
pub fn create_space_graph(
    grid: &GridSpec,
    obstacles: &[Obstacle],
    vertical_multiplier: u32,
) -> Result<SpaceGraph> {
    if vertical_multiplier < 1 {
        return Err(Error::InvalidMultiplier(vertical_multiplier));
    }
    let cells = grid.cell_count();
    let mut blocked = vec![false; cells];
    for obstacle in obstacles {
        obstacle.validate()?;
        mark_blocked(grid, obstacle, &mut blocked);
    }

    let dims = [grid.dims[0] as i64, grid.dims[1] as i64, grid.dims[2] as i64];
    let mut adjacency = vec![Vec::new(); cells];
    let mut degree_sum = 0usize;
    for iz in 0..dims[2] {
        for iy in 0..dims[1] {
            for ix in 0..dims[0] {
                let linear = ((iz * dims[1] + iy) * dims[0] + ix) as usize;
                if blocked[linear] {
                    continue;
                }
                let mut entries = Vec::new();
                for (dx, dy, dz) in DIRECTIONS {
                    let (nx, ny, nz) = (ix + dx, iy + dy, iz + dz);
                    if nx < 0 || nx >= dims[0] || ny < 0 || ny >= dims[1] || nz < 0 || nz >= dims[2]
                    {
                        continue;
                    }
                    let nbr = ((nz * dims[1] + ny) * dims[0] + nx) as usize;
                    if blocked[nbr] {
                        continue;
                    }
                    let weight = if dz != 0 { vertical_multiplier } else { 1 };
                    entries.push((nbr as u32, weight));
                }
                degree_sum += entries.len();
                adjacency[linear] = entries;
            }
        }
    }

    Ok(SpaceGraph {
        grid: *grid,
        vertical_multiplier,
        adjacency,
        blocked,
        edge_count: degree_sum / 2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(dims: [usize; 3], cell_size: f64) -> GridSpec {
        GridSpec { origin: LocalPoint::new(0.0, 0.0, 0.0), cell_size, dims }
    }

    #[test]
    fn two_cell_row_has_one_unit_edge() {
        let g = create_space_graph(&grid([2, 1, 1], 1.0), &[], 5).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        let n = g.neighbors(GridIndex::new(0, 0, 0)).unwrap();
        assert_eq!(n, vec![(GridIndex::new(1, 0, 0), 1)]);
    }

    #[test]
    fn vertical_edge_carries_multiplier() {
        let g = create_space_graph(&grid([1, 1, 2], 1.0), &[], 5).unwrap();
        assert_eq!(g.edge_count(), 1);
        let n = g.neighbors(GridIndex::new(0, 0, 0)).unwrap();
        assert_eq!(n, vec![(GridIndex::new(0, 0, 1), 5)]);
    }

    #[test]
    fn blocked_middle_cell_severs_corridor() {
        let obstacle = Obstacle::new(LocalPoint::new(1.2, 0.2, 0.2), LocalPoint::new(1.8, 0.8, 0.8));
        let g = create_space_graph(&grid([3, 1, 1], 1.0), &[obstacle], 5).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 0);
        assert!(g.is_blocked(GridIndex::new(1, 0, 0)));
        assert!(g.neighbors(GridIndex::new(0, 0, 0)).unwrap().is_empty());
        assert!(g.neighbors(GridIndex::new(1, 0, 0)).unwrap().is_empty());
    }

    #[test]
    fn interior_cell_has_six_neighbors_in_order() {
        let g = create_space_graph(&grid([3, 3, 3], 1.0), &[], 2).unwrap();
        let n = g.neighbors(GridIndex::new(1, 1, 1)).unwrap();
        assert_eq!(
            n,
            vec![
                (GridIndex::new(2, 1, 1), 1),
                (GridIndex::new(0, 1, 1), 1),
                (GridIndex::new(1, 2, 1), 1),
                (GridIndex::new(1, 0, 1), 1),
                (GridIndex::new(1, 1, 2), 2),
                (GridIndex::new(1, 1, 0), 2),
            ]
        );
    }

    #[test]
    fn corner_cell_has_three_neighbors() {
        let g = create_space_graph(&grid([3, 3, 3], 1.0), &[], 5).unwrap();
        assert_eq!(g.neighbors(GridIndex::new(0, 0, 0)).unwrap().len(), 3);
    }

    #[test]
    fn neighbor_of_blocked_cell_omits_it() {
        let obstacle = Obstacle::new(LocalPoint::new(1.2, 1.2, 0.2), LocalPoint::new(1.8, 1.8, 0.8));
        let g = create_space_graph(&grid([3, 3, 1], 1.0), &[obstacle], 5).unwrap();
        let n = g.neighbors(GridIndex::new(0, 1, 0)).unwrap();
        assert!(!n.iter().any(|&(c, _)| c == GridIndex::new(1, 1, 0)));
        assert_eq!(n.len(), 2);
    }

    #[test]
    fn grazing_obstacle_blocks_inclusively() {
        // Box touching the boundary plane between cells 0 and 1 blocks both.
        let obstacle = Obstacle::new(LocalPoint::new(1.0, 0.0, 0.0), LocalPoint::new(1.0, 1.0, 1.0));
        let g = create_space_graph(&grid([3, 1, 1], 1.0), &[obstacle], 5).unwrap();
        assert!(g.is_blocked(GridIndex::new(0, 0, 0)));
        assert!(g.is_blocked(GridIndex::new(1, 0, 0)));
        assert!(!g.is_blocked(GridIndex::new(2, 0, 0)));
    }

    #[test]
    fn rejects_zero_multiplier() {
        assert!(create_space_graph(&grid([2, 1, 1], 1.0), &[], 0).is_err());
    }

    #[test]
    fn neighbors_out_of_range_is_error() {
        let g = create_space_graph(&grid([2, 1, 1], 1.0), &[], 5).unwrap();
        assert!(g.neighbors(GridIndex::new(2, 0, 0)).is_err());
    }

    fn open_edge_count(dims: [usize; 3]) -> usize {
        let (a, b, c) = (dims[0], dims[1], dims[2]);
        (a - 1) * b * c + a * (b - 1) * c + a * b * (c - 1)
    }

    proptest! {
        #[test]
        fn open_grid_edge_formula(a in 1usize..6, b in 1usize..6, c in 1usize..5) {
            let g = create_space_graph(&grid([a, b, c], 1.0), &[], 5).unwrap();
            prop_assert_eq!(g.edge_count(), open_edge_count([a, b, c]));
        }

        #[test]
        fn symmetry_degree_and_weight_domain(
            a in 1usize..6, b in 1usize..6, c in 1usize..4,
            h in 1u32..9,
            obstacle_cells in proptest::collection::vec((0usize..6, 0usize..6, 0usize..4), 0..4),
        ) {
            let spec = grid([a, b, c], 1.0);
            let obstacles: Vec<Obstacle> = obstacle_cells
                .iter()
                .filter(|&&(x, y, z)| x < a && y < b && z < c)
                .map(|&(x, y, z)| {
                    let lo = LocalPoint::new(x as f64 + 0.3, y as f64 + 0.3, z as f64 + 0.3);
                    let hi = LocalPoint::new(x as f64 + 0.7, y as f64 + 0.7, z as f64 + 0.7);
                    Obstacle::new(lo, hi)
                })
                .collect();
            let g = create_space_graph(&spec, &obstacles, h).unwrap();

            for linear in 0..spec.cell_count() {
                let idx = spec.from_linear(linear);
                let nbrs = g.neighbors(idx).unwrap();
                prop_assert!(nbrs.len() <= 6);
                if g.is_blocked(idx) {
                    prop_assert!(nbrs.is_empty());
                }
                for (nbr, w) in nbrs {
                    // Axis adjacency: exactly one axis differs by exactly one.
                    let diff = [
                        (idx.ix as i64 - nbr.ix as i64).abs(),
                        (idx.iy as i64 - nbr.iy as i64).abs(),
                        (idx.iz as i64 - nbr.iz as i64).abs(),
                    ];
                    prop_assert_eq!(diff.iter().sum::<i64>(), 1);
                    let expected = if diff[2] == 1 { h } else { 1 };
                    prop_assert_eq!(w, expected);
                    // Symmetric with equal weight.
                    let back = g.neighbors(nbr).unwrap();
                    prop_assert!(back.contains(&(idx, w)));
                }
            }
        }
    }
}
