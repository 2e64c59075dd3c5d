//! Directed flow network derived from the space graph by node splitting.
//!
//! Every cell becomes an entry node and an exit node joined by a single
//! capacity-1 internal edge, so at most one agent can ever transit the cell.
//! Each undirected space edge becomes two directed cross edges between the
//! exits and entries of its endpoints. A virtual source feeds the entries of
//! the start cells and the exits of the goal cells drain into a virtual sink.
//!
//! Node ids are deterministic: entry of cell `c` is `2c`, exit is `2c + 1`
//! (with `c` the linear cell index), and the source and sink come last.
//! Edge ids are deterministic too: internal edges in cell order (edge id =
//! cell id), then cross edges in cell-then-direction scan order, then source
//! links in start order, then sink links in goal order.

use std::collections::HashMap;
use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::geometry::{GridIndex, GridSpec};
use crate::space_graph::SpaceGraph;

/// Role of a node in the flow network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateNode {
    Entry(GridIndex),
    Exit(GridIndex),
    VirtualSource,
    VirtualSink,
}

/// Directed edge with unit capacity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StateEdge {
    pub from: u32,
    pub to: u32,
    pub weight: u32,
    pub capacity: u32,
}

/// The flow network. Immutable once built.
#[derive(Debug, Clone)]
pub struct StateGraph {
    grid: GridSpec,
    cells: usize,
    edges: Vec<StateEdge>,
    starts: Vec<GridIndex>,
    goals: Vec<GridIndex>,
    source_edge_range: std::ops::Range<usize>,
    sink_edge_range: std::ops::Range<usize>,
}

impl StateGraph {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Total node count: two per cell plus source and sink.
    pub fn node_count(&self) -> usize {
        2 * self.cells + 2
    }

    pub fn edges(&self) -> &[StateEdge] {
        &self.edges
    }

    pub fn source(&self) -> u32 {
        (2 * self.cells) as u32
    }

    pub fn sink(&self) -> u32 {
        (2 * self.cells + 1) as u32
    }

    pub fn starts(&self) -> &[GridIndex] {
        &self.starts
    }

    pub fn goals(&self) -> &[GridIndex] {
        &self.goals
    }

    pub fn entry_id(&self, cell: GridIndex) -> u32 {
        (2 * self.grid.linear_index(cell)) as u32
    }

    pub fn exit_id(&self, cell: GridIndex) -> u32 {
        (2 * self.grid.linear_index(cell) + 1) as u32
    }

    pub fn node(&self, id: u32) -> StateNode {
        let id = id as usize;
        if id < 2 * self.cells {
            let cell = self.grid.from_linear(id / 2);
            if id % 2 == 0 {
                StateNode::Entry(cell)
            } else {
                StateNode::Exit(cell)
            }
        } else if id == 2 * self.cells {
            StateNode::VirtualSource
        } else {
            StateNode::VirtualSink
        }
    }

    /// Edge ids of the source links, one per start, in start order.
    pub fn source_edge_ids(&self) -> std::ops::Range<usize> {
        self.source_edge_range.clone()
    }

    pub fn sink_edge_ids(&self) -> std::ops::Range<usize> {
        self.sink_edge_range.clone()
    }

    /// Internal edge id of a cell equals its linear index.
    pub fn internal_edge_id(&self, cell_linear: usize) -> usize {
        cell_linear
    }

    /// Debug dump: one edge per line as `from to weight capacity`.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> io::Result<()> {
        for e in &self.edges {
            writeln!(w, "{} {} {} {}", e.from, e.to, e.weight, e.capacity)?;
        }
        Ok(())
    }
}

/// Builds the flow network for the given start and goal cells.
pub fn create_state_graph(
    gs: &SpaceGraph,
    starts: &[GridIndex],
    goals: &[GridIndex],
) -> Result<StateGraph> {
    if starts.is_empty() || starts.len() != goals.len() {
        return Err(Error::InvalidScenario(format!(
            "need equal non-zero start/goal counts, got {} starts and {} goals",
            starts.len(),
            goals.len()
        )));
    }
    let grid = *gs.grid();
    let mut seen: HashMap<GridIndex, ()> = HashMap::new();
    for &s in starts {
        if !grid.contains_index(s) {
            return Err(Error::IndexOutOfRange { index: s, dims: grid.dims });
        }
        if gs.is_blocked(s) {
            return Err(Error::EndpointBlocked(s));
        }
        if seen.insert(s, ()).is_some() {
            return Err(Error::StartsCollide(s));
        }
    }
    seen.clear();
    for &g in goals {
        if !grid.contains_index(g) {
            return Err(Error::IndexOutOfRange { index: g, dims: grid.dims });
        }
        if gs.is_blocked(g) {
            return Err(Error::EndpointBlocked(g));
        }
        if seen.insert(g, ()).is_some() {
            return Err(Error::GoalsCollide(g));
        }
    }

    let cells = grid.cell_count();
    let source = (2 * cells) as u32;
    let sink = (2 * cells + 1) as u32;
    let mut edges = Vec::with_capacity(cells + 2 * gs.edge_count() + 2 * starts.len());

    // Internal entry->exit edge per cell, weight 0.
    for c in 0..cells {
        edges.push(StateEdge { from: (2 * c) as u32, to: (2 * c + 1) as u32, weight: 0, capacity: 1 });
    }
    // Two directed cross edges per space edge, weight = space edge weight.
    for c in 0..cells {
        for &(nbr, w) in gs.neighbors_linear(c) {
            edges.push(StateEdge {
                from: (2 * c + 1) as u32,
                to: (2 * nbr as usize) as u32,
                weight: w,
                capacity: 1,
            });
        }
    }
    // Source feeds start entries; goal exits drain into the sink. Weight 0.
    let source_start = edges.len();
    for &s in starts {
        edges.push(StateEdge {
            from: source,
            to: (2 * grid.linear_index(s)) as u32,
            weight: 0,
            capacity: 1,
        });
    }
    let sink_start = edges.len();
    for &g in goals {
        edges.push(StateEdge {
            from: (2 * grid.linear_index(g) + 1) as u32,
            to: sink,
            weight: 0,
            capacity: 1,
        });
    }
    let sink_end = edges.len();

    Ok(StateGraph {
        grid,
        cells,
        edges,
        starts: starts.to_vec(),
        goals: goals.to_vec(),
        source_edge_range: source_start..sink_start,
        sink_edge_range: sink_start..sink_end,
    })
}
