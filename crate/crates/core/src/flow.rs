//! Min-cost max-flow by repeated shortest augmenting paths.
//!
//! The residual graph materializes one forward and one backward record per
//! edge; the backward record carries the negated weight and starts with zero
//! residual. Augmenting paths are found with Bellman-Ford (backward records
//! can be negative, so Dijkstra is out), scanning edges in node-id order so
//! tie-cost paths resolve identically on every run. Because every augmenting
//! path is a minimum-cost path, the final flow is a minimum-cost maximum
//! flow, and on unit-capacity networks each augmentation adds exactly one
//! unit of flow.

use crate::error::{Error, Result};
use crate::geometry::GridIndex;
use crate::state_graph::{StateGraph, StateNode};

const UNREACHABLE: i64 = i64::MAX / 4;
const NO_RECORD: u32 = u32::MAX;

/// Directed edge of a flow network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NetEdge {
    pub from: u32,
    pub to: u32,
    pub capacity: u32,
    pub weight: i64,
}

/// A directed flow network with designated source and sink.
#[derive(Debug, Clone)]
pub struct Network {
    node_count: usize,
    source: u32,
    sink: u32,
    edges: Vec<NetEdge>,
}

impl Network {
    pub fn new(node_count: usize, source: u32, sink: u32) -> Self {
        assert!(source != sink, "source and sink must differ");
        assert!((source as usize) < node_count && (sink as usize) < node_count);
        Self { node_count, source, sink, edges: Vec::new() }
    }

    /// Adds a directed edge and returns its id. Weights must be non-negative;
    /// negative weights only ever appear on residual backward records.
    pub fn add_edge(&mut self, from: u32, to: u32, capacity: u32, weight: i64) -> usize {
        assert!((from as usize) < self.node_count && (to as usize) < self.node_count);
        assert!(weight >= 0, "initial edge weights must be non-negative");
        self.edges.push(NetEdge { from, to, capacity, weight });
        self.edges.len() - 1
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn source(&self) -> u32 {
        self.source
    }

    pub fn sink(&self) -> u32 {
        self.sink
    }

    pub fn edges(&self) -> &[NetEdge] {
        &self.edges
    }

    /// Network edge ids coincide with state-graph edge ids.
    pub fn from_state_graph(sg: &StateGraph) -> Self {
        let mut net = Network::new(sg.node_count(), sg.source(), sg.sink());
        for e in sg.edges() {
            net.add_edge(e.from, e.to, e.capacity, e.weight as i64);
        }
        net
    }
}

/// One residual record. Forward records sit at even ids (`2e`), backward
/// records at odd ids (`2e + 1`); the pair of record `r` is `r ^ 1`.
#[derive(Debug, Clone, Copy)]
struct Record {
    to: u32,
    residual: u32,
    weight: i64,
}

/// Residual view of a network under some flow.
#[derive(Debug, Clone)]
pub struct Residual {
    node_count: usize,
    records: Vec<Record>,
    adj_start: Vec<u32>,
    adj_records: Vec<u32>,
}

impl Residual {
    /// Residual of the zero flow.
    pub fn new(net: &Network) -> Self {
        let n = net.node_count;
        let mut records = Vec::with_capacity(2 * net.edges.len());
        for e in &net.edges {
            records.push(Record { to: e.to, residual: e.capacity, weight: e.weight });
            records.push(Record { to: e.from, residual: 0, weight: -e.weight });
        }

        let mut degree = vec![0u32; n + 1];
        for e in &net.edges {
            degree[e.from as usize + 1] += 1;
            degree[e.to as usize + 1] += 1;
        }
        for i in 0..n {
            degree[i + 1] += degree[i];
        }
        let adj_start = degree;
        let mut cursor = adj_start.clone();
        let mut adj_records = vec![0u32; records.len()];
        for (i, e) in net.edges.iter().enumerate() {
            adj_records[cursor[e.from as usize] as usize] = (2 * i) as u32;
            cursor[e.from as usize] += 1;
            adj_records[cursor[e.to as usize] as usize] = (2 * i + 1) as u32;
            cursor[e.to as usize] += 1;
        }
        Self { node_count: n, records, adj_start, adj_records }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn record_count(&self) -> usize {
        self.records.len()
    }

    /// Record ids leaving `node`, in ascending edge-id order.
    fn adjacent(&self, node: usize) -> &[u32] {
        &self.adj_records[self.adj_start[node] as usize..self.adj_start[node + 1] as usize]
    }

    /// Remaining capacity of a record.
    pub fn residual(&self, record: u32) -> u32 {
        self.records[record as usize].residual
    }

    /// Original capacity of edge `e` (forward plus backward residual).
    pub fn capacity(&self, edge: usize) -> u32 {
        self.records[2 * edge].residual + self.records[2 * edge + 1].residual
    }

    /// Current flow on edge `e` (the backward residual).
    pub fn flow(&self, edge: usize) -> u32 {
        self.records[2 * edge + 1].residual
    }

    fn record_from(&self, record: u32) -> u32 {
        self.records[(record ^ 1) as usize].to
    }

    fn record_to(&self, record: u32) -> u32 {
        self.records[record as usize].to
    }
}

/// Direction of one augmenting-path step relative to the original edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepDir {
    Forward,
    Backward,
}

/// Source-to-sink path over positive-residual records.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentingPath {
    /// Node sequence, source first, sink last.
    pub nodes: Vec<u32>,
    /// Residual record per step; even ids are forward, odd are backward.
    pub steps: Vec<u32>,
    /// Minimum residual capacity along the path.
    pub bottleneck: u32,
    /// Total (signed) cost of the path.
    pub cost: i64,
}

impl AugmentingPath {
    pub fn directions(&self) -> Vec<StepDir> {
        self.steps
            .iter()
            .map(|&r| if r % 2 == 0 { StepDir::Forward } else { StepDir::Backward })
            .collect()
    }
}

/// Minimum-cost source-to-sink path over positive-residual records, or
/// `None` when the sink is unreachable.
///
/// Relaxation sweeps nodes in ascending id and stops as soon as a full pass
/// changes nothing; if the n-th pass still relaxes, a negative cycle exists,
/// which the successive-shortest-path discipline rules out, so it signals a
/// solver bug.
pub fn bellman_ford(r: &Residual, source: u32, sink: u32) -> Result<Option<AugmentingPath>> {
    let n = r.node_count;
    let mut dist = vec![UNREACHABLE; n];
    let mut parent = vec![NO_RECORD; n];
    dist[source as usize] = 0;

    let mut rounds = 0usize;
    loop {
        let mut updated = false;
        for u in 0..n {
            let du = dist[u];
            if du == UNREACHABLE {
                continue;
            }
            for &rec in r.adjacent(u) {
                let record = &r.records[rec as usize];
                if record.residual == 0 {
                    continue;
                }
                let v = record.to as usize;
                let candidate = du + record.weight;
                if candidate < dist[v] {
                    dist[v] = candidate;
                    parent[v] = rec;
                    updated = true;
                }
            }
        }
        if !updated {
            break;
        }
        rounds += 1;
        if rounds >= n {
            return Err(Error::NegativeCycle);
        }
    }

    if parent[sink as usize] == NO_RECORD {
        return Ok(None);
    }

    let mut nodes = vec![sink];
    let mut steps = Vec::new();
    let mut v = sink;
    while v != source {
        let rec = parent[v as usize];
        if rec == NO_RECORD || steps.len() > n {
            return Err(Error::InvalidPath("backtrack did not reach the source".into()));
        }
        steps.push(rec);
        v = r.record_from(rec);
        nodes.push(v);
    }
    nodes.reverse();
    steps.reverse();
    let bottleneck = steps.iter().map(|&rec| r.residual(rec)).min().unwrap_or(0);
    Ok(Some(AugmentingPath { nodes, steps, bottleneck, cost: dist[sink as usize] }))
}

/// Flow assignment summary: per-edge flow, total value out of the source,
/// and total cost over forward edges.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    flow: Vec<u32>,
    pub value: u64,
    pub cost: i64,
}

impl FlowState {
    fn zero(edge_count: usize) -> Self {
        Self { flow: vec![0; edge_count], value: 0, cost: 0 }
    }

    pub fn flow_on(&self, edge: usize) -> u32 {
        self.flow[edge]
    }

    pub fn flows(&self) -> &[u32] {
        &self.flow
    }
}

/// Pushes the path bottleneck through the residual graph: forward records
/// lose residual, their twins gain it, and the flow map is refreshed.
pub fn augment(r: &mut Residual, f: &mut FlowState, p: &AugmentingPath) -> Result<()> {
    if p.steps.is_empty() || p.nodes.len() != p.steps.len() + 1 {
        return Err(Error::InvalidPath("malformed step sequence".into()));
    }
    if p.bottleneck == 0 {
        return Err(Error::InvalidPath("zero bottleneck".into()));
    }
    for (i, &rec) in p.steps.iter().enumerate() {
        if r.record_from(rec) != p.nodes[i] || r.record_to(rec) != p.nodes[i + 1] {
            return Err(Error::InvalidPath(format!("step {i} does not join its endpoints")));
        }
        if r.residual(rec) < p.bottleneck {
            return Err(Error::InvalidPath(format!("step {i} lacks residual capacity")));
        }
    }

    let b = p.bottleneck;
    let mut delta_cost = 0i64;
    for &rec in &p.steps {
        let rec = rec as usize;
        r.records[rec].residual -= b;
        r.records[rec ^ 1].residual += b;
        delta_cost += r.records[rec].weight * b as i64;
        let edge = rec / 2;
        f.flow[edge] = r.records[2 * edge + 1].residual;
    }
    f.value += b as u64;
    f.cost += delta_cost;
    Ok(())
}

/// One augmentation as reported by [`Solver::step`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub iteration: usize,
    pub path_cost: i64,
    pub bottleneck: u32,
    pub value: u64,
}

/// Owns the residual graph and flow while augmenting to the maximum.
#[derive(Debug, Clone)]
pub struct Solver {
    source: u32,
    sink: u32,
    residual: Residual,
    state: FlowState,
    iterations: usize,
    bottlenecks: Vec<u32>,
}

impl Solver {
    pub fn new(net: &Network) -> Self {
        Self {
            source: net.source,
            sink: net.sink,
            residual: Residual::new(net),
            state: FlowState::zero(net.edges.len()),
            iterations: 0,
            bottlenecks: Vec::new(),
        }
    }

    /// One Bellman-Ford search plus augmentation; `None` when the flow is
    /// already maximum.
    pub fn step(&mut self) -> Result<Option<StepReport>> {
        match bellman_ford(&self.residual, self.source, self.sink)? {
            None => Ok(None),
            Some(path) => {
                augment(&mut self.residual, &mut self.state, &path)?;
                self.iterations += 1;
                self.bottlenecks.push(path.bottleneck);
                Ok(Some(StepReport {
                    iteration: self.iterations,
                    path_cost: path.cost,
                    bottleneck: path.bottleneck,
                    value: self.state.value,
                }))
            }
        }
    }

    /// Augments until no path remains; returns the number of augmentations.
    pub fn run(&mut self) -> Result<usize> {
        while self.step()?.is_some() {}
        Ok(self.iterations)
    }

    pub fn flow_state(&self) -> &FlowState {
        &self.state
    }

    pub fn residual(&self) -> &Residual {
        &self.residual
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Bottlenecks of the augmentations performed so far, in order.
    pub fn bottlenecks(&self) -> &[u32] {
        &self.bottlenecks
    }

    pub fn into_flow_state(self) -> FlowState {
        self.state
    }
}

/// Runs the solver to completion and returns the final flow.
pub fn max_flow(net: &Network) -> Result<FlowState> {
    let mut solver = Solver::new(net);
    solver.run()?;
    Ok(solver.into_flow_state())
}

/// A decomposed agent route: the cells visited and the path cost in cost units.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellPath {
    pub cells: Vec<GridIndex>,
    pub cost: u64,
}

/// Splits an integral flow on a state graph into one cell path per unit of
/// flow. Entry/exit pairs collapse to a single cell; every saturated edge is
/// consumed exactly once, which makes the paths cell-disjoint.
pub fn decompose_paths(sg: &StateGraph, f: &FlowState) -> Result<Vec<CellPath>> {
    let edges = sg.edges();
    if f.flows().len() != edges.len() {
        return Err(Error::DecompositionFailed("flow does not match the graph".into()));
    }
    // Outgoing saturated edges per node, in edge-id order.
    let mut outgoing: Vec<Vec<u32>> = vec![Vec::new(); sg.node_count()];
    for (id, e) in edges.iter().enumerate() {
        if f.flow_on(id) > 0 {
            outgoing[e.from as usize].push(id as u32);
        }
    }

    let mut consumed = vec![false; edges.len()];
    let mut paths = Vec::new();
    for source_edge in sg.source_edge_ids() {
        if f.flow_on(source_edge) == 0 {
            continue;
        }
        consumed[source_edge] = true;
        let mut cells = Vec::new();
        let mut cost = 0u64;
        let mut node = edges[source_edge].to;
        let limit = edges.len() + 1;
        loop {
            if cells.len() > limit {
                return Err(Error::DecompositionFailed("walk exceeded edge budget".into()));
            }
            match sg.node(node) {
                StateNode::Entry(cell) => {
                    let internal = sg.internal_edge_id(sg.grid().linear_index(cell));
                    if f.flow_on(internal) == 0 || consumed[internal] {
                        return Err(Error::DecompositionFailed(format!(
                            "entry of cell ({}, {}, {}) has no usable internal flow",
                            cell.ix, cell.iy, cell.iz
                        )));
                    }
                    consumed[internal] = true;
                    cells.push(cell);
                    node = edges[internal].to;
                }
                StateNode::Exit(_) => {
                    let next = outgoing[node as usize]
                        .iter()
                        .copied()
                        .find(|&id| !consumed[id as usize]);
                    let Some(next) = next else {
                        return Err(Error::DecompositionFailed(
                            "exit node has no unconsumed saturated edge".into(),
                        ));
                    };
                    consumed[next as usize] = true;
                    let edge = edges[next as usize];
                    cost += edge.weight as u64;
                    if edge.to == sg.sink() {
                        paths.push(CellPath { cells, cost });
                        break;
                    }
                    node = edge.to;
                }
                StateNode::VirtualSource | StateNode::VirtualSink => {
                    return Err(Error::DecompositionFailed(
                        "walk re-entered a virtual terminal".into(),
                    ));
                }
            }
        }
    }

    if paths.len() as u64 != f.value {
        return Err(Error::DecompositionFailed(format!(
            "extracted {} paths for flow value {}",
            paths.len(),
            f.value
        )));
    }
    Ok(paths)
}

/// Scans the residual graph for a negative-cost cycle by relaxing from an
/// all-zero potential; any update surviving n rounds betrays one.
pub fn has_negative_cycle(r: &Residual) -> bool {
    let n = r.node_count;
    let mut dist = vec![0i64; n];
    for _ in 0..n {
        let mut updated = false;
        for u in 0..n {
            for &rec in r.adjacent(u) {
                let record = &r.records[rec as usize];
                if record.residual == 0 {
                    continue;
                }
                let v = record.to as usize;
                if dist[u] + record.weight < dist[v] {
                    dist[v] = dist[u] + record.weight;
                    updated = true;
                }
            }
        }
        if !updated {
            return false;
        }
    }
    true
}

/// Full flow-invariant audit used after augmentations in tests: capacity
/// bounds, flow/residual agreement, conservation at non-terminals, and
/// absence of negative residual cycles.
pub fn check_invariants(net: &Network, solver: &Solver) -> std::result::Result<(), String> {
    let r = solver.residual();
    let f = solver.flow_state();
    let mut balance = vec![0i64; net.node_count];
    for (id, e) in net.edges.iter().enumerate() {
        let flow = f.flow_on(id);
        if flow > e.capacity {
            return Err(format!("edge {id}: flow {flow} exceeds capacity {}", e.capacity));
        }
        if r.flow(id) != flow {
            return Err(format!("edge {id}: residual view disagrees with flow map"));
        }
        if r.capacity(id) != e.capacity {
            return Err(format!("edge {id}: residual pair no longer sums to capacity"));
        }
        balance[e.from as usize] -= flow as i64;
        balance[e.to as usize] += flow as i64;
    }
    for v in 0..net.node_count {
        let expected = if v == net.source as usize {
            -(f.value as i64)
        } else if v == net.sink as usize {
            f.value as i64
        } else {
            0
        };
        if balance[v] != expected {
            return Err(format!("node {v}: net flow {} expected {expected}", balance[v]));
        }
    }
    if has_negative_cycle(r) {
        return Err("residual graph contains a negative-cost cycle".into());
    }
    Ok(())
}
