//! Error type shared by every planning stage.

use std::fmt;

use crate::geometry::{GridIndex, LocalPoint};

/// Everything that can go wrong between reading a scenario and emitting a plan.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An operation that needs at least one position got an empty sequence.
    NoPositions,
    /// A geodetic point is too far from the anchor for the flat-earth projection.
    AnchorTooFar { lat_delta: f64, lon_delta: f64 },
    /// Grid cell size must be strictly positive and finite.
    InvalidCellSize(f64),
    /// Vertical movement multiplier must be at least 1.
    InvalidMultiplier(u32),
    /// A point does not lie inside the grid volume.
    OutOfGrid(LocalPoint),
    /// A cell index exceeds the grid dimensions.
    IndexOutOfRange { index: GridIndex, dims: [usize; 3] },
    /// Two agents start in the same grid cell.
    StartsCollide(GridIndex),
    /// Two goals fall into the same grid cell.
    GoalsCollide(GridIndex),
    /// A start or goal cell is blocked by an obstacle.
    EndpointBlocked(GridIndex),
    /// The network cannot route all agents; carries the achieved flow value.
    Infeasible { value: u64, agents: usize },
    /// The residual graph contains a negative-cost cycle (solver bug, not bad input).
    NegativeCycle,
    /// An augmenting path violates the residual-capacity contract.
    InvalidPath(String),
    /// Walking the saturated edges did not reach the sink.
    DecompositionFailed(String),
    /// Start positions could not be matched bijectively to path heads.
    AssignmentFailed(String),
    /// Waypoint count too small for the path shape.
    InvalidWaypointCount(usize),
    /// Plan and scenario disagree on the grid they refer to.
    GridMismatch(String),
    /// Instance exceeds the brute-force oracle limits.
    OracleLimit(String),
    /// Formation parameters out of range.
    InvalidPattern(String),
    /// Points-file parse failure, with the 1-based offending line.
    PatternFile { line: usize, message: String },
    /// Scenario violates a structural invariant.
    InvalidScenario(String),
    /// Scenario or plan document malformed or wrong version.
    Format(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NoPositions => write!(f, "no positions"),
            Error::AnchorTooFar { lat_delta, lon_delta } => write!(
                f,
                "anchor too far: delta latitude {lat_delta}°, delta longitude {lon_delta}° (must be < 1°)"
            ),
            Error::InvalidCellSize(d) => write!(f, "cell size must be positive, got {d}"),
            Error::InvalidMultiplier(h) => {
                write!(f, "vertical multiplier must be at least 1, got {h}")
            }
            Error::OutOfGrid(p) => write!(f, "out of grid: ({}, {}, {})", p.x, p.y, p.z),
            Error::IndexOutOfRange { index, dims } => write!(
                f,
                "cell index ({}, {}, {}) outside grid dims ({}, {}, {})",
                index.ix, index.iy, index.iz, dims[0], dims[1], dims[2]
            ),
            Error::StartsCollide(c) => {
                write!(f, "starts collide: two agents map to cell ({}, {}, {})", c.ix, c.iy, c.iz)
            }
            Error::GoalsCollide(c) => {
                write!(f, "goals collide: two goals map to cell ({}, {}, {})", c.ix, c.iy, c.iz)
            }
            Error::EndpointBlocked(c) => {
                write!(f, "endpoint blocked: cell ({}, {}, {}) intersects an obstacle", c.ix, c.iy, c.iz)
            }
            Error::Infeasible { value, agents } => write!(
                f,
                "infeasible: max flow {value} < {agents} (consider increasing padding or enlarging the grid)"
            ),
            Error::NegativeCycle => write!(f, "negative cycle in residual graph"),
            Error::InvalidPath(m) => write!(f, "invalid augmenting path: {m}"),
            Error::DecompositionFailed(m) => write!(f, "flow decomposition failed: {m}"),
            Error::AssignmentFailed(m) => write!(f, "agent assignment failed: {m}"),
            Error::InvalidWaypointCount(n) => {
                write!(f, "waypoint count {n} too small (need at least 2 per moving path)")
            }
            Error::GridMismatch(m) => write!(f, "grid mismatch: {m}"),
            Error::OracleLimit(m) => write!(f, "instance too large for oracle: {m}"),
            Error::InvalidPattern(m) => write!(f, "invalid pattern: {m}"),
            Error::PatternFile { line, message } => write!(f, "points file line {line}: {message}"),
            Error::InvalidScenario(m) => write!(f, "invalid scenario: {m}"),
            Error::Format(m) => write!(f, "document error: {m}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
