//! Coordinate frames and the cubic grid.
//!
//! Positions enter as geodetic fixes or local Cartesian points, get wrapped
//! in a minimum bounding box, and the box is subdivided into cubic cells of
//! side `cell_size`. Everything downstream works on cell indices; metric
//! coordinates reappear only when waypoints are emitted.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean Earth radius in meters, used by the local tangent-plane projection.
pub const MEAN_EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Geodetic fix: degrees latitude/longitude, meters altitude above reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoCoord {
    pub latitude: f64,
    pub longitude: f64,
    pub altitude: f64,
}

impl GeoCoord {
    pub fn new(latitude: f64, longitude: f64, altitude: f64) -> Self {
        Self { latitude, longitude, altitude }
    }

    /// Range and finiteness check; call before trusting file input.
    pub fn validate(&self) -> Result<()> {
        if !self.latitude.is_finite() || !(-90.0..=90.0).contains(&self.latitude) {
            return Err(Error::InvalidScenario(format!(
                "latitude {} outside [-90, 90]",
                self.latitude
            )));
        }
        if !self.longitude.is_finite() || !(-180.0..=180.0).contains(&self.longitude) {
            return Err(Error::InvalidScenario(format!(
                "longitude {} outside [-180, 180]",
                self.longitude
            )));
        }
        if !self.altitude.is_finite() {
            return Err(Error::InvalidScenario("altitude is not finite".into()));
        }
        Ok(())
    }
}

/// Point in the local frame: meters east (x), north (y), up (z) of the anchor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl LocalPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

/// Axis-aligned box: minimum corner plus per-axis side lengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub min_corner: LocalPoint,
    pub extent: [f64; 3],
}

/// A regular cubic grid laid over a bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// World position of the (0, 0, 0) cell corner.
    pub origin: LocalPoint,
    /// Cube side length in meters.
    pub cell_size: f64,
    /// Cell counts along x, y, z.
    pub dims: [usize; 3],
}

impl GridSpec {
    pub fn cell_count(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    /// Linear cell id with x fastest, then y, then z.
    pub fn linear_index(&self, idx: GridIndex) -> usize {
        (idx.iz * self.dims[1] + idx.iy) * self.dims[0] + idx.ix
    }

    pub fn from_linear(&self, linear: usize) -> GridIndex {
        let ix = linear % self.dims[0];
        let rest = linear / self.dims[0];
        GridIndex { ix, iy: rest % self.dims[1], iz: rest / self.dims[1] }
    }

    pub fn contains_index(&self, idx: GridIndex) -> bool {
        idx.ix < self.dims[0] && idx.iy < self.dims[1] && idx.iz < self.dims[2]
    }
}

/// Cell address within a [`GridSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridIndex {
    pub ix: usize,
    pub iy: usize,
    pub iz: usize,
}

impl GridIndex {
    pub fn new(ix: usize, iy: usize, iz: usize) -> Self {
        Self { ix, iy, iz }
    }
}

fn lower_median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).expect("NaN coordinate"));
    values[(values.len() - 1) / 2]
}

/// Component-wise lower median of a set of geodetic fixes.
///
/// Used as the local-frame anchor so the frame sits in the middle of the
/// formation regardless of outliers.
pub fn median_anchor(positions: &[GeoCoord]) -> Result<GeoCoord> {
    if positions.is_empty() {
        return Err(Error::NoPositions);
    }
    let mut lat: Vec<f64> = positions.iter().map(|p| p.latitude).collect();
    let mut lon: Vec<f64> = positions.iter().map(|p| p.longitude).collect();
    let mut alt: Vec<f64> = positions.iter().map(|p| p.altitude).collect();
    Ok(GeoCoord {
        latitude: lower_median(&mut lat),
        longitude: lower_median(&mut lon),
        altitude: lower_median(&mut alt),
    })
}

/// Equirectangular projection of a geodetic fix into the anchor's local frame.
///
/// x = Δlon·(π/180)·R·cos(lat_anchor), y = Δlat·(π/180)·R, z = Δalt.
/// Accurate to well under GPS tolerance for formations spanning less than a
/// kilometer; refuses points more than a degree from the anchor.
pub fn lla_to_local(p: GeoCoord, anchor: GeoCoord) -> Result<LocalPoint> {
    lla_to_local_with_radius(p, anchor, MEAN_EARTH_RADIUS_M)
}

pub fn lla_to_local_with_radius(p: GeoCoord, anchor: GeoCoord, radius: f64) -> Result<LocalPoint> {
    let lat_delta = p.latitude - anchor.latitude;
    let lon_delta = p.longitude - anchor.longitude;
    if lat_delta.abs() >= 1.0 || lon_delta.abs() >= 1.0 {
        return Err(Error::AnchorTooFar { lat_delta, lon_delta });
    }
    let rad = std::f64::consts::PI / 180.0;
    Ok(LocalPoint {
        x: lon_delta * rad * radius * (anchor.latitude * rad).cos(),
        y: lat_delta * rad * radius,
        z: p.altitude - anchor.altitude,
    })
}

/// Component-wise min corner and extent of a point set.
pub fn find_bounding_box(points: &[LocalPoint]) -> Result<BoundingBox> {
    let first = points.first().ok_or(Error::NoPositions)?;
    let mut min = [first.x, first.y, first.z];
    let mut max = min;
    for p in &points[1..] {
        let c = [p.x, p.y, p.z];
        for axis in 0..3 {
            min[axis] = min[axis].min(c[axis]);
            max[axis] = max[axis].max(c[axis]);
        }
    }
    Ok(BoundingBox {
        min_corner: LocalPoint::new(min[0], min[1], min[2]),
        extent: [max[0] - min[0], max[1] - min[1], max[2] - min[2]],
    })
}

/// Subdivide a bounding box into cubic cells of side `cell_size`.
///
/// Per-axis count is `ceil(extent / cell_size)` with a minimum of one cell,
/// plus `padding` extra cells on each side. The origin shifts down by the
/// padding; with `clamp_ground` the origin never drops below z = 0.
pub fn subdivide(
    bbox: &BoundingBox,
    cell_size: f64,
    padding: usize,
    clamp_ground: bool,
) -> Result<GridSpec> {
    if !(cell_size > 0.0) || !cell_size.is_finite() {
        return Err(Error::InvalidCellSize(cell_size));
    }
    let mut dims = [0usize; 3];
    for axis in 0..3 {
        let core = (bbox.extent[axis] / cell_size).ceil() as usize;
        dims[axis] = core.max(1) + 2 * padding;
    }
    let shift = padding as f64 * cell_size;
    let mut origin = LocalPoint::new(
        bbox.min_corner.x - shift,
        bbox.min_corner.y - shift,
        bbox.min_corner.z - shift,
    );
    if clamp_ground && origin.z < 0.0 {
        origin.z = 0.0;
    }
    Ok(GridSpec { origin, cell_size, dims })
}

/// Cell containing a point; points exactly on the upper grid boundary clamp
/// to the last cell.
///
/// Boundary comparisons carry an ulp-scale tolerance: the grid span is
/// reassembled from `min + extent`, which can round one ulp short of the
/// coordinate it was derived from.
pub fn point_to_cell(p: LocalPoint, grid: &GridSpec) -> Result<GridIndex> {
    let rel = [p.x - grid.origin.x, p.y - grid.origin.y, p.z - grid.origin.z];
    let mut idx = [0usize; 3];
    for axis in 0..3 {
        let span = grid.dims[axis] as f64 * grid.cell_size;
        let tol = span.max(grid.cell_size) * 1e-12;
        if rel[axis] < -tol || rel[axis] > span + tol {
            return Err(Error::OutOfGrid(p));
        }
        let i = (rel[axis] / grid.cell_size).floor().max(0.0) as usize;
        idx[axis] = i.min(grid.dims[axis] - 1);
    }
    Ok(GridIndex::new(idx[0], idx[1], idx[2]))
}

/// Metric center of a cell.
pub fn cell_center(idx: GridIndex, grid: &GridSpec) -> Result<LocalPoint> {
    if !grid.contains_index(idx) {
        return Err(Error::IndexOutOfRange { index: idx, dims: grid.dims });
    }
    Ok(LocalPoint::new(
        grid.origin.x + (idx.ix as f64 + 0.5) * grid.cell_size,
        grid.origin.y + (idx.iy as f64 + 0.5) * grid.cell_size,
        grid.origin.z + (idx.iz as f64 + 0.5) * grid.cell_size,
    ))
}
