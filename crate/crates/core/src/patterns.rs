//! Start layouts and goal formations: planar launch grids, cubic lattices,
//! and free-form point lists read from disk.

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::geometry::LocalPoint;

/// What to generate and where to put it.
#[derive(Debug, Clone, PartialEq)]
pub struct FormationSpec {
    pub kind: FormationKind,
    pub offset: LocalPoint,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FormationKind {
    /// rows x cols lattice on the XY plane at a fixed altitude.
    Grid { rows: usize, cols: usize, spacing: f64, altitude: f64 },
    /// side^3 cubic lattice rising from a base altitude.
    Cube { side: usize, spacing: f64, base_altitude: f64 },
    /// Points read verbatim from an `x y z` file.
    File(PathBuf),
}

impl FormationSpec {
    pub fn grid(rows: usize, cols: usize, spacing: f64, altitude: f64) -> Self {
        Self { kind: FormationKind::Grid { rows, cols, spacing, altitude }, offset: LocalPoint::new(0.0, 0.0, 0.0) }
    }

    pub fn cube(side: usize, spacing: f64, base_altitude: f64) -> Self {
        Self { kind: FormationKind::Cube { side, spacing, base_altitude }, offset: LocalPoint::new(0.0, 0.0, 0.0) }
    }

    pub fn with_offset(mut self, offset: LocalPoint) -> Self {
        self.offset = offset;
        self
    }
}

fn check_lattice(count: usize, spacing: f64) -> Result<()> {
    if count < 1 {
        return Err(Error::InvalidPattern("lattice counts must be at least 1".into()));
    }
    if !(spacing > 0.0) || !spacing.is_finite() {
        return Err(Error::InvalidPattern(format!("spacing must be positive, got {spacing}")));
    }
    Ok(())
}

/// Generates the point set for a formation. Lattices are centered on the
/// offset in x and y so the bounding box stays symmetric.
pub fn generate(spec: &FormationSpec) -> Result<Vec<LocalPoint>> {
    let o = spec.offset;
    match &spec.kind {
        FormationKind::Grid { rows, cols, spacing, altitude } => {
            check_lattice(*rows, *spacing)?;
            check_lattice(*cols, *spacing)?;
            let cx = (*cols as f64 - 1.0) / 2.0;
            let cy = (*rows as f64 - 1.0) / 2.0;
            let mut points = Vec::with_capacity(rows * cols);
            for r in 0..*rows {
                for c in 0..*cols {
                    points.push(LocalPoint::new(
                        o.x + (c as f64 - cx) * spacing,
                        o.y + (r as f64 - cy) * spacing,
                        o.z + altitude,
                    ));
                }
            }
            Ok(points)
        }
        FormationKind::Cube { side, spacing, base_altitude } => {
            check_lattice(*side, *spacing)?;
            let c = (*side as f64 - 1.0) / 2.0;
            let mut points = Vec::with_capacity(side * side * side);
            for layer in 0..*side {
                for r in 0..*side {
                    for col in 0..*side {
                        points.push(LocalPoint::new(
                            o.x + (col as f64 - c) * spacing,
                            o.y + (r as f64 - c) * spacing,
                            o.z + base_altitude + layer as f64 * spacing,
                        ));
                    }
                }
            }
            Ok(points)
        }
        FormationKind::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                Error::InvalidPattern(format!("cannot read {}: {e}", path.display()))
            })?;
            let points = parse_points(&text)?;
            Ok(points
                .into_iter()
                .map(|p| LocalPoint::new(p.x + o.x, p.y + o.y, p.z + o.z))
                .collect())
        }
    }
}

/// Parses the points file format: one `x y z` triple per line, `#` starts a
/// comment, blank lines ignored.
pub fn parse_points(text: &str) -> Result<Vec<LocalPoint>> {
    let mut points = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::PatternFile {
                line: i + 1,
                message: format!("expected 3 fields, found {}", fields.len()),
            });
        }
        let mut coords = [0.0f64; 3];
        for (k, field) in fields.iter().enumerate() {
            coords[k] = field.parse().map_err(|_| Error::PatternFile {
                line: i + 1,
                message: format!("cannot parse '{field}' as a number"),
            })?;
        }
        points.push(LocalPoint::new(coords[0], coords[1], coords[2]));
    }
    Ok(points)
}

/// Writes points in the file format that [`parse_points`] reads back.
pub fn format_points(points: &[LocalPoint]) -> String {
    let mut out = String::new();
    for p in points {
        out.push_str(&format!("{} {} {}\n", p.x, p.y, p.z));
    }
    out
}
