//! Minimum partition of a marker bitmap into axis-aligned rectangles.
//!
//! Per connected component: trace the rectilinear polygon, enumerate
//! axis-parallel chords between concave vertices, pick a maximum set of
//! pairwise non-intersecting chords via maximum bipartite matching and a
//! König vertex cover, split along them, and greedily rectangulate the
//! chord-free remainder. For a component with c concave vertices, l
//! independent chords and h holes this yields c - l - h + 1 rectangles,
//! and that count is minimal.
//!
//! All geometry is exact integer lattice arithmetic.

mod cells;
mod chords;
mod matching;
mod polygon;
mod split;
mod walls;

pub use cells::{connected_components, CellSet};
pub use chords::{chords_intersect, enumerate_chords, Axis, Chord};
pub use matching::{
    chord_graph, independent_chords, max_bipartite_matching, min_vertex_cover, ChordGraph,
    Matching, VertexCover,
};
pub use polygon::{
    concave_vertices, signed_area2, trace_polygon, trace_polygon_with_walls, GridPoint,
    RectilinearPolygon, Ring,
};
pub use split::{greedy_rectangulate, split_by_chords};
pub use walls::{chord_walls, WallSet};

use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::grid::BitGrid;

/// Axis-aligned lattice rectangle with its grayscale intensity
/// (0 = black, 1 = white).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: i64,
    pub y0: i64,
    pub x1: i64,
    pub y1: i64,
    pub intensity: f64,
}

impl Rect {
    pub fn width(&self) -> i64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> i64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> i64 {
        self.width() * self.height()
    }
}

// serialized as the bare coordinate quadruple; intensity is implied by
// the owning component's color
impl Serialize for Rect {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(4))?;
        seq.serialize_element(&self.x0)?;
        seq.serialize_element(&self.y0)?;
        seq.serialize_element(&self.x1)?;
        seq.serialize_element(&self.y1)?;
        seq.end()
    }
}

/// Which marker colors to partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartitionColors {
    #[serde(rename = "dark")]
    DarkOnly,
    Both,
}

/// Per-component bookkeeping and rectangles.
#[derive(Debug, Clone, Serialize)]
pub struct ComponentPartition {
    pub id: usize,
    /// Marker bit of the component (1 = dark).
    pub color: u8,
    /// Number of concave vertices c.
    pub concave: usize,
    /// Size l of the maximum independent chord set.
    pub independent_chords: usize,
    /// Number of holes h.
    pub holes: usize,
    pub rect_count: usize,
    pub rects: Vec<Rect>,
}

/// Output of [`partition_marker`].
#[derive(Debug, Clone, Serialize)]
pub struct PartitionResult {
    pub grid_width: usize,
    pub grid_height: usize,
    pub colors: PartitionColors,
    pub components: Vec<ComponentPartition>,
    pub total_rects: usize,
}

impl PartitionResult {
    pub fn rects(&self) -> impl Iterator<Item = &Rect> {
        self.components.iter().flat_map(|c| c.rects.iter())
    }

    /// Deterministic JSON serialization for the CLI and golden tests.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("partition result serializes")
    }
}

fn intensity_of(color: u8) -> f64 {
    if color == 1 {
        0.0
    } else {
        1.0
    }
}

/// Run the full partition pipeline for one component.
fn partition_component(cells: &CellSet, color: u8, id: usize) -> Result<ComponentPartition> {
    let poly = trace_polygon(cells, color)?;
    let concave = concave_vertices(&poly);
    let horizontal = enumerate_chords(cells, &concave, Axis::Horizontal);
    let vertical = enumerate_chords(cells, &concave, Axis::Vertical);
    let graph = chord_graph(&horizontal, &vertical);
    let matching = max_bipartite_matching(&graph);
    let cover = min_vertex_cover(&graph, &matching);
    if cover.len() != matching.len() {
        return Err(Error::Internal(format!(
            "König cover size {} != matching size {}",
            cover.len(),
            matching.len()
        )));
    }
    let chords = independent_chords(&horizontal, &vertical, &cover)?;
    let walls = chord_walls(&chords);
    let mut rects = Vec::new();
    for piece in split::split_with_walls(cells, &walls) {
        rects.extend(greedy_rectangulate(&piece, &walls, intensity_of(color))?);
    }

    // coverage and disjointness, checked exactly
    let mut covered = CellSet::empty(cells.width(), cells.height());
    let mut covered_area = 0i64;
    for r in &rects {
        covered_area += r.area();
        for y in r.y0..r.y1 {
            for x in r.x0..r.x1 {
                if !cells.contains(x, y) {
                    return Err(Error::Internal(format!(
                        "rect {r:?} leaves its component at ({x},{y})"
                    )));
                }
                covered.insert(x as usize, y as usize);
            }
        }
    }
    if covered_area != cells.len() as i64 || covered.len() != cells.len() {
        return Err(Error::Internal(format!(
            "rects cover {} of {} cells (area {})",
            covered.len(),
            cells.len(),
            covered_area
        )));
    }
    // structural count law for the minimum partition
    let expected = concave.len() as i64 - chords.len() as i64 - poly.holes.len() as i64 + 1;
    if rects.len() as i64 != expected {
        return Err(Error::Internal(format!(
            "rect count {} != c - l - h + 1 = {expected}",
            rects.len()
        )));
    }

    Ok(ComponentPartition {
        id,
        color,
        concave: concave.len(),
        independent_chords: chords.len(),
        holes: poly.holes.len(),
        rect_count: rects.len(),
        rects,
    })
}

/// Decompose a marker into a minimum set of rectangles, per color and
/// connected component. Dark components come first, then light ones,
/// each ordered by their smallest (row, col) cell.
pub fn partition_marker(grid: &BitGrid, colors: PartitionColors) -> Result<PartitionResult> {
    let color_list: &[u8] = match colors {
        PartitionColors::DarkOnly => &[1],
        PartitionColors::Both => &[1, 0],
    };
    let mut components = Vec::new();
    for &color in color_list {
        for cells in connected_components(grid, color) {
            let id = components.len();
            components.push(partition_component(&cells, color, id)?);
        }
    }
    let total_rects = components.iter().map(|c| c.rect_count).sum();
    Ok(PartitionResult {
        grid_width: grid.width(),
        grid_height: grid.height(),
        colors,
        components,
        total_rects,
    })
}
