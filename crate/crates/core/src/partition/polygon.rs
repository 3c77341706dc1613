//! Boundary tracing: cell sets to rectilinear polygons with holes.
//!
//! Rings are stored in reduced form (no three collinear vertices) with the
//! polygon interior on the left of every directed edge, so the outer ring
//! has positive shoelace area and hole rings negative. Wherever a vertex
//! offers more than one way to continue, the walk takes the most-left
//! available turn (left > straight > right > u-turn). Two cases exist:
//! at a pinch (two diagonal cells of the set meeting at a point) this
//! keeps every visit convex and absorbs point-touching enclosed regions
//! into the outer walk, which is what keeps the chord-based partition
//! minimal without zero-length chords; along a wall slit it carries the
//! walk straight down one side. A ring may therefore repeat a vertex at
//! a pinch point; it never repeats a directed edge.

use std::collections::HashMap;

use super::cells::CellSet;
use super::walls::WallSet;
use crate::error::{Error, Result};

/// Lattice point in cell-corner units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GridPoint {
    pub x: i64,
    pub y: i64,
}

impl GridPoint {
    pub fn new(x: i64, y: i64) -> Self {
        GridPoint { x, y }
    }
}

/// Closed rectilinear ring; consecutive vertices differ in exactly one
/// coordinate and the last vertex connects back to the first.
pub type Ring = Vec<GridPoint>;

/// Lattice polygon with holes; `color` is the marker bit it was traced
/// from (1 = dark).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RectilinearPolygon {
    pub outer: Ring,
    pub holes: Vec<Ring>,
    pub color: u8,
}

/// Twice the signed shoelace area of a ring.
pub fn signed_area2(ring: &Ring) -> i64 {
    let mut acc = 0;
    for i in 0..ring.len() {
        let a = ring[i];
        let b = ring[(i + 1) % ring.len()];
        acc += a.x * b.y - b.x * a.y;
    }
    acc
}

impl RectilinearPolygon {
    /// Polygon area in cells: outer area minus hole areas.
    pub fn area(&self) -> i64 {
        let outer = signed_area2(&self.outer);
        let holes: i64 = self.holes.iter().map(|h| signed_area2(h)).sum();
        (outer + holes) / 2
    }

    /// Rasterize back to the cell set (even-odd scanline fill).
    pub fn to_cells(&self) -> CellSet {
        let max_x = self.outer.iter().map(|p| p.x).max().unwrap_or(0);
        let max_y = self.outer.iter().map(|p| p.y).max().unwrap_or(0);
        let mut set = CellSet::empty(max_x as usize, max_y as usize);
        // vertical edges from every ring, bucketed by the cell rows they span
        let mut crossings: Vec<Vec<i64>> = vec![Vec::new(); max_y as usize];
        let mut add_ring = |ring: &Ring| {
            for i in 0..ring.len() {
                let a = ring[i];
                let b = ring[(i + 1) % ring.len()];
                if a.x == b.x {
                    let (y0, y1) = (a.y.min(b.y), a.y.max(b.y));
                    for y in y0..y1 {
                        crossings[y as usize].push(a.x);
                    }
                }
            }
        };
        add_ring(&self.outer);
        for h in &self.holes {
            add_ring(h);
        }
        for (y, xs) in crossings.iter_mut().enumerate() {
            xs.sort_unstable();
            for pair in xs.chunks(2) {
                if let [x0, x1] = pair {
                    for x in *x0..*x1 {
                        set.insert(x as usize, y);
                    }
                }
            }
        }
        set
    }
}

/// Trace the boundary of one 4-connected component.
pub fn trace_polygon(cells: &CellSet, color: u8) -> Result<RectilinearPolygon> {
    trace_polygon_with_walls(cells, &WallSet::default(), color)
}

/// Trace a component whose boundary includes wall slits (drawn chords).
pub fn trace_polygon_with_walls(
    cells: &CellSet,
    walls: &WallSet,
    color: u8,
) -> Result<RectilinearPolygon> {
    let rings = trace_rings(cells, walls)?;
    let mut outer = None;
    let mut holes = Vec::new();
    for ring in rings {
        if signed_area2(&ring) > 0 {
            if outer.is_some() {
                return Err(Error::Internal(
                    "component traced to more than one outer ring".into(),
                ));
            }
            outer = Some(ring);
        } else {
            holes.push(ring);
        }
    }
    let outer = outer.ok_or_else(|| Error::Internal("component has no outer ring".into()))?;
    let poly = RectilinearPolygon {
        outer,
        holes,
        color,
    };
    if poly.area() != cells.len() as i64 {
        return Err(Error::Internal(format!(
            "traced area {} does not match cell count {}",
            poly.area(),
            cells.len()
        )));
    }
    Ok(poly)
}

fn trace_rings(cells: &CellSet, walls: &WallSet) -> Result<Vec<Ring>> {
    // Directed unit boundary edges with the cell set on the left. A wall
    // between two set cells produces edges on both of its sides.
    let mut edges: Vec<(GridPoint, GridPoint)> = Vec::new();
    for (xu, yu) in cells.iter() {
        let (x, y) = (xu as i64, yu as i64);
        if !cells.contains(x, y - 1) || walls.has_horizontal(x, y) {
            edges.push((GridPoint::new(x, y), GridPoint::new(x + 1, y)));
        }
        if !cells.contains(x + 1, y) || walls.has_vertical(x + 1, y) {
            edges.push((GridPoint::new(x + 1, y), GridPoint::new(x + 1, y + 1)));
        }
        if !cells.contains(x, y + 1) || walls.has_horizontal(x, y + 1) {
            edges.push((GridPoint::new(x + 1, y + 1), GridPoint::new(x, y + 1)));
        }
        if !cells.contains(x - 1, y) || walls.has_vertical(x, y) {
            edges.push((GridPoint::new(x, y + 1), GridPoint::new(x, y)));
        }
    }
    edges.sort_unstable();
    let mut outgoing: HashMap<GridPoint, Vec<usize>> = HashMap::new();
    for (i, (a, _)) in edges.iter().enumerate() {
        outgoing.entry(*a).or_default().push(i);
    }

    let mut visited = vec![false; edges.len()];
    let mut rings = Vec::new();
    for start in 0..edges.len() {
        if visited[start] {
            continue;
        }
        let mut walk = Vec::new();
        let mut current = start;
        loop {
            visited[current] = true;
            let (a, b) = edges[current];
            walk.push(a);
            let din = (b.x - a.x, b.y - a.y);
            let candidates = &outgoing[&b];
            let next = match candidates.len() {
                1 => candidates[0],
                2 => {
                    // pinch or slit vertex: most-left turn wins
                    // (left > straight > right > u-turn)
                    let rank = |i: usize| {
                        let (_, c) = edges[i];
                        let dout = (c.x - b.x, c.y - b.y);
                        let cross = din.0 * dout.1 - din.1 * dout.0;
                        let dot = din.0 * dout.0 + din.1 * dout.1;
                        match (cross.signum(), dot.signum()) {
                            (1, _) => 3,
                            (0, 1) => 2,
                            (-1, _) => 1,
                            _ => 0,
                        }
                    };
                    if rank(candidates[0]) > rank(candidates[1]) {
                        candidates[0]
                    } else {
                        candidates[1]
                    }
                }
                n => {
                    return Err(Error::Internal(format!(
                        "boundary vertex with {n} outgoing edges"
                    )))
                }
            };
            // a ring closes on its starting edge, not its starting vertex:
            // a pinched ring passes the start vertex twice
            if next == start {
                break;
            }
            if visited[next] {
                return Err(Error::Internal("boundary walk revisited an edge".into()));
            }
            current = next;
        }
        rings.push(canonical_rotation(reduce_collinear(walk)));
    }
    Ok(rings)
}

/// Drop vertices interior to straight runs, cyclically.
fn reduce_collinear(walk: Vec<GridPoint>) -> Ring {
    let n = walk.len();
    let mut out = Vec::new();
    for i in 0..n {
        let prev = walk[(i + n - 1) % n];
        let v = walk[i];
        let next = walk[(i + 1) % n];
        let d1 = (v.x - prev.x, v.y - prev.y);
        let d2 = (next.x - v.x, next.y - v.y);
        if d1.0 * d2.1 - d1.1 * d2.0 != 0 {
            out.push(v);
        }
    }
    out
}

/// Rotate so the ring starts at its lexicographically smallest vertex;
/// among several occurrences of that vertex the smallest full rotation
/// wins, which makes the representation canonical.
fn canonical_rotation(ring: Ring) -> Ring {
    let min = *ring.iter().min().expect("non-empty ring");
    let mut best: Option<Vec<GridPoint>> = None;
    for (i, v) in ring.iter().enumerate() {
        if *v != min {
            continue;
        }
        let rotated: Vec<GridPoint> = ring[i..].iter().chain(&ring[..i]).copied().collect();
        if best.as_ref().is_none_or(|b| rotated < *b) {
            best = Some(rotated);
        }
    }
    best.expect("ring contains its minimum")
}

/// Vertices with a 270-degree interior angle, on the outer ring and on
/// hole rings alike: a right turn while walking with the interior on the
/// left. Outer-ring vertices come first, then hole vertices, in ring
/// order.
pub fn concave_vertices(poly: &RectilinearPolygon) -> Vec<GridPoint> {
    concave_with_cut_direction(poly)
        .into_iter()
        .map(|(v, _)| v)
        .collect()
}

/// Concave vertices together with the direction (sign of dy) in which the
/// incident vertical edge continues through the vertex into the interior.
pub(crate) fn concave_with_cut_direction(poly: &RectilinearPolygon) -> Vec<(GridPoint, i64)> {
    let mut out = Vec::new();
    let mut scan = |ring: &Ring| {
        let n = ring.len();
        for i in 0..n {
            let p = ring[(i + n - 1) % n];
            let v = ring[i];
            let next = ring[(i + 1) % n];
            let d1 = (v.x - p.x, v.y - p.y);
            let d2 = (next.x - v.x, next.y - v.y);
            if d1.0 * d2.1 - d1.1 * d2.0 < 0 {
                // exactly one incident edge is vertical
                let partner = if p.x == v.x { p } else { next };
                debug_assert_eq!(partner.x, v.x);
                out.push((v, (v.y - partner.y).signum()));
            }
        }
    };
    scan(&poly.outer);
    for h in &poly.holes {
        scan(h);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_test_grid, TestShape};
    use crate::partition::cells::connected_components;

    fn trace_shape(kind: TestShape, size: usize) -> RectilinearPolygon {
        let g = make_test_grid(kind, size).unwrap();
        let comps = connected_components(&g, 1);
        assert_eq!(comps.len(), 1);
        trace_polygon(&comps[0], 1).unwrap()
    }

    #[test]
    fn single_cell_is_unit_square() {
        let mut set = CellSet::empty(1, 1);
        set.insert(0, 0);
        let poly = trace_polygon(&set, 1).unwrap();
        assert_eq!(
            poly.outer,
            vec![
                GridPoint::new(0, 0),
                GridPoint::new(1, 0),
                GridPoint::new(1, 1),
                GridPoint::new(0, 1)
            ]
        );
        assert!(poly.holes.is_empty());
        assert_eq!(poly.area(), 1);
    }

    #[test]
    fn l_tromino_has_six_vertices_one_concave() {
        let mut set = CellSet::empty(2, 2);
        set.insert(0, 0);
        set.insert(0, 1);
        set.insert(1, 1);
        let poly = trace_polygon(&set, 1).unwrap();
        assert_eq!(poly.outer.len(), 6);
        assert!(poly.holes.is_empty());
        assert_eq!(poly.area(), 3);
        let concave = concave_vertices(&poly);
        assert_eq!(concave, vec![GridPoint::new(1, 1)]);
    }

    #[test]
    fn ring_has_square_outer_and_square_hole() {
        let poly = trace_shape(TestShape::Ring, 3);
        assert_eq!(poly.outer.len(), 4);
        assert_eq!(poly.holes.len(), 1);
        assert_eq!(poly.holes[0].len(), 4);
        assert_eq!(poly.area(), 8);
        // every rectangular hole corner is concave
        let concave = concave_vertices(&poly);
        assert_eq!(concave.len(), 4);
        assert!(concave.contains(&GridPoint::new(1, 1)));
        assert!(concave.contains(&GridPoint::new(2, 2)));
    }

    #[test]
    fn rectangle_has_no_concave_vertices() {
        let poly = trace_shape(TestShape::Solid, 3);
        assert!(concave_vertices(&poly).is_empty());
    }

    #[test]
    fn plus_has_four_concave_vertices() {
        let poly = trace_shape(TestShape::Plus, 3);
        let mut concave = concave_vertices(&poly);
        concave.sort();
        assert_eq!(
            concave,
            vec![
                GridPoint::new(1, 1),
                GridPoint::new(1, 2),
                GridPoint::new(2, 1),
                GridPoint::new(2, 2)
            ]
        );
    }

    /// Spiral that touches itself diagonally: the enclosed light cell
    /// pinches against the outside at one lattice point. The walk merges
    /// it into a single outer ring that repeats the pinch vertex, leaving
    /// three concave vertices and no holes.
    #[test]
    fn diagonal_pinch_merges_into_outer_walk() {
        let mut set = CellSet::empty(3, 3);
        for (x, y) in [(0, 0), (1, 0), (2, 0), (0, 1), (2, 1), (1, 2), (2, 2)] {
            set.insert(x, y);
        }
        let poly = trace_polygon(&set, 1).unwrap();
        assert!(poly.holes.is_empty());
        assert_eq!(poly.area(), 7);
        let pinch = GridPoint::new(1, 2);
        let visits = poly.outer.iter().filter(|&&v| v == pinch).count();
        assert_eq!(visits, 2, "pinch vertex appears twice on the outer ring");
        assert_eq!(concave_vertices(&poly).len(), 3);
    }

    #[test]
    fn to_cells_round_trips() {
        for (kind, size) in [
            (TestShape::Ring, 5),
            (TestShape::Plus, 5),
            (TestShape::LTromino, 4),
        ] {
            let g = make_test_grid(kind, size).unwrap();
            let comps = connected_components(&g, 1);
            for comp in comps {
                let poly = trace_polygon(&comp, 1).unwrap();
                let back = poly.to_cells();
                assert_eq!(back.len(), comp.len());
                for (x, y) in comp.iter() {
                    assert!(back.contains(x as i64, y as i64));
                }
            }
        }
    }
}
