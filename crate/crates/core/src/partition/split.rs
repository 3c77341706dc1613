//! Chord splitting and greedy rectangulation of chord-free subpolygons.
//!
//! Both steps work on the cell set plus walls. Drawing the independent
//! chords as walls and flood-filling yields the subpolygons; a chord that
//! joins a hole to the outer boundary (or two holes) does not disconnect
//! anything and survives as a slit in the piece's wall set. The greedy
//! step then resolves every remaining concave vertex by extending its
//! incident vertical edge through the vertex until the extension hits
//! boundary, a wall, or a wall endpoint (vertical-first convention, which
//! makes the result deterministic). After the chord split no two concave
//! vertices can see each other, so greedy cuts never collide andery
//! final piece is a rectangle.

use super::cells::CellSet;
use super::polygon::{concave_with_cut_direction, trace_polygon_with_walls};
use super::walls::WallSet;
use super::Rect;
use crate::error::{Error, Result};

/// Flood fill the cell set into wall-respecting 4-connected pieces,
/// ordered by smallest (row, col) cell.
pub(crate) fn wall_components(cells: &CellSet, walls: &WallSet) -> Vec<CellSet> {
    let mut seen = CellSet::empty(cells.width(), cells.height());
    let mut out = Vec::new();
    for (sx, sy) in cells.iter() {
        if seen.contains(sx as i64, sy as i64) {
            continue;
        }
        let mut piece = CellSet::empty(cells.width(), cells.height());
        let mut stack = vec![(sx as i64, sy as i64)];
        seen.insert(sx, sy);
        while let Some((x, y)) = stack.pop() {
            piece.insert(x as usize, y as usize);
            for (nx, ny) in [(x, y - 1), (x - 1, y), (x + 1, y), (x, y + 1)] {
                if cells.contains(nx, ny) && !seen.contains(nx, ny) && walls.open(x, y, nx, ny) {
                    seen.insert(nx as usize, ny as usize);
                    stack.push((nx, ny));
                }
            }
        }
        out.push(piece);
    }
    out
}

/// Partition a component by drawing pairwise non-intersecting chords.
/// The returned cell sets tile the input exactly; tracing each one with
/// the chord walls recovers the subpolygon together with the holes it
/// inherited and any chord slits on its boundary.
pub fn split_by_chords(cells: &CellSet, chords: &[Chord]) -> Vec<CellSet> {
    split_with_walls(cells, &super::walls::chord_walls(chords))
}

pub(crate) fn split_with_walls(cells: &CellSet, walls: &WallSet) -> Vec<CellSet> {
    wall_components(cells, walls)
}

use super::chords::Chord;

/// Tile a chord-free subpolygon into rectangles; `walls` carries the
/// chords drawn by the split stage. For a subpolygon with c' concave
/// vertices and h' holes (slits counted as boundary, not holes) this
/// produces exactly c' - h' + 1 pieces.
pub fn greedy_rectangulate(cells: &CellSet, walls: &WallSet, intensity: f64) -> Result<Vec<Rect>> {
    let poly = trace_polygon_with_walls(cells, walls, 0)?;
    let mut all_walls = walls.clone();
    for (v, dy) in concave_with_cut_direction(&poly) {
        debug_assert!(dy == 1 || dy == -1);
        let mut y = v.y;
        loop {
            let row = if dy == 1 { y } else { y - 1 };
            // stop at the region boundary
            if !(cells.contains(v.x - 1, row) && cells.contains(v.x, row)) {
                break;
            }
            // stop at a collinear wall slit
            if all_walls.has_vertical(v.x, row) {
                break;
            }
            // stop when the segment would pass a wall endpoint (the cut
            // has hit a drawn chord or an earlier cut)
            if y != v.y && all_walls.horizontal_at_point(v.x, y) {
                break;
            }
            all_walls.insert_vertical(v.x, row);
            y += dy;
        }
    }
    let mut rects = Vec::new();
    for piece in wall_components(cells, &all_walls) {
        let (x0, y0, x1, y1) = piece
            .bounding_box()
            .ok_or_else(|| Error::Internal("empty piece from flood fill".into()))?;
        if (x1 - x0) * (y1 - y0) != piece.len() {
            return Err(Error::Internal(format!(
                "greedy piece at ({x0},{y0}) is not a rectangle"
            )));
        }
        rects.push(Rect {
            x0: x0 as i64,
            y0: y0 as i64,
            x1: x1 as i64,
            y1: y1 as i64,
            intensity,
        });
    }
    Ok(rects)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_test_grid, TestShape};
    use crate::partition::cells::connected_components;
    use crate::partition::chords::Axis;
    use crate::partition::polygon::GridPoint;

    fn dark_component(kind: TestShape, size: usize) -> CellSet {
        let g = make_test_grid(kind, size).unwrap();
        connected_components(&g, 1).remove(0)
    }

    fn greedy_plain(cells: &CellSet) -> Vec<Rect> {
        greedy_rectangulate(cells, &WallSet::default(), 0.0).unwrap()
    }

    #[test]
    fn rectangle_with_no_chords_is_itself() {
        let cells = dark_component(TestShape::Solid, 3);
        let parts = split_by_chords(&cells, &[]);
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].len(), 9);
        let rects = greedy_plain(&cells);
        assert_eq!(rects.len(), 1);
        assert_eq!((rects[0].x0, rects[0].y0, rects[0].x1, rects[0].y1), (0, 0, 3, 3));
    }

    #[test]
    fn plus_splits_into_three_by_horizontal_chords() {
        let cells = dark_component(TestShape::Plus, 3);
        let chords = [
            Chord {
                a: GridPoint::new(1, 1),
                b: GridPoint::new(2, 1),
                axis: Axis::Horizontal,
            },
            Chord {
                a: GridPoint::new(1, 2),
                b: GridPoint::new(2, 2),
                axis: Axis::Horizontal,
            },
        ];
        let parts = split_by_chords(&cells, &chords);
        assert_eq!(parts.len(), 3);
        let total: usize = parts.iter().map(CellSet::len).sum();
        assert_eq!(total, cells.len(), "area conserved");
        let walls = crate::partition::walls::chord_walls(&chords);
        for part in &parts {
            let rects = greedy_rectangulate(part, &walls, 0.0).unwrap();
            assert_eq!(rects.len(), 1, "each part is already a rectangle");
        }
    }

    #[test]
    fn t_shape_splits_in_two_by_crossbar_chord() {
        // 3x1 bar with a 1-cell stem below the middle; the chord between
        // the two junction corners crosses the stem interior
        let mut cells = CellSet::empty(3, 2);
        for (x, y) in [(0, 0), (1, 0), (2, 0), (1, 1)] {
            cells.insert(x, y);
        }
        let chord = Chord {
            a: GridPoint::new(1, 1),
            b: GridPoint::new(2, 1),
            axis: Axis::Horizontal,
        };
        let parts = split_by_chords(&cells, &[chord]);
        assert_eq!(parts.len(), 2);
        let total: usize = parts.iter().map(CellSet::len).sum();
        assert_eq!(total, 4, "area conservation");
    }

    #[test]
    fn u_shape_has_no_chords_and_three_rects() {
        // the segment between the notch-floor corners runs along the
        // boundary, so a U admits no chords at all
        let mut cells = CellSet::empty(3, 2);
        for (x, y) in [(0, 0), (2, 0), (0, 1), (1, 1), (2, 1)] {
            cells.insert(x, y);
        }
        let poly = crate::partition::polygon::trace_polygon(&cells, 1).unwrap();
        let concave = crate::partition::polygon::concave_vertices(&poly);
        assert_eq!(concave.len(), 2);
        for axis in [Axis::Horizontal, Axis::Vertical] {
            assert!(crate::partition::chords::enumerate_chords(&cells, &concave, axis).is_empty());
        }
        let rects = greedy_plain(&cells);
        assert_eq!(rects.len(), 3);
    }

    #[test]
    fn l_tromino_greedy_two_rects() {
        let mut cells = CellSet::empty(2, 2);
        for (x, y) in [(0, 0), (0, 1), (1, 1)] {
            cells.insert(x, y);
        }
        let rects = greedy_plain(&cells);
        assert_eq!(rects.len(), 2);
        let area: i64 = rects.iter().map(|r| (r.x1 - r.x0) * (r.y1 - r.y0)).sum();
        assert_eq!(area, 3);
    }

    #[test]
    fn ring_greedy_four_rects() {
        // c' = 4 hole corners, h' = 1: expect 4 - 1 + 1 = 4 rectangles,
        // which matches the exhaustive-tiling minimum for the ring
        let cells = dark_component(TestShape::Ring, 3);
        let rects = greedy_plain(&cells);
        assert_eq!(rects.len(), 4);
        let area: i64 = rects.iter().map(|r| (r.x1 - r.x0) * (r.y1 - r.y0)).sum();
        assert_eq!(area, 8);
    }

    #[test]
    fn pinched_spiral_greedy_four_rects() {
        let mut cells = CellSet::empty(3, 3);
        for (x, y) in [(0, 0), (1, 0), (2, 0), (0, 1), (2, 1), (1, 2), (2, 2)] {
            cells.insert(x, y);
        }
        let rects = greedy_plain(&cells);
        assert_eq!(rects.len(), 4);
        let area: i64 = rects.iter().map(|r| (r.x1 - r.x0) * (r.y1 - r.y0)).sum();
        assert_eq!(area, 7);
    }

    /// A chord from a hole corner to the outer boundary does not split
    /// the cells; it must survive as a slit so the greedy step sees the
    /// hole as already resolved.
    #[test]
    fn deholing_chord_survives_as_slit() {
        // ####
        // #.#.
        // ###.
        let mut cells = CellSet::empty(4, 3);
        for (x, y) in [
            (0, 0),
            (1, 0),
            (2, 0),
            (3, 0),
            (0, 1),
            (2, 1),
            (0, 2),
            (1, 2),
            (2, 2),
        ] {
            cells.insert(x, y);
        }
        let chord = Chord {
            a: GridPoint::new(2, 1),
            b: GridPoint::new(3, 1),
            axis: Axis::Horizontal,
        };
        let parts = split_by_chords(&cells, &[chord]);
        assert_eq!(parts.len(), 1, "de-holing chord disconnects nothing");
        let walls = crate::partition::walls::chord_walls(&[chord]);
        let rects = greedy_rectangulate(&parts[0], &walls, 0.0).unwrap();
        assert_eq!(rects.len(), 4, "slit-aware greedy reaches the minimum");
        let area: i64 = rects.iter().map(|r| (r.x1 - r.x0) * (r.y1 - r.y0)).sum();
        assert_eq!(area, 9);
    }
}
