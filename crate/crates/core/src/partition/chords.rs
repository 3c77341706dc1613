//! Axis-parallel chords between concave vertices.
//!
//! A chord joins two concave vertices along a lattice line and must lie
//! strictly inside the polygon: every unit step of the open segment has
//! component cells on both sides. That test is exact integer arithmetic
//! and automatically rejects segments that run along the boundary, through
//! holes, or through pinch vertices.

use super::cells::CellSet;
use super::polygon::GridPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Horizontal,
    Vertical,
}

/// Chord between two concave vertices; endpoints are stored ordered so
/// `a < b` lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Chord {
    pub a: GridPoint,
    pub b: GridPoint,
    pub axis: Axis,
}

impl Chord {
    fn new(a: GridPoint, b: GridPoint, axis: Axis) -> Self {
        if a <= b {
            Chord { a, b, axis }
        } else {
            Chord { a: b, b: a, axis }
        }
    }
}

/// All valid chords of the given axis between the listed concave vertices.
pub fn enumerate_chords(cells: &CellSet, concave: &[GridPoint], axis: Axis) -> Vec<Chord> {
    let mut sorted = concave.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut chords = Vec::new();
    for (i, &p) in sorted.iter().enumerate() {
        for &q in &sorted[i + 1..] {
            let candidate = match axis {
                Axis::Horizontal if p.y == q.y && p.x != q.x => horizontal_interior(cells, p, q),
                Axis::Vertical if p.x == q.x && p.y != q.y => vertical_interior(cells, p, q),
                _ => false,
            };
            if candidate {
                chords.push(Chord::new(p, q, axis));
            }
        }
    }
    chords
}

fn horizontal_interior(cells: &CellSet, p: GridPoint, q: GridPoint) -> bool {
    let y = p.y;
    let (x0, x1) = (p.x.min(q.x), p.x.max(q.x));
    (x0..x1).all(|x| cells.contains(x, y - 1) && cells.contains(x, y))
}

fn vertical_interior(cells: &CellSet, p: GridPoint, q: GridPoint) -> bool {
    let x = p.x;
    let (y0, y1) = (p.y.min(q.y), p.y.max(q.y));
    (y0..y1).all(|y| cells.contains(x - 1, y) && cells.contains(x, y))
}

/// Closed-segment intersection, including shared endpoints and collinear
/// overlap.
pub fn chords_intersect(c1: &Chord, c2: &Chord) -> bool {
    match (c1.axis, c2.axis) {
        (Axis::Horizontal, Axis::Vertical) => perpendicular_intersect(c1, c2),
        (Axis::Vertical, Axis::Horizontal) => perpendicular_intersect(c2, c1),
        (Axis::Horizontal, Axis::Horizontal) => {
            c1.a.y == c2.a.y && c1.a.x <= c2.b.x && c2.a.x <= c1.b.x
        }
        (Axis::Vertical, Axis::Vertical) => {
            c1.a.x == c2.a.x && c1.a.y <= c2.b.y && c2.a.y <= c1.b.y
        }
    }
}

fn perpendicular_intersect(h: &Chord, v: &Chord) -> bool {
    v.a.x >= h.a.x && v.a.x <= h.b.x && h.a.y >= v.a.y && h.a.y <= v.b.y
}
