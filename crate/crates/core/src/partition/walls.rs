//! Unit wall segments on the lattice.
//!
//! Walls carry drawn chords (and greedy cuts) through the pipeline: they
//! block 4-adjacency during flood fill and are treated as boundary by the
//! polygon tracer. A chord that does not disconnect its component (one
//! that joins a hole to the outer boundary, or two holes) survives as a
//! zero-width slit in the subpolygon, exactly as if the chord had been
//! drawn with a knife.

use std::collections::HashSet;

use super::chords::{Axis, Chord};

/// A vertical wall at (x, y) spans (x,y)-(x,y+1) and blocks cells
/// (x-1,y)|(x,y); a horizontal wall at (x, y) spans (x,y)-(x+1,y) and
/// blocks cells (x,y-1)|(x,y).
#[derive(Debug, Default, Clone)]
pub struct WallSet {
    vertical: HashSet<(i64, i64)>,
    horizontal: HashSet<(i64, i64)>,
}

impl WallSet {
    pub fn is_empty(&self) -> bool {
        self.vertical.is_empty() && self.horizontal.is_empty()
    }

    pub fn insert_vertical(&mut self, x: i64, y: i64) {
        self.vertical.insert((x, y));
    }

    pub fn insert_horizontal(&mut self, x: i64, y: i64) {
        self.horizontal.insert((x, y));
    }

    pub fn has_vertical(&self, x: i64, y: i64) -> bool {
        self.vertical.contains(&(x, y))
    }

    pub fn has_horizontal(&self, x: i64, y: i64) -> bool {
        self.horizontal.contains(&(x, y))
    }

    /// Any horizontal wall touching the lattice point (x, y).
    pub fn horizontal_at_point(&self, x: i64, y: i64) -> bool {
        self.has_horizontal(x - 1, y) || self.has_horizontal(x, y)
    }

    pub fn add_chord(&mut self, chord: &Chord) {
        match chord.axis {
            Axis::Vertical => {
                for y in chord.a.y..chord.b.y {
                    self.insert_vertical(chord.a.x, y);
                }
            }
            Axis::Horizontal => {
                for x in chord.a.x..chord.b.x {
                    self.insert_horizontal(x, chord.a.y);
                }
            }
        }
    }

    /// May a step be taken from cell (x, y) to the 4-neighbor (nx, ny)?
    pub fn open(&self, x: i64, y: i64, nx: i64, ny: i64) -> bool {
        if nx == x + 1 {
            !self.has_vertical(nx, y)
        } else if nx == x - 1 {
            !self.has_vertical(x, y)
        } else if ny == y + 1 {
            !self.has_horizontal(x, ny)
        } else {
            !self.has_horizontal(x, y)
        }
    }
}

/// The wall set realizing a list of chords.
pub fn chord_walls(chords: &[Chord]) -> WallSet {
    let mut walls = WallSet::default();
    for chord in chords {
        walls.add_chord(chord);
    }
    walls
}
