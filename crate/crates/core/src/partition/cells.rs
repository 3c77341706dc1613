//! Cell sets over the marker lattice and 4-connected component extraction.

use crate::grid::BitGrid;

/// A set of unit cells addressed by (x, y) = (column, row). Cell (x, y)
/// occupies the lattice square `[x, x+1] x [y, y+1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellSet {
    width: usize,
    height: usize,
    bits: Vec<u64>,
    count: usize,
    /// Inclusive-exclusive bounding box, tracked on insert so iteration
    /// touches only the occupied region.
    bbox: Option<(usize, usize, usize, usize)>,
}

impl CellSet {
    pub fn empty(width: usize, height: usize) -> Self {
        CellSet {
            width,
            height,
            bits: vec![0; (width * height).div_ceil(64)],
            count: 0,
            bbox: None,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    #[inline]
    fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    pub fn insert(&mut self, x: usize, y: usize) {
        let i = self.index(x, y);
        let mask = 1u64 << (i % 64);
        if self.bits[i / 64] & mask == 0 {
            self.bits[i / 64] |= mask;
            self.count += 1;
            self.bbox = Some(match self.bbox {
                None => (x, y, x + 1, y + 1),
                Some((x0, y0, x1, y1)) => (x0.min(x), y0.min(y), x1.max(x + 1), y1.max(y + 1)),
            });
        }
    }

    /// Membership test; out-of-range coordinates are outside the set.
    #[inline]
    pub fn contains(&self, x: i64, y: i64) -> bool {
        if x < 0 || y < 0 || x as usize >= self.width || y as usize >= self.height {
            return false;
        }
        let i = self.index(x as usize, y as usize);
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    /// Cells in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let (x0, y0, x1, y1) = self.bbox.unwrap_or((0, 0, 0, 0));
        (y0..y1)
            .flat_map(move |y| (x0..x1).map(move |x| (x, y)))
            .filter(move |&(x, y)| self.contains(x as i64, y as i64))
    }

    /// Smallest cell in row-major order, if any.
    pub fn min_cell(&self) -> Option<(usize, usize)> {
        self.iter().next()
    }

    /// Inclusive-exclusive bounding box (x0, y0, x1, y1) in lattice units.
    pub fn bounding_box(&self) -> Option<(usize, usize, usize, usize)> {
        self.bbox
    }
}

/// Maximal 4-connected sets of cells of the given color, ordered by their
/// smallest (row, col) cell. Uses an iterative depth-first search.
pub fn connected_components(grid: &BitGrid, color: u8) -> Vec<CellSet> {
    let (w, h) = (grid.width(), grid.height());
    let mut seen = vec![false; w * h];
    let mut components = Vec::new();
    for row in 0..h {
        for col in 0..w {
            if seen[row * w + col] || grid.get(row, col) != color {
                continue;
            }
            let mut set = CellSet::empty(w, h);
            let mut stack = vec![(col, row)];
            seen[row * w + col] = true;
            while let Some((x, y)) = stack.pop() {
                set.insert(x, y);
                let neighbors = [
                    (x as i64, y as i64 - 1),
                    (x as i64 - 1, y as i64),
                    (x as i64 + 1, y as i64),
                    (x as i64, y as i64 + 1),
                ];
                for (nx, ny) in neighbors {
                    if nx < 0 || ny < 0 || nx as usize >= w || ny as usize >= h {
                        continue;
                    }
                    let (nx, ny) = (nx as usize, ny as usize);
                    if !seen[ny * w + nx] && grid.get(ny, nx) == color {
                        seen[ny * w + nx] = true;
                        stack.push((nx, ny));
                    }
                }
            }
            components.push(set);
        }
    }
    components
}
