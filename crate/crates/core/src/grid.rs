//! Binary marker bitmaps and the bit-exact formats they are stored in.
//!
//! A [`BitGrid`] is the discrete marker: `1` is a dark module, `0` a light
//! one, row 0 is the top row. Supported on-disk formats are plain/raw PBM
//! (`P1`/`P4`, where 1 = black matches our dark convention) and `textgrid`,
//! lines of `'0'`/`'1'` characters of equal length.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Binary marker raster; cell value 1 = dark module, 0 = light module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitGrid {
    width: usize,
    height: usize,
    cells: Vec<u8>,
}

/// On-disk encodings accepted by [`load_bitgrid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridFormat {
    PbmAscii,
    PbmBinary,
    Textgrid,
}

/// Canonical test shapes for exercising the partition pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestShape {
    Solid,
    Checker,
    Plus,
    LTromino,
    Ring,
}

impl BitGrid {
    pub fn new(width: usize, height: usize, cells: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Dimension(format!(
                "grid must be at least 1x1, got {width}x{height}"
            )));
        }
        if cells.len() != width * height {
            return Err(Error::Dimension(format!(
                "cell count {} does not match {width}x{height}",
                cells.len()
            )));
        }
        if let Some(bad) = cells.iter().find(|&&c| c > 1) {
            return Err(Error::Dimension(format!("cell value {bad} is not 0 or 1")));
        }
        Ok(BitGrid {
            width,
            height,
            cells,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Cell at (row, col); row 0 is the top of the marker.
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.cells[row * self.width + col]
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub fn count_of(&self, color: u8) -> usize {
        self.cells.iter().filter(|&&c| c == color).count()
    }

    /// Serialize as textgrid; `load_bitgrid` on the result is the identity.
    pub fn to_textgrid(&self) -> String {
        let mut out = String::with_capacity(self.height * (self.width + 1));
        for row in 0..self.height {
            for col in 0..self.width {
                out.push(if self.get(row, col) == 1 { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }

    pub fn save_textgrid(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_textgrid()).map_err(|e| Error::io(path, e))
    }
}

/// Load a marker bitmap in the declared format.
pub fn load_bitgrid(path: &Path, format: GridFormat) -> Result<BitGrid> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    match format {
        GridFormat::Textgrid => parse_textgrid(path, &bytes),
        GridFormat::PbmAscii => parse_pbm_ascii(path, &bytes),
        GridFormat::PbmBinary => parse_pbm_binary(path, &bytes),
    }
}

/// Guess the format from the file content (PBM magic) and extension.
pub fn detect_format(path: &Path) -> Result<GridFormat> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    match bytes.get(..2) {
        Some(b"P1") => Ok(GridFormat::PbmAscii),
        Some(b"P4") => Ok(GridFormat::PbmBinary),
        _ => Ok(GridFormat::Textgrid),
    }
}

fn parse_textgrid(path: &Path, bytes: &[u8]) -> Result<BitGrid> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| Error::parse(path, 1, format!("not valid utf-8: {e}")))?;
    let mut rows: Vec<Vec<u8>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let mut row = Vec::with_capacity(line.len());
        for (off, ch) in line.chars().enumerate() {
            match ch {
                '0' => row.push(0),
                '1' => row.push(1),
                _ => {
                    return Err(Error::parse(
                        path,
                        idx + 1,
                        format!("unexpected character {ch:?} at column {}", off + 1),
                    ))
                }
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::parse(path, 1, "empty textgrid"));
    }
    let width = rows[0].len();
    for (idx, row) in rows.iter().enumerate() {
        if row.len() != width {
            return Err(Error::parse(
                path,
                idx + 1,
                format!("ragged row: {} cells, expected {width}", row.len()),
            ));
        }
    }
    let height = rows.len();
    BitGrid::new(width, height, rows.concat())
}

/// Tokenizer over PBM/PGM/PPM headers: whitespace-separated fields with
/// `#` comments running to end of line.
struct PnmTokens<'a> {
    bytes: &'a [u8],
    pos: usize,
    line: usize,
}

impl<'a> PnmTokens<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        PnmTokens {
            bytes,
            pos: 0,
            line: 1,
        }
    }

    fn skip_space(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'\n' => {
                    self.line += 1;
                    self.pos += 1;
                }
                b' ' | b'\t' | b'\r' => self.pos += 1,
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
    }

    fn token(&mut self, path: &Path, what: &str) -> Result<&'a [u8]> {
        self.skip_space();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::parse(
                path,
                self.line,
                format!("unexpected end of file, expected {what}"),
            ));
        }
        Ok(&self.bytes[start..self.pos])
    }

    fn number(&mut self, path: &Path, what: &str) -> Result<usize> {
        let tok = self.token(path, what)?;
        let line = self.line;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| {
                Error::parse(
                    path,
                    line,
                    format!("invalid {what}: {:?}", String::from_utf8_lossy(tok)),
                )
            })
    }
}

/// Parse the magic/width/height/maxval header of a P5/P6 file; returns
/// (width, height, maxval, offset of the first pixel byte).
pub(crate) fn pnm_header(path: &Path, bytes: &[u8]) -> Result<(usize, usize, usize, usize)> {
    let mut t = PnmTokens::new(bytes);
    let _magic = t.token(path, "magic")?;
    let width = t.number(path, "width")?;
    let height = t.number(path, "height")?;
    let maxval = t.number(path, "maxval")?;
    if t.pos >= bytes.len() || !bytes[t.pos].is_ascii_whitespace() {
        return Err(Error::parse(path, t.line, "missing separator before pixel data"));
    }
    Ok((width, height, maxval, t.pos + 1))
}

fn parse_pbm_ascii(path: &Path, bytes: &[u8]) -> Result<BitGrid> {
    let mut t = PnmTokens::new(bytes);
    let magic = t.token(path, "magic")?;
    if magic != b"P1" {
        return Err(Error::parse(path, 1, "expected magic P1"));
    }
    let width = t.number(path, "width")?;
    let height = t.number(path, "height")?;
    let mut cells = Vec::with_capacity(width * height);
    // P1 allows bits to be packed without separators
    while cells.len() < width * height {
        t.skip_space();
        let line = t.line;
        match bytes.get(t.pos) {
            Some(b'0') => cells.push(0),
            Some(b'1') => cells.push(1),
            Some(&c) => {
                return Err(Error::parse(
                    path,
                    line,
                    format!("unexpected byte {:?} in P1 data", c as char),
                ))
            }
            None => {
                return Err(Error::parse(
                    path,
                    line,
                    format!("truncated P1 data, got {} of {} bits", cells.len(), width * height),
                ))
            }
        }
        t.pos += 1;
    }
    BitGrid::new(width, height, cells)
}

fn parse_pbm_binary(path: &Path, bytes: &[u8]) -> Result<BitGrid> {
    let mut t = PnmTokens::new(bytes);
    let magic = t.token(path, "magic")?;
    if magic != b"P4" {
        return Err(Error::parse(path, 1, "expected magic P4"));
    }
    let width = t.number(path, "width")?;
    let height = t.number(path, "height")?;
    // single whitespace byte separates header from data
    if t.pos >= bytes.len() || !bytes[t.pos].is_ascii_whitespace() {
        return Err(Error::parse(path, t.line, "missing separator before P4 data"));
    }
    t.pos += 1;
    let row_bytes = width.div_ceil(8);
    let data = &bytes[t.pos..];
    if data.len() < row_bytes * height {
        return Err(Error::parse(
            path,
            t.line,
            format!(
                "truncated P4 data: {} bytes, expected {}",
                data.len(),
                row_bytes * height
            ),
        ));
    }
    let mut cells = Vec::with_capacity(width * height);
    for row in 0..height {
        let row_data = &data[row * row_bytes..(row + 1) * row_bytes];
        for col in 0..width {
            let byte = row_data[col / 8];
            cells.push((byte >> (7 - col % 8)) & 1);
        }
    }
    BitGrid::new(width, height, cells)
}

/// Write a grid as PBM, either ascii (`P1`) or packed binary (`P4`).
pub fn save_pbm(grid: &BitGrid, path: &Path, format: GridFormat) -> Result<()> {
    let bytes = match format {
        GridFormat::PbmAscii => {
            let mut out = format!("P1\n{} {}\n", grid.width(), grid.height());
            for row in 0..grid.height() {
                let line: Vec<&str> = (0..grid.width())
                    .map(|c| if grid.get(row, c) == 1 { "1" } else { "0" })
                    .collect();
                out.push_str(&line.join(" "));
                out.push('\n');
            }
            out.into_bytes()
        }
        GridFormat::PbmBinary => {
            let row_bytes = grid.width().div_ceil(8);
            let mut out = format!("P4\n{} {}\n", grid.width(), grid.height()).into_bytes();
            for row in 0..grid.height() {
                let mut packed = vec![0u8; row_bytes];
                for col in 0..grid.width() {
                    if grid.get(row, col) == 1 {
                        packed[col / 8] |= 1 << (7 - col % 8);
                    }
                }
                out.extend_from_slice(&packed);
            }
            out
        }
        GridFormat::Textgrid => grid.to_textgrid().into_bytes(),
    };
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Deterministic canonical bitmap for the named shape.
pub fn make_test_grid(kind: TestShape, size: usize) -> Result<BitGrid> {
    let min = match kind {
        TestShape::Solid | TestShape::Checker => 1,
        TestShape::LTromino => 2,
        TestShape::Plus | TestShape::Ring => 3,
    };
    if size < min {
        return Err(Error::Config(format!(
            "size {size} too small for {kind:?} (minimum {min})"
        )));
    }
    let mut cells = vec![0u8; size * size];
    let mut set = |r: usize, c: usize| cells[r * size + c] = 1;
    match kind {
        TestShape::Solid => cells.fill(1),
        TestShape::Checker => {
            for r in 0..size {
                for c in 0..size {
                    if (r + c) % 2 == 0 {
                        set(r, c);
                    }
                }
            }
        }
        TestShape::Plus => {
            let mid = size / 2;
            for i in 0..size {
                set(mid, i);
                set(i, mid);
            }
        }
        TestShape::LTromino => {
            for r in 0..size {
                set(r, 0);
            }
            for c in 0..size {
                set(size - 1, c);
            }
        }
        TestShape::Ring => {
            for i in 0..size {
                set(0, i);
                set(size - 1, i);
                set(i, 0);
                set(i, size - 1);
            }
        }
    }
    BitGrid::new(size, size, cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_from(text: &str) -> BitGrid {
        parse_textgrid(Path::new("<test>"), text.as_bytes()).unwrap()
    }

    #[test]
    fn textgrid_solid_block() {
        let g = grid_from("11\n11");
        assert_eq!((g.width(), g.height()), (2, 2));
        assert!(g.cells().iter().all(|&c| c == 1));
    }

    #[test]
    fn textgrid_checkerboard() {
        let g = grid_from("10\n01");
        assert_eq!(g.get(0, 0), 1);
        assert_eq!(g.get(0, 1), 0);
        assert_eq!(g.get(1, 0), 0);
        assert_eq!(g.get(1, 1), 1);
    }

    #[test]
    fn textgrid_ragged_rows_rejected() {
        let err = parse_textgrid(Path::new("<test>"), b"10\n011").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn textgrid_bad_character_rejected() {
        let err = parse_textgrid(Path::new("<test>"), b"10\n0x").unwrap_err();
        assert!(err.to_string().contains(":2:"), "{err}");
    }

    #[test]
    fn textgrid_round_trip_is_identity() {
        let g = make_test_grid(TestShape::Ring, 5).unwrap();
        let back = parse_textgrid(Path::new("<test>"), g.to_textgrid().as_bytes()).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn pbm_ascii_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.pbm");
        let g = make_test_grid(TestShape::Plus, 5).unwrap();
        save_pbm(&g, &path, GridFormat::PbmAscii).unwrap();
        let back = load_bitgrid(&path, GridFormat::PbmAscii).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn pbm_binary_round_trip_non_multiple_of_8() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.pbm");
        let g = make_test_grid(TestShape::Checker, 11).unwrap();
        save_pbm(&g, &path, GridFormat::PbmBinary).unwrap();
        let back = load_bitgrid(&path, GridFormat::PbmBinary).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn make_solid_2() {
        let g = make_test_grid(TestShape::Solid, 2).unwrap();
        assert_eq!(g.to_textgrid(), "11\n11\n");
    }

    #[test]
    fn make_plus_3() {
        let g = make_test_grid(TestShape::Plus, 3).unwrap();
        assert_eq!(g.count_of(1), 5);
        assert_eq!(g.get(1, 1), 1);
        assert_eq!(g.get(0, 0), 0);
    }

    #[test]
    fn make_ring_3() {
        let g = make_test_grid(TestShape::Ring, 3).unwrap();
        assert_eq!(g.count_of(1), 8);
        assert_eq!(g.get(1, 1), 0);
    }

    #[test]
    fn shape_too_small_rejected() {
        assert!(make_test_grid(TestShape::Ring, 2).is_err());
        assert!(make_test_grid(TestShape::Plus, 2).is_err());
    }
}
