//! Toroidal grids of binary strategies and their neighborhood structures.

use std::fmt;
use std::str::FromStr;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::rng::PortableRng;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("grid must be at least 3x3 on a torus, got {rows}x{cols}")]
    TooSmall { rows: usize, cols: usize },
    #[error("hex6 topology needs an even number of rows, got {rows}")]
    OddHexRows { rows: usize },
    #[error("grid dimensions must be positive, got {rows}x{cols}")]
    Empty { rows: usize, cols: usize },
    #[error("cell ({row}, {col}) outside {rows}x{cols} grid")]
    OutOfBounds {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("expected {expected} cells, got {got}")]
    WrongSize { expected: usize, got: usize },
    #[error("invalid cell symbol {symbol:?} at line {line}")]
    BadSymbol { symbol: char, line: usize },
    #[error("ragged grid text: line {line} has {got} cells, expected {expected}")]
    Ragged {
        line: usize,
        got: usize,
        expected: usize,
    },
    #[error("bernoulli probability {0} outside [0, 1]")]
    BadProbability(f64),
    #[error("unknown topology {0:?}")]
    UnknownTopology(String),
    #[error("grid dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TopologyKind {
    Moore8,
    VonNeumann4,
    Hex6,
}

impl TopologyKind {
    pub const ALL: [TopologyKind; 3] = [Self::Moore8, Self::VonNeumann4, Self::Hex6];

    pub fn token(self) -> &'static str {
        match self {
            Self::Moore8 => "moore8",
            Self::VonNeumann4 => "vonneumann4",
            Self::Hex6 => "hex6",
        }
    }
}

impl fmt::Display for TopologyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for TopologyKind {
    type Err = LatticeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "moore8" => Ok(Self::Moore8),
            "vonneumann4" => Ok(Self::VonNeumann4),
            "hex6" => Ok(Self::Hex6),
            other => Err(LatticeError::UnknownTopology(other.to_string())),
        }
    }
}

/// A `(row, col)` displacement.
pub type Offset = (isize, isize);

const MOORE: [Offset; 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];

const VON_NEUMANN: [Offset; 4] = [(-1, 0), (1, 0), (0, -1), (0, 1)];

// "odd-r" layout: odd rows are shoved half a cell to the right.
const HEX_EVEN_ROW: [Offset; 6] = [(-1, -1), (-1, 0), (0, -1), (0, 1), (1, -1), (1, 0)];
const HEX_ODD_ROW: [Offset; 6] = [(-1, 0), (-1, 1), (0, -1), (0, 1), (1, 0), (1, 1)];

/// Neighborhood structure on a rectangular torus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Topology {
    kind: TopologyKind,
}

impl Topology {
    pub const fn new(kind: TopologyKind) -> Self {
        Self { kind }
    }

    pub const fn moore8() -> Self {
        Self::new(TopologyKind::Moore8)
    }

    pub const fn von_neumann4() -> Self {
        Self::new(TopologyKind::VonNeumann4)
    }

    pub const fn hex6() -> Self {
        Self::new(TopologyKind::Hex6)
    }

    pub fn kind(&self) -> TopologyKind {
        self.kind
    }

    /// Number of neighbors `N` of every cell.
    pub fn neighbor_count(&self) -> usize {
        match self.kind {
            TopologyKind::Moore8 => 8,
            TopologyKind::VonNeumann4 => 4,
            TopologyKind::Hex6 => 6,
        }
    }

    /// Neighbor displacements for a cell in `row`. Only hex6 depends on the row.
    pub fn offsets(&self, row: usize) -> &'static [Offset] {
        match self.kind {
            TopologyKind::Moore8 => &MOORE,
            TopologyKind::VonNeumann4 => &VON_NEUMANN,
            TopologyKind::Hex6 if row.is_multiple_of(2) => &HEX_EVEN_ROW,
            TopologyKind::Hex6 => &HEX_ODD_ROW,
        }
    }

    /// Checks that a `rows`x`cols` torus gives every cell `N` distinct neighbors.
    pub fn check_dims(&self, rows: usize, cols: usize) -> Result<(), LatticeError> {
        if rows < 3 || cols < 3 {
            return Err(LatticeError::TooSmall { rows, cols });
        }
        if self.kind == TopologyKind::Hex6 && !rows.is_multiple_of(2) {
            return Err(LatticeError::OddHexRows { rows });
        }
        Ok(())
    }

    pub fn neighbors(
        &self,
        cell: (usize, usize),
        rows: usize,
        cols: usize,
    ) -> Result<Vec<(usize, usize)>, LatticeError> {
        self.check_dims(rows, cols)?;
        let (row, col) = cell;
        if row >= rows || col >= cols {
            return Err(LatticeError::OutOfBounds {
                row,
                col,
                rows,
                cols,
            });
        }
        Ok(self
            .offsets(row)
            .iter()
            .map(|&(dr, dc)| (wrap(row, dr, rows), wrap(col, dc, cols)))
            .collect())
    }
}

impl From<TopologyKind> for Topology {
    fn from(kind: TopologyKind) -> Self {
        Self::new(kind)
    }
}

#[inline]
pub(crate) fn wrap(i: usize, delta: isize, n: usize) -> usize {
    (i as isize + delta).rem_euclid(n as isize) as usize
}

/// Rectangular grid of strategies (0 or 1), stored row-major.
///
/// Any positive size is representable; the torus constraints are enforced by
/// the operations that need a topology.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Grid {
    rows: usize,
    cols: usize,
    cells: Vec<u8>,
}

impl Grid {
    pub fn filled(rows: usize, cols: usize, strategy: u8) -> Result<Self, LatticeError> {
        Self::from_cells(rows, cols, vec![strategy; rows * cols])
    }

    pub fn from_cells(rows: usize, cols: usize, cells: Vec<u8>) -> Result<Self, LatticeError> {
        if rows == 0 || cols == 0 {
            return Err(LatticeError::Empty { rows, cols });
        }
        if cells.len() != rows * cols {
            return Err(LatticeError::WrongSize {
                expected: rows * cols,
                got: cells.len(),
            });
        }
        if let Some(pos) = cells.iter().position(|&c| c > 1) {
            return Err(LatticeError::BadSymbol {
                symbol: char::from_digit(cells[pos] as u32, 36).unwrap_or('?'),
                line: pos / cols + 1,
            });
        }
        Ok(Self { rows, cols, cells })
    }

    /// Parses the text format: one newline-terminated line of `0`/`1` per row.
    pub fn parse(text: &str) -> Result<Self, LatticeError> {
        let mut cells = Vec::new();
        let mut cols = None;
        let mut rows = 0;
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let width = line.chars().count();
            match cols {
                None => cols = Some(width),
                Some(expected) if expected != width => {
                    return Err(LatticeError::Ragged {
                        line: line_no,
                        got: width,
                        expected,
                    })
                }
                _ => {}
            }
            for symbol in line.chars() {
                match symbol {
                    '0' => cells.push(0),
                    '1' => cells.push(1),
                    _ => {
                        return Err(LatticeError::BadSymbol {
                            symbol,
                            line: line_no,
                        })
                    }
                }
            }
            rows += 1;
        }
        Self::from_cells(rows, cols.unwrap_or(0), cells)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.rows * (self.cols + 1));
        for row in self.cells.chunks(self.cols) {
            out.extend(row.iter().map(|&c| if c == 1 { '1' } else { '0' }));
            out.push('\n');
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.cells[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[u8] {
        &self.cells[row * self.cols..(row + 1) * self.cols]
    }

    pub fn set(&mut self, row: usize, col: usize, strategy: u8) {
        assert!(strategy <= 1, "strategy must be 0 or 1");
        self.cells[row * self.cols + col] = strategy;
    }

    pub fn ones(&self) -> usize {
        self.cells.iter().filter(|&&c| c == 1).count()
    }

    /// `Some(s)` when every cell plays `s`.
    pub fn uniform_strategy(&self) -> Option<u8> {
        let first = self.cells[0];
        self.cells.iter().all(|&c| c == first).then_some(first)
    }

    /// Every strategy flipped.
    pub fn complement(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            cells: self.cells.iter().map(|&c| 1 - c).collect(),
        }
    }

    /// Cyclic translation: the cell at `(r, c)` moves to `(r + dr, c + dc)`.
    pub fn shifted(&self, dr: isize, dc: isize) -> Self {
        let mut cells = vec![0; self.cells.len()];
        for r in 0..self.rows {
            let nr = wrap(r, dr, self.rows);
            for c in 0..self.cols {
                cells[nr * self.cols + wrap(c, dc, self.cols)] = self.get(r, c);
            }
        }
        Self {
            rows: self.rows,
            cols: self.cols,
            cells,
        }
    }

    /// Row-major bit packing, most significant bit first, last byte zero padded.
    pub fn packed_bits(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.cells.len().div_ceil(8)];
        for (i, &c) in self.cells.iter().enumerate() {
            if c == 1 {
                out[i / 8] |= 0x80 >> (i % 8);
            }
        }
        out
    }

    /// SHA-256 over `rows` and `cols` (u32 little endian) followed by [`Grid::packed_bits`].
    pub fn digest(&self) -> [u8; 32] {
        let mut hasher = Sha256::new();
        hasher.update((self.rows as u32).to_le_bytes());
        hasher.update((self.cols as u32).to_le_bytes());
        hasher.update(self.packed_bits());
        hasher.finalize().into()
    }

    pub fn digest_hex(&self) -> String {
        hex_string(&self.digest())
    }

    /// First eight digest bytes as a little-endian integer.
    pub fn digest64(&self) -> u64 {
        let d = self.digest();
        u64::from_le_bytes(d[..8].try_into().expect("digest has 32 bytes"))
    }

    pub fn count_type1_neighbors(&self, topology: &Topology, row: usize, col: usize) -> usize {
        topology
            .offsets(row)
            .iter()
            .map(|&(dr, dc)| self.get(wrap(row, dr, self.rows), wrap(col, dc, self.cols)) as usize)
            .sum()
    }

    /// Count of type-1 neighbors for every cell, row-major.
    pub fn count_field(&self, topology: &Topology) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.cells.len());
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.push(self.count_type1_neighbors(topology, r, c));
            }
        }
        out
    }

    pub fn same_dims(&self, other: &Grid) -> Result<(), LatticeError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LatticeError::DimensionMismatch(
                self.rows, self.cols, other.rows, other.cols,
            ));
        }
        Ok(())
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Grid {}x{}", self.rows, self.cols)?;
        f.write_str(&self.to_text())
    }
}

pub(crate) fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn neighbors(
    topology: &Topology,
    cell: (usize, usize),
    rows: usize,
    cols: usize,
) -> Result<Vec<(usize, usize)>, LatticeError> {
    topology.neighbors(cell, rows, cols)
}

/// Number of type-1 neighbors of `cell`, excluding the cell itself.
pub fn count_type1_neighbors(
    grid: &Grid,
    topology: &Topology,
    cell: (usize, usize),
) -> Result<usize, LatticeError> {
    topology.check_dims(grid.rows, grid.cols)?;
    if cell.0 >= grid.rows || cell.1 >= grid.cols {
        return Err(LatticeError::OutOfBounds {
            row: cell.0,
            col: cell.1,
            rows: grid.rows,
            cols: grid.cols,
        });
    }
    Ok(grid.count_type1_neighbors(topology, cell.0, cell.1))
}

/// How the initial grid is filled.
#[derive(Clone, Debug, PartialEq)]
pub enum Init {
    Uniform(u8),
    /// Each cell, in row-major order, is 1 iff `rng.unit() < p`.
    Bernoulli(f64),
    Explicit(Grid),
    /// `s` at `(rows / 2, cols / 2)`, the opposite strategy everywhere else.
    Center(u8),
}

pub fn make_grid(
    rows: usize,
    cols: usize,
    init: &Init,
    seed: u64,
    topology: &Topology,
) -> Result<Grid, LatticeError> {
    topology.check_dims(rows, cols)?;
    match init {
        Init::Uniform(s) => Grid::filled(rows, cols, *s),
        Init::Bernoulli(p) => {
            if !(0.0..=1.0).contains(p) {
                return Err(LatticeError::BadProbability(*p));
            }
            let mut rng = PortableRng::new(seed);
            let cells = (0..rows * cols)
                .map(|_| u8::from(rng.unit() < *p))
                .collect();
            Grid::from_cells(rows, cols, cells)
        }
        Init::Explicit(grid) => {
            if grid.rows != rows || grid.cols != cols {
                return Err(LatticeError::WrongSize {
                    expected: rows * cols,
                    got: grid.cells.len(),
                });
            }
            Ok(grid.clone())
        }
        Init::Center(s) => {
            if *s > 1 {
                return Grid::filled(rows, cols, *s);
            }
            let mut grid = Grid::filled(rows, cols, 1 - s)?;
            grid.set(rows / 2, cols / 2, *s);
            Ok(grid)
        }
    }
}
