use serde::{Deserialize, Serialize};

use crate::error::{PyramidError, Result};

/// A wrap-around grid shared by all populations under the distributed
/// strategy. Slot `i` of every population sits on cell `i mod cells`, so
/// populations larger than the grid stack several slots on one cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToroidalGrid {
    rows: usize,
    cols: usize,
}

pub type Cell = (usize, usize);

impl ToroidalGrid {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows < 3 || cols < 3 {
            return Err(PyramidError::Config(format!(
                "toroidal grid {rows}x{cols} is smaller than 3x3"
            )));
        }
        Ok(Self { rows, cols })
    }

    /// The most square grid with exactly `cells` cells.
    pub fn for_size(cells: usize) -> Result<Self> {
        let mut rows = (cells as f64).sqrt() as usize;
        while rows > 1 && !cells.is_multiple_of(rows) {
            rows -= 1;
        }
        if rows == 0 {
            return Err(PyramidError::Config("empty grid".into()));
        }
        Self::new(rows, cells / rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn cells(&self) -> usize {
        self.rows * self.cols
    }

    pub fn cell_of(&self, slot: usize) -> Cell {
        let c = slot % self.cells();
        (c / self.cols, c % self.cols)
    }

    pub fn cell_index(&self, cell: Cell) -> usize {
        cell.0 * self.cols + cell.1
    }

    /// Moore neighbourhood with wraparound.
    pub fn neighbors(&self, (r, c): Cell) -> [Cell; 8] {
        let up = (r + self.rows - 1) % self.rows;
        let down = (r + 1) % self.rows;
        let left = (c + self.cols - 1) % self.cols;
        let right = (c + 1) % self.cols;
        [
            (up, left),
            (up, c),
            (up, right),
            (r, left),
            (r, right),
            (down, left),
            (down, c),
            (down, right),
        ]
    }

    /// Slots of a population of `size` that sit on `cell`.
    pub fn slots_on(&self, cell: Cell, size: usize) -> impl Iterator<Item = usize> {
        let cells = self.cells();
        (self.cell_index(cell)..size).step_by(cells)
    }
}

/// Moore neighbourhood of `cell` on `grid`.
pub fn grid_neighbors(grid: &ToroidalGrid, cell: Cell) -> [Cell; 8] {
    grid.neighbors(cell)
}
