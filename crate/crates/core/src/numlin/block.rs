use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::QMatrix;

/// A grid of optional blocks over fixed row bands and column bands.
/// Absent cells are zero.
#[derive(Clone, Debug)]
pub struct BlockGrid {
    heights: Vec<usize>,
    widths: Vec<usize>,
    cells: Vec<Option<QMatrix>>,
}

impl BlockGrid {
    pub fn new(heights: Vec<usize>, widths: Vec<usize>) -> Self {
        let cells = vec![None; heights.len() * widths.len()];
        Self { heights, widths, cells }
    }

    pub fn band_rows(&self) -> usize {
        self.heights.len()
    }

    pub fn band_cols(&self) -> usize {
        self.widths.len()
    }

    /// Places `block` in cell `(r, c)`, replacing any previous occupant.
    pub fn set(&mut self, r: usize, c: usize, block: QMatrix) -> &mut Self {
        assert!(
            r < self.heights.len() && c < self.widths.len(),
            "block cell ({r}, {c}) outside grid"
        );
        let idx = r * self.widths.len() + c;
        self.cells[idx] = Some(block);
        self
    }

    pub fn assemble(&self) -> Result<QMatrix> {
        let total_rows: usize = self.heights.iter().sum();
        let total_cols: usize = self.widths.iter().sum();
        let mut out = QMatrix::zeros(total_rows, total_cols);
        let mut r0 = 0;
        for (r, &h) in self.heights.iter().enumerate() {
            let mut c0 = 0;
            for (c, &w) in self.widths.iter().enumerate() {
                if let Some(block) = &self.cells[r * self.widths.len() + c] {
                    if block.shape() != (h, w) {
                        return Err(Error::Dim(format!(
                            "block ({r}, {c}) is {}x{}, band requires {h}x{w}",
                            block.rows(),
                            block.cols()
                        )));
                    }
                    out.set_block(r0, c0, block);
                }
                c0 += w;
            }
            r0 += h;
        }
        Ok(out)
    }
}

/// Assembles a dense matrix from rows of optional blocks.
pub fn block_matrix(heights: &[usize], widths: &[usize], cells: &[Vec<Option<QMatrix>>]) -> Result<QMatrix> {
    if cells.len() != heights.len() || cells.iter().any(|row| row.len() != widths.len()) {
        return Err(Error::Dim(format!(
            "grid layout does not match {} row bands x {} column bands",
            heights.len(),
            widths.len()
        )));
    }
    let mut grid = BlockGrid::new(heights.to_vec(), widths.to_vec());
    for (r, row) in cells.iter().enumerate() {
        for (c, cell) in row.iter().enumerate() {
            if let Some(m) = cell {
                grid.set(r, c, m.clone());
            }
        }
    }
    grid.assemble()
}
