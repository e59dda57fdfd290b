//! Toroidal grid coordinates, Moore neighbourhoods and the normalised
//! wrap-around Manhattan distance.
//!
//! Rows and columns are 1-based at every public boundary; cells are stored
//! internally as a 0-based linear index.

use std::fmt;

use crate::error::{Error, Result};

/// Row/column offsets of the eight Moore neighbours.
const MOORE_OFFSETS: [(isize, isize); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];

/// A square `n × n` grid with opposite edges identified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TorusGrid {
    n: usize,
}

/// A cell of a [`TorusGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellRef {
    index: u32,
}

impl CellRef {
    pub(crate) fn from_index(index: usize) -> Self {
        CellRef {
            index: index as u32,
        }
    }

    /// 0-based linear index, `id - 1`.
    pub(crate) fn index(self) -> usize {
        self.index as usize
    }

    /// Linear id `(row - 1) * n + col`, in `1..=n²`.
    pub fn id(self) -> usize {
        self.index as usize + 1
    }
}

impl fmt::Display for CellRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.id())
    }
}

impl TorusGrid {
    /// Smallest side length for which the Moore neighbourhood has 8 distinct cells.
    pub const MIN_SIDE: usize = 3;

    pub fn new(n: usize) -> Result<Self> {
        if n < Self::MIN_SIDE {
            return Err(Error::domain(format!(
                "grid side must be at least {}, got {n}",
                Self::MIN_SIDE
            )));
        }
        if n > u16::MAX as usize {
            return Err(Error::domain(format!("grid side {n} is too large")));
        }
        Ok(TorusGrid { n })
    }

    pub fn side(&self) -> usize {
        self.n
    }

    pub fn num_cells(&self) -> usize {
        self.n * self.n
    }

    /// The cell at 1-based `(row, col)`.
    pub fn cell(&self, row: usize, col: usize) -> Result<CellRef> {
        if !(1..=self.n).contains(&row) || !(1..=self.n).contains(&col) {
            return Err(Error::domain(format!(
                "cell ({row}, {col}) is outside the {n}x{n} grid",
                n = self.n
            )));
        }
        Ok(CellRef::from_index((row - 1) * self.n + (col - 1)))
    }

    /// The cell with linear id `id` in `1..=n²`.
    pub fn cell_from_id(&self, id: usize) -> Result<CellRef> {
        if !(1..=self.num_cells()).contains(&id) {
            return Err(Error::domain(format!(
                "cell id {id} is outside 1..={}",
                self.num_cells()
            )));
        }
        Ok(CellRef::from_index(id - 1))
    }

    /// 1-based row of `cell`.
    pub fn row(&self, cell: CellRef) -> usize {
        cell.index() / self.n + 1
    }

    /// 1-based column of `cell`.
    pub fn col(&self, cell: CellRef) -> usize {
        cell.index() % self.n + 1
    }

    pub fn contains(&self, cell: CellRef) -> bool {
        cell.index() < self.num_cells()
    }

    /// All cells in id order.
    pub fn cells(&self) -> impl Iterator<Item = CellRef> {
        (0..self.num_cells()).map(CellRef::from_index)
    }

    /// The eight Moore neighbours of `cell`, wrapped around the torus.
    pub fn moore_neighborhood(&self, cell: CellRef) -> [CellRef; 8] {
        let n = self.n as isize;
        let r = (cell.index() / self.n) as isize;
        let c = (cell.index() % self.n) as isize;
        MOORE_OFFSETS.map(|(dr, dc)| {
            let rr = (r + dr).rem_euclid(n);
            let cc = (c + dc).rem_euclid(n);
            CellRef::from_index((rr * n + cc) as usize)
        })
    }

    pub fn are_adjacent(&self, a: CellRef, b: CellRef) -> bool {
        let (dr, dc) = self.axis_steps(a, b);
        a != b && dr <= 1 && dc <= 1
    }

    /// Per-axis wrapped distances `(δ_row, δ_col)`, each `min(|u-w|, n-|u-w|)`.
    pub fn axis_steps(&self, a: CellRef, b: CellRef) -> (usize, usize) {
        let wrap = |u: usize, w: usize| {
            let d = u.abs_diff(w);
            d.min(self.n - d)
        };
        (
            wrap(a.index() / self.n, b.index() / self.n),
            wrap(a.index() % self.n, b.index() % self.n),
        )
    }

    /// Wrapped Manhattan distance in lattice steps.
    pub fn torus_steps(&self, a: CellRef, b: CellRef) -> usize {
        let (dr, dc) = self.axis_steps(a, b);
        dr + dc
    }

    /// The largest value [`Self::torus_steps`] can take: `n` for even sides,
    /// `n - 1` for odd ones.
    pub fn distance_norm(&self) -> usize {
        if self.n.is_multiple_of(2) {
            self.n
        } else {
            self.n - 1
        }
    }

    /// Normalised wrapped Manhattan distance in `[0, 1]`.
    pub fn torus_distance(&self, a: CellRef, b: CellRef) -> f64 {
        self.torus_steps(a, b) as f64 / self.distance_norm() as f64
    }

    /// Translate `cell` by `(dr, dc)` with wrap-around.
    pub fn translate(&self, cell: CellRef, dr: isize, dc: isize) -> CellRef {
        let n = self.n as isize;
        let r = (cell.index() / self.n) as isize;
        let c = (cell.index() % self.n) as isize;
        CellRef::from_index(((r + dr).rem_euclid(n) * n + (c + dc).rem_euclid(n)) as usize)
    }
}
