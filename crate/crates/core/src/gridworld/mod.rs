//! Occupancy-grid world model.

mod collision;
mod corners;
mod generate;
mod inflate;
pub mod pnm;

pub use collision::{point_free, segment_collision_free};
pub use corners::extract_convex_corners;
pub use generate::{
    generate_map, generate_map_with, is_convex_polygon, random_query, Difficulty, MapGenConfig,
    MAX_GENERATION_ATTEMPTS,
};
pub use inflate::inflate;
pub use pnm::{load_map, load_mask, load_mask_for, save_map, save_mask};

use serde::{Deserialize, Serialize};

use crate::geometry::Point;

/// Safety margin, in cells, applied to maps before planning.
pub const DEFAULT_SAFETY_MARGIN: f64 = 2.0;

/// Binary occupancy grid with a start/goal query.
///
/// Occupancy is row-major; `true` marks an occupied cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMap {
    pub width: usize,
    pub height: usize,
    pub occupancy: Vec<bool>,
    pub start: Point,
    pub goal: Point,
}

impl GridMap {
    /// An all-free grid with start and goal at the centre of cell (0, 0).
    pub fn new(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0, "grid dimensions must be positive");
        Self {
            width,
            height,
            occupancy: vec![false; width * height],
            start: Point::cell_center(0, 0),
            goal: Point::cell_center(0, 0),
        }
    }

    pub fn with_query(mut self, start: Point, goal: Point) -> Self {
        self.start = start;
        self.goal = goal;
        self
    }

    #[inline]
    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.width + col
    }

    #[inline]
    pub fn in_bounds(&self, row: isize, col: isize) -> bool {
        row >= 0 && col >= 0 && (row as usize) < self.height && (col as usize) < self.width
    }

    #[inline]
    pub fn is_occupied(&self, row: usize, col: usize) -> bool {
        self.occupancy[self.index(row, col)]
    }

    pub fn set_occupied(&mut self, row: usize, col: usize, occupied: bool) {
        let i = self.index(row, col);
        self.occupancy[i] = occupied;
    }

    /// Occupancy of the cell containing `p`; points outside the grid count
    /// as occupied.
    pub fn occupied_at(&self, p: Point) -> bool {
        match p.cell() {
            Some((r, c)) if r < self.height && c < self.width => self.is_occupied(r, c),
            _ => true,
        }
    }

    pub fn contains_point(&self, p: Point) -> bool {
        p.x >= 0.0 && p.y >= 0.0 && p.x <= self.width as f64 && p.y <= self.height as f64
    }

    /// Free cells in row-major order.
    pub fn free_cells(&self) -> Vec<(usize, usize)> {
        (0..self.height)
            .flat_map(|r| (0..self.width).map(move |c| (r, c)))
            .filter(|&(r, c)| !self.is_occupied(r, c))
            .collect()
    }

    pub fn occupied_count(&self) -> usize {
        self.occupancy.iter().filter(|&&o| o).count()
    }

    pub fn occupied_fraction(&self) -> f64 {
        self.occupied_count() as f64 / (self.width * self.height) as f64
    }

    pub fn start_cell(&self) -> Option<(usize, usize)> {
        self.start.cell().filter(|&(r, c)| r < self.height && c < self.width)
    }

    pub fn goal_cell(&self) -> Option<(usize, usize)> {
        self.goal.cell().filter(|&(r, c)| r < self.height && c < self.width)
    }

    /// True when both query endpoints lie on free cells of this map.
    pub fn query_is_free(&self) -> bool {
        !self.occupied_at(self.start) && !self.occupied_at(self.goal)
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }
}

/// Integer cells satisfying the convex-corner rule, kept sorted in
/// row-major order without duplicates.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CornerSet {
    cells: Vec<(usize, usize)>,
}

impl CornerSet {
    pub fn from_cells(mut cells: Vec<(usize, usize)>) -> Self {
        cells.sort_unstable();
        cells.dedup();
        Self { cells }
    }

    pub fn cells(&self) -> &[(usize, usize)] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, cell: (usize, usize)) -> bool {
        self.cells.binary_search(&cell).is_ok()
    }

    /// Cell centres, in row-major order.
    pub fn points(&self) -> Vec<Point> {
        self.cells.iter().map(|&(r, c)| Point::cell_center(r, c)).collect()
    }

    pub fn difference(&self, other: &CornerSet) -> CornerSet {
        CornerSet {
            cells: self
                .cells
                .iter()
                .copied()
                .filter(|&c| !other.contains(c))
                .collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.cells.iter().copied()
    }
}
