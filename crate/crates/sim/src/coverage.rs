//! Arena coverage bookkeeping on a 0.2 m x 0.2 m grid.

use airprox_core::geometry::PlanarVec;

/// Grid cell edge length, m.
pub const CELL_SIZE: f64 = 0.2;

/// Tracks which grid cells any agent has entered. The arena is centered on
/// the origin; positions outside it are clamped to the border cells.
#[derive(Clone, Debug)]
pub struct CoverageGrid {
    cells_per_axis: usize,
    visited: Vec<bool>,
}

impl CoverageGrid {
    pub fn new(arena_side: f64) -> Self {
        let cells_per_axis = (arena_side / CELL_SIZE).ceil().max(1.0) as usize;
        Self {
            cells_per_axis,
            visited: vec![false; cells_per_axis * cells_per_axis],
        }
    }

    pub fn mark(&mut self, pos: PlanarVec, arena_side: f64) {
        let half = arena_side / 2.0;
        let n = self.cells_per_axis;
        let ix = (((pos.x + half) / CELL_SIZE).floor() as isize).clamp(0, n as isize - 1) as usize;
        let iy = (((pos.y + half) / CELL_SIZE).floor() as isize).clamp(0, n as isize - 1) as usize;
        self.visited[iy * n + ix] = true;
    }

    pub fn visited_cells(&self) -> usize {
        self.visited.iter().filter(|v| **v).count()
    }

    pub fn total_cells(&self) -> usize {
        self.visited.len()
    }

    /// Percentage of cells entered by any agent.
    pub fn percent(&self) -> f64 {
        100.0 * self.visited_cells() as f64 / self.total_cells() as f64
    }
}

/// Coverage of a set of trajectories (position sequences) over an arena.
pub fn area_coverage(trajectories: &[Vec<PlanarVec>], arena_side: f64) -> f64 {
    let mut grid = CoverageGrid::new(arena_side);
    for traj in trajectories {
        for &pos in traj {
            grid.mark(pos, arena_side);
        }
    }
    grid.percent()
}
