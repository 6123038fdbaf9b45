//! Uniform cell-centered grid on [-x_max, +x_max] and field snapshots.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Uniform symmetric grid. Cell centers are mirrored around x = 0 so the
/// symmetry `centers[i] == -centers[n-1-i]` holds exactly in floating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    x_max: f64,
    n_cells: usize,
    dx: f64,
    cell_centers: Vec<f64>,
}

impl Grid {
    pub fn new(x_max: f64, n_cells: usize) -> Result<Self> {
        if !(x_max > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "x_max must be positive, got {x_max}"
            )));
        }
        if n_cells < 16 {
            return Err(Error::InvalidParameter(format!(
                "n_cells must be at least 16, got {n_cells}"
            )));
        }
        let dx = 2.0 * x_max / n_cells as f64;
        let mut cell_centers = vec![0.0; n_cells];
        for i in 0..n_cells / 2 {
            let x = -x_max + (i as f64 + 0.5) * dx;
            cell_centers[i] = x;
            cell_centers[n_cells - 1 - i] = -x;
        }
        // Odd cell count: the middle cell sits exactly at the origin.
        if n_cells % 2 == 1 {
            cell_centers[n_cells / 2] = 0.0;
        }
        Ok(Self {
            x_max,
            n_cells,
            dx,
            cell_centers,
        })
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn cell_centers(&self) -> &[f64] {
        &self.cell_centers
    }
}

/// Field values at one instant, one value per cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    pub values: Vec<f64>,
}

impl Snapshot {
    pub fn new(t: f64, values: Vec<f64>) -> Self {
        Self { t, values }
    }

    /// Discrete mass: midpoint rule, the quadrature the conservative scheme
    /// preserves exactly.
    pub fn mass(&self, grid: &Grid) -> f64 {
        self.values.iter().sum::<f64>() * grid.dx()
    }
}
