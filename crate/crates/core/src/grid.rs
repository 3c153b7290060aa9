//! Uniform one-dimensional grids.

use crate::error::{PolarError, Result};

/// Uniform 1D spatial grid with at least three nodes.
///
/// The spacing is derived: `dx = (x_max - x_min) / (n - 1)`, so node `i`
/// sits at `x_min + i * dx` and node `n - 1` sits exactly at `x_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n: usize,
    dx: f64,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) {
            return Err(PolarError::InvalidGrid("bounds must be finite".into()));
        }
        if n < 3 {
            return Err(PolarError::InvalidGrid(format!(
                "need at least 3 nodes, got {n}"
            )));
        }
        let dx = (x_max - x_min) / (n as f64 - 1.0);
        if !(dx > 0.0) {
            return Err(PolarError::InvalidGrid(format!(
                "spacing must be positive, got {dx}"
            )));
        }
        Ok(Self { x_min, x_max, n, dx })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false // invariant: n >= 3
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Grid whose `n` nodes tile a periodic domain of length `period`:
    /// `dx = period / n`, so the node after the last wraps to the first.
    /// Used by the periodic-boundary solvers.
    pub fn periodic(x_min: f64, period: f64, n: usize) -> Result<Self> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(PolarError::InvalidGrid(format!(
                "period must be positive, got {period}"
            )));
        }
        if n < 3 {
            return Err(PolarError::InvalidGrid(format!(
                "need at least 3 nodes, got {n}"
            )));
        }
        let dx = period / n as f64;
        Self::new(x_min, x_min + dx * (n as f64 - 1.0), n)
    }

    /// Coordinate of node `i`.
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    /// All node coordinates, left to right.
    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Grid keeping every other node (spacing doubled).
    ///
    /// Only defined when the node count is odd, so that both endpoints
    /// survive the coarsening. Used by refinement-order estimates.
    pub fn coarsen(&self) -> Option<Grid1D> {
        if self.n % 2 == 1 && self.n >= 5 {
            Some(Grid1D {
                x_min: self.x_min,
                x_max: self.x_max,
                n: self.n.div_ceil(2),
                dx: 2.0 * self.dx,
            })
        } else {
            None
        }
    }
}
