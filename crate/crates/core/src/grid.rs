//! Finite cell partitions of the habitat domain with midpoint quadrature.
//!
//! Integrals over the habitat are evaluated as weighted sums over cell
//! centers, so every operator downstream becomes a dense matrix acting on
//! per-cell vectors. Summation order is ascending cell index throughout,
//! which keeps results bit-reproducible.

use crate::error::{Error, Result};

/// One quadrature cell: its center and extent along each active axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub center: [f64; 2],
    pub extent: [f64; 2],
}

/// A uniform partition of a bounded interval or box with midpoint weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    cells: Vec<Cell>,
    weights: Vec<f64>,
    dim: usize,
    total_volume: f64,
}

impl Grid {
    /// Uniform partition of `[lo, hi]` into `n` cells with midpoint centers.
    pub fn uniform_1d(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroCells(n));
        }
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::DegenerateBounds { lo, hi });
        }
        let dx = (hi - lo) / n as f64;
        let cells: Vec<Cell> = (0..n)
            .map(|i| Cell {
                center: [lo + (i as f64 + 0.5) * dx, 0.0],
                extent: [dx, 0.0],
            })
            .collect();
        let weights = vec![dx; n];
        let total_volume = weights.iter().sum();
        Ok(Grid {
            cells,
            weights,
            dim: 1,
            total_volume,
        })
    }

    /// Uniform partition of the box `[x_lo, x_hi] x [y_lo, y_hi]` with
    /// `nx * ny` cells, ordered row-major in y then x.
    pub fn uniform_2d(x: [f64; 2], y: [f64; 2], nx: usize, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::ZeroCells(nx.min(ny)));
        }
        for &[lo, hi] in &[x, y] {
            if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::DegenerateBounds { lo, hi });
            }
        }
        let dx = (x[1] - x[0]) / nx as f64;
        let dy = (y[1] - y[0]) / ny as f64;
        let mut cells = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                cells.push(Cell {
                    center: [x[0] + (i as f64 + 0.5) * dx, y[0] + (j as f64 + 0.5) * dy],
                    extent: [dx, dy],
                });
            }
        }
        let weights = vec![dx * dy; nx * ny];
        let total_volume = weights.iter().sum();
        Ok(Grid {
            cells,
            weights,
            dim: 2,
            total_volume,
        })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `|Omega|`, the sum of all quadrature weights.
    pub fn total_volume(&self) -> f64 {
        self.total_volume
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn center(&self, idx: usize) -> [f64; 2] {
        self.cells[idx].center
    }

    /// Discrete integral: sum of `weight[j] * field[j]` in ascending index order.
    pub fn integrate(&self, field: &[f64]) -> Result<f64> {
        if field.len() != self.cells.len() {
            return Err(Error::LengthMismatch {
                expected: self.cells.len(),
                got: field.len(),
            });
        }
        Ok(self
            .weights
            .iter()
            .zip(field)
            .map(|(w, f)| w * f)
            .sum())
    }

    /// Samples a function of the cell center into a per-cell vector.
    pub fn sample(&self, f: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
        self.cells.iter().map(|c| f(c.center)).collect()
    }

    /// Builds a sub-grid restricted to the given cell indices, keeping the
    /// original cell geometry and weights.
    pub fn restrict(&self, indices: &[usize]) -> Grid {
        let cells: Vec<Cell> = indices.iter().map(|&i| self.cells[i]).collect();
        let weights: Vec<f64> = indices.iter().map(|&i| self.weights[i]).collect();
        let total_volume = weights.iter().sum();
        Grid {
            cells,
            weights,
            dim: self.dim,
            total_volume,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn uniform_1d_unit_interval() {
        let g = Grid::uniform_1d(0.0, 1.0, 4).unwrap();
        let centers: Vec<f64> = g.cells().iter().map(|c| c.center[0]).collect();
        assert_eq!(centers, vec![0.125, 0.375, 0.625, 0.875]);
        assert!(g.weights().iter().all(|&w| w == 0.25));
        assert_relative_eq!(g.total_volume(), 1.0);
    }

    #[test]
    fn single_cell_grid() {
        let g = Grid::uniform_1d(0.0, 2.0, 1).unwrap();
        assert_eq!(g.len(), 1);
        assert_relative_eq!(g.weights()[0], 2.0);
    }

    #[test]
    fn uniform_2d_product_partition() {
        let g = Grid::uniform_2d([0.0, 1.0], [0.0, 1.0], 3, 3).unwrap();
        assert_eq!(g.len(), 9);
        for &w in g.weights() {
            assert_relative_eq!(w, 1.0 / 9.0);
        }
        assert_relative_eq!(g.total_volume(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn rejects_bad_bounds_and_zero_cells() {
        assert!(matches!(
            Grid::uniform_1d(0.0, 1.0, 0),
            Err(Error::ZeroCells(0))
        ));
        assert!(matches!(
            Grid::uniform_1d(1.0, 1.0, 4),
            Err(Error::DegenerateBounds { .. })
        ));
        assert!(Grid::uniform_2d([0.0, 0.0], [0.0, 1.0], 2, 2).is_err());
    }

    #[test]
    fn integrate_constant_equals_volume() {
        let g = Grid::uniform_1d(0.0, 1.0, 8).unwrap();
        let ones = vec![1.0; 8];
        assert_relative_eq!(g.integrate(&ones).unwrap(), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn midpoint_exact_for_linear() {
        for n in [1, 3, 7, 64] {
            let g = Grid::uniform_1d(0.0, 1.0, n).unwrap();
            let f = g.sample(|p| p[0]);
            assert_relative_eq!(g.integrate(&f).unwrap(), 0.5, max_relative = 1e-14);
        }
    }

    #[test]
    fn quadratic_integral_converges() {
        let g = Grid::uniform_1d(0.0, 1.0, 64).unwrap();
        let f = g.sample(|p| p[0] * p[0]);
        let got = g.integrate(&f).unwrap();
        assert!((got - 1.0 / 3.0).abs() < 1e-4, "got {got}");
    }

    #[test]
    fn midpoint_second_order_refinement() {
        // error for x^2 on [0,1] shrinks by ~4x per halving of cell size
        let err = |n: usize| {
            let g = Grid::uniform_1d(0.0, 1.0, n).unwrap();
            let f = g.sample(|p| p[0] * p[0]);
            (g.integrate(&f).unwrap() - 1.0 / 3.0).abs()
        };
        let (e1, e2) = (err(16), err(32));
        let ratio = e1 / e2;
        assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
    }

    #[test]
    fn integrate_is_linear() {
        let g = Grid::uniform_1d(-1.0, 2.0, 17).unwrap();
        let f = g.sample(|p| p[0].sin());
        let h = g.sample(|p| p[0].cos() + 1.0);
        let combo: Vec<f64> = f.iter().zip(&h).map(|(a, b)| 2.5 * a - 0.75 * b).collect();
        let lhs = g.integrate(&combo).unwrap();
        let rhs = 2.5 * g.integrate(&f).unwrap() - 0.75 * g.integrate(&h).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-13);
    }

    #[test]
    fn integrate_length_mismatch() {
        let g = Grid::uniform_1d(0.0, 1.0, 4).unwrap();
        assert!(matches!(
            g.integrate(&[1.0, 2.0]),
            Err(Error::LengthMismatch { expected: 4, got: 2 })
        ));
    }

    #[test]
    fn restrict_keeps_weights() {
        let g = Grid::uniform_1d(0.0, 1.0, 8).unwrap();
        let sub = g.restrict(&[0, 3, 5]);
        assert_eq!(sub.len(), 3);
        assert_relative_eq!(sub.total_volume(), 3.0 / 8.0, max_relative = 1e-14);
        assert_eq!(sub.center(1)[0], g.center(3)[0]);
    }
}
