//! Discretized migration kernels: emigration/immigration rates, balance
//! classification and ergodicity (support-graph) analysis.
//!
//! The kernel matrix is indexed `v[(i, j)]` = rate density from departure
//! cell `j` to arrival cell `i`. Emigration and immigration rates are always
//! derived from the discrete sums, never sampled from a closed form, so the
//! discrete generator has exactly-zero weighted column sums and mass
//! conservation holds to round-off rather than to quadrature error.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::scc::{condensation_edges, strongly_connected_components};

/// A migration kernel sampled on a grid, with derived rate vectors.
#[derive(Debug, Clone)]
pub struct KernelData {
    grid: Arc<Grid>,
    v: DMatrix<f64>,
    v_e: DVector<f64>,
    v_i: DVector<f64>,
    support_eps: f64,
}

/// Balance classification of a kernel (symmetric implies balanced).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BalanceClass {
    Symmetric,
    Balanced,
    Unbalanced,
}

/// Balance classification plus the rate deviation `max_j |v_i[j] - v_e[j]|`.
#[derive(Debug, Clone, Copy)]
pub struct BalanceReport {
    pub class: BalanceClass,
    pub deviation: f64,
}

/// Structure of the kernel support digraph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelClass {
    /// Every entry positive.
    CompletelyErgodic,
    /// One strongly connected component, but some zero entries.
    Ergodic,
    /// Multiple components with no migration between them.
    Separable,
    /// Two components with migration in one direction only.
    OneWay,
    /// Any other reducible structure.
    Other,
}

impl KernelClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            KernelClass::CompletelyErgodic => "completely_ergodic",
            KernelClass::Ergodic => "ergodic",
            KernelClass::Separable => "separable",
            KernelClass::OneWay => "one_way",
            KernelClass::Other => "other",
        }
    }
}

/// Connectivity report for a kernel: components of the support digraph,
/// condensation edges, and the derived classification.
#[derive(Debug, Clone)]
pub struct ErgodicityReport {
    pub is_ergodic: bool,
    /// Cell-index partition, sorted by smallest member.
    pub components: Vec<Vec<usize>>,
    /// Condensation DAG edges `(from_component, to_component)`.
    pub reachability: Vec<(usize, usize)>,
    pub classification: KernelClass,
}

/// Piecewise semi-constant kernel description: `v(x, y) = rates[k](x)` for
/// departure cells `y` in block `k`.
#[derive(Debug, Clone)]
pub struct PiecewiseKernel {
    /// Block index per departure cell.
    pub block_of: Vec<usize>,
    /// `rates[k][i]`: arrival-cell rate function of block `k`.
    pub rates: Vec<Vec<f64>>,
}

impl KernelData {
    /// Samples `v(x, y)` at all cell-center pairs. `x` is the arrival point,
    /// `y` the departure point.
    pub fn from_fn(
        grid: Grid,
        support_eps: f64,
        v: impl Fn([f64; 2], [f64; 2]) -> f64,
    ) -> Result<Self> {
        let n = grid.len();
        let m = DMatrix::from_fn(n, n, |i, j| v(grid.center(i), grid.center(j)));
        Self::from_matrix(grid, m, support_eps)
    }

    /// Wraps an explicit rate matrix (row = arrival, column = departure).
    pub fn from_matrix(grid: Grid, v: DMatrix<f64>, support_eps: f64) -> Result<Self> {
        let n = grid.len();
        if v.nrows() != n || v.ncols() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: v.nrows().max(v.ncols()),
            });
        }
        for j in 0..n {
            for i in 0..n {
                let x = v[(i, j)];
                if !x.is_finite() {
                    return Err(Error::NonFiniteEntry { row: i, col: j });
                }
                if x < 0.0 {
                    return Err(Error::NegativeEntry {
                        row: i,
                        col: j,
                        value: x,
                    });
                }
            }
        }
        let w = grid.weights();
        let v_e = DVector::from_fn(n, |j, _| (0..n).map(|i| w[i] * v[(i, j)]).sum());
        let v_i = DVector::from_fn(n, |i, _| (0..n).map(|j| w[j] * v[(i, j)]).sum());
        Ok(KernelData {
            grid: Arc::new(grid),
            v,
            v_e,
            v_i,
            support_eps,
        })
    }

    /// Homogeneous kernel `v = c`.
    pub fn constant(grid: Grid, c: f64) -> Result<Self> {
        Self::from_fn(grid, 0.0, |_, _| c)
    }

    /// Destination-only kernel `v(x, y) = rate(x)`, given per-cell rates.
    pub fn destination_only(grid: Grid, rate: &[f64]) -> Result<Self> {
        if rate.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: rate.len(),
            });
        }
        let r = rate.to_vec();
        let n = grid.len();
        let m = DMatrix::from_fn(n, n, |i, _| r[i]);
        Self::from_matrix(grid, m, 0.0)
    }

    /// Piecewise semi-constant kernel per [`PiecewiseKernel`].
    pub fn piecewise(grid: Grid, pieces: &PiecewiseKernel) -> Result<Self> {
        let n = grid.len();
        if pieces.block_of.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: pieces.block_of.len(),
            });
        }
        for (k, r) in pieces.rates.iter().enumerate() {
            if r.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: r.len(),
                });
            }
            let _ = k;
        }
        for (j, &b) in pieces.block_of.iter().enumerate() {
            if b >= pieces.rates.len() {
                return Err(Error::InvalidParameter {
                    name: "block_of",
                    reason: format!("cell {j} assigned to missing block {b}"),
                });
            }
        }
        let m = DMatrix::from_fn(n, n, |i, j| pieces.rates[pieces.block_of[j]][i]);
        Self::from_matrix(grid, m, 0.0)
    }

    /// Two-piece kernel: block 0 is `block1` (sorted cell indices), the rest
    /// is block 1; `v1`/`v2` are the arrival-rate functions.
    pub fn two_piece(grid: Grid, block1: &[usize], v1: &[f64], v2: &[f64]) -> Result<Self> {
        let n = grid.len();
        let mut block_of = vec![1usize; n];
        for &c in block1 {
            if c >= n {
                return Err(Error::InvalidParameter {
                    name: "block1",
                    reason: format!("cell index {c} out of range"),
                });
            }
            block_of[c] = 0;
        }
        Self::piecewise(
            grid,
            &PiecewiseKernel {
                block_of,
                rates: vec![v1.to_vec(), v2.to_vec()],
            },
        )
    }

    /// Short-range kernel `v = c0` on `|x - y| < eps0`, zero elsewhere.
    pub fn coville(grid: Grid, c0: f64, eps0: f64) -> Result<Self> {
        Self::from_fn(grid, 0.0, |x, y| {
            let dx = x[0] - y[0];
            let dy = x[1] - y[1];
            if (dx * dx + dy * dy).sqrt() < eps0 {
                c0
            } else {
                0.0
            }
        })
    }

    /// 1D kernel supported on diagonal bands in `x + y`: `v = c` where
    /// `x + y` lies in one of the given closed intervals.
    pub fn banded_sum(grid: Grid, bands: &[[f64; 2]], c: f64) -> Result<Self> {
        let bands = bands.to_vec();
        Self::from_fn(grid, 0.0, move |x, y| {
            let s = x[0] + y[0];
            if bands.iter().any(|b| s >= b[0] && s <= b[1]) {
                c
            } else {
                0.0
            }
        })
    }

    /// Replaces the support threshold used by the ergodicity analysis.
    pub fn with_support_eps(mut self, support_eps: f64) -> Self {
        self.support_eps = support_eps;
        self
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Shared handle to the grid, for population fields living on it.
    pub fn grid_arc(&self) -> Arc<Grid> {
        Arc::clone(&self.grid)
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.v
    }

    /// Emigration rate per departure cell (weighted column sums).
    pub fn emigration(&self) -> &DVector<f64> {
        &self.v_e
    }

    /// Immigration rate per arrival cell (weighted row sums).
    pub fn immigration(&self) -> &DVector<f64> {
        &self.v_i
    }

    pub fn support_eps(&self) -> f64 {
        self.support_eps
    }

    /// `max_j |v_i[j] - v_e[j]|` and the balance/symmetry classification.
    /// `tol` is relative to the kernel's rate scale.
    pub fn classify_balance(&self, tol: f64) -> BalanceReport {
        let n = self.len();
        let deviation = (0..n)
            .map(|j| (self.v_i[j] - self.v_e[j]).abs())
            .fold(0.0f64, f64::max);
        let vmax = self.v.amax().max(1e-300);
        let rate_scale = self
            .v_e
            .amax()
            .max(self.v_i.amax())
            .max(1e-300);
        let mut sym_dev = 0.0f64;
        for j in 0..n {
            for i in 0..j {
                sym_dev = sym_dev.max((self.v[(i, j)] - self.v[(j, i)]).abs());
            }
        }
        let class = if sym_dev <= tol * vmax {
            BalanceClass::Symmetric
        } else if deviation <= tol * rate_scale {
            BalanceClass::Balanced
        } else {
            BalanceClass::Unbalanced
        };
        BalanceReport { class, deviation }
    }

    /// Support digraph with an edge `j -> i` iff `v[(i, j)] > support_eps`.
    pub fn support_graph(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut g = vec![Vec::new(); n];
        for j in 0..n {
            for i in 0..n {
                if i != j && self.v[(i, j)] > self.support_eps {
                    g[j].push(i);
                }
            }
        }
        g
    }

    /// Strongly-connected-component analysis of the support digraph.
    pub fn ergodicity_report(&self) -> ErgodicityReport {
        let graph = self.support_graph();
        let components = strongly_connected_components(&graph);
        let reachability = condensation_edges(&graph, &components);
        let is_ergodic = components.len() == 1;
        let classification = if is_ergodic {
            let all_positive = self.v.iter().all(|&x| x > self.support_eps);
            if all_positive {
                KernelClass::CompletelyErgodic
            } else {
                KernelClass::Ergodic
            }
        } else if reachability.is_empty() {
            KernelClass::Separable
        } else if components.len() == 2 && reachability.len() == 1 {
            KernelClass::OneWay
        } else {
            KernelClass::Other
        };
        ErgodicityReport {
            is_ergodic,
            components,
            reachability,
            classification,
        }
    }

    /// Restriction of the kernel to a cell subset. Emigration rates are
    /// recomputed within the subset, so this is only faithful for subsets
    /// with no outgoing migration (separable components) or when the caller
    /// accounts for the lost outflow separately.
    pub fn restrict(&self, cells: &[usize]) -> Result<KernelData> {
        let sub = self.grid.restrict(cells);
        let m = DMatrix::from_fn(cells.len(), cells.len(), |i, j| {
            self.v[(cells[i], cells[j])]
        });
        KernelData::from_matrix(sub, m, self.support_eps)
    }
}
