//! Population migration and migration-epidemics toolkit on discretized
//! habitat domains.
//!
//! The crate models population systems in which movement between locations
//! depends only on the departure and arrival points, not on density. A
//! migration kernel sampled on a quadrature grid yields a dense generator
//! whose spectral data (steady profile, spectral bound, eigenmeasure, gap)
//! governs the long-run behavior. On top of the linear flow sit three
//! epidemic models (SI, SIR, SIRE) with threshold and endemic-state solvers.
//!
//! Modules:
//! - [`grid`]: habitat partitions with midpoint quadrature
//! - [`kernel`]: migration kernels, rate vectors, ergodicity analysis
//! - [`spectral`]: steady states, spectral bounds, gaps, resolvents
//! - [`dynamics`]: time evolution, closed-form solutions, block reduction,
//!   decay-rate fitting
//! - [`epidemics`]: SI/SIR/SIRE evolution, epidemic threshold, endemic states
//! - [`io`]: CSV import/export of kernels, trajectories and reports

pub mod dynamics;
pub mod epidemics;
pub mod error;
pub mod grid;
pub mod io;
pub mod kernel;
pub mod linalg;
pub mod ode;
pub mod scc;
pub mod spectral;

pub use error::{Error, Result};
pub use grid::{Cell, Grid};
pub use kernel::{BalanceClass, BalanceReport, ErgodicityReport, KernelClass, KernelData};
pub use spectral::{GeneratorMatrix, SpectralOptions, SpectralSummary};
