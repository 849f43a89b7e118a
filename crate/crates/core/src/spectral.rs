//! Spectral analysis of migration generators: steady profiles, spectral
//! bounds, eigenmeasures, gaps and resolvents.
//!
//! The generator realizes `H phi = integral of v(x,y) phi(y) dy
//! - v_e(x) phi(x) + r(x) phi(x)` on the grid. For grids up to
//! [`SpectralOptions::dense_limit`] cells the full spectrum is computed
//! densely; beyond that a nonnegative power iteration supplies the dominant
//! pair and a gap estimate from the convergence rate.

use std::sync::{Arc, OnceLock};

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kernel::KernelData;
use crate::linalg;

/// Discrete realization of the migration(-plus-proliferation) generator.
#[derive(Debug, Clone)]
pub struct GeneratorMatrix {
    h: DMatrix<f64>,
    r: DVector<f64>,
    kernel: Arc<KernelData>,
    spectrum: OnceLock<Vec<Complex<f64>>>,
}

impl GeneratorMatrix {
    /// Builds the generator for the given proliferation rates (`None` means
    /// the stationary case `r = 0`).
    pub fn new(kernel: Arc<KernelData>, rates: Option<DVector<f64>>) -> Result<Self> {
        let n = kernel.len();
        let r = match rates {
            Some(r) => {
                if r.len() != n {
                    return Err(Error::LengthMismatch {
                        expected: n,
                        got: r.len(),
                    });
                }
                if let Some(bad) = r.iter().position(|x| !x.is_finite()) {
                    let _ = bad;
                    return Err(Error::NonFinite {
                        context: "proliferation rates",
                    });
                }
                r
            }
            None => DVector::zeros(n),
        };
        let w = kernel.grid().weights();
        let v = kernel.matrix();
        let v_e = kernel.emigration();
        let mut h = DMatrix::from_fn(n, n, |i, j| w[j] * v[(i, j)]);
        for j in 0..n {
            h[(j, j)] += r[j] - v_e[j];
        }
        Ok(GeneratorMatrix {
            h,
            r,
            kernel,
            spectrum: OnceLock::new(),
        })
    }

    /// Stationary generator (`r = 0`).
    pub fn stationary(kernel: Arc<KernelData>) -> Result<Self> {
        Self::new(kernel, None)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn rates(&self) -> &DVector<f64> {
        &self.r
    }

    pub fn kernel(&self) -> &Arc<KernelData> {
        &self.kernel
    }

    pub fn len(&self) -> usize {
        self.h.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn apply(&self, phi: &DVector<f64>) -> DVector<f64> {
        &self.h * phi
    }

    /// One-norm of the generator matrix, the scale used by tolerances.
    pub fn norm_scale(&self) -> f64 {
        let mut best = 0.0f64;
        for j in 0..self.h.ncols() {
            let s: f64 = self.h.column(j).iter().map(|x| x.abs()).sum();
            best = best.max(s);
        }
        best.max(1e-300)
    }

    /// Full spectrum sorted by descending real part (dense path only;
    /// computed once and cached).
    pub fn spectrum(&self) -> &[Complex<f64>] {
        self.spectrum
            .get_or_init(|| linalg::spectrum(&self.h))
            .as_slice()
    }

    /// `max_j (r_j - v_e_j)`, the essential threshold below the spectral
    /// bound.
    pub fn essential_threshold(&self) -> f64 {
        let v_e = self.kernel.emigration();
        (0..self.len())
            .map(|j| self.r[j] - v_e[j])
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Spectral summary: bound, steady profile, eigenmeasure and gap.
///
/// `n_star` and `mu` are present only when the dominant eigenvalue is
/// established as simple and separated from the essential threshold.
#[derive(Debug, Clone)]
pub struct SpectralSummary {
    /// Spectral bound `s(H)`.
    pub s: f64,
    /// Steady profile, strictly positive and normalized when present.
    pub n_star: Option<DVector<f64>>,
    /// Left eigenmeasure weights, nonnegative with unit sum when present.
    pub mu: Option<DVector<f64>>,
    /// Distance from `s` to the rest of the spectrum's real parts.
    pub gap: Option<f64>,
    pub dominant_simple: bool,
}

impl SpectralSummary {
    pub fn n_star(&self) -> Result<&DVector<f64>> {
        self.n_star.as_ref().ok_or(Error::DominanceNotEstablished {
            s: self.s,
            threshold: f64::NAN,
        })
    }

    pub fn mu(&self) -> Result<&DVector<f64>> {
        self.mu.as_ref().ok_or(Error::DominanceNotEstablished {
            s: self.s,
            threshold: f64::NAN,
        })
    }

    pub fn gap(&self) -> Result<f64> {
        self.gap.ok_or(Error::DominanceNotEstablished {
            s: self.s,
            threshold: f64::NAN,
        })
    }
}

/// Solver configuration shared by the spectral operations.
#[derive(Debug, Clone)]
pub struct SpectralOptions {
    /// Largest grid handled by the dense eigensolver.
    pub dense_limit: usize,
    /// Optional start vector for the iterative stages.
    pub init: Option<DVector<f64>>,
    /// Convergence tolerance of the power iteration (relative iterate delta).
    pub power_tol: f64,
    pub power_max_iter: usize,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions {
            dense_limit: 512,
            init: None,
            power_tol: 1e-14,
            power_max_iter: 200_000,
        }
    }
}

/// Relative margin for declaring the dominant eigenvalue separated from the
/// essential threshold and simple.
const DOMINANCE_TOL: f64 = 1e-8;

/// Normalized steady state of an ergodic kernel in the stationary case.
///
/// `n_star` solves the discrete balance equation with unit total mass,
/// `mu` is the volume-normalized quadrature weight vector, `s = 0`.
pub fn steady_state(kernel: &Arc<KernelData>) -> Result<SpectralSummary> {
    steady_state_opts(kernel, &SpectralOptions::default())
}

pub fn steady_state_opts(
    kernel: &Arc<KernelData>,
    opts: &SpectralOptions,
) -> Result<SpectralSummary> {
    let report = kernel.ergodicity_report();
    if !report.is_ergodic {
        return Err(Error::NotErgodic {
            components: report.components.len(),
        });
    }
    let n = kernel.len();
    for j in 0..n {
        if !(kernel.emigration()[j] > 0.0) {
            return Err(Error::ZeroEmigration { cell: j });
        }
    }
    let g = GeneratorMatrix::stationary(Arc::clone(kernel))?;
    let scale = g.norm_scale();

    let (n_star_raw, gap) = if n <= opts.dense_limit {
        let spec = g.spectrum();
        // the dominant eigenvalue is 0 by construction; the computed value
        // only reflects solver round-off
        let second = spec.get(1).map(|c| c.re).unwrap_or(f64::NEG_INFINITY);
        let gap = -second;
        let v = linalg::inverse_iteration(g.matrix(), 0.0, opts.init.as_ref(), 1e-13, 80)?;
        (v, gap)
    } else {
        let delta = power_delta(&g);
        let p = DMatrix::identity(n, n) + g.matrix() * delta;
        let (rho, v, ratio) =
            linalg::power_dominant(&p, opts.init.as_ref(), opts.power_tol, opts.power_max_iter)?;
        let gap_est = (1.0 - ratio) * rho.max(1.0) / delta;
        (v, gap_est)
    };

    let mass = kernel.grid().integrate(n_star_raw.as_slice())?;
    if !(mass.abs() > 0.0) {
        return Err(Error::NumericalFailure(
            "steady profile has zero total mass".into(),
        ));
    }
    let n_star = n_star_raw / mass;
    if n_star.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::NumericalFailure(
            "steady profile is not strictly positive; ergodicity may be borderline".into(),
        ));
    }
    // residual of the balance equation, relative to the rate scale
    let residual = (g.matrix() * &n_star).amax();
    if residual > 1e-9 * scale {
        return Err(Error::NumericalFailure(format!(
            "steady-state residual {residual:.3e} exceeds 1e-9 * {scale:.3e}"
        )));
    }

    let volume = kernel.grid().total_volume();
    let mu = DVector::from_iterator(n, kernel.grid().weights().iter().map(|w| w / volume));
    Ok(SpectralSummary {
        s: 0.0,
        n_star: Some(n_star),
        mu: Some(mu),
        gap: Some(gap),
        dominant_simple: true,
    })
}

/// Positivity-preserving scaling for the power iteration: `I + delta * H`
/// stays entrywise nonnegative.
fn power_delta(g: &GeneratorMatrix) -> f64 {
    let n = g.len();
    let most_negative_diag = (0..n)
        .map(|j| -g.matrix()[(j, j)])
        .fold(0.0f64, f64::max);
    if most_negative_diag > 0.0 {
        0.9 / most_negative_diag
    } else {
        1.0
    }
}

/// Spectral bound and, when dominance is established, the Perron pair of a
/// proliferating generator.
pub fn spectral_bound(g: &GeneratorMatrix) -> Result<SpectralSummary> {
    spectral_bound_opts(g, &SpectralOptions::default())
}

pub fn spectral_bound_opts(g: &GeneratorMatrix, opts: &SpectralOptions) -> Result<SpectralSummary> {
    let n = g.len();
    let scale = g.norm_scale();
    let threshold = g.essential_threshold();

    let (s, gap, multiple) = if n <= opts.dense_limit {
        let spec = g.spectrum();
        let s = spec[0].re;
        let cluster_tol = DOMINANCE_TOL * scale;
        // count eigenvalues in the dominant cluster
        let cluster = spec
            .iter()
            .filter(|c| (*c - Complex::new(s, 0.0)).norm() <= cluster_tol)
            .count();
        let rest = spec
            .iter()
            .filter(|c| (*c - Complex::new(s, 0.0)).norm() > cluster_tol)
            .map(|c| c.re)
            .fold(f64::NEG_INFINITY, f64::max);
        (s, s - rest, cluster > 1)
    } else {
        let delta = power_delta(g);
        let p = DMatrix::identity(n, n) + g.matrix() * delta;
        let (rho, _, ratio) =
            linalg::power_dominant(&p, opts.init.as_ref(), opts.power_tol, opts.power_max_iter)?;
        let s = (rho - 1.0) / delta;
        let gap_est = (1.0 - ratio) * rho.max(1.0) / delta;
        (s, gap_est, false)
    };

    // Theorem guarantee: the bound lies in the proliferation bracket.
    let max_r = g.rates().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if s < threshold - 1e-7 * scale.max(1.0) || s > max_r + 1e-7 * scale.max(1.0) {
        return Err(Error::NumericalFailure(format!(
            "spectral bound {s:.6e} escapes the bracket [{threshold:.6e}, {max_r:.6e}]"
        )));
    }

    let ergodic = g.kernel().ergodicity_report().is_ergodic;
    let separated = s - threshold > DOMINANCE_TOL * scale;
    if !ergodic || !separated || multiple {
        return Ok(SpectralSummary {
            s,
            n_star: None,
            mu: None,
            gap: None,
            dominant_simple: false,
        });
    }

    let right = linalg::inverse_iteration(g.matrix(), s, opts.init.as_ref(), 1e-13, 80)?;
    let left = linalg::inverse_iteration(&g.matrix().transpose(), s, opts.init.as_ref(), 1e-13, 80)?;

    // eigenmeasure: nonnegative, unit total
    let mut mu = left;
    let mu_max = mu.amax();
    for x in mu.iter_mut() {
        if *x < 0.0 {
            if -*x > 1e-12 * mu_max {
                return Err(Error::NumericalFailure(
                    "left eigenvector has a significant negative entry".into(),
                ));
            }
            *x = 0.0;
        }
    }
    let mu_sum: f64 = mu.iter().sum();
    if !(mu_sum > 0.0) {
        return Err(Error::NumericalFailure("left eigenvector vanished".into()));
    }
    mu /= mu_sum;

    // profile normalized against the eigenmeasure
    let pairing = mu.dot(&right);
    if !(pairing.abs() > 0.0) {
        return Err(Error::NumericalFailure(
            "eigenmeasure pairing with the profile vanished".into(),
        ));
    }
    let n_star = right / pairing;
    if n_star.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::NumericalFailure(
            "dominant profile is not strictly positive".into(),
        ));
    }

    Ok(SpectralSummary {
        s,
        n_star: Some(n_star),
        mu: Some(mu),
        gap: Some(gap),
        dominant_simple: true,
    })
}

/// Spectral gap of a generator with established dominance.
pub fn spectral_gap(g: &GeneratorMatrix) -> Result<f64> {
    let summary = spectral_bound(g)?;
    if !summary.dominant_simple {
        return Err(Error::DominanceNotEstablished {
            s: summary.s,
            threshold: g.essential_threshold(),
        });
    }
    summary.gap()
}

/// Solves `(shift * I - H) phi = rhs`. For `shift > s(H)` and nonnegative
/// `rhs` the solution is nonnegative.
pub fn resolvent_solve(
    g: &GeneratorMatrix,
    shift: f64,
    rhs: &DVector<f64>,
) -> Result<DVector<f64>> {
    if rhs.len() != g.len() {
        return Err(Error::LengthMismatch {
            expected: g.len(),
            got: rhs.len(),
        });
    }
    let scale = g.norm_scale().max(shift.abs());
    if g.len() <= SpectralOptions::default().dense_limit {
        let nearest = g
            .spectrum()
            .iter()
            .map(|c| (c - Complex::new(shift, 0.0)).norm())
            .fold(f64::INFINITY, f64::min);
        if nearest <= 1e-10 * scale {
            return Err(Error::SingularShift { shift });
        }
        linalg::solve_shifted(g.matrix(), shift, rhs)
    } else {
        let phi = linalg::solve_shifted(g.matrix(), shift, rhs)?;
        let residual = (&phi * shift - g.apply(&phi) - rhs).amax();
        if residual > 1e-8 * scale * phi.amax().max(1.0) {
            return Err(Error::SingularShift { shift });
        }
        Ok(phi)
    }
}
