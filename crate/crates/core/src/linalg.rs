//! Dense linear-algebra kernels: matrix exponential, spectra, inverse
//! iteration and Perron power iteration.
//!
//! Everything here operates on `nalgebra` dense types; grids are capped at
//! desk scale so dense algorithms are exact enough and fast enough.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

/// Pade coefficients for the diagonal approximants used by `expm`.
const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.539398330063230e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068e0;
const THETA_13: f64 = 5.371920351148152e0;

fn one_norm(a: &DMatrix<f64>) -> f64 {
    let mut best = 0.0f64;
    for j in 0..a.ncols() {
        let s: f64 = a.column(j).iter().map(|x| x.abs()).sum();
        best = best.max(s);
    }
    best
}

/// Evaluates the degree-`m` diagonal Pade approximant `(V - U)^-1 (V + U)`
/// given the even powers of `a`.
fn pade_low(a: &DMatrix<f64>, b: &[f64]) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let a2 = a * a;
    let id = DMatrix::<f64>::identity(n, n);
    // even powers a^0, a^2, a^4, ...
    let mut powers: Vec<DMatrix<f64>> = vec![id];
    while powers.len() * 2 < b.len() {
        let next = powers.last().unwrap() * &a2;
        powers.push(next);
    }
    let mut u_inner = DMatrix::<f64>::zeros(n, n);
    let mut v = DMatrix::<f64>::zeros(n, n);
    for (k, p) in powers.iter().enumerate() {
        if 2 * k + 1 < b.len() {
            u_inner += p * b[2 * k + 1];
        }
        v += p * b[2 * k];
    }
    (a * u_inner, v)
}

fn pade_13(a: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let b = &B13;
    let u_hi = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9]);
    let u_lo = &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &id * b[1];
    let u = a * (u_hi + u_lo);
    let v_hi = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8]);
    let v = v_hi + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &id * b[0];
    (u, v)
}

/// Matrix exponential by scaling-and-squaring with diagonal Pade
/// approximants.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    assert_eq!(a.nrows(), a.ncols(), "expm needs a square matrix");
    let nrm = one_norm(a);
    let (u, v, squarings) = if nrm <= THETA_3 {
        let (u, v) = pade_low(a, &B3);
        (u, v, 0u32)
    } else if nrm <= THETA_5 {
        let (u, v) = pade_low(a, &B5);
        (u, v, 0)
    } else if nrm <= THETA_7 {
        let (u, v) = pade_low(a, &B7);
        (u, v, 0)
    } else if nrm <= THETA_9 {
        let (u, v) = pade_low(a, &B9);
        (u, v, 0)
    } else {
        let s = ((nrm / THETA_13).log2().ceil()).max(0.0) as u32;
        let scaled = a / 2f64.powi(s as i32);
        let (u, v) = pade_13(&scaled);
        (u, v, s)
    };
    let p = &v + &u;
    let q = &v - &u;
    let mut f = q
        .lu()
        .solve(&p)
        .expect("Pade denominator is singular; matrix norm out of range");
    for _ in 0..squarings {
        f = &f * &f;
    }
    f
}

/// All eigenvalues, sorted by descending real part (ties: descending
/// imaginary part).
pub fn spectrum(a: &DMatrix<f64>) -> Vec<Complex<f64>> {
    let eig = a.clone().complex_eigenvalues();
    let mut out: Vec<Complex<f64>> = eig.iter().copied().collect();
    out.sort_by(|x, y| {
        y.re.partial_cmp(&x.re)
            .unwrap()
            .then(y.im.partial_cmp(&x.im).unwrap())
    });
    out
}

/// Deterministic start vector for inverse/power iteration: strictly
/// positive with mild index-dependent variation.
pub fn default_start(n: usize) -> DVector<f64> {
    DVector::from_fn(n, |i, _| 1.0 + 0.5 * ((i as f64 + 1.0).sin() * 0.5 + 0.5))
}

/// Inverse iteration for the eigenvector of `a` at the (real, simple)
/// eigenvalue `lambda`. The shift is offset slightly so the factorization
/// stays regular; two or three iterations reach machine precision when the
/// eigenvalue is well separated.
pub fn inverse_iteration(
    a: &DMatrix<f64>,
    lambda: f64,
    init: Option<&DVector<f64>>,
    tol: f64,
    max_iter: usize,
) -> Result<DVector<f64>> {
    let n = a.nrows();
    let scale = one_norm(a).max(1e-300);
    let mut offset = 1e-9 * scale.max(lambda.abs());
    let mut x = match init {
        Some(v) => v.clone(),
        None => default_start(n),
    };
    let xn = x.norm();
    if xn == 0.0 {
        x = default_start(n);
    } else {
        x /= xn;
    }

    for attempt in 0..4 {
        let shifted = a - DMatrix::<f64>::identity(n, n) * (lambda + offset);
        let lu = shifted.lu();
        let mut ok = true;
        for _ in 0..max_iter {
            match lu.solve(&x) {
                Some(y) => {
                    let norm = y.norm();
                    if !norm.is_finite() || norm == 0.0 {
                        ok = false;
                        break;
                    }
                    x = y / norm;
                }
                None => {
                    ok = false;
                    break;
                }
            }
            let residual = (a * &x - &x * lambda).amax();
            if residual <= tol * scale {
                // sign fix: largest-magnitude entry positive
                let k = x.iamax();
                if x[k] < 0.0 {
                    x = -x;
                }
                return Ok(x);
            }
        }
        if !ok || attempt < 3 {
            offset *= 64.0;
            continue;
        }
    }
    Err(Error::NumericalFailure(format!(
        "inverse iteration did not converge at eigenvalue {lambda}"
    )))
}

/// Power iteration for the Perron value and vector of an entrywise
/// nonnegative matrix. Returns `(rho, vector, convergence_ratio)`; the
/// convergence ratio estimates the subdominant-to-dominant modulus ratio.
pub fn power_dominant(
    p: &DMatrix<f64>,
    init: Option<&DVector<f64>>,
    tol: f64,
    max_iter: usize,
) -> Result<(f64, DVector<f64>, f64)> {
    let n = p.nrows();
    let mut x = match init {
        Some(v) => v.clone(),
        None => default_start(n),
    };
    x /= x.norm();
    let mut rho;
    let mut prev_res = f64::INFINITY;
    let mut ratio = 1.0f64;
    for _ in 0..max_iter {
        let y = p * &x;
        let norm = y.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::NumericalFailure(
                "power iteration produced a zero or non-finite iterate".into(),
            ));
        }
        rho = x.dot(&y);
        let next = y / norm;
        let res = (&next - &x).amax().min((&next + &x).amax());
        if res < prev_res && prev_res.is_finite() && prev_res > 0.0 {
            ratio = res / prev_res;
        }
        prev_res = res;
        x = next;
        if res <= tol {
            let k = x.iamax();
            if x[k] < 0.0 {
                x = -x;
            }
            return Ok((rho, x, ratio));
        }
    }
    Err(Error::NumericalFailure(format!(
        "power iteration did not converge within {max_iter} iterations (last delta {prev_res:.3e})"
    )))
}

/// Solves `(shift * I - a) x = rhs` by dense LU.
pub fn solve_shifted(a: &DMatrix<f64>, shift: f64, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    let n = a.nrows();
    let m = DMatrix::<f64>::identity(n, n) * shift - a;
    m.lu()
        .solve(rhs)
        .ok_or(Error::SingularShift { shift })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn mat(rows: &[&[f64]]) -> DMatrix<f64> {
        let n = rows.len();
        let m = rows[0].len();
        DMatrix::from_fn(n, m, |i, j| rows[i][j])
    }

    #[test]
    fn expm_zero_is_identity() {
        let a = DMatrix::<f64>::zeros(5, 5);
        let e = expm(&a);
        assert_relative_eq!(e, DMatrix::identity(5, 5), max_relative = 1e-15);
    }

    #[test]
    fn expm_diagonal() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![-3.0, 0.5, 7.0]));
        let e = expm(&a);
        for (i, &d) in [-3.0f64, 0.5, 7.0].iter().enumerate() {
            assert_relative_eq!(e[(i, i)], d.exp(), max_relative = 1e-13);
        }
        assert!(e[(0, 1)].abs() < 1e-14);
    }

    #[test]
    fn expm_nilpotent() {
        let a = mat(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let e = expm(&a);
        assert_relative_eq!(e, mat(&[&[1.0, 1.0], &[0.0, 1.0]]), max_relative = 1e-15);
    }

    #[test]
    fn expm_rotation() {
        let th = 1.2345f64;
        let a = mat(&[&[0.0, -th], &[th, 0.0]]);
        let e = expm(&a);
        assert_relative_eq!(e[(0, 0)], th.cos(), max_relative = 1e-13);
        assert_relative_eq!(e[(1, 0)], th.sin(), max_relative = 1e-13);
    }

    #[test]
    fn expm_inverse_of_negation() {
        let mut state = 11u64;
        let mut rnd = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 4.0 - 2.0
        };
        let n = 12;
        let a = DMatrix::from_fn(n, n, |_, _| rnd());
        let prod = expm(&a) * expm(&(-&a));
        assert_relative_eq!(prod, DMatrix::identity(n, n), epsilon = 1e-9);
    }

    #[test]
    fn expm_large_norm_uses_squaring() {
        // 200 * skew matrix has norm >> theta13
        let th = 200.0f64;
        let a = mat(&[&[0.0, -th], &[th, 0.0]]);
        let e = expm(&a);
        assert_relative_eq!(e[(0, 0)], th.cos(), epsilon = 1e-8);
        assert_relative_eq!(e[(1, 0)], th.sin(), epsilon = 1e-8);
    }

    #[test]
    fn spectrum_of_triangular() {
        let a = mat(&[&[2.0, 5.0, 1.0], &[0.0, -1.0, 3.0], &[0.0, 0.0, 0.25]]);
        let s = spectrum(&a);
        assert_relative_eq!(s[0].re, 2.0, max_relative = 1e-10);
        assert_relative_eq!(s[1].re, 0.25, max_relative = 1e-10);
        assert_relative_eq!(s[2].re, -1.0, max_relative = 1e-10);
    }

    #[test]
    fn inverse_iteration_finds_dominant_vector() {
        let a = mat(&[&[2.0, 1.0], &[1.0, 2.0]]);
        // dominant eigenpair: 3, (1,1)/sqrt(2)
        let v = inverse_iteration(&a, 3.0, None, 1e-13, 50).unwrap();
        assert_relative_eq!(v[0], v[1], max_relative = 1e-10);
        assert_relative_eq!(v.norm(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn power_iteration_matches_dense() {
        let a = mat(&[&[0.5, 0.3, 0.1], &[0.2, 0.4, 0.3], &[0.3, 0.3, 0.6]]);
        let (rho, v, _) = power_dominant(&a, None, 1e-14, 10_000).unwrap();
        let top = spectrum(&a)[0].re;
        assert_relative_eq!(rho, top, max_relative = 1e-10);
        assert!(v.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn solve_shifted_roundtrip() {
        let a = mat(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        let rhs = DVector::from_vec(vec![1.0, 2.0]);
        let x = solve_shifted(&a, 2.0, &rhs).unwrap();
        let back = DMatrix::identity(2, 2) * 2.0 - a;
        assert_relative_eq!(back * x, rhs, max_relative = 1e-13);
    }
}
