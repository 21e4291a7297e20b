//! Eigenvalues of small complex Hermitian matrices.
//!
//! The main route is nalgebra's tridiagonal QR; cyclic Jacobi rotations are
//! kept as an independent route and as the fallback when QR does not converge.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 64;

/// QR iteration cap before falling back to Jacobi.
const MAX_QR_ITERATIONS: usize = 10_000;

fn off_norm2(a: &DMatrix<Complex64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for q in 1..n {
        for p in 0..q {
            s += a[(p, q)].norm_sqr();
        }
    }
    2.0 * s
}

fn hermitian_part(m: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let n = m.nrows();
    if n == 0 || m.ncols() != n {
        return Err(Error::InvalidArgument(format!("expected a non-empty square matrix, got {}x{}", m.nrows(), m.ncols())));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
    }
    Ok((m + m.adjoint()) * Complex64::new(0.5, 0.0))
}

fn sorted_desc(mut ev: Vec<f64>) -> Vec<f64> {
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

/// Eigenvalues of a Hermitian matrix, sorted descending.
///
/// Only the Hermitian part `(A + A^*) / 2` is used.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let a = hermitian_part(m)?;
    match SymmetricEigen::try_new(a, f64::EPSILON, MAX_QR_ITERATIONS) {
        Some(e) => Ok(sorted_desc(e.eigenvalues.iter().cloned().collect())),
        None => {
            log::warn!("QR eigenvalue iteration did not converge; using Jacobi rotations");
            jacobi_eigenvalues(m)
        }
    }
}

/// As [`hermitian_eigenvalues`], by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let n = m.nrows();
    let mut a = hermitian_part(m)?;
    let total: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    let tol = (f64::EPSILON * f64::EPSILON) * total;

    for _ in 0..MAX_SWEEPS {
        if off_norm2(&a) <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let b = a[(p, q)];
                let mag = b.norm();
                if mag == 0.0 {
                    continue;
                }
                // a phase on column q makes the pivot real, then a real rotation zeroes it
                let phase = Complex64::from_polar(1.0, -b.arg());
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = if theta >= 0.0 { 1.0 } else { -1.0 } / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                // V = [[c, s], [-s e, c e]] on (p, q), e = phase
                let vpp = Complex64::new(c, 0.0);
                let vpq = Complex64::new(s, 0.0);
                let vqp = phase * -s;
                let vqq = phase * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * vpp + akq * vqp;
                    a[(k, q)] = akp * vpq + akq * vqq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = vpp.conj() * apk + vqp.conj() * aqk;
                    a[(q, k)] = vpq.conj() * apk + vqq.conj() * aqk;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
            }
        }
    }
    Ok(sorted_desc((0..n).map(|i| a[(i, i)].re).collect()))
}
