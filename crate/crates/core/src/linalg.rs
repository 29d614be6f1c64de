//! Hermitian eigensolvers.
//!
//! Backed by faer: nalgebra's symmetric QR iteration returns NaN/−∞ on
//! rank-one density matrices whose entries span many decades (coherent states
//! with ≳ 40 Fock levels).

use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::CMatrix;

fn to_faer(a: &CMatrix) -> Mat<Complex64> {
    // Symmetrize so round-off in the upper triangle is not silently discarded.
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| 0.5 * (a[(i, j)] + a[(j, i)].conj()))
}

fn check_square(a: &CMatrix) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), got: a.ncols() });
    }
    Ok(())
}

/// Eigenvalues of the Hermitian part of `a`, ascending.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Result<Vec<f64>> {
    check_square(a)?;
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    let mut ev = to_faer(a).self_adjoint_eigenvalues(Side::Lower).map_err(|_| Error::EigenNoConvergence { dim: a.nrows() })?;
    ev.sort_by(f64::total_cmp);
    if ev.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigenNoConvergence { dim: a.nrows() });
    }
    Ok(ev)
}

/// Eigenvalues (ascending) and unit eigenvectors (columns) of the Hermitian part of `a`.
pub fn hermitian_eigen(a: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    check_square(a)?;
    let n = a.nrows();
    let evd = to_faer(a).self_adjoint_eigen(Side::Lower).map_err(|_| Error::EigenNoConvergence { dim: n })?;
    let s = evd.S();
    let u = evd.U();
    let values: Vec<f64> = (0..n).map(|k| s[k].re).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigenNoConvergence { dim: n });
    }
    Ok((values, CMatrix::from_fn(n, n, |i, j| u[(i, j)])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{coherent_state, product_state, SpaceSpec, QUBIT_HIGH, QUBIT_LOW};

    #[test]
    fn wide_dynamic_range_projector() {
        for n in [30, 40, 50] {
            let spec = SpaceSpec::new(n).unwrap();
            let psi = product_state(&coherent_state(Complex64::new(4.0, 0.0), spec), QUBIT_HIGH, QUBIT_LOW).unwrap();
            let ev = hermitian_eigenvalues(&(&psi * psi.adjoint())).unwrap();
            assert!((ev[ev.len() - 1] - 1.0).abs() < 1e-12);
            assert!(ev[0] > -1e-14, "N = {n}: {}", ev[0]);
        }
    }

    #[test]
    fn decomposition_reconstructs() {
        let a = CMatrix::from_fn(5, 5, |i, j| Complex64::new((i + j) as f64, i as f64 - j as f64));
        let (l, v) = hermitian_eigen(&a).unwrap();
        assert!(l.windows(2).all(|w| w[0] <= w[1]));
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(5, l.iter().map(|&x| Complex64::new(x, 0.0))));
        assert!((&v * d * v.adjoint() - &a).norm() < 1e-12);
        assert!((v.adjoint() * &v - CMatrix::identity(5, 5)).norm() < 1e-12);
    }
}
