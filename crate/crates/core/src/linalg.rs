//! Small dense helpers shared across the crate.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex;

use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;
/// Schur sweeps allowed before the eigensolver reports a stall; the
/// underlying iteration is otherwise unbounded and can cycle on nearly
/// scalar non-normal input.
const SCHUR_MAX_SWEEPS: usize = 100_000;

pub fn ones(n: usize) -> DVector<f64> {
    DVector::from_element(n, 1.0)
}

pub fn mean(v: &DVector<f64>) -> f64 {
    v.sum() / v.len() as f64
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape(), "max_abs_diff on mismatched shapes");
    let mut acc = 0.0_f64;
    for (x, y) in a.iter().zip(b.iter()) {
        acc = acc.max((x - y).abs());
    }
    acc
}

pub fn max_abs_diff_vec(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    assert_eq!(a.len(), b.len(), "max_abs_diff_vec on mismatched lengths");
    let mut acc = 0.0_f64;
    for (x, y) in a.iter().zip(b.iter()) {
        acc = acc.max((x - y).abs());
    }
    acc
}

/// All eigenvalues of a real square matrix: the symmetric solver when the
/// matrix is symmetric, a sweep-bounded real Schur reduction otherwise.
pub fn spectrum(m: &DMatrix<f64>) -> Result<Vec<Complex<f64>>> {
    if is_symmetric(m, SYMMETRY_TOL) {
        let eig = SymmetricEigen::new(m.clone());
        return Ok(eig
            .eigenvalues
            .iter()
            .map(|&l| Complex::new(l, 0.0))
            .collect());
    }
    general_spectrum(m)
}

/// Eigenvalues through the general (non-symmetric) path only.
pub fn general_spectrum(m: &DMatrix<f64>) -> Result<Vec<Complex<f64>>> {
    let schur = Schur::try_new(m.clone(), f64::EPSILON, SCHUR_MAX_SWEEPS)
        .ok_or_else(|| Error::Numeric("eigenvalue iteration stalled".into()))?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

pub fn is_symmetric(m: &DMatrix<f64>, tol: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            if (m[(i, j)] - m[(j, i)]).abs() > tol {
                return false;
            }
        }
    }
    true
}

/// exp(M) v by scaling and squaring with a Taylor inner loop.
///
/// Only matrix-vector products are formed; the scaled exponential is applied
/// 2^s times, which is exact enough for the moderate norms used here.
pub fn expm_vec(m: &DMatrix<f64>, v: &DVector<f64>) -> DVector<f64> {
    assert_eq!(m.nrows(), v.len(), "expm_vec dimension mismatch");
    let norm = max_abs(m) * m.ncols() as f64;
    let s = if norm > 1.0 {
        (norm.log2().ceil() as u32).min(30)
    } else {
        0
    };
    let scale = 2.0_f64.powi(s as i32);
    let mut out = v.clone();
    for _ in 0..(1u64 << s) {
        let mut acc = out.clone();
        let mut term = out.clone();
        for k in 1..=30 {
            term = (m * &term) / (scale * k as f64);
            acc += &term;
        }
        out = acc;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm_vec_matches_diagonal_exponential() {
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![0.3, -1.2, 2.5]));
        let v = DVector::from_vec(vec![1.0, 2.0, -0.5]);
        let got = expm_vec(&d, &v);
        for i in 0..3 {
            let want = d[(i, i)].exp() * v[i];
            assert!(
                (got[i] - want).abs() < 1e-12,
                "entry {i}: {} vs {want}",
                got[i]
            );
        }
    }

    #[test]
    fn expm_vec_nilpotent_truncates_exactly() {
        // exp of strictly upper triangular 2x2 is I + M.
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 3.0, 0.0, 0.0]);
        let v = DVector::from_vec(vec![1.0, 2.0]);
        let got = expm_vec(&m, &v);
        assert!((got[0] - 7.0).abs() < 1e-12);
        assert!((got[1] - 2.0).abs() < 1e-12);
    }
}
