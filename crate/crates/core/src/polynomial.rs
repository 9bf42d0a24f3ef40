//! Univariate polynomial utilities (ascending coefficient order) and a
//! companion-matrix root finder used as an independent oracle by the
//! scenarios and the test suites.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg;

pub fn eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

pub fn derivative(coeffs: &[f64]) -> Vec<f64> {
    if coeffs.len() <= 1 {
        return vec![0.0];
    }
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| k as f64 * c)
        .collect()
}

/// All complex roots via the companion matrix. Leading coefficients below
/// `1e-14 * max|c|` are stripped first.
pub fn roots(coeffs: &[f64]) -> Result<Vec<Complex<f64>>> {
    let scale = coeffs.iter().fold(0.0_f64, |a, c| a.max(c.abs()));
    if scale == 0.0 {
        return Err(Error::Numeric(
            "zero polynomial has no isolated roots".into(),
        ));
    }
    let mut c: Vec<f64> = coeffs.to_vec();
    while c.len() > 1 && c.last().unwrap().abs() <= 1e-14 * scale {
        c.pop();
    }
    let deg = c.len() - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = c[deg];
    let companion = DMatrix::from_fn(deg, deg, |i, j| {
        if j == deg - 1 {
            -c[i] / lead
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    linalg::general_spectrum(&companion)
}

/// Real roots (|Im| <= im_tol), deduplicated and sorted ascending.
pub fn real_roots(coeffs: &[f64], im_tol: f64) -> Result<Vec<f64>> {
    let mut out: Vec<f64> = roots(coeffs)?
        .into_iter()
        .filter(|z| z.im.abs() <= im_tol)
        .map(|z| z.re)
        .collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-9);
    Ok(out)
}
