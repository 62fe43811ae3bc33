//! Thin wrappers over the dense faer decompositions used across the crate.

use faer::{Mat, MatRef};

use crate::error::{Error, Result};
use crate::operator_algebra::{C64, ZERO};

/// Right eigenpairs of a general complex matrix, in solver order.
pub fn eig(m: MatRef<'_, C64>, vectors: bool) -> Result<(Vec<C64>, Option<Mat<C64>>)> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!("eigenproblem on {}x{}", m.nrows(), m.ncols())));
    }
    if m.nrows() == 0 {
        return Ok((Vec::new(), vectors.then(|| Mat::zeros(0, 0))));
    }
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let v = m[(i, j)];
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::Eigensolver("non-finite matrix entry".into()));
            }
        }
    }
    if vectors {
        let e = m.eigen().map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
        let s = e.S();
        let vals = (0..m.nrows()).map(|i| s[i]).collect();
        Ok((vals, Some(e.U().to_owned())))
    } else {
        let vals = m.eigenvalues().map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
        Ok((vals, None))
    }
}

pub fn eigenvalues(m: MatRef<'_, C64>) -> Result<Vec<C64>> {
    Ok(eig(m, false)?.0)
}

/// Singular values, nonincreasing.
pub fn singular_values(m: MatRef<'_, C64>) -> Result<Vec<f64>> {
    m.singular_values().map_err(|e| Error::Eigensolver(format!("svd: {e:?}")))
}

/// Inverse of a square matrix; fails when the relative smallest singular value is below `rcond`.
pub fn inverse(m: MatRef<'_, C64>, rcond: f64) -> Result<Mat<C64>> {
    let sv = singular_values(m)?;
    let (max, min) = (sv[0], *sv.last().unwrap());
    if !(min > rcond * max) {
        return Err(Error::RankDeficient(if max > 0.0 { min / max } else { 0.0 }));
    }
    use faer::linalg::solvers::DenseSolveCore;
    Ok(m.full_piv_lu().inverse())
}

/// Columns scaled to unit Euclidean norm.
pub fn normalize_columns(m: &Mat<C64>) -> Mat<C64> {
    let mut out = m.clone();
    for j in 0..m.ncols() {
        let n: f64 = (0..m.nrows()).map(|i| m[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        if n > 0.0 {
            for i in 0..m.nrows() {
                out[(i, j)] = m[(i, j)] / n;
            }
        }
    }
    out
}

pub fn column(m: MatRef<'_, C64>, j: usize) -> Vec<C64> {
    (0..m.nrows()).map(|i| m[(i, j)]).collect()
}

pub fn row(m: MatRef<'_, C64>, i: usize) -> Vec<C64> {
    (0..m.ncols()).map(|j| m[(i, j)]).collect()
}

pub fn dot_conj(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).fold(ZERO, |s, t| s + t)
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(m: MatRef<'_, C64>) -> f64 {
    let mut best = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            best = best.max(m[(i, j)].norm());
        }
    }
    best
}

/// Eigenvalues of a general matrix given as a row-major closure.
pub fn eigenvalues_of(n: usize, f: impl FnMut(usize, usize) -> C64) -> Result<Vec<C64>> {
    let m = Mat::from_fn(n, n, f);
    eigenvalues(m.as_ref())
}
