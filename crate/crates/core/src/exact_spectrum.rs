//! Dense diagonalization of the full vectorized Liouvillian.

use std::cmp::Ordering;

use faer::{Mat, MatRef};

use crate::error::{Error, Result};
use crate::linalg;
use crate::lindblad_model::{full_liouvillian, XYZChainConfig, MAX_FREE_SPINS};
use crate::operator_algebra::{devectorize, kron, OperatorMatrix, SuperoperatorMatrix, C64};

/// Per-pair residual bound relative to the Frobenius norm of the matrix.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Stationarity bound for the steady state.
pub const NESS_TOL: f64 = 1e-9;

/// Eigenvalues sorted by (Re asc, Im asc, solver index), with matching unit-norm eigenvector columns.
#[derive(Clone, Debug)]
pub struct Eigendecomposition {
    pub values: Vec<C64>,
    pub vectors: Option<Mat<C64>>,
    /// Largest `|M v - lambda v| / |M|_F`, when vectors were computed.
    pub max_residual: Option<f64>,
}

pub fn canonical_order(a: &C64, b: &C64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

pub fn sort_canonical(values: &mut [C64]) {
    values.sort_by(canonical_order);
}

pub fn eig_general(m: MatRef<'_, C64>, vectors: bool) -> Result<Eigendecomposition> {
    let (vals, vecs) = linalg::eig(m, vectors)?;
    let mut idx: Vec<usize> = (0..vals.len()).collect();
    idx.sort_by(|&a, &b| canonical_order(&vals[a], &vals[b]).then(a.cmp(&b)));
    let values: Vec<C64> = idx.iter().map(|&i| vals[i]).collect();
    let Some(vecs) = vecs else {
        return Ok(Eigendecomposition { values, vectors: None, max_residual: None });
    };
    let vecs = linalg::normalize_columns(&vecs);
    let sorted = Mat::from_fn(vecs.nrows(), vecs.ncols(), |i, j| vecs[(i, idx[j])]);
    let mv = m * &sorted;
    let fro = m.norm_l2().max(f64::MIN_POSITIVE);
    let mut worst = 0.0f64;
    for (j, lam) in values.iter().enumerate() {
        let r: f64 = (0..m.nrows()).map(|i| (mv[(i, j)] - lam * sorted[(i, j)]).norm_sqr()).sum::<f64>().sqrt();
        worst = worst.max(r / fro);
    }
    if worst > RESIDUAL_TOL {
        return Err(Error::Eigensolver(format!("eigenpair residual {worst:.3e} exceeds {RESIDUAL_TOL:e}")));
    }
    Ok(Eigendecomposition { values, vectors: Some(sorted), max_residual: Some(worst) })
}

#[derive(Clone, Debug)]
pub struct ExactSpectrum {
    pub eigenvalues: Vec<C64>,
    pub right_eigenvectors: Option<Mat<C64>>,
    pub config: XYZChainConfig,
}

pub fn exact_liouvillian_spectrum(cfg: &XYZChainConfig, vectors: bool) -> Result<ExactSpectrum> {
    if cfg.n_free > MAX_FREE_SPINS {
        return Err(Error::Envelope(format!("N = {} exceeds {MAX_FREE_SPINS}", cfg.n_free)));
    }
    let l = full_liouvillian(cfg)?;
    let e = eig_general(l.as_mat(), vectors)?;
    Ok(ExactSpectrum { eigenvalues: e.values, right_eigenvectors: e.vectors, config: cfg.clone() })
}

impl ExactSpectrum {
    /// Eigenvalues with `|lambda| <= 1e-9 Gamma`.
    pub fn zero_count(&self) -> usize {
        let tol = 1e-9 * self.config.gamma;
        self.eigenvalues.iter().filter(|l| l.norm() <= tol).count()
    }

    pub fn max_real_part(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Both spectrum invariants: a unique zero and the closed left half-plane.
    pub fn invariants_hold(&self) -> bool {
        self.zero_count() == 1 && self.max_real_part() <= 1e-9 * self.config.gamma
    }
}

#[derive(Clone, Debug)]
pub struct SteadyState {
    pub rho: OperatorMatrix,
    /// `max |L[rho]|` after Hermitization and normalization.
    pub residual: f64,
    pub min_eigenvalue: f64,
}

impl SteadyState {
    /// `tr(rho (op (x) 1))` for an operator on the dissipated site.
    pub fn site0_expectation(&self, op: &OperatorMatrix) -> C64 {
        let d1 = self.rho.dim() / op.dim();
        self.rho.trace_product(&kron(op, &OperatorMatrix::identity(d1)))
    }
}

pub fn steady_state(cfg: &XYZChainConfig) -> Result<SteadyState> {
    steady_state_of(&full_liouvillian(cfg)?)
}

/// Kernel of a Liouvillian, Hermitized and trace-normalized.
pub fn steady_state_of(l: &SuperoperatorMatrix) -> Result<SteadyState> {
    let svd = l.as_mat().svd().map_err(|e| Error::Eigensolver(format!("svd: {e:?}")))?;
    let s = svd.S();
    let n = l.dim();
    let smax = s[0].re;
    let tol = 1e-9 * smax.max(1.0);
    let nullity = (0..n).filter(|&i| s[i].re <= tol).count();
    if nullity != 1 {
        return Err(Error::KernelDimension(nullity));
    }
    let v = linalg::column(svd.V(), n - 1);
    let raw = devectorize(&v)?;
    let herm = (&raw + &raw.dagger()).scale_re(0.5);
    let tr = herm.trace();
    if tr.norm() < 1e-14 {
        return Err(Error::Numerical("kernel vector is traceless".into()));
    }
    let rho = herm.scale(C64::new(1.0 / tr.re, 0.0));
    let residual = l.apply_op(&rho).max_abs();
    if residual > NESS_TOL {
        return Err(Error::Numerical(format!("steady-state residual {residual:.3e}")));
    }
    let (evals, _) = rho.hermitian_eigen()?;
    let min_eigenvalue = evals[0];
    if min_eigenvalue < -NESS_TOL {
        return Err(Error::Numerical(format!("steady state has eigenvalue {min_eigenvalue:.3e}")));
    }
    Ok(SteadyState { rho, residual, min_eigenvalue })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator_algebra::{c, lindblad_superop, ZERO};

    #[test]
    fn canonical_sort_of_diagonal() {
        let m = Mat::from_fn(3, 3, |i, j| if i == j { [c(1.0, 0.0), c(0.0, 2.0), c(-3.0, 0.0)][i] } else { ZERO });
        let e = eig_general(m.as_ref(), true).unwrap();
        let want = [c(-3.0, 0.0), c(0.0, 2.0), c(1.0, 0.0)];
        for (a, b) in e.values.iter().zip(want) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn amplitude_damping_superop() {
        let s = lindblad_superop(&[(OperatorMatrix::sigma_minus(), 1.0)]).unwrap();
        let e = eig_general(s.as_mat(), true).unwrap();
        let want = [-1.0, -0.5, -0.5, 0.0];
        for (a, b) in e.values.iter().zip(want) {
            assert!((a - c(b, 0.0)).norm() < 1e-12);
        }
    }
}
