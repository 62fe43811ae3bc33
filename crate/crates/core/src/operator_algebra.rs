//! Dense complex matrices on a Hilbert space and the superoperators acting on them.
//!
//! Vectorization is row-stacking: `vec(X)[i*d + j] = X[(i, j)]`, so that
//! `vec(|a><b|) = |a> (x) conj(|b>)` and `sandwich_superop(Q, W) = Q (x) W^T`.
//! Tensor factors are ordered dissipated space first.

use std::ops::{Add, Mul, Neg, Sub};

use faer::{Mat, MatRef, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Relative tolerance for algebraic identities (kron, partial trace, vectorization).
pub const ALGEBRA_TOL: f64 = 1e-12;

/// Largest supported Hilbert dimension, 2^11.
pub const MAX_HILBERT_DIM: usize = 2048;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Square complex matrix acting on a Hilbert space of dimension `dim()`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    m: Mat<C64>,
}

impl OperatorMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "operator dimension must be positive");
        Self { m: Mat::zeros(dim, dim) }
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim >= 1, "operator dimension must be positive");
        Self { m: Mat::identity(dim, dim) }
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(dim >= 1, "operator dimension must be positive");
        Self { m: Mat::from_fn(dim, dim, f) }
    }

    /// Builds from row-major entries; the length must be a perfect square.
    pub fn from_row_major(entries: &[C64]) -> Result<Self> {
        let dim = exact_sqrt(entries.len())
            .ok_or_else(|| Error::Dimension(format!("{} entries is not a square", entries.len())))?;
        Ok(Self::from_fn(dim, |i, j| entries[i * dim + j]))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let d = rows.len();
        Self::from_fn(d, |i, j| {
            assert_eq!(rows[i].len(), d, "rows must form a square");
            c(rows[i][j], 0.0)
        })
    }

    pub fn diagonal(values: &[C64]) -> Self {
        Self::from_fn(values.len(), |i, j| if i == j { values[i] } else { ZERO })
    }

    pub fn from_mat(m: Mat<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::Dimension(format!("{}x{} is not a nonempty square", m.nrows(), m.ncols())));
        }
        Ok(Self { m })
    }

    /// `|a><b|`
    pub fn outer(a: &[C64], b: &[C64]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::Dimension(format!("outer product of {} and {}", a.len(), b.len())));
        }
        Ok(Self::from_fn(a.len(), |i, j| a[i] * b[j].conj()))
    }

    pub fn pauli_x() -> Self {
        Self::from_fn(2, |i, j| if i != j { ONE } else { ZERO })
    }

    pub fn pauli_y() -> Self {
        Self::from_fn(2, |i, j| match (i, j) {
            (0, 1) => -I,
            (1, 0) => I,
            _ => ZERO,
        })
    }

    pub fn pauli_z() -> Self {
        Self::diagonal(&[ONE, -ONE])
    }

    /// `|up><down|`, raising in the convention up = index 0.
    pub fn sigma_plus() -> Self {
        Self::from_fn(2, |i, j| if (i, j) == (0, 1) { ONE } else { ZERO })
    }

    pub fn sigma_minus() -> Self {
        Self::sigma_plus().dagger()
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.m[(i, j)]
    }

    pub fn as_mat(&self) -> MatRef<'_, C64> {
        self.m.as_ref()
    }

    pub fn into_mat(self) -> Mat<C64> {
        self.m
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.dim(), |i, j| self.m[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim(), |i, j| self.m[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(self.dim(), |i, j| self.m[(i, j)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.m[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_fn(self.dim(), |i, j| self.m[(i, j)] * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(c(s, 0.0))
    }

    pub fn max_abs(&self) -> f64 {
        let d = self.dim();
        let mut best = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                best = best.max(self.m[(i, j)].norm());
            }
        }
        best
    }

    pub fn frobenius_norm(&self) -> f64 {
        let d = self.dim();
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                s += self.m[(i, j)].norm_sqr();
            }
        }
        s.sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim());
        (self - other).max_abs()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.dagger())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol * self.max_abs().max(1.0)
    }

    /// `tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        let d = self.dim();
        assert_eq!(d, other.dim());
        let mut s = ZERO;
        for i in 0..d {
            for k in 0..d {
                s += self.m[(i, k)] * other.m[(k, i)];
            }
        }
        s
    }

    /// `<a| self |b>` with `a` conjugated.
    pub fn braket(&self, a: &[C64], b: &[C64]) -> C64 {
        let d = self.dim();
        assert!(a.len() == d && b.len() == d);
        let mut s = ZERO;
        for i in 0..d {
            if a[i] == ZERO {
                continue;
            }
            let mut row = ZERO;
            for j in 0..d {
                row += self.m[(i, j)] * b[j];
            }
            s += a[i].conj() * row;
        }
        s
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let d = self.dim();
        assert_eq!(v.len(), d);
        (0..d).map(|i| (0..d).map(|j| self.m[(i, j)] * v[j]).sum()).collect()
    }

    pub fn kron(&self, other: &Self) -> Self {
        kron(self, other)
    }

    /// Eigen-decomposition of the Hermitian part, eigenvalues ascending,
    /// eigenvectors returned as orthonormal columns.
    pub fn hermitian_eigen(&self) -> Result<(Vec<f64>, Vec<Vec<C64>>)> {
        let herm = Mat::from_fn(self.dim(), self.dim(), |i, j| (self.m[(i, j)] + self.m[(j, i)].conj()) * 0.5);
        let evd = herm
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
        let s = evd.S();
        let u = evd.U();
        let vals = (0..self.dim()).map(|i| s[i].re).collect();
        let vecs = (0..self.dim()).map(|k| (0..self.dim()).map(|i| u[(i, k)]).collect()).collect();
        Ok((vals, vecs))
    }
}

impl<'a> Add<&'a OperatorMatrix> for &'a OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        OperatorMatrix { m: &self.m + &rhs.m }
    }
}

impl<'a> Sub<&'a OperatorMatrix> for &'a OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        OperatorMatrix { m: &self.m - &rhs.m }
    }
}

impl<'a> Mul<&'a OperatorMatrix> for &'a OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        OperatorMatrix { m: &self.m * &rhs.m }
    }
}

impl Neg for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn neg(self) -> OperatorMatrix {
        self.scale_re(-1.0)
    }
}

/// `dim H = d0 * d1` with `H0` the dissipated factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HilbertSplit {
    pub d0: usize,
    pub d1: usize,
}

impl HilbertSplit {
    pub fn new(d0: usize, d1: usize) -> Result<Self> {
        if d0 < 2 || d1 < 1 {
            return Err(Error::Dimension(format!("split d0={d0}, d1={d1}")));
        }
        Ok(Self { d0, d1 })
    }

    pub fn total(&self) -> usize {
        self.d0 * self.d1
    }
}

pub fn kron(a: &OperatorMatrix, b: &OperatorMatrix) -> OperatorMatrix {
    let (da, db) = (a.dim(), b.dim());
    OperatorMatrix::from_fn(da * db, |r, s| a.m[(r / db, s / db)] * b.m[(r % db, s % db)])
}

/// `tr_0((w (x) 1) x)`.
pub fn weighted_partial_trace_first(w: &OperatorMatrix, x: &OperatorMatrix, split: HilbertSplit) -> Result<OperatorMatrix> {
    let (d0, d1) = (split.d0, split.d1);
    if w.dim() != d0 || x.dim() != d0 * d1 {
        return Err(Error::Dimension(format!(
            "partial trace of dim {} with weight dim {} under split {d0}x{d1}",
            x.dim(),
            w.dim()
        )));
    }
    Ok(OperatorMatrix::from_fn(d1, |p, q| {
        let mut s = ZERO;
        for i in 0..d0 {
            for k in 0..d0 {
                let wik = w.m[(i, k)];
                if wik != ZERO {
                    s += wik * x.m[(k * d1 + p, i * d1 + q)];
                }
            }
        }
        s
    }))
}

pub fn vectorize(x: &OperatorMatrix) -> Vec<C64> {
    let d = x.dim();
    let mut v = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            v.push(x.m[(i, j)]);
        }
    }
    v
}

pub fn devectorize(v: &[C64]) -> Result<OperatorMatrix> {
    OperatorMatrix::from_row_major(v)
}

fn exact_sqrt(n: usize) -> Option<usize> {
    if n == 0 {
        return None;
    }
    let r = (n as f64).sqrt().round() as usize;
    (r * r == n).then_some(r)
}

/// Matrix acting on row-stacked vectorized operators of a `hilbert_dim`-dimensional space.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperoperatorMatrix {
    m: Mat<C64>,
    hilbert_dim: usize,
}

impl SuperoperatorMatrix {
    pub fn zeros(hilbert_dim: usize) -> Self {
        let n = hilbert_dim * hilbert_dim;
        Self { m: Mat::zeros(n, n), hilbert_dim }
    }

    pub fn from_mat(m: Mat<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Dimension(format!("{}x{} superoperator", m.nrows(), m.ncols())));
        }
        let hilbert_dim = exact_sqrt(m.nrows())
            .ok_or_else(|| Error::Dimension(format!("superoperator dim {} is not a perfect square", m.nrows())))?;
        Ok(Self { m, hilbert_dim })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn hilbert_dim(&self) -> usize {
        self.hilbert_dim
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.m[(i, j)]
    }

    pub fn as_mat(&self) -> MatRef<'_, C64> {
        self.m.as_ref()
    }

    pub fn into_mat(self) -> Mat<C64> {
        self.m
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let n = self.dim();
        assert_eq!(v.len(), n);
        (0..n).map(|i| (0..n).map(|j| self.m[(i, j)] * v[j]).sum()).collect()
    }

    pub fn apply_op(&self, rho: &OperatorMatrix) -> OperatorMatrix {
        devectorize(&self.apply(&vectorize(rho))).expect("superoperator output is square")
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { m: Mat::from_fn(self.dim(), self.dim(), |i, j| self.m[(i, j)] * s), hilbert_dim: self.hilbert_dim }
    }

    pub fn max_abs(&self) -> f64 {
        let n = self.dim();
        let mut best = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                best = best.max(self.m[(i, j)].norm());
            }
        }
        best
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.m[(i, i)]).sum()
    }

    /// `vec(I)^T S` as a row vector; zero for trace-preserving generators.
    pub fn identity_left_action(&self) -> Vec<C64> {
        let d = self.hilbert_dim;
        let n = self.dim();
        (0..n).map(|col| (0..d).map(|i| self.m[(i * d + i, col)]).sum()).collect()
    }
}

impl<'a> Add<&'a SuperoperatorMatrix> for &'a SuperoperatorMatrix {
    type Output = SuperoperatorMatrix;
    fn add(self, rhs: &SuperoperatorMatrix) -> SuperoperatorMatrix {
        assert_eq!(self.dim(), rhs.dim(), "superoperator dimension mismatch");
        SuperoperatorMatrix { m: &self.m + &rhs.m, hilbert_dim: self.hilbert_dim }
    }
}

/// `rho -> q rho w`, i.e. `q (x) w^T` under row-stacking.
pub fn sandwich_superop(q: &OperatorMatrix, w: &OperatorMatrix) -> Result<SuperoperatorMatrix> {
    if q.dim() != w.dim() {
        return Err(Error::Dimension(format!("sandwich of dims {} and {}", q.dim(), w.dim())));
    }
    Ok(SuperoperatorMatrix { m: kron(q, &w.transpose()).m, hilbert_dim: q.dim() })
}

/// `rho -> -i [h, rho]`.
pub fn commutator_superop(h: &OperatorMatrix) -> SuperoperatorMatrix {
    let d = h.dim();
    let m = Mat::from_fn(d * d, d * d, |r, s| {
        let (i, j) = (r / d, r % d);
        let (k, l) = (s / d, s % d);
        let mut v = ZERO;
        if j == l {
            v += h.m[(i, k)];
        }
        if i == k {
            v -= h.m[(l, j)];
        }
        -I * v
    });
    SuperoperatorMatrix { m, hilbert_dim: d }
}

/// `rho -> sum_a r_a (L rho L^+ - 1/2 {L^+ L, rho})`.
pub fn lindblad_superop(jumps: &[(OperatorMatrix, f64)]) -> Result<SuperoperatorMatrix> {
    let Some((first, _)) = jumps.first() else {
        return Err(Error::Dimension("empty jump list has no dimension".into()));
    };
    lindblad_superop_dim(first.dim(), jumps)
}

/// Like [`lindblad_superop`] but with an explicit dimension so an empty list gives zero.
pub fn lindblad_superop_dim(d: usize, jumps: &[(OperatorMatrix, f64)]) -> Result<SuperoperatorMatrix> {
    let mut out = Mat::<C64>::zeros(d * d, d * d);
    for (l, rate) in jumps {
        if l.dim() != d {
            return Err(Error::Dimension(format!("jump of dim {} in a dim-{d} dissipator", l.dim())));
        }
        if !(*rate >= 0.0) {
            return Err(Error::InvalidParameter(format!("jump rate {rate} is negative")));
        }
        if *rate == 0.0 {
            continue;
        }
        let ll = &l.dagger() * l;
        let lc = l.conj();
        for r in 0..d * d {
            let (i, j) = (r / d, r % d);
            for s in 0..d * d {
                let (k, q) = (s / d, s % d);
                let mut v = l.m[(i, k)] * lc.m[(j, q)];
                if j == q {
                    v -= ll.m[(i, k)] * 0.5;
                }
                if i == k {
                    v -= ll.m[(q, j)] * 0.5;
                }
                if v != ZERO {
                    out[(r, s)] += v * *rate;
                }
            }
        }
    }
    Ok(SuperoperatorMatrix { m: out, hilbert_dim: d })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() < 1e-13
    }

    #[test]
    fn kron_of_paulis() {
        let zz = kron(&OperatorMatrix::pauli_z(), &OperatorMatrix::pauli_z());
        let expect = OperatorMatrix::diagonal(&[ONE, -ONE, -ONE, ONE]);
        assert_eq!(zz, expect);
        let x = OperatorMatrix::from_fn(2, |i, j| c((i * 2 + j) as f64, 1.0));
        let blk = kron(&OperatorMatrix::identity(2), &x);
        for i in 0..4 {
            for j in 0..4 {
                let want = if i / 2 == j / 2 { x.get(i % 2, j % 2) } else { ZERO };
                assert_eq!(blk.get(i, j), want);
            }
        }
        let up = OperatorMatrix::outer(&[ONE, ZERO], &[ONE, ZERO]).unwrap();
        assert_eq!(kron(&up, &OperatorMatrix::identity(2)), OperatorMatrix::diagonal(&[ONE, ONE, ZERO, ZERO]));
    }

    #[test]
    fn partial_trace_examples() {
        let split = HilbertSplit::new(2, 2).unwrap();
        let x = kron(&OperatorMatrix::pauli_z(), &OperatorMatrix::pauli_x());
        let half = OperatorMatrix::identity(2).scale_re(0.5);
        assert!(weighted_partial_trace_first(&half, &x, split).unwrap().max_abs() < 1e-15);
        let up = OperatorMatrix::outer(&[ONE, ZERO], &[ONE, ZERO]).unwrap();
        let r = weighted_partial_trace_first(&up, &x, split).unwrap();
        assert_eq!(r, OperatorMatrix::pauli_x());
        assert!(weighted_partial_trace_first(&up, &OperatorMatrix::identity(3), split).is_err());
    }

    #[test]
    fn vectorization_examples() {
        assert_eq!(vectorize(&OperatorMatrix::identity(2)), vec![ONE, ZERO, ZERO, ONE]);
        let e01 = OperatorMatrix::outer(&[ONE, ZERO], &[ZERO, ONE]).unwrap();
        assert_eq!(vectorize(&e01), vec![ZERO, ONE, ZERO, ZERO]);
        let y = OperatorMatrix::pauli_y();
        assert_eq!(devectorize(&vectorize(&y)).unwrap(), y);
        assert!(devectorize(&[ONE; 3]).is_err());
    }

    #[test]
    fn sandwich_examples() {
        let id = sandwich_superop(&OperatorMatrix::identity(2), &OperatorMatrix::identity(2)).unwrap();
        assert_eq!(id.as_mat(), Mat::<C64>::identity(4, 4).as_ref());
        let s = sandwich_superop(&OperatorMatrix::pauli_x(), &OperatorMatrix::identity(2)).unwrap();
        let e00 = OperatorMatrix::outer(&[ONE, ZERO], &[ONE, ZERO]).unwrap();
        let e10 = OperatorMatrix::outer(&[ZERO, ONE], &[ONE, ZERO]).unwrap();
        assert_eq!(s.apply_op(&e00), e10);
        assert!(sandwich_superop(&OperatorMatrix::identity(2), &OperatorMatrix::identity(3)).is_err());
    }

    #[test]
    fn commutator_examples() {
        assert_eq!(commutator_superop(&OperatorMatrix::identity(3)).max_abs(), 0.0);
        // diagonal superoperator: -i (z_i - z_j) on |i><j|
        let s = commutator_superop(&OperatorMatrix::pauli_z());
        let diag: Vec<C64> = (0..4).map(|i| s.get(i, i)).collect();
        assert!(close(diag[0], ZERO) && close(diag[3], ZERO));
        assert!(close(diag[1], c(0.0, -2.0)) && close(diag[2], c(0.0, 2.0)));
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert_eq!(s.get(i, j), ZERO);
                }
            }
        }
    }

    #[test]
    fn lindblad_examples() {
        assert!(lindblad_superop(&[]).is_err());
        assert_eq!(lindblad_superop_dim(2, &[]).unwrap().max_abs(), 0.0);
        assert!(lindblad_superop(&[(OperatorMatrix::pauli_x(), -1.0)]).is_err());
        let s = lindblad_superop(&[(OperatorMatrix::sigma_minus(), 1.0)]).unwrap();
        for v in s.identity_left_action() {
            assert!(v.norm() < 1e-15);
        }
    }
}
