//! Closed forms for the boundary-driven chain (dissipator labels 0, 1&2, 3
//! with `c = 0, -1/2, -1/2, -1`).

use faer::Mat;

use super::engine::{resolve_stripe, Engine, LiteralForms, Mode, ZerothBlock};
use super::general::dyson_terms;
use super::{ResolverKind, StripeKey, StripeSpectrum, ZenoOptions};
use crate::error::{Error, Result};
use crate::linalg::dot_conj;
use crate::lindblad_model::ZenoSetup;
use crate::operator_algebra::{OperatorMatrix, C64};

/// Tolerance on the spectra of `f+` and `f-` agreeing.
const ISOSPECTRAL_TOL: f64 = 1e-9;

fn require_boundary(setup: &ZenoSetup) -> Result<f64> {
    match setup.basis.boundary {
        Some(t) if setup.basis.classes == [vec![0], vec![1, 2], vec![3]] => Ok(t.mu),
        _ => Err(Error::InvalidParameter("closed forms need the boundary dissipator".into())),
    }
}

fn ex(o: &OperatorMatrix, a: &[C64], b: &[C64]) -> C64 {
    o.braket(a, b)
}

fn w(o: &OperatorMatrix, a: &[C64], b: &[C64]) -> f64 {
    o.braket(a, b).norm_sqr()
}

/// `U_3 = g_0 - mu g_3^+`, the zeroth-order operator on both sides of stripe 3.
pub fn u3_operator(setup: &ZenoSetup) -> Result<OperatorMatrix> {
    let mu = require_boundary(setup)?;
    let g = &setup.coeffs.g;
    Ok(&g[0] - &g[3].dagger().scale_re(mu))
}

/// `f+ = g_0 + (1-mu)/2 g_3^+` and `f- = g_0 - (1+mu)/2 g_3^+`.
pub fn flipped_field_operators(setup: &ZenoSetup) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let mu = require_boundary(setup)?;
    let g = &setup.coeffs.g;
    let g3d = g[3].dagger();
    Ok((&g[0] + &g3d.scale_re((1.0 - mu) / 2.0), &g[0] - &g3d.scale_re((1.0 + mu) / 2.0)))
}

struct Ops {
    g1: OperatorMatrix,
    g2: OperatorMatrix,
    g3: OperatorMatrix,
    g1d: OperatorMatrix,
    g2d: OperatorMatrix,
    g3d: OperatorMatrix,
    g1g1: OperatorMatrix,
    g2g2: OperatorMatrix,
    g3g3: OperatorMatrix,
    g1g2: OperatorMatrix,
    g2g1: OperatorMatrix,
}

impl Ops {
    fn new(g: &[OperatorMatrix]) -> Self {
        let (g1d, g2d, g3d) = (g[1].dagger(), g[2].dagger(), g[3].dagger());
        Self {
            g1g1: &g1d * &g[1],
            g2g2: &g2d * &g[2],
            g3g3: &g3d * &g[3],
            g1g2: &g1d * &g[2],
            g2g1: &g2d * &g[1],
            g1: g[1].clone(),
            g2: g[2].clone(),
            g3: g[3].clone(),
            g1d,
            g2d,
            g3d,
        }
    }
}

struct Stripe3Literal<'a> {
    mu: f64,
    ops: Ops,
    vecs: &'a [Vec<C64>],
}

impl Stripe3Literal<'_> {
    fn coherence(&self, a: usize, b: usize) -> C64 {
        let (o, mu) = (&self.ops, self.mu);
        let (va, vb) = (&self.vecs[a], &self.vecs[b]);
        (1.0 + mu) * (ex(&o.g2g2, va, va) + ex(&o.g2g2, vb, vb) + 2.0 * ex(&o.g1, va, va) * ex(&o.g1d, vb, vb))
            + (1.0 - mu) * (ex(&o.g1g1, va, va) + ex(&o.g1g1, vb, vb) + 2.0 * ex(&o.g2, va, va) * ex(&o.g2d, vb, vb))
            + (1.0 - mu * mu) / 4.0
                * (ex(&o.g3g3, va, va) + ex(&o.g3g3, vb, vb) - 2.0 * ex(&o.g3, va, va) * ex(&o.g3d, vb, vb))
    }

    fn population_matrix(&self) -> Mat<C64> {
        let (o, mu, v) = (&self.ops, self.mu, self.vecs);
        let n = v.len();
        Mat::from_fn(n, n, |a, b| {
            let wm = (1.0 + mu) * w(&o.g1, &v[a], &v[b]) + (1.0 - mu) * w(&o.g2, &v[a], &v[b])
                - (1.0 - mu * mu) / 4.0 * w(&o.g3, &v[a], &v[b]);
            let mut t = wm;
            if a == b {
                t += (0..n)
                    .map(|q| {
                        (1.0 + mu) * w(&o.g2, &v[q], &v[a])
                            + (1.0 - mu) * w(&o.g1, &v[q], &v[a])
                            + (1.0 - mu * mu) / 4.0 * w(&o.g3, &v[q], &v[a])
                    })
                    .sum::<f64>();
            }
            C64::new(t, 0.0)
        })
    }
}

impl LiteralForms for Stripe3Literal<'_> {
    fn singleton(&self, m: Mode) -> Option<C64> {
        (m.alpha != m.beta).then(|| self.coherence(m.alpha, m.beta))
    }

    fn cluster(&self, modes: &[Mode]) -> Option<(ResolverKind, Mat<C64>, f64)> {
        let n = self.vecs.len();
        let diagonal = modes.len() == n && modes.iter().enumerate().all(|(i, m)| m.alpha == i && m.beta == i);
        diagonal.then(|| (ResolverKind::StripeT, self.population_matrix(), 2.0))
    }
}

/// Stripe 3: `-Gamma - i(e_a - e_b)` over the eigenvalues `e` of `U_3`, with
/// first-order corrections; the diagonal sector is resolved by `2 T / Gamma`.
pub fn stripe3_corrections(setup: &ZenoSetup, gamma: f64, opts: &ZenoOptions) -> Result<StripeSpectrum> {
    let mu = require_boundary(setup)?;
    let (vals, vecs) = u3_operator(setup)?.hermitian_eigen()?;
    let blocks = [ZerothBlock::from_orthonormal(3, (&vals, &vecs), (&vals, &vecs))];
    let terms = dyson_terms(setup, &[3]);
    let engine = Engine::new(&blocks, &terms);
    let literal = Stripe3Literal { mu, ops: Ops::new(&setup.coeffs.g), vecs: &vecs };
    let key = StripeKey { c: setup.basis.c[3], members: vec![3] };
    resolve_stripe(key, &engine, &literal, gamma, opts)
}

/// `a` are eigenvectors of `f+`, `at` of `f-`, with matching eigenvalue order.
struct Stripe12Literal<'a> {
    mu: f64,
    ops: Ops,
    a: &'a [Vec<C64>],
    at: &'a [Vec<C64>],
}

impl Stripe12Literal<'_> {
    /// Mixing of `|a_i><at_j|` (member 1) and `|at_i><a_j|` (member 2), `i != j`.
    fn pair_matrix(&self, i: usize, j: usize) -> Mat<C64> {
        let (o, mu) = (&self.ops, self.mu);
        let (a, b, at, bt) = (&self.a[i], &self.a[j], &self.at[i], &self.at[j]);
        let v11 = -(1.0 + mu) * ex(&o.g1, a, a) * ex(&o.g1d, bt, bt) - (1.0 - mu) * ex(&o.g2, a, a) * ex(&o.g2d, bt, bt)
            - mu * ex(&o.g1g1, a, a)
            + mu * ex(&o.g2g2, bt, bt);
        let v22 = -(1.0 + mu) * ex(&o.g1, at, at) * ex(&o.g1d, b, b) - (1.0 - mu) * ex(&o.g2, at, at) * ex(&o.g2d, b, b)
            + mu * ex(&o.g2g2, at, at)
            - mu * ex(&o.g1g1, b, b);
        let v12 = (1.0 + mu) * dot_conj(a, at) * ex(&o.g1g2, b, bt) + (1.0 - mu) * ex(&o.g1g2, a, at) * dot_conj(b, bt);
        let v21 = (1.0 + mu) * ex(&o.g2g1, at, a) * dot_conj(bt, b) + (1.0 - mu) * dot_conj(at, a) * ex(&o.g2g1, bt, b);
        let v = [[v11, v12], [v21, v22]];
        Mat::from_fn(2, 2, |r, s| v[r][s])
    }

    /// The `2n x 2n` population sector: `|a_i><at_i|` then `|at_i><a_i|`.
    fn block_matrix(&self) -> Mat<C64> {
        let (o, mu) = (&self.ops, self.mu);
        let n = self.a.len();
        let mut t = Mat::<C64>::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                let (a, b, at, bt) = (&self.a[i], &self.a[j], &self.at[i], &self.at[j]);
                let w1 = -(1.0 + mu) * ex(&o.g1, a, b) * ex(&o.g1d, bt, at) - (1.0 - mu) * ex(&o.g2, a, b) * ex(&o.g2d, bt, at);
                let w2 = -(1.0 + mu) * ex(&o.g1, at, bt) * ex(&o.g1d, b, a) - (1.0 - mu) * ex(&o.g2, at, bt) * ex(&o.g2d, b, a);
                let (p, q) = (1.0 - mu, 1.0 + mu);
                let w12 = p * dot_conj(a, bt) * ex(&o.g1g2, b, at) + q * dot_conj(b, at) * ex(&o.g1g2, a, bt);
                let w21 = p * dot_conj(at, b) * ex(&o.g2g1, bt, a) + q * dot_conj(bt, a) * ex(&o.g2g1, at, b);
                t[(i, j)] = w1;
                t[(n + i, n + j)] = w2;
                t[(i, n + j)] = w12;
                t[(n + i, j)] = w21;
            }
        }
        for i in 0..n {
            let f: f64 = (0..n)
                .map(|j| mu * w(&o.g2, &self.at[j], &self.at[i]) - mu * w(&o.g1, &self.a[j], &self.a[i]))
                .sum();
            t[(i, i)] += f;
            t[(n + i, n + i)] += f;
        }
        t
    }
}

impl LiteralForms for Stripe12Literal<'_> {
    fn cluster(&self, modes: &[Mode]) -> Option<(ResolverKind, Mat<C64>, f64)> {
        let n = self.a.len();
        if modes.len() == 2 {
            let (m0, m1) = (modes[0], modes[1]);
            if m0.block == 0 && m1.block == 1 && m0.alpha == m1.alpha && m0.beta == m1.beta && m0.alpha != m0.beta {
                return Some((ResolverKind::PairV, self.pair_matrix(m0.alpha, m0.beta), 2.0));
            }
            return None;
        }
        let diagonal = modes.len() == 2 * n
            && modes.iter().enumerate().all(|(r, m)| m.block == r / n && m.alpha == r % n && m.beta == r % n);
        diagonal.then(|| (ResolverKind::BlockT, self.block_matrix(), 2.0))
    }
}

/// The doubly degenerate stripe at `c = -1/2`: member 1 carries `|a_i><at_j|`,
/// member 2 carries `|at_i><a_j|`, both at `-Gamma/2 - i(e_i - e_j)`.
pub fn stripe12_spectrum(setup: &ZenoSetup, gamma: f64, opts: &ZenoOptions) -> Result<StripeSpectrum> {
    let mu = require_boundary(setup)?;
    let (fp, fm) = flipped_field_operators(setup)?;
    let (ep, vp) = fp.hermitian_eigen()?;
    let (em, vm) = fm.hermitian_eigen()?;
    let gap = ep.iter().zip(&em).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let scale = ep.iter().chain(&em).fold(1.0f64, |a, x| a.max(x.abs()));
    if gap > ISOSPECTRAL_TOL * scale {
        return Err(Error::Numerical(format!("f+ and f- spectra differ by {gap:.3e}")));
    }
    let blocks = [
        ZerothBlock::from_orthonormal(1, (&ep, &vp), (&em, &vm)),
        ZerothBlock::from_orthonormal(2, (&em, &vm), (&ep, &vp)),
    ];
    let terms = dyson_terms(setup, &[1, 2]);
    let engine = Engine::new(&blocks, &terms);
    let literal = Stripe12Literal { mu, ops: Ops::new(&setup.coeffs.g), a: &vp, at: &vm };
    let key = StripeKey { c: setup.basis.c[1], members: vec![1, 2] };
    resolve_stripe(key, &engine, &literal, gamma, opts)
}
