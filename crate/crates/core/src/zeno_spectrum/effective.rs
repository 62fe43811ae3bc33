//! Stripe 0: a Lindbladian on the free spins with Hamiltonian `g_0`, a Lamb
//! shift and effective jumps, all suppressed by 1/Gamma.

use faer::Mat;
use serde::Serialize;

use super::engine::{resolve_stripe, Engine, LiteralForms, Mode, SandwichTerm, ZerothBlock};
use super::{ResolverKind, StripeKey, StripeSpectrum, ZenoOptions};
use crate::error::{Error, Result};
use crate::lindblad_model::ZenoSetup;
use crate::operator_algebra::{OperatorMatrix, C64, I, ONE, ZERO};

/// Rate-matrix eigenvalues below this (relative to the largest) count as zero.
const NEGATIVE_RATE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, Serialize)]
pub struct EffectiveModel {
    /// `g_0`, the Hamiltonian seen by the free spins at zeroth order.
    #[serde(skip)]
    pub h_d: OperatorMatrix,
    /// `sum_{mn} beta_mn g_m^+ g_n`, to be divided by Gamma.
    #[serde(skip)]
    pub lamb_shift: OperatorMatrix,
    /// Jumps `L_p` with the rate absorbed, to be divided by Gamma.
    #[serde(skip)]
    pub effective_jumps: Vec<OperatorMatrix>,
    /// Rates (eigenvalues of `gamma_matrix`) paired with `effective_jumps`.
    pub rates: Vec<f64>,
    #[serde(skip)]
    pub y_matrix: Mat<C64>,
    #[serde(skip)]
    pub beta_matrix: Mat<C64>,
    #[serde(skip)]
    pub gamma_matrix: Mat<C64>,
}

/// `Y_mn = -tr(phi_m^+ phi_n psi_0) / conj(c_m)` over the non-kernel labels,
/// split into `gamma = Y + Y^+` and `beta = (Y - Y^+) / 2i`.
pub fn effective_model_stripe0(setup: &ZenoSetup) -> Result<EffectiveModel> {
    let basis = &setup.basis;
    let k = basis.len();
    if basis.classes[0] != [0] {
        return Err(Error::DegenerateKernel(basis.classes[0].len()));
    }
    let n = k - 1;
    let psi0 = &basis.psi[0];
    let y = Mat::from_fn(n, n, |m, q| {
        let (m, q) = (m + 1, q + 1);
        let prod = &basis.phi[m].dagger() * &basis.phi[q];
        -prod.trace_product(psi0) / basis.c[m].conj()
    });
    let gamma_matrix = Mat::from_fn(n, n, |a, b| y[(a, b)] + y[(b, a)].conj());
    let beta_matrix = Mat::from_fn(n, n, |a, b| (y[(a, b)] - y[(b, a)].conj()) / (2.0 * I));
    let g = &setup.coeffs.g;
    let d1 = setup.d1();
    let mut lamb = OperatorMatrix::zeros(d1);
    for a in 0..n {
        for b in 0..n {
            let coef = beta_matrix[(a, b)];
            if coef != ZERO {
                lamb = &lamb + &(&g[a + 1].dagger() * &g[b + 1]).scale(coef);
            }
        }
    }
    let (w, v) = OperatorMatrix::from_mat(gamma_matrix.clone())?.hermitian_eigen()?;
    let wmax = w.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    let mut jumps = Vec::new();
    let mut rates = Vec::new();
    for (p, &wp) in w.iter().enumerate() {
        if wp < -NEGATIVE_RATE_TOL * wmax.max(1.0) {
            return Err(Error::Numerical(format!("effective rate matrix has eigenvalue {wp:.3e}")));
        }
        let wp = wp.max(0.0);
        let mut l = OperatorMatrix::zeros(d1);
        for q in 0..n {
            l = &l + &g[q + 1].scale(v[p][q]);
        }
        jumps.push(l.scale_re(wp.sqrt()));
        rates.push(wp);
    }
    Ok(EffectiveModel {
        h_d: g[0].clone(),
        lamb_shift: lamb,
        effective_jumps: jumps,
        rates,
        y_matrix: y,
        beta_matrix,
        gamma_matrix,
    })
}

impl EffectiveModel {
    /// First-order generator terms: `-i[H_a, R] + sum_p (L_p R L_p^+ - {L_p^+ L_p, R}/2)`.
    pub fn terms(&self) -> Vec<SandwichTerm> {
        let d = self.h_d.dim();
        let id = OperatorMatrix::identity(d);
        let mut anti = OperatorMatrix::zeros(d);
        let mut out = Vec::new();
        for l in &self.effective_jumps {
            let ld = l.dagger();
            anti = &anti + &(&ld * l);
            out.push(SandwichTerm { to: 0, from: 0, coef: ONE, left: l.clone(), right: ld });
        }
        let half = anti.scale_re(0.5);
        let ih = self.lamb_shift.scale(I);
        out.push(SandwichTerm { to: 0, from: 0, coef: ONE, left: &(-&ih) - &half, right: id.clone() });
        out.push(SandwichTerm { to: 0, from: 0, coef: ONE, left: id, right: &ih - &half });
        out
    }

    /// Classical rate matrix on the eigenbasis populations of `g_0`:
    /// `M_ab = sum_p |<a|L_p|b>|^2` off the diagonal, columns summing to zero.
    pub fn markov_matrix(&self, basis: &[Vec<C64>]) -> Mat<f64> {
        let n = basis.len();
        let mut m = Mat::<f64>::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    m[(a, b)] = self.effective_jumps.iter().map(|l| l.braket(&basis[a], &basis[b]).norm_sqr()).sum();
                }
            }
        }
        for b in 0..n {
            let s: f64 = (0..n).filter(|&a| a != b).map(|a| m[(a, b)]).sum();
            m[(b, b)] = -s;
        }
        m
    }

    /// First-order correction (times Gamma) of the coherence `|a><b|`.
    pub fn coherence_correction(&self, va: &[C64], vb: &[C64]) -> C64 {
        let mut corr = ZERO;
        for l in &self.effective_jumps {
            let ld = l.dagger();
            let ll = &ld * l;
            corr += l.braket(va, va) * ld.braket(vb, vb) - 0.5 * ll.braket(va, va) - 0.5 * ll.braket(vb, vb);
        }
        corr - I * (self.lamb_shift.braket(va, va) - self.lamb_shift.braket(vb, vb))
    }
}

struct Stripe0Literal<'a> {
    model: &'a EffectiveModel,
    vecs: &'a [Vec<C64>],
}

impl LiteralForms for Stripe0Literal<'_> {
    fn singleton(&self, m: Mode) -> Option<C64> {
        (m.alpha != m.beta).then(|| self.model.coherence_correction(&self.vecs[m.alpha], &self.vecs[m.beta]))
    }

    fn cluster(&self, modes: &[Mode]) -> Option<(ResolverKind, Mat<C64>, f64)> {
        let n = self.vecs.len();
        let diagonal = modes.len() == n && modes.iter().enumerate().all(|(i, m)| m.alpha == i && m.beta == i);
        if !diagonal {
            return None;
        }
        let m = self.model.markov_matrix(self.vecs);
        Some((ResolverKind::Markov, Mat::from_fn(n, n, |a, b| C64::new(m[(a, b)], 0.0)), 1.0))
    }
}

/// Stripe 0 eigenvalues `i(e_b - e_a) + O(1/Gamma)`; the population sector is
/// resolved by the classical rate matrix.
pub fn stripe0_eigenvalues(model: &EffectiveModel, gamma: f64, opts: &ZenoOptions) -> Result<StripeSpectrum> {
    let (vals, vecs) = model.h_d.hermitian_eigen()?;
    let blocks = [ZerothBlock::from_orthonormal(0, (&vals, &vecs), (&vals, &vecs))];
    let terms = model.terms();
    let engine = Engine::new(&blocks, &terms);
    let key = StripeKey { c: ZERO, members: vec![0] };
    resolve_stripe(key, &engine, &Stripe0Literal { model, vecs: &vecs }, gamma, opts)
}

/// The stripe-0 rate matrix in the eigenbasis of `g_0`.
pub fn stripe0_markov_matrix(setup: &ZenoSetup) -> Result<Mat<f64>> {
    let model = effective_model_stripe0(setup)?;
    let (_, vecs) = model.h_d.hermitian_eigen()?;
    Ok(model.markov_matrix(&vecs))
}
