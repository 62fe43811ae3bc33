//! Factorized zeroth-order modes of one stripe and first-order degenerate
//! perturbation theory on top of them.
//!
//! A stripe with class members `k_0, k_1, ...` has modes `|x_a><y_b|` per
//! member, where `x_a` are right eigenvectors of `U_k` and `<y_b|` left
//! eigenvectors of `W_k`. Zeroth-order eigenvalues are `Gamma c - i (u_a - w_b)`.
//! First-order couplings come from a list of sandwich terms `coef * A R B`
//! mapping member `from` into member `to`.

use std::collections::BTreeMap;

use faer::Mat;

use super::{DegeneracyResolver, Resolution, ResolverKind, StripeKey, StripeRecord, StripeSpectrum, ZenoOptions};
use crate::analysis::assignment::min_cost_assignment;
use crate::error::{Error, Result};
use crate::linalg;
use crate::operator_algebra::{OperatorMatrix, C64, I, ZERO};

/// Relative hermiticity defect below which the orthonormal eigensolver is used.
const HERMITIAN_TOL: f64 = 1e-12;
/// Reciprocal condition bound for the eigenvector matrix of `U_k` or `W_k`.
const DEFECTIVE_RCOND: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct ZerothBlock {
    pub member: usize,
    pub u: Vec<C64>,
    pub w: Vec<C64>,
    left: Mat<C64>,
    left_dual: Mat<C64>,
    right: Mat<C64>,
    right_dual: Mat<C64>,
}

fn diagonalize(op: &OperatorMatrix) -> Result<(Vec<C64>, Mat<C64>, Mat<C64>)> {
    let d = op.dim();
    if op.hermiticity_defect() <= HERMITIAN_TOL * op.max_abs().max(1.0) {
        let (vals, vecs) = op.hermitian_eigen()?;
        let p = Mat::from_fn(d, d, |i, j| vecs[j][i]);
        let pinv = Mat::from_fn(d, d, |i, j| vecs[i][j].conj());
        return Ok((vals.into_iter().map(|v| C64::new(v, 0.0)).collect(), p, pinv));
    }
    let (vals, vecs) = linalg::eig(op.as_mat(), true)?;
    let vecs = linalg::normalize_columns(&vecs.expect("requested"));
    let mut idx: Vec<usize> = (0..d).collect();
    idx.sort_by(|&a, &b| crate::exact_spectrum::canonical_order(&vals[a], &vals[b]).then(a.cmp(&b)));
    let p = Mat::from_fn(d, d, |i, j| vecs[(i, idx[j])]);
    let pinv = linalg::inverse(p.as_ref(), DEFECTIVE_RCOND)
        .map_err(|_| Error::NonDiagonalizable("zeroth-order operator is defective".into()))?;
    Ok((idx.iter().map(|&i| vals[i]).collect(), p, pinv))
}

impl ZerothBlock {
    /// Diagonalizes `U` (acting from the left) and `W` (acting from the right).
    pub fn new(member: usize, u_op: &OperatorMatrix, w_op: &OperatorMatrix) -> Result<Self> {
        let (u, left, left_dual) = diagonalize(u_op)?;
        let (w, right, right_dual) = diagonalize(w_op)?;
        Ok(Self { member, u, w, left, left_dual, right, right_dual })
    }

    /// Uses given orthonormal eigenvectors for both sides (Hermitian `U` and `W`).
    pub fn from_orthonormal(member: usize, u: (&[f64], &[Vec<C64>]), w: (&[f64], &[Vec<C64>])) -> Self {
        let d = u.0.len();
        let cols = |v: &[Vec<C64>]| Mat::from_fn(d, d, |i, j| v[j][i]);
        let dual = |v: &[Vec<C64>]| Mat::from_fn(d, d, |i, j| v[i][j].conj());
        Self {
            member,
            u: u.0.iter().map(|&x| C64::new(x, 0.0)).collect(),
            w: w.0.iter().map(|&x| C64::new(x, 0.0)).collect(),
            left: cols(u.1),
            left_dual: dual(u.1),
            right: cols(w.1),
            right_dual: dual(w.1),
        }
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    /// `|x_a>`
    pub fn left_factor(&self, a: usize) -> Vec<C64> {
        linalg::column(self.left.as_ref(), a)
    }

    /// `|y_b>` such that the mode is `|x_a><y_b|`.
    pub fn right_factor(&self, b: usize) -> Vec<C64> {
        linalg::row(self.right_dual.as_ref(), b).into_iter().map(|z| z.conj()).collect()
    }

    /// Diagonal of `left_dual * op * left`, i.e. `<x_a^dual| op |x_a>` for every `a`.
    pub fn left_diagonal(&self, op: &OperatorMatrix) -> Vec<C64> {
        let t = &self.left_dual * (op.as_mat() * &self.left);
        (0..self.dim()).map(|a| t[(a, a)]).collect()
    }

    /// Diagonal of `right_dual * op * right`, i.e. `<y_b| op |y_b^dual>` for every `b`.
    pub fn right_diagonal(&self, op: &OperatorMatrix) -> Vec<C64> {
        let t = &self.right_dual * (op.as_mat() * &self.right);
        (0..self.dim()).map(|b| t[(b, b)]).collect()
    }

    /// `-i (u_a - w_b)`, the zeroth-order value without the `Gamma c` shift.
    pub fn frequency(&self, a: usize, b: usize) -> C64 {
        -I * (self.u[a] - self.w[b])
    }
}

/// `coef * left R right`, mapping member `from` into member `to` (block positions).
#[derive(Clone, Debug)]
pub struct SandwichTerm {
    pub to: usize,
    pub from: usize,
    pub coef: C64,
    pub left: OperatorMatrix,
    pub right: OperatorMatrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mode {
    pub block: usize,
    pub alpha: usize,
    pub beta: usize,
}

/// Closed-form overrides supplied by specialized stripe paths.
pub trait LiteralForms {
    /// First-order diagonal element (times Gamma) for an isolated mode.
    fn singleton(&self, _mode: Mode) -> Option<C64> {
        None
    }
    /// A matrix and its scale for an exactly degenerate cluster; the
    /// first-order block is `scale * matrix`.
    fn cluster(&self, _modes: &[Mode]) -> Option<(ResolverKind, Mat<C64>, f64)> {
        None
    }
}

pub struct NoLiterals;
impl LiteralForms for NoLiterals {}

pub struct Engine<'a> {
    pub blocks: &'a [ZerothBlock],
    terms: BTreeMap<(usize, usize), Vec<(C64, Mat<C64>, Mat<C64>)>>,
}

impl<'a> Engine<'a> {
    pub fn new(blocks: &'a [ZerothBlock], terms: &[SandwichTerm]) -> Self {
        let mut map: BTreeMap<(usize, usize), Vec<(C64, Mat<C64>, Mat<C64>)>> = BTreeMap::new();
        for t in terms {
            if t.coef == ZERO {
                continue;
            }
            let (bk, bs) = (&blocks[t.to], &blocks[t.from]);
            let a = &bk.left_dual * (t.left.as_mat() * &bs.left);
            let b = &bs.right_dual * (t.right.as_mat() * &bk.right);
            map.entry((t.to, t.from)).or_default().push((t.coef, a, b));
        }
        Self { blocks, terms: map }
    }

    pub fn modes(&self) -> Vec<Mode> {
        let mut out = Vec::new();
        for (block, b) in self.blocks.iter().enumerate() {
            let d = b.dim();
            for alpha in 0..d {
                for beta in 0..d {
                    out.push(Mode { block, alpha, beta });
                }
            }
        }
        out
    }

    pub fn frequency(&self, m: Mode) -> C64 {
        self.blocks[m.block].frequency(m.alpha, m.beta)
    }

    /// First-order matrix element `<dual_i| Q |mode_j>`, Gamma-independent.
    pub fn coupling(&self, i: Mode, j: Mode) -> C64 {
        let Some(list) = self.terms.get(&(i.block, j.block)) else {
            return ZERO;
        };
        list.iter().map(|(c, a, b)| c * a[(i.alpha, j.alpha)] * b[(j.beta, i.beta)]).sum()
    }

    pub fn coupling_block(&self, modes: &[Mode]) -> Mat<C64> {
        Mat::from_fn(modes.len(), modes.len(), |r, s| self.coupling(modes[r], modes[s]))
    }
}

/// Connected components of modes whose zeroth-order values lie within `window`.
pub fn cluster_modes(freqs: &[C64], window: f64) -> Vec<Vec<usize>> {
    let n = freqs.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    // sort by imaginary part so only a sliding band has to be compared
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| freqs[a].im.total_cmp(&freqs[b].im).then(a.cmp(&b)));
    for (pos, &a) in order.iter().enumerate() {
        for &b in &order[pos + 1..] {
            if freqs[b].im - freqs[a].im > window {
                break;
            }
            if (freqs[a] - freqs[b]).norm() <= window {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

/// Size of the spread of zeroth-order values, used to scale clustering windows.
pub fn frequency_spread(freqs: &[C64]) -> f64 {
    if freqs.is_empty() {
        return 0.0;
    }
    let (mut rmin, mut rmax, mut imin, mut imax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for f in freqs {
        rmin = rmin.min(f.re);
        rmax = rmax.max(f.re);
        imin = imin.min(f.im);
        imax = imax.max(f.im);
    }
    (rmax - rmin).hypot(imax - imin)
}

/// Runs clustering and first-order resolution for one stripe.
pub fn resolve_stripe(
    key: StripeKey,
    engine: &Engine<'_>,
    literals: &dyn LiteralForms,
    gamma: f64,
    opts: &ZenoOptions,
) -> Result<StripeSpectrum> {
    let modes = engine.modes();
    let freqs: Vec<C64> = modes.iter().map(|&m| engine.frequency(m)).collect();
    let spread = frequency_spread(&freqs).max(1.0);
    let exact_tol = super::EXACT_DEGENERACY_REL * spread;
    let window = (opts.window_rel * spread).max(exact_tol);
    let flag_window = (super::FLAG_WINDOW_REL * spread).max(window);
    let clusters = cluster_modes(&freqs, window);
    let flag_clusters = cluster_modes(&freqs, flag_window);
    let mut flag_size = vec![0usize; modes.len()];
    for fc in &flag_clusters {
        for &i in fc {
            flag_size[i] = fc.len();
        }
    }

    let shift = key.c * gamma;
    let mut records = Vec::with_capacity(modes.len());
    let mut resolvers = Vec::new();
    for cl in clusters {
        let cmodes: Vec<Mode> = cl.iter().map(|&i| modes[i]).collect();
        let near = cl.iter().any(|&i| flag_size[i] > cl.len());
        if cl.len() == 1 {
            let m = cmodes[0];
            let q = literals.singleton(m).unwrap_or_else(|| engine.coupling(m, m));
            let b = &engine.blocks[m.block];
            records.push(StripeRecord {
                member: b.member,
                alpha: m.alpha,
                beta: m.beta,
                lambda0: shift + freqs[cl[0]],
                correction: q / gamma,
                left_factor: Some(b.left_factor(m.alpha)),
                right_factor: Some(b.right_factor(m.beta)),
                resolution: Resolution::Single,
                near_degenerate: near,
            });
            continue;
        }
        let f0: Vec<C64> = cl.iter().map(|&i| freqs[i]).collect();
        let exact = f0.iter().all(|f| (f - f0[0]).norm() <= exact_tol);
        let literal = if exact { literals.cluster(&cmodes) } else { None };
        let (kind, matrix, scale) = match literal {
            Some(l) => l,
            None => (ResolverKind::Cluster, engine.coupling_block(&cmodes), 1.0),
        };
        let n = cl.len();
        // full first-order block in the shifted frame
        let full = Mat::from_fn(n, n, |r, s| {
            let q = matrix[(r, s)] * (scale / gamma);
            if r == s && !exact { q + f0[r] } else { q }
        });
        let eig = linalg::eig(full.as_ref(), true)?;
        let (vals, vecs) = (eig.0, eig.1.expect("requested"));
        let resolved = linalg::eigenvalues(matrix.as_ref())?;
        // pair each eigenvalue with the mode carrying its largest weight
        let cost: Vec<f64> = (0..n).flat_map(|r| (0..n).map(move |e| (r, e))).map(|(r, e)| -vecs[(r, e)].norm()).collect();
        let perm = min_cost_assignment(n, &cost);
        for (r, &e) in perm.iter().enumerate() {
            let m = cmodes[r];
            let lambda0 = shift + f0[r];
            let lam = if exact { lambda0 + vals[e] } else { shift + vals[e] };
            records.push(StripeRecord {
                member: engine.blocks[m.block].member,
                alpha: m.alpha,
                beta: m.beta,
                lambda0,
                correction: lam - lambda0,
                left_factor: None,
                right_factor: None,
                resolution: if exact { Resolution::Degenerate(kind) } else { Resolution::NearDegenerate },
                near_degenerate: near || !exact,
            });
        }
        resolvers.push(DegeneracyResolver {
            kind,
            modes: cmodes.iter().map(|m| (engine.blocks[m.block].member, m.alpha, m.beta)).collect(),
            matrix,
            scale,
            resolved_corrections: resolved,
        });
    }
    records.sort_by(|a, b| (a.member, a.alpha, a.beta).cmp(&(b.member, b.alpha, b.beta)));
    Ok(StripeSpectrum { key, records, resolvers })
}
