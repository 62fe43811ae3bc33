//! Stripes of an arbitrary diagonalizable dissipator, from the A/B/C and
//! gamma/epsilon/delta tensors.

use faer::Mat;

use super::engine::{resolve_stripe, Engine, Mode, NoLiterals, SandwichTerm, ZerothBlock, LiteralForms};
use super::{Resolution, StripeKey, StripeRecord, StripeSpectrum, ZenoOptions};
use crate::analysis::assignment::min_cost_assignment;
use crate::error::{Error, Result};
use crate::linalg;
use crate::lindblad_model::ZenoSetup;
use crate::operator_algebra::{sandwich_superop, OperatorMatrix, C64, I, ZERO};

/// `U_{k,s} = sum_n B_{n,s,k} g_n^+` and `W_{k,s} = sum_n A_{n,s,k} g_n^+`.
pub fn zeroth_operators(setup: &ZenoSetup, k: usize, s: usize) -> (OperatorMatrix, OperatorMatrix) {
    let d1 = setup.d1();
    let mut u = OperatorMatrix::zeros(d1);
    let mut w = OperatorMatrix::zeros(d1);
    for (n, g) in setup.coeffs.g.iter().enumerate() {
        let gd = g.dagger();
        u = &u + &gd.scale(setup.coeffs.b(n, s, k));
        w = &w + &gd.scale(setup.coeffs.a(n, s, k));
    }
    (u, w)
}

fn outside(setup: &ZenoSetup, class: &[usize]) -> Vec<usize> {
    (0..setup.basis.len()).filter(|n| !class.contains(n)).collect()
}

/// First-order sandwich terms of the stripe generator for `class`, with block
/// positions given by the order of `class`:
/// `sum_{n not in class} 1/(c_n - c_k) sum_{z,m>0} (-gamma g_m R_s g_z^+ + eps g_z^+ g_m R_s + delta R_s g_z^+ g_m)`.
pub fn dyson_terms(setup: &ZenoSetup, class: &[usize]) -> Vec<SandwichTerm> {
    let kk = setup.basis.len();
    let d1 = setup.d1();
    let g = &setup.coeffs.g;
    let gd: Vec<OperatorMatrix> = g.iter().map(|x| x.dagger()).collect();
    let others = outside(setup, class);
    let t = &setup.dyson;
    let id = OperatorMatrix::identity(d1);
    let mut terms = Vec::new();
    for (bk, &k) in class.iter().enumerate() {
        let weights: Vec<(usize, C64)> = others.iter().map(|&n| (n, (setup.basis.c[n] - setup.basis.c[k]).inv())).collect();
        for (bs, &s) in class.iter().enumerate() {
            let mut left = OperatorMatrix::zeros(d1);
            let mut right = OperatorMatrix::zeros(d1);
            for z in 1..kk {
                for m in 1..kk {
                    let mut gsum = ZERO;
                    let mut esum = ZERO;
                    let mut dsum = ZERO;
                    for &(n, w) in &weights {
                        gsum += w * t.gamma.get([n, s, k, m, z]);
                        esum += w * t.eps.get([n, s, k, z, m]);
                        dsum += w * t.delta.get([n, s, k, z, m]);
                    }
                    if gsum != ZERO {
                        terms.push(SandwichTerm { to: bk, from: bs, coef: -gsum, left: g[m].clone(), right: gd[z].clone() });
                    }
                    if esum != ZERO || dsum != ZERO {
                        let p = &gd[z] * &g[m];
                        left = &left + &p.scale(esum);
                        right = &right + &p.scale(dsum);
                    }
                }
            }
            terms.push(SandwichTerm { to: bk, from: bs, coef: C64::new(1.0, 0.0), left, right: id.clone() });
            terms.push(SandwichTerm { to: bk, from: bs, coef: C64::new(1.0, 0.0), left: id.clone(), right });
        }
    }
    terms
}

/// Largest zeroth-order coupling between different members of a class.
fn cross_member_coupling(setup: &ZenoSetup, class: &[usize]) -> f64 {
    let mut worst = 0.0f64;
    for &k in class {
        for &s in class {
            if k != s {
                let (u, w) = zeroth_operators(setup, k, s);
                worst = worst.max(u.max_abs()).max(w.max_abs());
            }
        }
    }
    worst
}

fn blocks_for(setup: &ZenoSetup, class: &[usize]) -> Result<Vec<ZerothBlock>> {
    class
        .iter()
        .map(|&k| {
            let (u, w) = zeroth_operators(setup, k, k);
            ZerothBlock::new(k, &u, &w)
        })
        .collect()
}

/// First-order correction (times Gamma) of an isolated mode `|x_a><y_b|` of a
/// nondegenerate stripe `k`, term by term from the tensors.
pub fn eq18_correction(setup: &ZenoSetup, k: usize, block: &ZerothBlock, alpha: usize, beta: usize) -> C64 {
    let kk = setup.basis.len();
    let g = &setup.coeffs.g;
    let t = &setup.dyson;
    let class = setup.basis.class_of(k).to_vec();
    let mut total = ZERO;
    for z in 1..kk {
        let gzd = g[z].dagger();
        for m in 1..kk {
            let prod = &gzd * &g[m];
            let gm_l = block.left_diagonal(&g[m])[alpha];
            let gz_r = block.right_diagonal(&gzd)[beta];
            let p_l = block.left_diagonal(&prod)[alpha];
            let p_r = block.right_diagonal(&prod)[beta];
            for n in outside(setup, &class) {
                let w = (setup.basis.c[n] - setup.basis.c[k]).inv();
                total += w
                    * (-t.gamma.get([n, k, k, m, z]) * gm_l * gz_r
                        + t.eps.get([n, k, k, z, m]) * p_l
                        + t.delta.get([n, k, k, z, m]) * p_r);
            }
        }
    }
    total
}

struct Eq18Literal<'a> {
    setup: &'a ZenoSetup,
    k: usize,
    block: &'a ZerothBlock,
}

impl LiteralForms for Eq18Literal<'_> {
    fn singleton(&self, m: Mode) -> Option<C64> {
        Some(eq18_correction(self.setup, self.k, self.block, m.alpha, m.beta))
    }
}

/// Stripe `k` with a nondegenerate dissipator eigenvalue.
pub fn stripe_nondegenerate_general(k: usize, setup: &ZenoSetup, gamma: f64, opts: &ZenoOptions) -> Result<StripeSpectrum> {
    let class = setup.basis.class_of(k).to_vec();
    if class.len() != 1 {
        return Err(Error::InvalidParameter(format!("label {k} sits in a degenerate class {class:?}")));
    }
    let blocks = blocks_for(setup, &class)?;
    let terms = dyson_terms(setup, &class);
    let engine = Engine::new(&blocks, &terms);
    let key = StripeKey { c: setup.basis.c[k], members: class };
    resolve_stripe(key, &engine, &Eq18Literal { setup, k, block: &blocks[0] }, gamma, opts)
}

/// Factorized treatment of a class whose members do not mix at zeroth order.
pub fn stripe_factorized(class: &[usize], setup: &ZenoSetup, gamma: f64, opts: &ZenoOptions) -> Result<StripeSpectrum> {
    let scale = setup.coeffs.g.iter().map(|g| g.max_abs()).fold(1.0, f64::max);
    if cross_member_coupling(setup, class) > 1e-12 * scale {
        return Err(Error::Numerical("class members mix at zeroth order".into()));
    }
    let blocks = blocks_for(setup, class)?;
    let terms = dyson_terms(setup, class);
    let engine = Engine::new(&blocks, &terms);
    let key = StripeKey { c: setup.basis.c[class[0]], members: class.to_vec() };
    resolve_stripe(key, &engine, &NoLiterals, gamma, opts)
}

/// The stripe generator on `deg * d1^2` dimensions: `Gamma c`, the zeroth-order
/// `-i(U R - R W)` couplings and, optionally, the 1/Gamma terms.
pub fn assembled_stripe_generator(class: &[usize], setup: &ZenoSetup, gamma: f64, first_order: bool) -> Result<Mat<C64>> {
    let d1 = setup.d1();
    let n1 = d1 * d1;
    let deg = class.len();
    let id = OperatorMatrix::identity(d1);
    let mut out = Mat::<C64>::zeros(deg * n1, deg * n1);
    let mut add = |bk: usize, bs: usize, coef: C64, sup: &crate::operator_algebra::SuperoperatorMatrix| {
        for r in 0..n1 {
            for s in 0..n1 {
                let v = sup.get(r, s);
                if v != ZERO {
                    out[(bk * n1 + r, bs * n1 + s)] += coef * v;
                }
            }
        }
    };
    for (bk, &k) in class.iter().enumerate() {
        for (bs, &s) in class.iter().enumerate() {
            let (u, w) = zeroth_operators(setup, k, s);
            add(bk, bs, -I, &sandwich_superop(&u, &id)?);
            add(bk, bs, I, &sandwich_superop(&id, &w)?);
        }
    }
    if first_order {
        for t in dyson_terms(setup, class) {
            add(t.to, t.from, t.coef / gamma, &sandwich_superop(&t.left, &t.right)?);
        }
    }
    let c = setup.basis.c[class[0]] * gamma;
    for i in 0..deg * n1 {
        out[(i, i)] += c;
    }
    Ok(out)
}

/// Direct eigensolve of the assembled stripe generator (no factorized shortcut).
///
/// When the members do not mix at zeroth order, records are labelled by the
/// factorized modes (paired by optimal assignment); otherwise `alpha` counts
/// eigenvalues in canonical order and `beta` is zero.
pub fn general_degenerate_stripe(class: &[usize], setup: &ZenoSetup, gamma: f64, _opts: &ZenoOptions) -> Result<StripeSpectrum> {
    let full = assembled_stripe_generator(class, setup, gamma, true)?;
    let zeroth = assembled_stripe_generator(class, setup, gamma, false)?;
    let mut lam = linalg::eigenvalues(full.as_ref())?;
    crate::exact_spectrum::sort_canonical(&mut lam);
    let key = StripeKey { c: setup.basis.c[class[0]], members: class.to_vec() };
    let n = lam.len();
    let labelled: Option<Vec<(usize, usize, usize, C64)>> = blocks_for(setup, class).ok().and_then(|blocks| {
        let scale = setup.coeffs.g.iter().map(|g| g.max_abs()).fold(1.0, f64::max);
        if cross_member_coupling(setup, class) > 1e-12 * scale {
            return None;
        }
        let c = setup.basis.c[class[0]] * gamma;
        let mut out = Vec::with_capacity(n);
        for b in &blocks {
            for a in 0..b.dim() {
                for bb in 0..b.dim() {
                    out.push((b.member, a, bb, c + b.frequency(a, bb)));
                }
            }
        }
        Some(out)
    });
    let zero_vals: Vec<(usize, usize, usize, C64)> = match labelled {
        Some(v) => v,
        None => {
            let mut z = linalg::eigenvalues(zeroth.as_ref())?;
            crate::exact_spectrum::sort_canonical(&mut z);
            z.into_iter().enumerate().map(|(i, v)| (class[0], i, 0, v)).collect()
        }
    };
    let cost: Vec<f64> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| (lam[i] - zero_vals[j].3).norm()).collect();
    let perm = min_cost_assignment(n, &cost);
    let mut records: Vec<StripeRecord> = perm
        .iter()
        .enumerate()
        .map(|(i, &j)| {
            let (member, alpha, beta, l0) = zero_vals[j];
            StripeRecord {
                member,
                alpha,
                beta,
                lambda0: l0,
                correction: lam[i] - l0,
                left_factor: None,
                right_factor: None,
                resolution: Resolution::Direct,
                near_degenerate: false,
            }
        })
        .collect();
    records.sort_by(|a, b| (a.member, a.alpha, a.beta).cmp(&(b.member, b.alpha, b.beta)));
    Ok(StripeSpectrum { key, records, resolvers: Vec::new() })
}
