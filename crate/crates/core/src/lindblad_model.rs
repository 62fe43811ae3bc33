//! XYZ chain with a dissipated boundary spin, dissipator eigenbasis and the
//! structure coefficients of the strong-dissipation expansion.

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::operator_algebra::{
    c, commutator_superop, devectorize, kron, lindblad_superop, vectorize, weighted_partial_trace_first, HilbertSplit,
    OperatorMatrix, SuperoperatorMatrix, C64, ONE, ZERO,
};

/// Null-space threshold on singular values of the vectorized dissipator.
pub const KERNEL_TOL: f64 = 1e-9;
/// Relative threshold for two dissipator eigenvalues to share a class.
pub const CLASS_TOL: f64 = 1e-9;
/// Biorthogonality and reconstruction tolerance.
pub const BASIS_TOL: f64 = 1e-10;
/// Largest number of free spins handled by the dense code.
pub const MAX_FREE_SPINS: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XYZChainConfig {
    /// Number of dissipation-free spins N.
    pub n_free: usize,
    /// Couplings (Jx, Jy, Jz).
    pub j: [f64; 3],
    pub theta: f64,
    pub phi: f64,
    /// Target polarization in [-1, 1].
    pub mu: f64,
    /// Dissipation strength.
    pub gamma: f64,
}

impl XYZChainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_free < 1 {
            return Err(Error::InvalidParameter("model.n_free must be at least 1".into()));
        }
        if self.n_free > MAX_FREE_SPINS {
            return Err(Error::Envelope(format!("model.n_free = {} exceeds {MAX_FREE_SPINS}", self.n_free)));
        }
        let finite = self.j.iter().chain([&self.theta, &self.phi, &self.mu, &self.gamma]).all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("model fields must be finite".into()));
        }
        if self.mu.abs() > 1.0 {
            return Err(Error::InvalidParameter(format!("model.mu = {} outside [-1, 1]", self.mu)));
        }
        if !(self.gamma > 0.0) {
            return Err(Error::InvalidParameter(format!("model.gamma = {} must be positive", self.gamma)));
        }
        Ok(())
    }

    pub fn d1(&self) -> usize {
        1 << self.n_free
    }

    pub fn dim(&self) -> usize {
        2 * self.d1()
    }

    pub fn split(&self) -> HilbertSplit {
        HilbertSplit { d0: 2, d1: self.d1() }
    }

    pub fn with_gamma(&self, gamma: f64) -> Self {
        Self { gamma, ..self.clone() }
    }
}

/// Ready-made parameter sets used throughout the examples and tests.
pub mod presets {
    use super::XYZChainConfig;
    use std::f64::consts::PI;

    /// N = 4 XXZ-like chain targeting a pure state in the x direction.
    pub fn pure_target_chain(gamma: f64) -> XYZChainConfig {
        XYZChainConfig { n_free: 4, j: [1.0, 1.0, -0.6058], theta: PI / 2.0, phi: 0.0, mu: 1.0, gamma }
    }

    /// N = 4 anisotropic chain with a mixed boundary target.
    pub fn mixed_target_chain(gamma: f64) -> XYZChainConfig {
        XYZChainConfig { n_free: 4, j: [1.0, 1.7, -0.137], theta: 2.0 * PI / 7.0, phi: 0.0, mu: -0.7, gamma }
    }

    /// Two qubits, boundary spin pumped up.
    pub fn two_qubit(gamma: f64) -> XYZChainConfig {
        XYZChainConfig { n_free: 1, j: [1.0, 2.3, -0.61], theta: 0.0, phi: 0.0, mu: 1.0, gamma }
    }
}

/// `H = sum_j sum_a J_a s_j^a s_{j+1}^a` on N+1 spins, site 0 the leading tensor factor.
pub fn build_xyz_hamiltonian(cfg: &XYZChainConfig) -> OperatorMatrix {
    let sites = cfg.n_free + 1;
    let d = 1usize << sites;
    let [jx, jy, jz] = cfg.j;
    let bit = |j: usize| 1usize << (sites - 1 - j);
    let mut entries = vec![ZERO; d * d];
    for b in 0..d {
        for j in 0..cfg.n_free {
            let (m0, m1) = (bit(j), bit(j + 1));
            let same = ((b & m0) == 0) == ((b & m1) == 0);
            let flipped = b ^ m0 ^ m1;
            entries[b * d + b] += c(if same { jz } else { -jz }, 0.0);
            entries[flipped * d + b] += c(jx + if same { -jy } else { jy }, 0.0);
        }
    }
    OperatorMatrix::from_row_major(&entries).expect("square by construction")
}

/// `|s>` and `|s_perp>` for the target direction (theta, phi).
pub fn target_state_vectors(theta: f64, phi: f64) -> ([C64; 2], [C64; 2]) {
    let (ch, sh) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let em = C64::from_polar(1.0, -phi / 2.0);
    let ep = C64::from_polar(1.0, phi / 2.0);
    ([em * ch, ep * sh], [-em * sh, ep * ch])
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryTarget {
    pub theta: f64,
    pub phi: f64,
    pub mu: f64,
}

impl BoundaryTarget {
    /// Closed-form dissipator eigenvalues, right eigenmatrices and their duals.
    pub fn closed_forms(&self) -> (Vec<C64>, Vec<OperatorMatrix>, Vec<OperatorMatrix>) {
        let (s, sp) = target_state_vectors(self.theta, self.phi);
        let mu = self.mu;
        let ss = OperatorMatrix::outer(&s, &s).unwrap();
        let pp = OperatorMatrix::outer(&sp, &sp).unwrap();
        let sps = OperatorMatrix::outer(&s, &sp).unwrap();
        let pss = OperatorMatrix::outer(&sp, &s).unwrap();
        let psi0 = &ss.scale_re((1.0 + mu) / 2.0) + &pp.scale_re((1.0 - mu) / 2.0);
        let psi3 = &ss - &pp;
        let phi3 = &ss.scale_re((1.0 - mu) / 2.0) - &pp.scale_re((1.0 + mu) / 2.0);
        let cs = vec![ZERO, c(-0.5, 0.0), c(-0.5, 0.0), c(-1.0, 0.0)];
        let psi = vec![psi0, sps.clone(), pss.clone(), psi3];
        let phi = vec![OperatorMatrix::identity(2), pss, sps, phi3];
        (cs, psi, phi)
    }
}

/// Weighted jump operators on the dissipated factor.
#[derive(Clone, Debug, PartialEq)]
pub struct DissipatorSpec {
    pub jumps: Vec<(OperatorMatrix, f64)>,
    /// Set when the jumps are the two-term boundary pump, enabling closed-form scale fixing.
    pub boundary: Option<BoundaryTarget>,
}

impl DissipatorSpec {
    pub fn new(jumps: Vec<(OperatorMatrix, f64)>) -> Result<Self> {
        let Some(d0) = jumps.first().map(|(l, _)| l.dim()) else {
            return Err(Error::InvalidParameter("dissipator needs at least one jump".into()));
        };
        for (l, r) in &jumps {
            if l.dim() != d0 {
                return Err(Error::Dimension(format!("jump dims {} and {d0}", l.dim())));
            }
            if !(*r >= 0.0) {
                return Err(Error::InvalidParameter(format!("negative rate {r}")));
            }
        }
        Ok(Self { jumps, boundary: None })
    }

    pub fn d0(&self) -> usize {
        self.jumps[0].0.dim()
    }

    pub fn superop(&self) -> SuperoperatorMatrix {
        lindblad_superop(&self.jumps).expect("validated jump list")
    }

    /// Jumps lifted to `H0 (x) H1`.
    pub fn embedded(&self, d1: usize) -> Vec<(OperatorMatrix, f64)> {
        let id = OperatorMatrix::identity(d1);
        self.jumps.iter().map(|(l, r)| (kron(l, &id), *r)).collect()
    }
}

/// `L1 = |s><s_perp|` at rate (1+mu)/2 and `L2 = L1^+` at rate (1-mu)/2.
///
/// `L2` is the Hermitian conjugate: it equals the plain transpose only at
/// phi = 0, and with the transpose the dissipator spectrum depends on phi.
pub fn build_boundary_dissipator(theta: f64, phi: f64, mu: f64) -> Result<DissipatorSpec> {
    if !(mu.abs() <= 1.0) {
        return Err(Error::InvalidParameter(format!("mu = {mu} outside [-1, 1]")));
    }
    let (s, sp) = target_state_vectors(theta, phi);
    let l1 = OperatorMatrix::outer(&s, &sp)?;
    let l2 = l1.dagger();
    let mut spec = DissipatorSpec::new(vec![(l1, (1.0 + mu) / 2.0), (l2, (1.0 - mu) / 2.0)])?;
    spec.boundary = Some(BoundaryTarget { theta, phi, mu });
    Ok(spec)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralBasis {
    pub c: Vec<C64>,
    pub psi: Vec<OperatorMatrix>,
    pub phi: Vec<OperatorMatrix>,
    /// Index partition by equal `c`, in the order of first appearance.
    pub classes: Vec<Vec<usize>>,
    pub boundary: Option<BoundaryTarget>,
}

impl SpectralBasis {
    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    pub fn d0(&self) -> usize {
        self.psi[0].dim()
    }

    pub fn class_of(&self, k: usize) -> &[usize] {
        self.classes.iter().find(|cl| cl.contains(&k)).expect("every label has a class")
    }

    /// Largest `|tr(phi_n psi_k) - delta_nk|`.
    pub fn biorthogonality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (n, f) in self.phi.iter().enumerate() {
            for (k, p) in self.psi.iter().enumerate() {
                let want = if n == k { ONE } else { ZERO };
                worst = worst.max((f.trace_product(p) - want).norm());
            }
        }
        worst
    }
}

fn group_classes(vals: &[C64], tol: f64) -> Vec<Vec<usize>> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut seen = vec![false; vals.len()];
    for i in 0..vals.len() {
        if seen[i] {
            continue;
        }
        // chain through near neighbours so the partition is transitive
        let mut class = vec![i];
        seen[i] = true;
        let mut head = 0;
        while head < class.len() {
            let a = vals[class[head]];
            for j in 0..vals.len() {
                if !seen[j] && (vals[j] - a).norm() <= tol {
                    seen[j] = true;
                    class.push(j);
                }
            }
            head += 1;
        }
        class.sort_unstable();
        classes.push(class);
    }
    classes
}

/// Eigendecomposition of the dissipator superoperator with a biorthogonal dual basis.
///
/// Ordering: the kernel first, then classes by decreasing real part and
/// increasing imaginary part.
pub fn dissipator_eigensystem(spec: &DissipatorSpec) -> Result<SpectralBasis> {
    let d0 = spec.d0();
    let k = d0 * d0;
    let sup = spec.superop();
    let sv = linalg::singular_values(sup.as_mat())?;
    let ktol = KERNEL_TOL * sv[0].max(1.0);
    let nullity = sv.iter().filter(|&&s| s <= ktol).count();
    if nullity != 1 {
        return Err(Error::DegenerateKernel(nullity));
    }
    let (vals, vecs) = linalg::eig(sup.as_mat(), true)?;
    let vecs = linalg::normalize_columns(&vecs.expect("requested"));
    let vsv = linalg::singular_values(vecs.as_ref())?;
    if *vsv.last().unwrap() < 1e-8 {
        return Err(Error::NonDiagonalizable(format!(
            "eigenvector matrix has smallest singular value {:.3e}",
            vsv.last().unwrap()
        )));
    }
    let kernel = (0..k).min_by(|&a, &b| vals[a].norm().total_cmp(&vals[b].norm())).unwrap();
    let cmax = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let ctol = CLASS_TOL * cmax.max(1.0);
    let rest: Vec<usize> = (0..k).filter(|&i| i != kernel).collect();
    let rest_vals: Vec<C64> = rest.iter().map(|&i| vals[i]).collect();
    let mut groups: Vec<Vec<usize>> =
        group_classes(&rest_vals, ctol).into_iter().map(|g| g.into_iter().map(|i| rest[i]).collect()).collect();
    let mean = |g: &Vec<usize>| g.iter().map(|&i| vals[i]).sum::<C64>() / g.len() as f64;
    groups.sort_by(|a, b| {
        let (ma, mb) = (mean(a), mean(b));
        if (ma.re - mb.re).abs() > ctol {
            mb.re.total_cmp(&ma.re)
        } else {
            ma.im.total_cmp(&mb.im)
        }
    });
    let mut order = vec![kernel];
    for g in &groups {
        order.extend(g);
    }
    let mut classes = vec![vec![0]];
    let mut next = 1;
    for g in &groups {
        classes.push((next..next + g.len()).collect());
        next += g.len();
    }

    if let Some(target) = spec.boundary.filter(|_| d0 == 2) {
        let (cs, psi, phi) = target.closed_forms();
        for (ck, p) in cs.iter().zip(&psi) {
            let r = sup.apply(&vectorize(p));
            let v = vectorize(p);
            let resid = r.iter().zip(&v).map(|(a, b)| (a - ck * b).norm()).fold(0.0, f64::max);
            if resid > BASIS_TOL {
                return Err(Error::Numerical(format!("closed-form eigenmatrix residual {resid:.3e}")));
            }
        }
        let ordered: Vec<C64> = order.iter().map(|&i| vals[i]).collect();
        let worst = ordered.iter().zip(&cs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        if worst > 1e-8 || classes.len() != 3 {
            return Err(Error::Numerical(format!("boundary dissipator spectrum deviates by {worst:.3e}")));
        }
        return Ok(SpectralBasis { c: cs, psi, phi, classes, boundary: Some(target) });
    }

    let mut psi = Vec::with_capacity(k);
    for (pos, &i) in order.iter().enumerate() {
        let mut m = devectorize(&linalg::column(vecs.as_ref(), i))?;
        if pos == 0 {
            let tr = m.trace();
            if tr.norm() < 1e-12 {
                return Err(Error::Numerical("dissipator kernel is traceless".into()));
            }
            m = m.scale(tr.inv());
            m = (&m + &m.dagger()).scale_re(0.5);
        } else {
            let f = m.frobenius_norm();
            let mut best = ZERO;
            for a in 0..d0 {
                for b in 0..d0 {
                    if m.get(a, b).norm() > best.norm() + 1e-12 {
                        best = m.get(a, b);
                    }
                }
            }
            let phase = best.conj() / best.norm();
            m = m.scale(phase / f);
        }
        psi.push(m);
    }
    let phi = biorthogonal_basis(&psi)?;
    let mut c: Vec<C64> = order.iter().map(|&i| vals[i]).collect();
    c[0] = ZERO;
    Ok(SpectralBasis { c, psi, phi, classes, boundary: None })
}

/// Duals `phi_n` with `tr(phi_n psi_k) = delta_nk` for a complete family on `H0`.
pub fn biorthogonal_basis(psi: &[OperatorMatrix]) -> Result<Vec<OperatorMatrix>> {
    let Some(d0) = psi.first().map(|p| p.dim()) else {
        return Err(Error::Dimension("empty family".into()));
    };
    let k = d0 * d0;
    if psi.len() != k || psi.iter().any(|p| p.dim() != d0) {
        return Err(Error::Dimension(format!("need {k} operators of dim {d0}, got {}", psi.len())));
    }
    let cols: Vec<Vec<C64>> = psi.iter().map(vectorize).collect();
    let p = Mat::from_fn(k, k, |r, col| cols[col][r]);
    let inv = linalg::inverse(p.as_ref(), 1e-12)?;
    (0..k).map(|n| Ok(devectorize(&linalg::row(inv.as_ref(), n))?.transpose())).collect()
}

/// `g_k = tr_0((psi_k (x) 1) H)`.
pub fn g_operators(h: &OperatorMatrix, basis: &SpectralBasis, split: HilbertSplit) -> Result<Vec<OperatorMatrix>> {
    basis.psi.iter().map(|p| weighted_partial_trace_first(p, h, split)).collect()
}

/// Dense rank-3 tensor over the `d0^2` labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor3 {
    n: usize,
    data: Vec<C64>,
}

impl Tensor3 {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for b in 0..n {
                for e in 0..n {
                    data.push(f(a, b, e));
                }
            }
        }
        Self { n, data }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: usize, b: usize, e: usize) -> C64 {
        self.data[(a * self.n + b) * self.n + e]
    }
}

/// Dense rank-5 tensor over the `d0^2` labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor5 {
    n: usize,
    data: Vec<C64>,
}

impl Tensor5 {
    pub fn from_fn(n: usize, mut f: impl FnMut([usize; 5]) -> C64) -> Self {
        let mut data = Vec::with_capacity(n.pow(5));
        for i0 in 0..n {
            for i1 in 0..n {
                for i2 in 0..n {
                    for i3 in 0..n {
                        for i4 in 0..n {
                            data.push(f([i0, i1, i2, i3, i4]));
                        }
                    }
                }
            }
        }
        Self { n, data }
    }

    pub fn get(&self, i: [usize; 5]) -> C64 {
        let n = self.n;
        self.data[(((i[0] * n + i[1]) * n + i[2]) * n + i[3]) * n + i[4]]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// `A_{m,k,n} = tr(phi_n psi_k phi_m^+)`, `B_{m,k,n} = tr(phi_n phi_m^+ psi_k)`,
/// `C_{m,k,n} = tr(phi_n phi_m psi_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientTensors {
    pub a: Tensor3,
    pub b: Tensor3,
    pub cc: Tensor3,
}

pub fn structure_coefficients(basis: &SpectralBasis) -> CoefficientTensors {
    let k = basis.len();
    let phid: Vec<OperatorMatrix> = basis.phi.iter().map(|f| f.dagger()).collect();
    let a = Tensor3::from_fn(k, |m, kk, n| (&basis.phi[n] * &basis.psi[kk]).trace_product(&phid[m]));
    let b = Tensor3::from_fn(k, |m, kk, n| (&basis.phi[n] * &phid[m]).trace_product(&basis.psi[kk]));
    let cc = Tensor3::from_fn(k, |m, kk, n| (&basis.phi[n] * &basis.phi[m]).trace_product(&basis.psi[kk]));
    CoefficientTensors { a, b, cc }
}

/// The `g_k` operators together with the A/B/C tensors.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureCoefficients {
    pub g: Vec<OperatorMatrix>,
    pub tensors: CoefficientTensors,
}

impl StructureCoefficients {
    pub fn new(h: &OperatorMatrix, basis: &SpectralBasis, split: HilbertSplit) -> Result<Self> {
        Ok(Self { g: g_operators(h, basis, split)?, tensors: structure_coefficients(basis) })
    }

    pub fn a(&self, m: usize, k: usize, n: usize) -> C64 {
        self.tensors.a.get(m, k, n)
    }

    pub fn b(&self, m: usize, k: usize, n: usize) -> C64 {
        self.tensors.b.get(m, k, n)
    }

    pub fn cc(&self, m: usize, k: usize, n: usize) -> C64 {
        self.tensors.cc.get(m, k, n)
    }

    /// `max |sum_m phi_m (x) g_m - H|`.
    pub fn reconstruction_defect(&self, basis: &SpectralBasis, h: &OperatorMatrix) -> f64 {
        let mut sum = OperatorMatrix::zeros(h.dim());
        for (f, g) in basis.phi.iter().zip(&self.g) {
            sum = &sum + &kron(f, g);
        }
        sum.max_abs_diff(h)
    }
}

/// Index order: `gamma[n,s,k,m,z]`, `eps[n,s,k,z,m]`, `delta[n,s,k,z,m]`.
#[derive(Clone, Debug, PartialEq)]
pub struct DysonTensors {
    pub gamma: Tensor5,
    pub eps: Tensor5,
    pub delta: Tensor5,
}

pub fn dyson_tensors(t: &CoefficientTensors) -> DysonTensors {
    let k = t.a.size();
    let (a, b, cc) = (&t.a, &t.b, &t.cc);
    let gamma = Tensor5::from_fn(k, |[n, s, kk, m, z]| cc.get(m, s, n) * a.get(z, n, kk) + a.get(z, s, n) * cc.get(m, n, kk));
    let eps = Tensor5::from_fn(k, |[n, s, kk, z, m]| cc.get(m, s, n) * b.get(z, n, kk));
    let delta = Tensor5::from_fn(k, |[n, s, kk, z, m]| a.get(z, s, n) * cc.get(kk, n, m));
    DysonTensors { gamma, eps, delta }
}

/// `-i[H, .] + Gamma * D` with the jumps acting on the leading factor.
pub fn liouvillian(h: &OperatorMatrix, spec: &DissipatorSpec, d1: usize, gamma: f64) -> Result<SuperoperatorMatrix> {
    if h.dim() != spec.d0() * d1 {
        return Err(Error::Dimension(format!("H of dim {} vs {}x{d1}", h.dim(), spec.d0())));
    }
    let diss = lindblad_superop(&spec.embedded(d1))?;
    Ok(&commutator_superop(h) + &diss.scale(c(gamma, 0.0)))
}

pub fn full_liouvillian(cfg: &XYZChainConfig) -> Result<SuperoperatorMatrix> {
    cfg.validate()?;
    let spec = build_boundary_dissipator(cfg.theta, cfg.phi, cfg.mu)?;
    liouvillian(&build_xyz_hamiltonian(cfg), &spec, cfg.d1(), cfg.gamma)
}

/// Everything the perturbative stripes need, derived once per configuration.
#[derive(Clone, Debug)]
pub struct ZenoSetup {
    pub config: XYZChainConfig,
    pub hamiltonian: OperatorMatrix,
    pub dissipator: DissipatorSpec,
    pub basis: SpectralBasis,
    pub coeffs: StructureCoefficients,
    pub dyson: DysonTensors,
}

impl ZenoSetup {
    pub fn new(cfg: &XYZChainConfig) -> Result<Self> {
        cfg.validate()?;
        let h = build_xyz_hamiltonian(cfg);
        let spec = build_boundary_dissipator(cfg.theta, cfg.phi, cfg.mu)?;
        Self::from_parts(cfg.clone(), h, spec)
    }

    /// Arbitrary Hamiltonian on `H0 (x) H1` and dissipator on `H0`.
    pub fn from_parts(config: XYZChainConfig, hamiltonian: OperatorMatrix, dissipator: DissipatorSpec) -> Result<Self> {
        let d0 = dissipator.d0();
        if hamiltonian.dim() % d0 != 0 {
            return Err(Error::Dimension(format!("H dim {} not divisible by {d0}", hamiltonian.dim())));
        }
        let split = HilbertSplit::new(d0, hamiltonian.dim() / d0)?;
        let basis = dissipator_eigensystem(&dissipator)?;
        let coeffs = StructureCoefficients::new(&hamiltonian, &basis, split)?;
        let dyson = dyson_tensors(&coeffs.tensors);
        Ok(Self { config, hamiltonian, dissipator, basis, coeffs, dyson })
    }

    pub fn d1(&self) -> usize {
        self.hamiltonian.dim() / self.basis.d0()
    }

    pub fn gamma(&self) -> f64 {
        self.config.gamma
    }

    pub fn liouvillian(&self) -> Result<SuperoperatorMatrix> {
        liouvillian(&self.hamiltonian, &self.dissipator, self.d1(), self.config.gamma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn naive_xyz(cfg: &XYZChainConfig) -> OperatorMatrix {
        let sites = cfg.n_free + 1;
        let paulis = [OperatorMatrix::pauli_x(), OperatorMatrix::pauli_y(), OperatorMatrix::pauli_z()];
        let mut h = OperatorMatrix::zeros(1 << sites);
        for j in 0..cfg.n_free {
            for (a, p) in paulis.iter().enumerate() {
                let mut term = OperatorMatrix::identity(1);
                for s in 0..sites {
                    let f = if s == j || s == j + 1 { p.clone() } else { OperatorMatrix::identity(2) };
                    term = kron(&term, &f);
                }
                h = &h + &term.scale_re(cfg.j[a]);
            }
        }
        h
    }

    #[test]
    fn hamiltonian_matches_kron_assembly() {
        for n in 1..=3 {
            let cfg = XYZChainConfig { n_free: n, j: [0.3, -1.2, 0.77], theta: 0.0, phi: 0.0, mu: 1.0, gamma: 1.0 };
            let h = build_xyz_hamiltonian(&cfg);
            assert!(h.max_abs_diff(&naive_xyz(&cfg)) < 1e-15);
            assert!(h.is_hermitian(1e-15));
        }
        let zero = XYZChainConfig { n_free: 1, j: [0.0; 3], theta: 0.0, phi: 0.0, mu: 1.0, gamma: 1.0 };
        assert_eq!(build_xyz_hamiltonian(&zero).max_abs(), 0.0);
    }

    #[test]
    fn two_site_hamiltonian_definition() {
        let (g, dl) = (0.4, -1.3);
        let cfg = XYZChainConfig { n_free: 1, j: [1.0, g, dl], theta: 0.0, phi: 0.0, mu: 1.0, gamma: 1.0 };
        let x = OperatorMatrix::pauli_x();
        let y = OperatorMatrix::pauli_y();
        let z = OperatorMatrix::pauli_z();
        let want = &(&kron(&x, &x) + &kron(&y, &y).scale_re(g)) + &kron(&z, &z).scale_re(dl);
        assert!(build_xyz_hamiltonian(&cfg).max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn heisenberg_three_sites() {
        let cfg = XYZChainConfig { n_free: 2, j: [1.0, 1.0, 1.0], theta: 0.0, phi: 0.0, mu: 1.0, gamma: 1.0 };
        let (vals, _) = build_xyz_hamiltonian(&cfg).hermitian_eigen().unwrap();
        let mut oracle: Vec<f64> =
            linalg::eigenvalues(naive_xyz(&cfg).as_mat()).unwrap().into_iter().map(|v| v.re).collect();
        oracle.sort_by(f64::total_cmp);
        for (a, b) in vals.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-12);
        }
        // 2 (S(S+1) - s02(s02+1) - 3/4) over the coupled multiplets
        let multiplets = [-4.0, -4.0, 0.0, 0.0, 2.0, 2.0, 2.0, 2.0];
        for (a, b) in vals.iter().zip(multiplets) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn target_states() {
        let (s, sp) = target_state_vectors(0.0, 0.0);
        assert_eq!(s, [ONE, ZERO]);
        assert_eq!(sp, [ZERO, ONE]);
        let (s, _) = target_state_vectors(PI / 2.0, 0.0);
        let r = 0.5f64.sqrt();
        assert!((s[0] - c(r, 0.0)).norm() < 1e-15 && (s[1] - c(r, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn boundary_dissipator_examples() {
        let spec = build_boundary_dissipator(0.0, 0.0, 1.0).unwrap();
        assert_eq!(spec.jumps[0].0, OperatorMatrix::sigma_plus());
        assert_eq!(spec.jumps[0].1, 1.0);
        let spec = build_boundary_dissipator(0.3, 0.0, -1.0).unwrap();
        assert_eq!(spec.jumps[0].1, 0.0);
        assert_eq!(spec.jumps[1].1, 1.0);
        // at phi = 0 the conjugate is the plain transpose
        assert!(spec.jumps[1].0.max_abs_diff(&spec.jumps[0].0.transpose()) < 1e-16);
        assert!(build_boundary_dissipator(0.0, 0.0, 1.5).is_err());
    }

    #[test]
    fn kernel_of_x_target() {
        let spec = build_boundary_dissipator(PI / 2.0, 0.0, 1.0).unwrap();
        let basis = dissipator_eigensystem(&spec).unwrap();
        let want = OperatorMatrix::from_fn(2, |_, _| c(0.5, 0.0));
        assert!(basis.psi[0].max_abs_diff(&want) < 1e-14);
        let r = spec.superop().apply_op(&want);
        assert!(r.max_abs() < 1e-14);
    }

    #[test]
    fn polarized_kernel() {
        let basis = dissipator_eigensystem(&build_boundary_dissipator(0.0, 0.0, 0.5).unwrap()).unwrap();
        assert!(basis.psi[0].max_abs_diff(&OperatorMatrix::diagonal(&[c(0.75, 0.0), c(0.25, 0.0)])) < 1e-14);
    }

    #[test]
    fn matrix_unit_duals() {
        let units: Vec<OperatorMatrix> = (0..4)
            .map(|u| OperatorMatrix::from_fn(2, |i, j| if i * 2 + j == u { ONE } else { ZERO }))
            .collect();
        let duals = biorthogonal_basis(&units).unwrap();
        for (u, f) in duals.iter().enumerate() {
            assert!(f.max_abs_diff(&units[u].transpose()) < 1e-15);
        }
        let bad = vec![units[0].clone(), units[0].clone(), units[1].clone(), units[2].clone()];
        assert!(matches!(biorthogonal_basis(&bad), Err(Error::RankDeficient(_))));
    }

    #[test]
    fn degenerate_kernel_is_rejected() {
        let spec = DissipatorSpec::new(vec![(OperatorMatrix::pauli_z(), 1.0)]).unwrap();
        assert!(matches!(dissipator_eigensystem(&spec), Err(Error::DegenerateKernel(2))));
    }
}
