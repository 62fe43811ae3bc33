#![allow(dead_code)]

use std::f64::consts::PI;

use lindblad_zeno::analysis::conjugation_defect;
use lindblad_zeno::exact_spectrum::{exact_liouvillian_spectrum, sort_canonical, steady_state};
use lindblad_zeno::linalg;
use lindblad_zeno::lindblad_model::{full_liouvillian, XYZChainConfig, ZenoSetup};
use lindblad_zeno::operator_algebra::OperatorMatrix;
use lindblad_zeno::zeno_spectrum::{
    flipped_field_operators, general_degenerate_stripe, kolmogorov_check, stripe0_markov_matrix, stripe12_spectrum,
    u3_operator, zeno_spectrum, ZenoOptions,
};
use lindblad_zeno::C64;
use proptest::prelude::*;

pub const TRACE_TOL: f64 = 1e-12;
pub const BIORTH_TOL: f64 = 1e-10;
pub const NESS_TOL: f64 = 1e-9;
pub const ISOSPECTRAL_TOL: f64 = 1e-10;
pub const CONJUGATION_TOL: f64 = 1e-8;
pub const REAL_TOL: f64 = 1e-8;
pub const CROSS_PATH_REL_TOL: f64 = 1e-8;
/// Perturbative eigenvalues sit within `ORACLE_SCALE / Gamma^2` of exact ones.
pub const ORACLE_SCALE: f64 = 200.0;

pub fn config(n_free: usize, j: [f64; 3], theta: f64, phi: f64, mu: f64, gamma: f64) -> XYZChainConfig {
    XYZChainConfig { n_free, j, theta, phi, mu, gamma }
}

/// Chains with `n_free` in the given range and generic couplings.
pub fn arb_config(n: std::ops::RangeInclusive<usize>, gamma: std::ops::Range<f64>) -> impl Strategy<Value = XYZChainConfig> {
    (n, [-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64], 0.0..PI, 0.0..2.0 * PI, prop_oneof![Just(1.0), Just(0.5), Just(-0.7), -0.95..0.95f64], gamma)
        .prop_map(|(n, j, theta, phi, mu, g)| config(n, j, theta, phi, mu, g))
}

/// Same, keeping the effective Hamiltonian away from the degenerate points
/// where the zeroth-order stripe spectrum is not simple. At mu = 0 the
/// boundary field vanishes and g_0 inherits the symmetries of the bare chain.
pub fn arb_generic_config(n: std::ops::RangeInclusive<usize>, gamma: std::ops::Range<f64>) -> impl Strategy<Value = XYZChainConfig> {
    arb_config(n, gamma).prop_filter("near-degenerate couplings", |c| {
        let [jx, jy, jz] = c.j;
        [jx, jy, jz, jx - jy, jy - jz, jx - jz, jx + jy, jy + jz, jx + jz].iter().all(|x| x.abs() > 0.05)
            && c.theta.sin().abs() > 0.05
            && c.theta.cos().abs() > 0.05
            && c.mu.abs() > 0.05
    })
}

pub fn sorted_eigenvalues(op: &OperatorMatrix) -> Vec<C64> {
    let mut v = linalg::eigenvalues(op.as_mat()).expect("eigensolve");
    sort_canonical(&mut v);
    v
}

/// Largest distance between two spectra after optimal matching.
pub fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    let m = lindblad_zeno::analysis::match_spectra(a, b).expect("equal lengths");
    m.residuals.into_iter().fold(0.0, f64::max)
}

pub fn trace_preservation_defect(cfg: &XYZChainConfig) -> f64 {
    let l = full_liouvillian(cfg).unwrap();
    l.identity_left_action().iter().map(|x| x.norm()).fold(0.0, f64::max)
}

pub fn biorthogonality_defect(cfg: &XYZChainConfig) -> f64 {
    ZenoSetup::new(cfg).unwrap().basis.biorthogonality_defect()
}

/// `(||L[rho]||, |tr rho - 1|)` for the computed steady state.
pub fn ness_residual(cfg: &XYZChainConfig) -> (f64, f64) {
    let ness = steady_state(cfg).unwrap();
    let l = full_liouvillian(cfg).unwrap();
    (l.apply_op(&ness.rho).max_abs(), (ness.rho.trace() - 1.0).norm())
}

/// `(h_D vs U_3, f_+ vs f_-)`, sorted eigenvalues compared entrywise.
pub fn isospectrality_defects(cfg: &XYZChainConfig) -> (f64, f64) {
    let setup = ZenoSetup::new(cfg).unwrap();
    let dist = |a: Vec<C64>, b: Vec<C64>| a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    let hd = sorted_eigenvalues(&setup.coeffs.g[0]);
    let u3 = sorted_eigenvalues(&u3_operator(&setup).unwrap());
    let (fp, fm) = flipped_field_operators(&setup).unwrap();
    (dist(hd, u3), dist(sorted_eigenvalues(&fp), sorted_eigenvalues(&fm)))
}

pub fn exact_conjugation_defect(cfg: &XYZChainConfig) -> f64 {
    conjugation_defect(&exact_liouvillian_spectrum(cfg, false).unwrap().eigenvalues)
}

pub fn kolmogorov_passes(cfg: &XYZChainConfig) -> bool {
    let m = stripe0_markov_matrix(&ZenoSetup::new(cfg).unwrap()).unwrap();
    kolmogorov_check(&m).unwrap().pass
}

pub fn perturbative_real_count(cfg: &XYZChainConfig) -> usize {
    perturbative_real_count_with(cfg, &ZenoOptions::default())
}

pub fn perturbative_real_count_with(cfg: &XYZChainConfig, opts: &ZenoOptions) -> usize {
    zeno_spectrum(&ZenoSetup::new(cfg).unwrap(), opts).unwrap().real_count(REAL_TOL)
}

/// Largest matched distance between the default perturbative spectrum and the exact one.
pub fn perturbative_exact_distance(cfg: &XYZChainConfig) -> f64 {
    let pert = zeno_spectrum(&ZenoSetup::new(cfg).unwrap(), &ZenoOptions::default()).unwrap().eigenvalues();
    let exact = lindblad_zeno::exact_spectrum::exact_liouvillian_spectrum(cfg, false).unwrap();
    multiset_distance(&exact.eigenvalues, &pert)
}

/// Multiset distance between the direct and factorized treatments of stripe 1&2.
pub fn cross_path_distance(cfg: &XYZChainConfig) -> f64 {
    let setup = ZenoSetup::new(cfg).unwrap();
    let opts = ZenoOptions::default();
    let direct = general_degenerate_stripe(&[1, 2], &setup, cfg.gamma, &opts).unwrap().eigenvalues();
    let factorized = stripe12_spectrum(&setup, cfg.gamma, &opts).unwrap().eigenvalues();
    multiset_distance(&direct, &factorized)
}
