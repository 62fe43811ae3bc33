//! The self-check behind `zeno check`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{classify_stripes, compare_config, match_spectra, StripeLevel};
use crate::error::Result;
use crate::exact_spectrum::exact_liouvillian_spectrum;
use crate::lindblad_model::{presets, XYZChainConfig, ZenoSetup};
use crate::zeno_spectrum::{kolmogorov_check, stripe0_markov_matrix, two_qubit_closed_forms, zeno_spectrum, ZenoOptions};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckLine {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn line(name: &'static str, r: Result<(bool, String)>) -> CheckLine {
    match r {
        Ok((pass, detail)) => CheckLine { name, pass, detail },
        Err(e) => CheckLine { name, pass: false, detail: format!("error: {e}") },
    }
}

fn two_qubit_perturbative() -> Result<(bool, String)> {
    let cfg = presets::two_qubit(200.0);
    let z = zeno_spectrum(&ZenoSetup::new(&cfg)?, &ZenoOptions::default())?;
    let closed = two_qubit_closed_forms(cfg.j[1], cfg.j[2], cfg.gamma)?;
    let m = match_spectra(&closed, &z.eigenvalues())?;
    let worst = m.residuals.iter().cloned().fold(0.0, f64::max);
    Ok((worst <= 1e-9, format!("max |closed - perturbative| = {worst:.3e}")))
}

fn two_qubit_exact() -> Result<(bool, String)> {
    let cfg = presets::two_qubit(200.0);
    let exact = exact_liouvillian_spectrum(&cfg, false)?;
    let closed = two_qubit_closed_forms(cfg.j[1], cfg.j[2], cfg.gamma)?;
    let m = match_spectra(&exact.eigenvalues, &closed)?;
    let worst = m.residuals.iter().cloned().fold(0.0, f64::max);
    Ok((worst < 1e-2, format!("max |exact - closed| = {worst:.3e} at Gamma = 200")))
}

fn stripe_counts() -> Result<(bool, String)> {
    let cfg = presets::pure_target_chain(20.0);
    let exact = exact_liouvillian_spectrum(&cfg, false)?;
    let levels = StripeLevel::from_setup(&ZenoSetup::new(&cfg)?);
    let cl = classify_stripes(&exact.eigenvalues, &levels, cfg.gamma);
    Ok((cl.counts == [256, 512, 256] && cl.overlap_warning.is_none(), format!("counts {:?}", cl.counts)))
}

fn kolmogorov() -> Result<(bool, String)> {
    let pure = kolmogorov_check(&stripe0_markov_matrix(&ZenoSetup::new(&presets::pure_target_chain(1.0))?)?)?;
    let mut mixed_cfg = presets::pure_target_chain(1.0);
    mixed_cfg.mu = 0.3;
    let mixed = kolmogorov_check(&stripe0_markov_matrix(&ZenoSetup::new(&mixed_cfg)?)?)?;
    Ok((
        pure.pass && !mixed.pass,
        format!("violation {:.3e} at mu = 1, {:.3e} at mu = 0.3", pure.max_violation, mixed.max_violation),
    ))
}

fn real_counts() -> Result<(bool, String)> {
    let mut got = Vec::new();
    let mut ok = true;
    for n in 1..=3 {
        let mut cfg = presets::pure_target_chain(100.0);
        cfg.n_free = n;
        let z = zeno_spectrum(&ZenoSetup::new(&cfg)?, &ZenoOptions::default())?;
        let count = z.real_count(1e-8);
        ok &= count == 1 << (n + 2);
        got.push(count);
    }
    Ok((ok, format!("real eigenvalues for N = 1, 2, 3: {got:?}")))
}

/// One random two-qubit draw, perturbative against exact at Gamma = 500.
fn random_draw(seed: u64) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mus = [1.0, 0.5, -0.7];
    let cfg = XYZChainConfig {
        n_free: 1,
        j: [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)],
        theta: rng.gen_range(0.0..std::f64::consts::PI),
        phi: rng.gen_range(0.0..2.0 * std::f64::consts::PI),
        mu: mus[rng.gen_range(0..mus.len())],
        gamma: 500.0,
    };
    let cmp = compare_config(&cfg, &ZenoOptions::default())?;
    let bound = 200.0 / (cfg.gamma * cfg.gamma);
    let worst = cmp.max_residual();
    Ok((cmp.is_complete() && worst <= bound, format!("seed {seed}: max residual {worst:.3e} (bound {bound:.1e})")))
}

pub fn check_suite(seed: u64) -> Vec<CheckLine> {
    vec![
        line("two-qubit perturbative closed forms", two_qubit_perturbative()),
        line("two-qubit exact near closed forms", two_qubit_exact()),
        line("stripe populations at Gamma = 20", stripe_counts()),
        line("Kolmogorov condition", kolmogorov()),
        line("real perturbative eigenvalue counts", real_counts()),
        line("random two-qubit draw", random_draw(seed)),
    ]
}
