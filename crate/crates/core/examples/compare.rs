//! Stripe-by-stripe comparison of exact and perturbative spectra.
//!
//! cargo run --release --example compare [gamma]

use lindblad_zeno::analysis::{compare_spectra, StripeLevel};
use lindblad_zeno::exact_spectrum::exact_liouvillian_spectrum;
use lindblad_zeno::lindblad_model::{presets, ZenoSetup};
use lindblad_zeno::zeno_spectrum::{zeno_spectrum, ZenoOptions};

fn main() -> lindblad_zeno::Result<()> {
    let gamma = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(200.0);
    let cfg = presets::mixed_target_chain(gamma);
    let setup = ZenoSetup::new(&cfg)?;
    let exact = exact_liouvillian_spectrum(&cfg, false)?;
    let pert = zeno_spectrum(&setup, &ZenoOptions::default())?;
    let cmp = compare_spectra(&exact.eigenvalues, &pert, &StripeLevel::from_setup(&setup))?;
    println!("Gamma {gamma}: {} matched, global fallback {}", cmp.matched(), cmp.global_fallback);
    for s in &cmp.per_stripe {
        println!("  stripe {:<6} n {:>5}  std-dev {:.3e}  max {:.3e}", s.label, s.pairs.len(), s.stats.std_dev, s.stats.max_abs);
    }
    Ok(())
}
