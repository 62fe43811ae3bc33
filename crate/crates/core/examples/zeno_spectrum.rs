//! Perturbative spectrum of the two-qubit chain against the closed forms and
//! exact diagonalization.
//!
//! cargo run --release --example zeno_spectrum

use lindblad_zeno::analysis::match_spectra;
use lindblad_zeno::exact_spectrum::exact_liouvillian_spectrum;
use lindblad_zeno::lindblad_model::{presets, ZenoSetup};
use lindblad_zeno::zeno_spectrum::{two_qubit_closed_forms, zeno_spectrum, ZenoOptions};
use lindblad_zeno::C64;

fn worst(a: &[C64], b: &[C64]) -> lindblad_zeno::Result<f64> {
    Ok(match_spectra(a, b)?.residuals.into_iter().fold(0.0, f64::max))
}

fn main() -> lindblad_zeno::Result<()> {
    for gamma in [50.0, 100.0, 200.0, 400.0] {
        let cfg = presets::two_qubit(gamma);
        let z = zeno_spectrum(&ZenoSetup::new(&cfg)?, &ZenoOptions::default())?;
        let closed = two_qubit_closed_forms(cfg.j[1], cfg.j[2], gamma)?;
        let exact = exact_liouvillian_spectrum(&cfg, false)?;
        let pert = z.eigenvalues();
        println!(
            "Gamma {gamma:>5}: |pert - closed| {:.2e}  |pert - exact| {:.2e}",
            worst(&closed, &pert)?,
            worst(&exact.eigenvalues, &pert)?
        );
    }
    let z = zeno_spectrum(&ZenoSetup::new(&presets::two_qubit(100.0))?, &ZenoOptions::default())?;
    for s in &z.stripes {
        println!("stripe {}", s.key.label());
        for r in &s.records {
            let l = r.lambda();
            println!("  member {} ({}, {})  {:+.6} {:+.6}i", r.member, r.alpha, r.beta, l.re, l.im);
        }
    }
    Ok(())
}
