//! Per-stripe error of the perturbative spectrum against exact
//! diagonalization, and the fitted `(Gamma_c / Gamma)^2` law.
//!
//! cargo run --release --example error_scaling [mixed] [exact-only] [wide]
//!
//! `exact-only` resolves only exact degeneracies, as in plain first-order
//! perturbation theory.

use lindblad_zeno::analysis::gamma_sweep;
use lindblad_zeno::lindblad_model::presets;
use lindblad_zeno::zeno_spectrum::ZenoOptions;

fn main() -> lindblad_zeno::Result<()> {
    let mixed = std::env::args().any(|a| a == "mixed");
    let template = if mixed { presets::mixed_target_chain(1.0) } else { presets::pure_target_chain(1.0) };
    let gammas: Vec<f64> = if std::env::args().any(|a| a == "wide") {
        (0..8).map(|i| 400.0 * 2f64.powi(i)).collect()
    } else {
        vec![50.0, 100.0, 200.0, 400.0, 800.0]
    };
    let opts = if std::env::args().any(|a| a == "exact-only") { ZenoOptions::exact_only() } else { ZenoOptions::default() };
    let sweep = gamma_sweep(&template, &gammas, &opts)?;
    for s in &sweep.stripes {
        println!("stripe {}", s.label);
        for (g, e) in gammas.iter().zip(&s.errors) {
            println!("  Gamma {g:>6}  std-dev {e:.4e}");
        }
        match &s.fit {
            Some(f) => println!("  Gamma_c {:.3}  free slope {:.3}  ({} points)", f.gamma_c, f.free_slope, f.points),
            None => println!("  no fit: {}", s.fit_error.as_deref().unwrap_or("")),
        }
    }
    if !sweep.global_fallbacks.is_empty() {
        println!("global matching used at Gamma = {:?}", sweep.global_fallbacks);
    }
    Ok(())
}
