//! The stripe-0 effective model: rates, Lamb shift and the classical rate
//! matrix on the populations, with the Kolmogorov criterion.
//!
//! cargo run --release --example effective_model

use lindblad_zeno::lindblad_model::{presets, ZenoSetup};
use lindblad_zeno::zeno_spectrum::{effective_model_stripe0, kolmogorov_check, stripe0_markov_matrix, zeno_spectrum, ZenoOptions};

fn main() -> lindblad_zeno::Result<()> {
    for (name, cfg) in [("pure", presets::pure_target_chain(1000.0)), ("mixed", presets::mixed_target_chain(1000.0))] {
        let setup = ZenoSetup::new(&cfg)?;
        let model = effective_model_stripe0(&setup)?;
        let m = stripe0_markov_matrix(&setup)?;
        let k = kolmogorov_check(&m)?;
        let z = zeno_spectrum(&setup, &ZenoOptions::default())?;
        println!("{name} target, mu = {}", cfg.mu);
        println!("  effective rates {:?}", model.rates);
        println!("  Lamb shift norm {:.4}", model.lamb_shift.max_abs());
        println!(
            "  Kolmogorov: {} (violation {:.2e}, {} triples, {} edges)",
            if k.pass { "reversible" } else { "not reversible" },
            k.max_violation,
            k.triples_checked,
            k.edges_checked
        );
        println!("  real eigenvalues {} of {}", z.real_count(1e-9), z.len());
    }
    Ok(())
}
