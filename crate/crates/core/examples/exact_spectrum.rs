//! Exact Liouvillian spectrum of the pure-target chain, grouped into the
//! dissipative stripes, and its steady state.
//!
//! cargo run --release --example exact_spectrum [gamma]

use lindblad_zeno::analysis::{classify_stripes, StripeLevel};
use lindblad_zeno::exact_spectrum::{exact_liouvillian_spectrum, steady_state};
use lindblad_zeno::lindblad_model::{presets, ZenoSetup};
use lindblad_zeno::operator_algebra::OperatorMatrix;

fn main() -> lindblad_zeno::Result<()> {
    let gamma = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20.0);
    let cfg = presets::pure_target_chain(gamma);
    let spec = exact_liouvillian_spectrum(&cfg, false)?;
    let levels = StripeLevel::from_setup(&ZenoSetup::new(&cfg)?);
    let cl = classify_stripes(&spec.eigenvalues, &levels, gamma);
    println!("{} eigenvalues at Gamma = {gamma}", spec.eigenvalues.len());
    for (k, lvl) in levels.iter().enumerate() {
        let members: Vec<_> = spec.eigenvalues.iter().zip(&cl.labels).filter(|(_, &l)| l == k).map(|(x, _)| x).collect();
        let lo = members.iter().map(|x| x.re).fold(f64::INFINITY, f64::min);
        let hi = members.iter().map(|x| x.re).fold(f64::NEG_INFINITY, f64::max);
        println!("stripe {:<6} {:>5} eigenvalues, Re in [{lo:.4}, {hi:.4}]", lvl.label, members.len());
    }
    println!("unique zero: {}, max Re = {:.3e}", spec.zero_count() == 1, spec.max_real_part());

    let ness = steady_state(&cfg)?;
    let sx = ness.site0_expectation(&OperatorMatrix::pauli_x()).re;
    let sz = ness.site0_expectation(&OperatorMatrix::pauli_z()).re;
    println!("steady state: residual {:.2e}, min eigenvalue {:.3e}", ness.residual, ness.min_eigenvalue);
    println!("boundary spin <sx> = {sx:.6}, <sz> = {sz:.6}");
    Ok(())
}
