//! Decay plus dephasing on the first spin. No closed forms apply, so every
//! stripe goes through the general tensor path.
//!
//! cargo run --release --example custom_dissipator

use lindblad_zeno::analysis::match_spectra;
use lindblad_zeno::linalg;
use lindblad_zeno::lindblad_model::{build_xyz_hamiltonian, DissipatorSpec, XYZChainConfig, ZenoSetup};
use lindblad_zeno::operator_algebra::OperatorMatrix;
use lindblad_zeno::zeno_spectrum::{zeno_spectrum, ZenoOptions};

fn main() -> lindblad_zeno::Result<()> {
    let spec = DissipatorSpec::new(vec![(OperatorMatrix::sigma_minus(), 1.0), (OperatorMatrix::pauli_z(), 0.3)])?;
    for gamma in [250.0, 500.0, 1000.0, 2000.0] {
        let cfg = XYZChainConfig { n_free: 2, j: [0.8, -1.1, 0.45], theta: 0.0, phi: 0.0, mu: 1.0, gamma };
        let setup = ZenoSetup::from_parts(cfg.clone(), build_xyz_hamiltonian(&cfg), spec.clone())?;
        let pert = zeno_spectrum(&setup, &ZenoOptions::default())?.eigenvalues();
        let exact = linalg::eigenvalues(setup.liouvillian()?.as_mat())?;
        let d = match_spectra(&exact, &pert)?.residuals.into_iter().fold(0.0, f64::max);
        println!("Gamma {gamma:>6}: max deviation {d:.3e}  Gamma^2 * deviation {:.1}", d * gamma * gamma);
    }
    Ok(())
}
