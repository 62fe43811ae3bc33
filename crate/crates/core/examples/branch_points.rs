//! Branch points of the two-qubit Liouvillian spectrum along Gamma.
//!
//! cargo run --release --example branch_points

use lindblad_zeno::analysis::{ep_scan, EpScanOptions};
use lindblad_zeno::lindblad_model::presets;

fn main() -> lindblad_zeno::Result<()> {
    let gammas: Vec<f64> = (0..=760).map(|i| 2.0 + 0.05 * i as f64).collect();
    let scan = ep_scan(&presets::two_qubit(1.0), &gammas, &EpScanOptions::default())?;
    for bp in &scan.branch_points {
        println!("Gamma = {:.3} +- {:.3}  trajectories {:?}", bp.gamma, bp.uncertainty, bp.trajectories);
    }
    if let Some(g) = scan.gamma_cr() {
        println!("rightmost branch point {g:.3}");
    }
    Ok(())
}
