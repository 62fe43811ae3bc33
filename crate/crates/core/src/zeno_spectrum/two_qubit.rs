//! Closed-form spectrum of the two-qubit chain (`N = 1`, target up, `mu = 1`,
//! `J = (1, gamma, Delta)`) through order 1/Gamma.

use crate::error::{Error, Result};
use crate::operator_algebra::{c, C64};

/// The 16 eigenvalues, grouped as stripe 0 (4), stripes 1&2 (8), stripe 3 (4).
pub fn two_qubit_closed_forms(aniso: f64, delta: f64, gamma: f64) -> Result<Vec<C64>> {
    if delta == 0.0 {
        return Err(Error::InvalidParameter("Delta = 0 is the free-fermion point".into()));
    }
    if !(gamma > 0.0) || !aniso.is_finite() || !delta.is_finite() {
        return Err(Error::InvalidParameter(format!("gamma = {gamma}, aniso = {aniso}, delta = {delta}")));
    }
    let gp = 4.0 * (1.0 + aniso * aniso);
    let gm = 4.0 * (1.0 - aniso * aniso);
    let w = 2.0 * delta;
    let h = -gamma / 2.0;
    Ok(vec![
        c(0.0, 0.0),
        c(-2.0 * gp / gamma, 0.0),
        c(-gp / gamma, w),
        c(-gp / gamma, -w),
        c(h, 0.0),
        c(h, 0.0),
        c(h + 2.0 * gm / gamma, 0.0),
        c(h - 2.0 * gm / gamma, 0.0),
        c(h + 8.0 * aniso / gamma, w),
        c(h + 8.0 * aniso / gamma, -w),
        c(h - 8.0 * aniso / gamma, w),
        c(h - 8.0 * aniso / gamma, -w),
        c(-gamma, 0.0),
        c(-gamma + 2.0 * gp / gamma, 0.0),
        c(-gamma + gp / gamma, w),
        c(-gamma + gp / gamma, -w),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quoted_coherence_value() {
        let v = two_qubit_closed_forms(0.5, 1.0, 100.0).unwrap();
        assert!(v.iter().any(|z| (z - c(-0.05, -2.0)).norm() < 1e-15));
        assert_eq!(v.len(), 16);
    }

    #[test]
    fn free_fermion_point_rejected() {
        assert!(two_qubit_closed_forms(0.5, 0.0, 100.0).is_err());
    }

    #[test]
    fn closed_under_conjugation() {
        let v = two_qubit_closed_forms(0.3, -0.7, 40.0).unwrap();
        for z in &v {
            assert!(v.iter().any(|y| (y - z.conj()).norm() < 1e-14));
        }
    }
}
