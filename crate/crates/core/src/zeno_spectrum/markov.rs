//! Cycle condition `M_ab M_bc M_ca = M_ac M_cb M_ba` for a classical rate matrix.
//!
//! Triangles only constrain cycles whose rates are all nonzero, so the check
//! also tests detailed balance `pi_a M_ba = pi_b M_ab` edge by edge against the
//! stationary distribution. That covers cycles of any length.
//!
//! Rates are trusted only up to an absolute `NOISE_REL * max M`; both tests
//! subtract the propagated noise before comparing, so a rate sitting at
//! roundoff level never decides the outcome on its own.

use faer::Mat;
use serde::Serialize;

use crate::error::{Error, Result};

pub const KOLMOGOROV_TOL: f64 = 1e-8;
const NOISE_REL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KolmogorovReport {
    pub pass: bool,
    /// Largest `|P - Q| / max(P, Q)` over triples and `|J_ab - J_ba| / max J`
    /// over edges, each after removing the noise allowance.
    pub max_violation: f64,
    pub triples_checked: usize,
    pub edges_checked: usize,
}

pub fn kolmogorov_check(m: &Mat<f64>) -> Result<KolmogorovReport> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::Dimension(format!("rate matrix is {}x{}", n, m.ncols())));
    }
    let mut mmax = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            if a != b {
                if m[(a, b)] < 0.0 {
                    return Err(Error::InvalidParameter(format!("negative rate M[{a},{b}] = {:e}", m[(a, b)])));
                }
                mmax = mmax.max(m[(a, b)]);
            }
        }
    }
    let delta = NOISE_REL * mmax;
    let mut worst = 0.0f64;
    let mut checked = 0;
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let (p, p_noise) = cycle_product([m[(a, b)], m[(b, c)], m[(c, a)]], delta);
                let (q, q_noise) = cycle_product([m[(a, c)], m[(c, b)], m[(b, a)]], delta);
                let noise = p_noise + q_noise;
                let top = p.max(q);
                if top <= noise {
                    continue;
                }
                checked += 1;
                worst = worst.max(((p - q).abs() - noise).max(0.0) / top);
            }
        }
    }
    let (edge_worst, edges) = flux_defect(m, delta)?;
    let worst = worst.max(edge_worst);
    Ok(KolmogorovReport { pass: worst <= KOLMOGOROV_TOL, max_violation: worst, triples_checked: checked, edges_checked: edges })
}

/// Product of three rates and how far it can move if each moves by `delta`.
fn cycle_product(r: [f64; 3], delta: f64) -> (f64, f64) {
    let p = r[0] * r[1] * r[2];
    (p, (r[0] + delta) * (r[1] + delta) * (r[2] + delta) - p)
}

/// Stationary distribution of the off-diagonal rates of `M` (its diagonal is
/// not read). When the kernel is not simple, a uniform rate `delta / n`
/// between all states picks a positive one.
fn stationary(m: &Mat<f64>, delta: f64) -> Result<Vec<f64>> {
    let n = m.nrows();
    let kernel = |eps: f64| -> Result<(Vec<f64>, bool)> {
        let mut g = Mat::from_fn(n, n, |a, b| if a == b { 0.0 } else { m[(a, b)] + eps });
        for b in 0..n {
            let out: f64 = (0..n).map(|a| g[(a, b)]).sum();
            g[(b, b)] = -out;
        }
        let svd = g.svd().map_err(|e| Error::Eigensolver(format!("svd: {e:?}")))?;
        let s = svd.S();
        let simple = s[n - 2] > 1e-9 * s[0];
        let v = svd.V();
        Ok(((0..n).map(|i| v[(i, n - 1)]).collect(), simple))
    };
    let (mut pi, simple) = kernel(0.0)?;
    if !simple {
        pi = kernel(delta / n as f64)?.0;
    }
    let sum: f64 = pi.iter().sum();
    if sum.abs() < 1e-300 {
        return Err(Error::Numerical("stationary vector sums to zero".into()));
    }
    for x in &mut pi {
        *x = (*x / sum).max(0.0);
    }
    Ok(pi)
}

/// `max |pi_b M_ab - pi_a M_ba|` over edges relative to the largest one-way
/// flux, less the flux noise `delta (pi_a + pi_b)`.
fn flux_defect(m: &Mat<f64>, delta: f64) -> Result<(f64, usize)> {
    let n = m.nrows();
    if n < 2 {
        return Ok((0.0, 0));
    }
    let pi = stationary(m, delta)?;
    let mut jmax = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            if a != b {
                jmax = jmax.max(pi[b] * m[(a, b)]);
            }
        }
    }
    if jmax == 0.0 {
        return Ok((0.0, 0));
    }
    let mut worst = 0.0f64;
    let mut edges = 0;
    for a in 0..n {
        for b in a + 1..n {
            let noise = delta * (pi[a] + pi[b]);
            let (ba, ab) = (pi[a] * m[(b, a)], pi[b] * m[(a, b)]);
            if ab.max(ba) <= noise {
                continue;
            }
            edges += 1;
            worst = worst.max(((ab - ba).abs() - noise).max(0.0) / jmax);
        }
    }
    Ok((worst, edges))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_rates_pass_exactly() {
        let m = Mat::from_fn(4, 4, |a, b| if a == b { -3.0 } else { 1.0 + (a + b) as f64 });
        let r = kolmogorov_check(&m).unwrap();
        assert!(r.pass);
        assert_eq!(r.max_violation, 0.0);
        assert_eq!(r.triples_checked, 4);
        assert_eq!(r.edges_checked, 6);
    }

    #[test]
    fn driven_square_fails_without_triangles() {
        // a 4-cycle with no chords: no triangle is complete
        let m = Mat::from_fn(4, 4, |a, b| {
            if (a + 1) % 4 == b {
                1.0
            } else if (b + 1) % 4 == a {
                3.0
            } else {
                0.0
            }
        });
        let r = kolmogorov_check(&m).unwrap();
        assert_eq!(r.triples_checked, 0);
        assert!(!r.pass);
        // uniform pi, fluxes 1/4 one way and 3/4 the other
        assert!((r.max_violation - 2.0 / 3.0).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn reversible_square_passes() {
        // rates from a Metropolis chain on a 4-cycle with weights pi
        let pi: [f64; 4] = [1.0, 2.0, 0.5, 4.0];
        let m = Mat::from_fn(4, 4, |a, b| {
            let adjacent = (a + 1) % 4 == b || (b + 1) % 4 == a;
            if adjacent {
                (pi[a] / pi[b]).min(1.0)
            } else {
                0.0
            }
        });
        let r = kolmogorov_check(&m).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn driven_cycle_fails() {
        // rates 2 clockwise, 1 counter-clockwise on a triangle
        let m = Mat::from_fn(3, 3, |a, b| if a == b { 0.0 } else if (b + 1) % 3 == a { 2.0 } else { 1.0 });
        let r = kolmogorov_check(&m).unwrap();
        assert!(!r.pass);
        assert!((r.max_violation - 7.0 / 8.0).abs() < 1e-8);
    }

    #[test]
    fn roundoff_rates_do_not_decide() {
        // a reversible chain with one state almost never entered: the rate
        // into it sits below the noise, the rate out of it does not
        let m = Mat::from_fn(3, 3, |a, b| match (a, b) {
            (a, b) if a == b => 0.0,
            (2, _) => 1e-13,
            (_, 2) => 1e-6,
            _ => 1.0,
        });
        let r = kolmogorov_check(&m).unwrap();
        assert!(r.pass, "{r:?}");
        // a genuinely one-way edge between well-populated states still fails
        let one_way = Mat::from_fn(3, 3, |a, b| if (a, b) == (0, 1) { 1e-17 } else if a == b { 0.0 } else { 1.0 });
        let one_way_r = kolmogorov_check(&one_way).unwrap();
        assert!(!one_way_r.pass);
        assert!(one_way_r.max_violation > 0.3, "{one_way_r:?}");
    }

    #[test]
    fn negative_rate_rejected() {
        let m = Mat::from_fn(2, 2, |a, b| if a == b { 0.0 } else { -1.0 });
        assert!(kolmogorov_check(&m).is_err());
    }
}
