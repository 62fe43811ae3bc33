//! Exact versus perturbative spectra: stripe classification, optimal matching,
//! error scaling with Gamma and branch points along a Gamma grid.

pub mod assignment;
mod branch;

use rayon::prelude::*;
use serde::Serialize;

pub use assignment::{assignment_cost, min_cost_assignment};
pub use branch::{detect_branch_points, ep_scan, track_eigenvalues, BranchPoint, CoarseCell, EpScanOptions, EpScanResult};

use crate::error::{Error, Result};
use crate::exact_spectrum::exact_liouvillian_spectrum;
use crate::lindblad_model::{XYZChainConfig, ZenoSetup};
use crate::operator_algebra::C64;
use crate::zeno_spectrum::{zeno_spectrum, ZenoOptions, ZenoSpectrum};

/// Sweep points with a larger error are left out of the fits.
pub const FIT_ERROR_CEILING: f64 = 0.1;

/// One stripe position `Gamma c` shared by a degeneracy class.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StripeLevel {
    pub label: String,
    pub c: C64,
}

impl StripeLevel {
    pub fn from_setup(setup: &ZenoSetup) -> Vec<Self> {
        setup
            .basis
            .classes
            .iter()
            .map(|cl| StripeLevel {
                label: cl.iter().map(|m| m.to_string()).collect::<Vec<_>>().join("&"),
                c: setup.basis.c[cl[0]],
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StripeClassification {
    /// Index into the stripe levels for every eigenvalue.
    pub labels: Vec<usize>,
    pub counts: Vec<usize>,
    /// Smallest `Gamma |Re c_k - Re c_l|` over distinct levels.
    pub min_gap: f64,
    /// Largest spread of real parts within one stripe.
    pub max_spread: f64,
    pub overlap_warning: Option<String>,
}

/// Assigns each eigenvalue to the level with the nearest real part `Gamma Re c_k`.
pub fn classify_stripes(eigs: &[C64], levels: &[StripeLevel], gamma: f64) -> StripeClassification {
    let centers: Vec<f64> = levels.iter().map(|l| gamma * l.c.re).collect();
    let labels: Vec<usize> = eigs
        .iter()
        .map(|l| {
            (0..centers.len()).min_by(|&a, &b| (l.re - centers[a]).abs().total_cmp(&(l.re - centers[b]).abs())).unwrap_or(0)
        })
        .collect();
    let mut counts = vec![0; levels.len()];
    let mut lo = vec![f64::INFINITY; levels.len()];
    let mut hi = vec![f64::NEG_INFINITY; levels.len()];
    for (l, &k) in eigs.iter().zip(&labels) {
        counts[k] += 1;
        lo[k] = lo[k].min(l.re);
        hi[k] = hi[k].max(l.re);
    }
    let max_spread = (0..levels.len()).filter(|&k| counts[k] > 0).map(|k| hi[k] - lo[k]).fold(0.0, f64::max);
    let mut min_gap = f64::INFINITY;
    for a in 0..centers.len() {
        for b in a + 1..centers.len() {
            min_gap = min_gap.min((centers[a] - centers[b]).abs());
        }
    }
    let overlap_warning = (min_gap <= 2.0 * max_spread).then(|| {
        format!("stripes overlap: gap {min_gap:.6e} is not above twice the spread {max_spread:.6e}")
    });
    StripeClassification { labels, counts, min_gap, max_spread, overlap_warning }
}

/// Optimal bijection between two equal-length lists under `|a - b|`.
#[derive(Clone, Debug, Serialize)]
pub struct Matching {
    /// `pairs[i] = (exact[i], pert[perm[i]])`.
    pub perm: Vec<usize>,
    pub residuals: Vec<f64>,
    pub total_cost: f64,
}

pub fn match_spectra(exact: &[C64], pert: &[C64]) -> Result<Matching> {
    if exact.len() != pert.len() {
        return Err(Error::LengthMismatch(exact.len(), pert.len()));
    }
    let n = exact.len();
    let cost: Vec<f64> = exact.iter().flat_map(|e| pert.iter().map(move |p| (e - p).norm())).collect();
    let perm = min_cost_assignment(n, &cost);
    let residuals: Vec<f64> = (0..n).map(|i| cost[i * n + perm[i]]).collect();
    let total_cost = residuals.iter().sum();
    Ok(Matching { perm, residuals, total_cost })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResidualStats {
    pub std_dev: f64,
    pub mean_abs: f64,
    pub max_abs: f64,
}

impl ResidualStats {
    /// Population standard deviation, mean and maximum of the moduli.
    pub fn of(r: &[f64]) -> Self {
        if r.is_empty() {
            return Self { std_dev: 0.0, mean_abs: 0.0, max_abs: 0.0 };
        }
        let n = r.len() as f64;
        let mean = r.iter().sum::<f64>() / n;
        let var = r.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        Self { std_dev: var.sqrt(), mean_abs: mean, max_abs: r.iter().cloned().fold(0.0, f64::max) }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StripeComparison {
    pub label: String,
    pub pairs: Vec<(C64, C64)>,
    pub residuals: Vec<f64>,
    pub stats: ResidualStats,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumComparison {
    pub gamma: f64,
    pub per_stripe: Vec<StripeComparison>,
    pub unmatched_exact: Vec<C64>,
    pub unmatched_pert: Vec<C64>,
    /// Stripe populations of the exact spectrum differed from the perturbative
    /// ones, so the matching ran over the whole spectrum at once.
    pub global_fallback: bool,
    pub classification: StripeClassification,
}

impl SpectrumComparison {
    pub fn is_complete(&self) -> bool {
        self.unmatched_exact.is_empty() && self.unmatched_pert.is_empty()
    }

    pub fn matched(&self) -> usize {
        self.per_stripe.iter().map(|s| s.pairs.len()).sum()
    }

    pub fn max_residual(&self) -> f64 {
        self.per_stripe.iter().map(|s| s.stats.max_abs).fold(0.0, f64::max)
    }

    pub fn stripe(&self, label: &str) -> Option<&StripeComparison> {
        self.per_stripe.iter().find(|s| s.label == label)
    }
}

/// Matches stripe by stripe when the real-part classification of the exact
/// spectrum reproduces the perturbative stripe populations, globally otherwise.
pub fn compare_spectra(exact: &[C64], pert: &ZenoSpectrum, levels: &[StripeLevel]) -> Result<SpectrumComparison> {
    let gamma = pert.gamma;
    let classification = classify_stripes(exact, levels, gamma);
    let level_of = |c: C64| levels.iter().position(|l| (l.c - c).norm() < 1e-9).ok_or_else(|| Error::Numerical(format!("no stripe level at {c}")));
    let mut pert_by_level: Vec<Vec<C64>> = vec![Vec::new(); levels.len()];
    for s in &pert.stripes {
        pert_by_level[level_of(s.key.c)?].extend(s.eigenvalues());
    }
    let mut exact_by_level: Vec<Vec<C64>> = vec![Vec::new(); levels.len()];
    for (l, &k) in exact.iter().zip(&classification.labels) {
        exact_by_level[k].push(*l);
    }
    let same_counts = (0..levels.len()).all(|k| exact_by_level[k].len() == pert_by_level[k].len());
    let mut per_stripe = Vec::new();
    if same_counts {
        for (k, lvl) in levels.iter().enumerate() {
            let m = match_spectra(&exact_by_level[k], &pert_by_level[k])?;
            let pairs = (0..m.perm.len()).map(|i| (exact_by_level[k][i], pert_by_level[k][m.perm[i]])).collect();
            per_stripe.push(StripeComparison { label: lvl.label.clone(), pairs, stats: ResidualStats::of(&m.residuals), residuals: m.residuals });
        }
    } else {
        let flat: Vec<(usize, C64)> = pert_by_level.iter().enumerate().flat_map(|(k, v)| v.iter().map(move |&x| (k, x))).collect();
        let pv: Vec<C64> = flat.iter().map(|p| p.1).collect();
        let m = match_spectra(exact, &pv)?;
        let mut buckets: Vec<(Vec<(C64, C64)>, Vec<f64>)> = vec![(Vec::new(), Vec::new()); levels.len()];
        for (i, &j) in m.perm.iter().enumerate() {
            let k = flat[j].0;
            buckets[k].0.push((exact[i], pv[j]));
            buckets[k].1.push(m.residuals[i]);
        }
        for (lvl, (pairs, res)) in levels.iter().zip(buckets) {
            per_stripe.push(StripeComparison { label: lvl.label.clone(), pairs, stats: ResidualStats::of(&res), residuals: res });
        }
    }
    Ok(SpectrumComparison {
        gamma,
        per_stripe,
        unmatched_exact: Vec::new(),
        unmatched_pert: Vec::new(),
        global_fallback: !same_counts,
        classification,
    })
}

/// Exact and perturbative spectra of one configuration, compared.
pub fn compare_config(cfg: &XYZChainConfig, opts: &ZenoOptions) -> Result<SpectrumComparison> {
    let setup = ZenoSetup::new(cfg)?;
    let exact = exact_liouvillian_spectrum(cfg, false)?;
    let pert = zeno_spectrum(&setup, opts)?;
    compare_spectra(&exact.eigenvalues, &pert, &StripeLevel::from_setup(&setup))
}

/// Largest distance from any eigenvalue's conjugate to the nearest eigenvalue.
pub fn conjugation_defect(eigs: &[C64]) -> f64 {
    eigs.iter()
        .map(|l| eigs.iter().map(|m| (l.conj() - m).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GammaCFit {
    /// From `log err = 2 log Gamma_c - 2 log Gamma` with the slope held at -2.
    pub gamma_c: f64,
    /// RMS residual of the fixed-slope fit in natural-log units.
    pub fit_residual: f64,
    /// Least-squares slope of `log err` against `log Gamma`.
    pub free_slope: f64,
    pub points: usize,
}

/// Fits `err = (Gamma_c / Gamma)^2` over the points with `0 < err < 0.1`.
pub fn fit_gamma_c(gammas: &[f64], errors: &[f64]) -> Result<GammaCFit> {
    if gammas.len() != errors.len() {
        return Err(Error::LengthMismatch(gammas.len(), errors.len()));
    }
    let pts: Vec<(f64, f64)> = gammas
        .iter()
        .zip(errors)
        .filter(|(_, &e)| e > 0.0 && e < FIT_ERROR_CEILING && e.is_finite())
        .map(|(&g, &e)| (g.ln(), e.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::TooFewFitPoints(pts.len()));
    }
    let n = pts.len() as f64;
    let log_gc = pts.iter().map(|(x, y)| 0.5 * y + x).sum::<f64>() / n;
    let fit_residual = (pts.iter().map(|(x, y)| (y - (2.0 * log_gc - 2.0 * x)).powi(2)).sum::<f64>() / n).sqrt();
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::TooFewFitPoints(1));
    }
    Ok(GammaCFit { gamma_c: log_gc.exp(), fit_residual, free_slope: sxy / sxx, points: pts.len() })
}

#[derive(Clone, Debug, Serialize)]
pub struct StripeCurve {
    pub label: String,
    /// Standard deviation of the matched residual moduli, one per Gamma.
    pub errors: Vec<f64>,
    pub mean_abs: Vec<f64>,
    pub fit: Option<GammaCFit>,
    pub fit_error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GammaSweepResult {
    pub gammas: Vec<f64>,
    pub stripes: Vec<StripeCurve>,
    /// Grid points whose matching was not stripe-resolved.
    pub global_fallbacks: Vec<f64>,
    /// Grid points where the comparison failed; their errors are NaN.
    pub failures: Vec<(f64, String)>,
}

impl GammaSweepResult {
    pub fn stripe(&self, label: &str) -> Option<&StripeCurve> {
        self.stripes.iter().find(|s| s.label == label)
    }

    /// Failed grid points and stripes without a fit, one message each.
    pub fn problems(&self) -> Vec<String> {
        let grid = self.failures.iter().map(|(g, e)| format!("Gamma = {g}: {e}"));
        let fits = self.stripes.iter().filter_map(|s| s.fit_error.as_ref().map(|e| format!("stripe {}: {e}", s.label)));
        grid.chain(fits).collect()
    }
}

fn check_grid(gammas: &[f64]) -> Result<()> {
    if gammas.is_empty() {
        return Err(Error::InvalidParameter("empty Gamma grid".into()));
    }
    if gammas.iter().any(|g| !(g.is_finite() && *g > 0.0)) || gammas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("Gamma grid must be positive and strictly increasing".into()));
    }
    Ok(())
}

/// Runs `f` on a pool of `jobs` threads (all cores when zero).
pub fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| Error::Numerical(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Per-stripe error curves over a Gamma grid and their `(Gamma_c / Gamma)^2` fits.
///
/// A grid point whose comparison fails is recorded and left out of the fits;
/// the sweep itself only fails when the model is invalid.
pub fn gamma_sweep(template: &XYZChainConfig, gammas: &[f64], opts: &ZenoOptions) -> Result<GammaSweepResult> {
    check_grid(gammas)?;
    let levels = StripeLevel::from_setup(&ZenoSetup::new(template)?);
    let comps: Vec<Result<SpectrumComparison>> = gammas.par_iter().map(|&g| compare_config(&template.with_gamma(g), opts)).collect();
    let stripes = levels
        .iter()
        .enumerate()
        .map(|(k, level)| {
            let pick = |f: fn(&ResidualStats) -> f64| -> Vec<f64> {
                comps.iter().map(|c| c.as_ref().map_or(f64::NAN, |c| f(&c.per_stripe[k].stats))).collect()
            };
            let errors = pick(|s| s.std_dev);
            let mean_abs = pick(|s| s.mean_abs);
            let (fit, fit_error) = match fit_gamma_c(gammas, &errors) {
                Ok(f) => (Some(f), None),
                Err(e) => (None, Some(e.to_string())),
            };
            StripeCurve { label: level.label.clone(), errors, mean_abs, fit, fit_error }
        })
        .collect();
    let global_fallbacks = comps.iter().flatten().filter(|c| c.global_fallback).map(|c| c.gamma).collect();
    let failures = gammas.iter().zip(&comps).filter_map(|(g, c)| c.as_ref().err().map(|e| (*g, e.to_string()))).collect();
    Ok(GammaSweepResult { gammas: gammas.to_vec(), stripes, global_fallbacks, failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator_algebra::c;

    fn levels() -> Vec<StripeLevel> {
        [("0", 0.0), ("1&2", -0.5), ("3", -1.0)].iter().map(|(l, x)| StripeLevel { label: l.to_string(), c: c(*x, 0.0) }).collect()
    }

    #[test]
    fn nearest_real_part() {
        let cl = classify_stripes(&[c(-9.8, 3.0)], &levels(), 20.0);
        assert_eq!(cl.labels, vec![1]);
    }

    #[test]
    fn crossing_pair_prefers_swap() {
        let m = match_spectra(&[c(0.0, 0.0), c(1.0, 0.0)], &[c(1.1, 0.0), c(0.1, 0.0)]).unwrap();
        assert_eq!(m.perm, vec![1, 0]);
        assert!((m.total_cost - 0.2).abs() < 1e-12);
    }

    #[test]
    fn uniform_shift_residuals() {
        let a: Vec<C64> = (0..6).map(|i| c(i as f64, -(i as f64) * 0.5)).collect();
        let d = c(0.01, -0.02);
        let b: Vec<C64> = a.iter().map(|x| x + d).collect();
        let m = match_spectra(&a, &b).unwrap();
        for r in &m.residuals {
            assert!((r - d.norm()).abs() < 1e-14);
        }
    }

    #[test]
    fn length_mismatch_is_an_error() {
        assert!(matches!(match_spectra(&[c(0.0, 0.0)], &[]), Err(Error::LengthMismatch(1, 0))));
    }

    #[test]
    fn synthetic_fit_recovers_gamma_c() {
        let g = [50.0, 100.0, 200.0, 400.0];
        let e: Vec<f64> = g.iter().map(|x: &f64| (5.0 / x).powi(2)).collect();
        let f = fit_gamma_c(&g, &e).unwrap();
        assert!((f.gamma_c - 5.0).abs() < 1e-12);
        assert!((f.free_slope + 2.0).abs() < 1e-12);
        assert!(f.fit_residual < 1e-12);
    }

    #[test]
    fn fit_needs_three_points() {
        assert!(matches!(fit_gamma_c(&[100.0], &[1e-3]), Err(Error::TooFewFitPoints(1))));
        // points with err >= 0.1 are dropped
        assert!(matches!(fit_gamma_c(&[1.0, 2.0, 3.0], &[1.0, 0.5, 0.01]), Err(Error::TooFewFitPoints(1))));
    }

    #[test]
    fn stats_are_population_moments() {
        let s = ResidualStats::of(&[1.0, 3.0]);
        assert_eq!(s.std_dev, 1.0);
        assert_eq!(s.mean_abs, 2.0);
        assert_eq!(s.max_abs, 3.0);
    }
}
