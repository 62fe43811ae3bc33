mod common;

use common::*;
use lindblad_zeno::analysis::{assignment_cost, min_cost_assignment};
use lindblad_zeno::lindblad_model::ZenoSetup;
use lindblad_zeno::zeno_spectrum::{effective_model_stripe0, ZenoOptions};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn liouvillian_preserves_trace(cfg in arb_config(1..=3, 0.1..500.0)) {
        prop_assert!(trace_preservation_defect(&cfg) <= TRACE_TOL);
    }

    #[test]
    fn dissipator_basis_is_biorthogonal(cfg in arb_config(1..=1, 1.0..2.0)) {
        prop_assert!(biorthogonality_defect(&cfg) <= BIORTH_TOL);
    }

    #[test]
    fn steady_state_is_in_the_kernel(cfg in arb_generic_config(1..=2, 0.5..200.0)) {
        let (res, tr) = ness_residual(&cfg);
        prop_assert!(res <= NESS_TOL && tr <= 1e-12, "residual {res:e}, trace defect {tr:e}");
    }

    #[test]
    fn flipped_operators_are_isospectral(cfg in arb_config(1..=3, 1.0..2.0)) {
        let (a, b) = isospectrality_defects(&cfg);
        prop_assert!(a <= ISOSPECTRAL_TOL && b <= ISOSPECTRAL_TOL, "{a:e} {b:e}");
    }

    #[test]
    fn exact_spectrum_is_closed_under_conjugation(cfg in arb_config(1..=2, 0.1..300.0)) {
        prop_assert!(exact_conjugation_defect(&cfg) <= CONJUGATION_TOL);
    }

    #[test]
    fn pure_target_markov_matrix_is_reversible(cfg in arb_generic_config(1..=3, 1.0..2.0)) {
        let cfg = common::config(cfg.n_free, cfg.j, cfg.theta, cfg.phi, 1.0, cfg.gamma);
        prop_assert!(kolmogorov_passes(&cfg));
    }

    #[test]
    fn real_perturbative_eigenvalues_for_pure_targets(cfg in arb_generic_config(1..=3, 1e3..1e4)) {
        let cfg = common::config(cfg.n_free, cfg.j, cfg.theta, cfg.phi, 1.0, cfg.gamma);
        let expected = 1 << (cfg.n_free + 2);
        prop_assert_eq!(perturbative_real_count_with(&cfg, &ZenoOptions::exact_only()), expected);
        // near-degenerate clusters may turn real pairs complex at finite
        // Gamma; the complex values must then be as close to exact as any
        if perturbative_real_count(&cfg) != expected {
            let d = perturbative_exact_distance(&cfg);
            prop_assert!(d <= ORACLE_SCALE / (cfg.gamma * cfg.gamma), "{d:e}");
        }
    }

    #[test]
    fn direct_and_factorized_stripe12_agree(cfg in arb_generic_config(1..=2, 1e4..1e5)) {
        let d = cross_path_distance(&cfg);
        prop_assert!(d <= CROSS_PATH_REL_TOL * cfg.gamma, "{d:e}");
    }

    #[test]
    fn effective_rates_match_closed_form(cfg in arb_config(1..=2, 1.0..2.0)) {
        let model = effective_model_stripe0(&ZenoSetup::new(&cfg).unwrap()).unwrap();
        let mu = cfg.mu;
        let mut want = vec![2.0 * (1.0 + mu), 2.0 * (1.0 - mu), 0.5 * (1.0 - mu * mu)];
        want.sort_by(f64::total_cmp);
        let mut got = model.rates.clone();
        got.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            prop_assert!((g - w).abs() < 1e-10, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn assignment_is_optimal(n in 1usize..6, seed in prop::collection::vec(0.0..10.0f64, 36)) {
        let cost: Vec<f64> = seed[..n * n].to_vec();
        let perm = min_cost_assignment(n, &cost);
        let best = permutations(n).into_iter().map(|p| assignment_cost(n, &cost, &p)).fold(f64::INFINITY, f64::min);
        prop_assert!(assignment_cost(n, &cost, &perm) <= best + 1e-12);
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn complex_markov_pair(cfg: &lindblad_zeno::lindblad_model::XYZChainConfig) {
    use lindblad_zeno::exact_spectrum::exact_liouvillian_spectrum;
    use lindblad_zeno::zeno_spectrum::stripe0_markov_matrix;
    use lindblad_zeno::C64;

    let m = stripe0_markov_matrix(&ZenoSetup::new(cfg).unwrap()).unwrap();
    let eig = lindblad_zeno::linalg::eigenvalues_of(m.nrows(), |a, b| C64::new(m[(a, b)], 0.0)).unwrap();
    let pair: Vec<C64> = eig.iter().copied().filter(|l| l.im.abs() > 1e-3).collect();
    assert_eq!(pair.len(), 2);
    assert!(!kolmogorov_passes(cfg));
    assert!(perturbative_real_count(cfg) < 1 << (cfg.n_free + 2));
    let exact = exact_liouvillian_spectrum(cfg, false).unwrap().eigenvalues;
    for p in pair {
        let want = p / cfg.gamma;
        let d = exact.iter().map(|l| (l - want).norm()).fold(f64::INFINITY, f64::min);
        assert!(d < 0.25 * want.im.abs(), "{d:e}");
    }
}

// Away from mu = +-1 the rate matrix need not be similar to a symmetric one.
// In these draws it has a complex pair, and the exact spectrum follows it.

#[test]
fn complex_markov_pair_three_free_spins() {
    let j = [-1.5192369350795256, 0.5643040058179061, -0.9294097045792528];
    complex_markov_pair(&common::config(3, j, 1.8730474507679253, 3.8643995464794836, -0.18636354299434985, 1e4));
}

#[test]
fn complex_markov_pair_two_free_spins() {
    let j = [-0.5703710211815879, -0.3378199629674288, -1.575109860215467];
    complex_markov_pair(&common::config(2, j, 0.9905594219960222, 0.0, -0.7, 1e4));
}
