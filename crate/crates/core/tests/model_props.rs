mod common;

use common::{below, random_coef, random_network, random_spec};
use gnar_core::linalg::{eigenvalues, spectral_radius, EigenOptions};
use gnar_core::model::{companion_matrix, constraint_matrix, stationarity_margin, to_var_matrices, AlphaMode};
use gnar_core::{Matrix, RngStream};
use proptest::prelude::*;

fn random_instance(seed: u64, max_margin: f64) -> (gnar_core::Network, gnar_core::ModelSpec, gnar_core::CoefficientSet) {
    let mut rng = RngStream::new(seed);
    let n = 2 + below(&mut rng, 5);
    let n_cov = 1 + below(&mut rng, 2);
    let directed = rng.next_uniform() < 0.5;
    let net = random_network(&mut rng, n, directed, n_cov, 0.4, false);
    let spec = random_spec(&mut rng, n, n_cov, 3, 3);
    let coef = random_coef(&mut rng, &spec, n, max_margin);
    (net, spec, coef)
}

#[test]
fn margin_below_one_gives_stable_companion() {
    let mut checked = 0;
    for seed in 0..150 {
        let (net, spec, coef) = random_instance(seed, 0.999);
        let report = stationarity_margin(&spec, &coef, net.n_nodes()).unwrap();
        assert!(report.sufficient_condition_holds);
        let phis = to_var_matrices(&net, &spec, &coef).unwrap();
        let rho = spectral_radius(&companion_matrix(&phis).unwrap()).unwrap();
        assert!(rho < 1.0, "seed {seed}: radius {rho} with margin {}", report.max_margin());
        checked += 1;
    }
    assert!(checked >= 100);
}

/// Column-stacked `[φ_1 … φ_p]`.
fn vec_phis(phis: &[Matrix]) -> Vec<f64> {
    phis.iter().flat_map(|m| m.vec_cols()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn constraint_matrix_reproduces_var_matrices(seed in any::<u64>()) {
        let (net, spec, coef) = random_instance(seed, 2.0);
        let n = net.n_nodes();
        let r = constraint_matrix(&net, &spec).unwrap();
        let gamma = coef.to_gamma(&spec, n).unwrap();
        prop_assert_eq!(r.cols(), spec.n_params(n));
        prop_assert_eq!(r.rows(), spec.p() * n * n);
        let via_r = r.mul_vec(&gamma).unwrap();
        let direct = vec_phis(&to_var_matrices(&net, &spec, &coef).unwrap());
        for (a, b) in via_r.iter().zip(&direct) {
            prop_assert!((a - b).abs() <= 1e-14, "{} vs {}", a, b);
        }
    }

    #[test]
    fn parameter_count_formulas(seed in any::<u64>()) {
        let mut rng = RngStream::new(seed);
        let n = 2 + below(&mut rng, 6);
        let c = 1 + below(&mut rng, 3);
        let spec = random_spec(&mut rng, n, c, 4, 4);
        let sum_s: usize = spec.stages().iter().sum();
        let expected = match spec.alpha_mode() {
            AlphaMode::Global => spec.p() + c * sum_s,
            AlphaMode::PerNode => n * spec.p() + c * sum_s,
            AlphaMode::PerGroup(g) => g.n_groups() * (spec.p() + c * sum_s),
        };
        prop_assert_eq!(spec.n_params(n), expected);
        prop_assert_eq!(spec.param_names(n).len(), expected);
    }

    #[test]
    fn eigenvalues_match_nalgebra(seed in any::<u64>(), n in 1..9usize) {
        let mut rng = RngStream::new(seed);
        let data: Vec<f64> = (0..n * n).map(|_| rng.next_normal()).collect();
        let ours = spectral_radius(&Matrix::from_vec(n, n, data.clone())).unwrap();
        let reference = nalgebra::DMatrix::from_row_slice(n, n, &data)
            .complex_eigenvalues()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        prop_assert!((ours - reference).abs() <= 1e-8 * reference.max(1.0), "{} vs {}", ours, reference);
    }
}

#[test]
fn eigenvalues_of_gnar_companions_match_nalgebra() {
    for seed in 0..40 {
        let (net, spec, coef) = random_instance(seed + 1000, 1.5);
        let c = companion_matrix(&to_var_matrices(&net, &spec, &coef).unwrap()).unwrap();
        let mut ours: Vec<f64> = eigenvalues(&c, EigenOptions::default()).unwrap().iter().map(|(a, b)| a.hypot(*b)).collect();
        let m = nalgebra::DMatrix::from_row_slice(c.rows(), c.cols(), c.as_slice());
        let mut theirs: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.norm()).collect();
        ours.sort_by(f64::total_cmp);
        theirs.sort_by(f64::total_cmp);
        // Sparse networks give defective repeated roots, which both
        // algorithms only resolve to about the square root of machine precision.
        for (a, b) in ours.iter().zip(&theirs) {
            assert!((a - b).abs() < 1e-4, "seed {seed}: {a} vs {b}");
        }
        let (ra, rb) = (ours.last().unwrap(), theirs.last().unwrap());
        assert!((ra - rb).abs() < 1e-6 * rb.max(1.0), "seed {seed}: radius {ra} vs {rb}");
    }
}
