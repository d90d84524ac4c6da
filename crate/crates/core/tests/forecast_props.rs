mod common;

use common::{below, random_coef, random_network, random_spec};
use gnar_core::forecast::predict;
use gnar_core::model::to_var_matrices;
use gnar_core::sim::{gnar_simulate, SimConfig};
use gnar_core::{RngStream, SeriesMatrix};
use proptest::prelude::*;

fn setup(seed: u64, max_margin: f64) -> (gnar_core::Network, gnar_core::ModelSpec, gnar_core::CoefficientSet, SeriesMatrix) {
    let mut rng = RngStream::new(seed);
    let n = 2 + below(&mut rng, 5);
    let n_cov = 1 + below(&mut rng, 2);
    let directed = rng.next_uniform() < 0.5;
    let net = random_network(&mut rng, n, directed, n_cov, 0.5, false);
    let spec = random_spec(&mut rng, n, n_cov, 3, 3);
    let coef = random_coef(&mut rng, &spec, n, max_margin);
    let hist = gnar_simulate(&net, &spec, &coef, &SimConfig::new(10), &mut rng).unwrap().series;
    (net, spec, coef, hist)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn one_step_matches_var_form(seed in any::<u64>()) {
        let (net, spec, coef, hist) = setup(seed, 0.95);
        let f = predict(&net, &spec, &coef, &hist, 1).unwrap();
        let phis = to_var_matrices(&net, &spec, &coef).unwrap();
        let m = hist.to_matrix().unwrap();
        let t = m.rows();
        for i in 0..net.n_nodes() {
            let expect: f64 = phis
                .iter()
                .enumerate()
                .map(|(k, phi)| (0..m.cols()).map(|q| phi[(i, q)] * m[(t - 1 - k, q)]).sum::<f64>())
                .sum();
            prop_assert!((f[(0, i)] - expect).abs() <= 1e-12, "{} vs {}", f[(0, i)], expect);
        }
    }

    #[test]
    fn longer_horizon_extends_shorter(seed in any::<u64>()) {
        let (net, spec, coef, hist) = setup(seed, 0.95);
        let one = predict(&net, &spec, &coef, &hist, 1).unwrap();
        let two = predict(&net, &spec, &coef, &hist, 2).unwrap();
        prop_assert_eq!(one.row(0), two.row(0));
    }

    #[test]
    fn forecasts_are_linear_in_history(seed in any::<u64>(), a in -3.0..3.0f64) {
        let (net, spec, coef, hist) = setup(seed, 0.95);
        let scaled = hist.map(|_, _, x| a * x);
        let f = predict(&net, &spec, &coef, &hist, 3).unwrap();
        let g = predict(&net, &spec, &coef, &scaled, 3).unwrap();
        prop_assert!(f.scale(a).max_abs_diff(&g) <= 1e-12 * f.max_abs().max(1.0));
    }

    #[test]
    fn stationary_forecasts_decay(seed in any::<u64>()) {
        let (net, spec, coef, hist) = setup(seed, 0.9);
        let f = predict(&net, &spec, &coef, &hist, 200).unwrap();
        let last = f.row(199).iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let scale = hist.to_matrix().unwrap().max_abs();
        prop_assert!(last < 1e-6 * scale, "{} vs history {}", last, scale);
    }
}

#[test]
fn zero_history_forecasts_zero() {
    let (net, spec, coef, hist) = setup(3, 0.9);
    let zero = hist.map(|_, _, _| 0.0);
    assert_eq!(predict(&net, &spec, &coef, &zero, 5).unwrap().max_abs(), 0.0);
}
