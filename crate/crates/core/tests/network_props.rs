mod common;

use common::{brute_force_stage, five_net, random_network};
use gnar_core::network::{AdjacencyKind, MaskMode, Network};
use gnar_core::RngStream;
use proptest::prelude::*;

fn net_strategy(max_n: usize) -> impl Strategy<Value = Network> {
    (any::<u64>(), 2..=max_n, any::<bool>(), 1..=2usize, 0.1..0.7f64)
        .prop_map(|(seed, n, directed, c, p)| random_network(&mut RngStream::new(seed), n, directed, c, p, true))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn adjacency_round_trip(seed in any::<u64>(), directed in any::<bool>()) {
        let net = random_network(&mut RngStream::new(seed), 10, directed, 1, 0.3, false);
        let a = net.to_adjacency(AdjacencyKind::Distances);
        let back = Network::from_adjacency(&a, AdjacencyKind::Distances, false).unwrap();
        // A directed graph that happens to be symmetric comes back undirected.
        prop_assert_eq!(back.to_adjacency(AdjacencyKind::Distances), a.clone());
        if !a.is_symmetric() {
            prop_assert_eq!(back.edges(), net.edges());
        }
        let w = Network::from_adjacency(&net.to_adjacency(AdjacencyKind::Weights), AdjacencyKind::Weights, false).unwrap();
        prop_assert!(w.to_adjacency(AdjacencyKind::Distances).max_abs_diff(&a) < 1e-12);
    }

    #[test]
    fn layers_are_disjoint_and_exclude_origin(net in net_strategy(8)) {
        for i in 0..net.n_nodes() {
            let layers = net.stage_layers(i, 5, None).unwrap();
            let mut seen = std::collections::BTreeSet::from([i]);
            for layer in layers {
                for m in layer {
                    prop_assert!(seen.insert(m.node));
                }
            }
        }
    }

    #[test]
    fn weights_sum_to_one(net in net_strategy(8), mask_seed in any::<u64>()) {
        let mut rng = RngStream::new(mask_seed);
        let observed: Vec<bool> = (0..net.n_nodes()).map(|_| rng.next_uniform() < 0.7).collect();
        for mode in [MaskMode::Reweight, MaskMode::Subgraph] {
            for obs in [None, Some(observed.as_slice())] {
                for i in 0..net.n_nodes() {
                    for r in 1..=4 {
                        let w = net.connection_weights(i, r, obs, mode).unwrap();
                        let live = w.entries.iter().filter(|e| obs.is_none_or(|o| o[e.node])).count();
                        if live > 0 {
                            prop_assert!((w.total() - 1.0).abs() < 1e-12);
                        } else {
                            prop_assert_eq!(w.total(), 0.0);
                        }
                        for e in &w.entries {
                            prop_assert!((0.0..=1.0).contains(&e.weight));
                            if obs.is_some_and(|o| !o[e.node]) {
                                prop_assert_eq!(e.weight, 0.0);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn weight_matrix_rows_sum_to_zero_or_one(net in net_strategy(8), r in 1..4usize) {
        let n = net.n_nodes();
        let mut total = gnar_core::Matrix::zeros(n, n);
        for c in 1..=net.n_covariates() {
            total = total.add(&net.weight_matrix(r, c, None, MaskMode::Reweight).unwrap()).unwrap();
        }
        for l in 0..n {
            let s: f64 = total.row(l).iter().sum();
            prop_assert!(s.abs() < 1e-12 || (s - 1.0).abs() < 1e-12, "row {} sums to {}", l, s);
        }
    }

    #[test]
    fn layered_distance_matches_brute_force(net in net_strategy(8)) {
        for i in 0..net.n_nodes() {
            let layers = net.stage_layers(i, 4, None).unwrap();
            for r in 1..=4 {
                let got: Vec<_> = layers[r - 1].iter().map(|m| (m.node, m.dist, m.cov)).collect();
                prop_assert_eq!(got, brute_force_stage(&net, i, r), "origin {} stage {}", i, r);
            }
        }
    }

    #[test]
    fn masking_leaves_other_stage_sets_alone(net in net_strategy(8), victim_seed in any::<u64>()) {
        let n = net.n_nodes();
        let victim = (RngStream::new(victim_seed).next_uniform() * n as f64) as usize;
        let mut observed = vec![true; n];
        observed[victim] = false;
        for i in 0..n {
            for r in 1..=3 {
                let before = net.connection_weights(i, r, None, MaskMode::Reweight).unwrap();
                if before.entries.iter().any(|e| e.node == victim) {
                    continue;
                }
                let after = net.connection_weights(i, r, Some(&observed), MaskMode::Reweight).unwrap();
                prop_assert_eq!(before, after);
            }
        }
    }
}

#[test]
fn five_node_example_sets_and_weights() {
    let net = five_net();
    let members = |i, r| net.neighbour_set(i, r, None, MaskMode::Reweight).unwrap().members;
    assert_eq!(members(3, 1), vec![0, 1, 2]);
    assert_eq!(members(4, 3), vec![1, 2]);
    assert!(members(4, 5).is_empty());
    let w = |i, r| net.connection_weights(i, r, None, MaskMode::Reweight).unwrap();
    assert_eq!(w(4, 1).weight(0), 1.0);
    assert_eq!((w(0, 1).weight(4), w(0, 1).weight(3)), (0.5, 0.5));
    let obs = [false, true, true, true, true];
    let masked = net.connection_weights(3, 1, Some(&obs), MaskMode::Reweight).unwrap();
    assert_eq!((masked.weight(0), masked.weight(1), masked.weight(2)), (0.0, 0.5, 0.5));
}
