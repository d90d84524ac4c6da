#![allow(dead_code)]

use gnar_core::model::{AlphaMode, CoefficientSet, Grouping, ModelSpec};
use gnar_core::network::{Edge, Network};
use gnar_core::RngStream;

pub fn five_net() -> Network {
    let names = ["A", "B", "C", "D", "E"].iter().map(|s| s.to_string()).collect();
    let edges = vec![Edge::unit(0, 3), Edge::unit(0, 4), Edge::unit(1, 2), Edge::unit(1, 3), Edge::unit(2, 3)];
    Network::new(names, false, 1, edges).unwrap()
}

pub fn uniform(rng: &mut RngStream, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.next_uniform()
}

pub fn below(rng: &mut RngStream, n: usize) -> usize {
    (rng.next_uniform() * n as f64) as usize
}

/// Random network. Integer distances in `1..=4` when `int_dists`, so that
/// path sums are exact and ties actually occur.
pub fn random_network(rng: &mut RngStream, n: usize, directed: bool, n_cov: usize, p_edge: f64, int_dists: bool) -> Network {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j || (!directed && j < i) {
                continue;
            }
            if rng.next_uniform() < p_edge {
                let dist = if int_dists { 1.0 + below(rng, 4) as f64 } else { uniform(rng, 0.2, 3.0) };
                edges.push(Edge::new(i, j, dist, 1 + below(rng, n_cov)));
            }
        }
    }
    Network::with_default_names(n, directed, n_cov, edges).unwrap()
}

pub fn random_spec(rng: &mut RngStream, n: usize, n_cov: usize, max_p: usize, max_s: usize) -> ModelSpec {
    let p = 1 + below(rng, max_p);
    let s = (0..p).map(|_| below(rng, max_s + 1)).collect();
    let mode = match below(rng, 3) {
        0 => AlphaMode::Global,
        1 => AlphaMode::PerNode,
        _ => {
            let labels: Vec<String> = (0..n).map(|_| ["g1", "g2"][below(rng, 2)].to_string()).collect();
            AlphaMode::PerGroup(Grouping::from_node_labels(&labels).unwrap())
        }
    };
    ModelSpec::new(p, s, n_cov, mode).unwrap()
}

/// Coefficients with every node margin at most `max_margin`.
pub fn random_coef(rng: &mut RngStream, spec: &ModelSpec, n: usize, max_margin: f64) -> CoefficientSet {
    let m = spec.n_params(n);
    let raw: Vec<f64> = (0..m).map(|_| uniform(rng, -1.0, 1.0)).collect();
    let sigma = (0..n).map(|_| uniform(rng, 0.5, 1.5)).collect::<Vec<_>>();
    let c = CoefficientSet::from_gamma(spec, n, &raw, sigma.clone()).unwrap();
    let worst = gnar_core::model::stationarity_margin(spec, &c, n).unwrap().max_margin();
    let target = max_margin * uniform(rng, 0.05, 1.0);
    let scale = if worst > 0.0 { target / worst } else { 0.0 };
    let scaled: Vec<f64> = raw.iter().map(|x| x * scale).collect();
    CoefficientSet::from_gamma(spec, n, &scaled, sigma).unwrap()
}

/// Directed arc list `(from, to, dist, cov)` expanded independently of the
/// library's internal adjacency.
pub fn arcs(net: &Network) -> Vec<(usize, usize, f64, usize)> {
    let mut out = Vec::new();
    for e in net.edges() {
        out.push((e.from, e.to, e.dist, e.cov));
        if !net.is_directed() {
            out.push((e.to, e.from, e.dist, e.cov));
        }
    }
    out
}

/// Hop distance from `origin` by plain breadth-first search.
pub fn bfs_depth(net: &Network, origin: usize) -> Vec<Option<usize>> {
    let arcs = arcs(net);
    let mut depth = vec![None; net.n_nodes()];
    depth[origin] = Some(0);
    let mut queue = std::collections::VecDeque::from([origin]);
    while let Some(u) = queue.pop_front() {
        for &(a, b, _, _) in &arcs {
            if a == u && depth[b].is_none() {
                depth[b] = Some(depth[u].unwrap() + 1);
                queue.push_back(b);
            }
        }
    }
    depth
}

/// Stage-`r` members of `origin` by enumerating every layer-monotone path
/// of `r` edges. Returns `(node, min distance, covariate of the last edge
/// on the lexicographically smallest minimising path)`.
pub fn brute_force_stage(net: &Network, origin: usize, r: usize) -> Vec<(usize, f64, usize)> {
    let depth = bfs_depth(net, origin);
    let arcs = arcs(net);
    let mut best: std::collections::BTreeMap<usize, (f64, Vec<usize>, usize)> = Default::default();
    fn walk(
        arcs: &[(usize, usize, f64, usize)],
        depth: &[Option<usize>],
        path: &mut Vec<usize>,
        dist: f64,
        r: usize,
        best: &mut std::collections::BTreeMap<usize, (f64, Vec<usize>, usize)>,
        last_cov: usize,
    ) {
        let k = path.len() - 1;
        let u = *path.last().unwrap();
        if k == r {
            let better = match best.get(&u) {
                None => true,
                Some((d, p, _)) => dist < *d || (dist == *d && path[..] < p[..]),
            };
            if better {
                best.insert(u, (dist, path.clone(), last_cov));
            }
            return;
        }
        for &(a, b, d, c) in arcs {
            if a == u && depth[b] == Some(k + 1) {
                path.push(b);
                walk(arcs, depth, path, dist + d, r, best, c);
                path.pop();
            }
        }
    }
    walk(&arcs, &depth, &mut vec![origin], 0.0, r, &mut best, 0);
    best.into_iter().map(|(v, (d, _, c))| (v, d, c)).collect()
}
