//! Networks, stage-r neighbour sets and connection weights.
//!
//! Node ids are zero-based inside the library; file formats use one-based
//! ids. An undirected edge is stored once with `from < to` and expanded in
//! both directions when queried. Edge covariates are one-based.
//!
//! The stage-r neighbours of `i` are the nodes first reached at exactly `r`
//! hops by a breadth-first search that follows edge direction. The stage-r
//! distance to such a node is the smallest total edge length over paths of
//! `r` edges whose m-th node lies in layer m, found by dynamic programming
//! over the layers. Connection weights are inverse distances normalised to
//! sum to one over the observed members of the layer.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub dist: f64,
    /// One-based covariate label.
    pub cov: usize,
}

impl Edge {
    pub fn new(from: usize, to: usize, dist: f64, cov: usize) -> Self {
        Edge { from, to, dist, cov }
    }

    pub fn unit(from: usize, to: usize) -> Self {
        Edge { from, to, dist: 1.0, cov: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Arc {
    to: usize,
    dist: f64,
    cov: usize,
}

/// How adjacency matrix entries are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdjacencyKind {
    /// Entries are edge weights; the edge distance is the reciprocal.
    Weights,
    /// Entries are edge distances.
    Distances,
}

/// How unobserved nodes change neighbour sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MaskMode {
    /// Layers come from the full graph; unobserved members get weight zero
    /// and the rest are renormalised.
    #[default]
    Reweight,
    /// Unobserved nodes are deleted before layering, so they cannot relay
    /// paths to deeper stages.
    Subgraph,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    names: Vec<String>,
    directed: bool,
    n_covariates: usize,
    edges: Vec<Edge>,
    out: Vec<Vec<Arc>>,
}

impl Network {
    /// Validates and builds a network. Undirected edges may be given in
    /// either orientation; they are canonicalised to `from < to`.
    pub fn new(names: Vec<String>, directed: bool, n_covariates: usize, edges: Vec<Edge>) -> Result<Self> {
        let n = names.len();
        if n_covariates == 0 {
            return Err(Error::InvalidArgument("covariate count must be at least 1".into()));
        }
        let mut canonical = Vec::with_capacity(edges.len());
        let mut seen = BTreeMap::new();
        for mut e in edges {
            for id in [e.from, e.to] {
                if id >= n {
                    return Err(Error::InvalidNode { id, n_nodes: n });
                }
            }
            if e.from == e.to {
                return Err(Error::SelfLoop(e.from));
            }
            if !(e.dist.is_finite() && e.dist > 0.0) {
                return Err(Error::InvalidDistance(e.dist));
            }
            if e.cov == 0 || e.cov > n_covariates {
                return Err(Error::InvalidCovariate { cov: e.cov, n_covariates });
            }
            if !directed && e.from > e.to {
                core::mem::swap(&mut e.from, &mut e.to);
            }
            if seen.insert((e.from, e.to), ()).is_some() {
                return Err(Error::DuplicateEdge { from: e.from, to: e.to });
            }
            canonical.push(e);
        }
        canonical.sort_by_key(|e| (e.from, e.to));

        let mut out: Vec<Vec<Arc>> = vec![Vec::new(); n];
        for e in &canonical {
            out[e.from].push(Arc { to: e.to, dist: e.dist, cov: e.cov });
            if !directed {
                out[e.to].push(Arc { to: e.from, dist: e.dist, cov: e.cov });
            }
        }
        for arcs in &mut out {
            arcs.sort_by_key(|a| a.to);
        }
        Ok(Network { names, directed, n_covariates, edges: canonical, out })
    }

    /// Network with nodes named `1..=n`.
    pub fn with_default_names(n: usize, directed: bool, n_covariates: usize, edges: Vec<Edge>) -> Result<Self> {
        Self::new(default_names(n), directed, n_covariates, edges)
    }

    pub fn empty(n: usize) -> Self {
        Self::with_default_names(n, false, 1, Vec::new()).expect("empty network is valid")
    }

    /// Same structure under new node names.
    pub fn renamed(&self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.n_nodes() {
            return Err(Error::DimensionMismatch(format!(
                "{} names for {} nodes",
                names.len(),
                self.n_nodes()
            )));
        }
        Ok(Network { names, ..self.clone() })
    }

    pub fn n_nodes(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn n_covariates(&self) -> usize {
        self.n_covariates
    }

    /// Canonical edge list; each undirected edge appears once.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Out-neighbours of `i` as `(target, dist, cov)`, ascending by target.
    pub fn out_neighbours(&self, i: usize) -> impl Iterator<Item = (usize, f64, usize)> + '_ {
        self.out[i].iter().map(|a| (a.to, a.dist, a.cov))
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.out[i].len()
    }

    fn check_node(&self, i: usize) -> Result<()> {
        if i >= self.n_nodes() {
            return Err(Error::InvalidNode { id: i, n_nodes: self.n_nodes() });
        }
        Ok(())
    }

    /// Builds a network from an adjacency matrix. An entry `A[i][j] > 0`
    /// makes an edge `i -> j`. The network is undirected exactly when the
    /// matrix is symmetric. With `symmetrize`, a one-sided entry is mirrored
    /// first; two different nonzero values for one pair are rejected.
    pub fn from_adjacency(a: &Matrix, kind: AdjacencyKind, symmetrize: bool) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
        }
        let n = a.rows();
        for i in 0..n {
            for j in 0..n {
                let v = a[(i, j)];
                if !v.is_finite() {
                    return Err(Error::NonFinite("adjacency entry"));
                }
                if v < 0.0 {
                    return Err(Error::NegativeEntry { row: i, col: j });
                }
            }
            if a[(i, i)] != 0.0 {
                return Err(Error::NonzeroDiagonal(i));
            }
        }
        let mut m = a.clone();
        if symmetrize {
            for i in 0..n {
                for j in 0..i {
                    let (x, y) = (m[(i, j)], m[(j, i)]);
                    if x != 0.0 && y != 0.0 && x != y {
                        return Err(Error::AsymmetricConflict { row: i, col: j });
                    }
                    let v = if x != 0.0 { x } else { y };
                    m[(i, j)] = v;
                    m[(j, i)] = v;
                }
            }
        }
        let directed = !m.is_symmetric();
        let to_dist = |v: f64| match kind {
            AdjacencyKind::Distances => v,
            AdjacencyKind::Weights => 1.0 / v,
        };
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if m[(i, j)] > 0.0 && (directed || i < j) {
                    edges.push(Edge::new(i, j, to_dist(m[(i, j)]), 1));
                }
            }
        }
        Self::with_default_names(n, directed, 1, edges)
    }

    /// Adjacency matrix with edge distances, or their reciprocals for
    /// [`AdjacencyKind::Weights`]. Undirected edges fill both entries.
    pub fn to_adjacency(&self, kind: AdjacencyKind) -> Matrix {
        let n = self.n_nodes();
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for a in &self.out[i] {
                m[(i, a.to)] = match kind {
                    AdjacencyKind::Distances => a.dist,
                    AdjacencyKind::Weights => 1.0 / a.dist,
                };
            }
        }
        m
    }

    /// Stage layers `1..=max_stage` around `origin`.
    ///
    /// With `allowed`, nodes flagged `false` are deleted before the search
    /// (the origin itself is always kept).
    pub fn stage_layers(&self, origin: usize, max_stage: usize, allowed: Option<&[bool]>) -> Result<Vec<Vec<StageMember>>> {
        self.check_node(origin)?;
        if let Some(mask) = allowed {
            if mask.len() != self.n_nodes() {
                return Err(Error::DimensionMismatch("mask length differs from node count".into()));
            }
        }
        let n = self.n_nodes();
        let mut visited = vec![false; n];
        visited[origin] = true;
        let ok = |v: usize| allowed.is_none_or(|m| m[v]);

        // (node, path, distance) for the current layer, path includes origin.
        let mut frontier: Vec<(usize, Vec<usize>, f64, usize)> = vec![(origin, vec![origin], 0.0, 0)];
        let mut layers = Vec::with_capacity(max_stage);
        for _ in 0..max_stage {
            let mut best: BTreeMap<usize, (Vec<usize>, f64, usize)> = BTreeMap::new();
            for (u, path, d, _) in &frontier {
                for arc in &self.out[*u] {
                    let v = arc.to;
                    if visited[v] || !ok(v) {
                        continue;
                    }
                    let cand = d + arc.dist;
                    let replace = match best.get(&v) {
                        None => true,
                        Some((bp, bd, _)) => cand < *bd || (cand == *bd && path_lt(path, v, bp)),
                    };
                    if replace {
                        let mut p = path.clone();
                        p.push(v);
                        best.insert(v, (p, cand, arc.cov));
                    }
                }
            }
            let mut layer = Vec::with_capacity(best.len());
            let mut next = Vec::with_capacity(best.len());
            for (v, (p, d, cov)) in best {
                visited[v] = true;
                layer.push(StageMember { node: v, dist: d, cov });
                next.push((v, p, d, cov));
            }
            layers.push(layer);
            frontier = next;
        }
        Ok(layers)
    }

    /// Stage-`r` neighbour set of `i`. Unobserved nodes (per `observed`) are
    /// left out of the members; under [`MaskMode::Subgraph`] they are also
    /// removed before layering.
    pub fn neighbour_set(&self, i: usize, r: usize, observed: Option<&[bool]>, mode: MaskMode) -> Result<NeighbourSet> {
        check_stage(r)?;
        let allowed = if mode == MaskMode::Subgraph { observed } else { None };
        let layers = self.stage_layers(i, r, allowed)?;
        let members = layers[r - 1]
            .iter()
            .map(|m| m.node)
            .filter(|&v| observed.is_none_or(|o| o[v]))
            .collect();
        Ok(NeighbourSet { origin: i, stage: r, members })
    }

    /// Connection weights from `i` to its stage-`r` neighbours.
    pub fn connection_weights(&self, i: usize, r: usize, observed: Option<&[bool]>, mode: MaskMode) -> Result<WeightMap> {
        check_stage(r)?;
        let allowed = if mode == MaskMode::Subgraph { observed } else { None };
        let layers = self.stage_layers(i, r, allowed)?;
        Ok(WeightMap::from_members(i, r, &layers[r - 1], observed))
    }

    /// `W^(r,c)` with `[W]_{l,m} = ω_{l,m,c}` for stage-r neighbours `m` of `l`.
    pub fn weight_matrix(&self, r: usize, cov: usize, observed: Option<&[bool]>, mode: MaskMode) -> Result<Matrix> {
        check_stage(r)?;
        if cov == 0 || cov > self.n_covariates {
            return Err(Error::InvalidCovariate { cov, n_covariates: self.n_covariates });
        }
        let table = StageTable::build(self, r, if mode == MaskMode::Subgraph { observed } else { None })?;
        let n = self.n_nodes();
        let mut w = Matrix::zeros(n, n);
        for l in 0..n {
            for e in table.weights(l, r, observed).entries {
                if e.cov == cov {
                    w[(l, e.node)] = e.weight;
                }
            }
        }
        Ok(w)
    }
}

/// Default node names `1..=n`.
pub fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| i.to_string()).collect()
}

fn check_stage(r: usize) -> Result<()> {
    if r == 0 {
        return Err(Error::InvalidArgument("neighbour stage must be at least 1".into()));
    }
    Ok(())
}

/// `path ++ [v] < other` lexicographically.
fn path_lt(path: &[usize], v: usize, other: &[usize]) -> bool {
    path.iter().copied().chain(core::iter::once(v)).lt(other.iter().copied())
}

/// A node reached at some stage, with its stage distance and the covariate
/// of the last edge on its shortest layered path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageMember {
    pub node: usize,
    pub dist: f64,
    pub cov: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighbourSet {
    pub origin: usize,
    pub stage: usize,
    /// Ascending node ids.
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightEntry {
    pub node: usize,
    pub cov: usize,
    pub weight: f64,
}

/// Connection weights over one stage of one origin. Unobserved members are
/// kept with weight zero.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMap {
    pub origin: usize,
    pub stage: usize,
    pub entries: Vec<WeightEntry>,
}

impl WeightMap {
    fn from_members(origin: usize, stage: usize, members: &[StageMember], observed: Option<&[bool]>) -> Self {
        let is_obs = |v: usize| observed.is_none_or(|o| o[v]);
        let live: Vec<&StageMember> = members.iter().filter(|m| is_obs(m.node)).collect();
        let equal = live.windows(2).all(|w| w[0].dist == w[1].dist);
        let total_inv: f64 = live.iter().map(|m| 1.0 / m.dist).sum();
        let count = live.len() as f64;
        let entries = members
            .iter()
            .map(|m| {
                let weight = if !is_obs(m.node) {
                    0.0
                } else if equal {
                    1.0 / count
                } else {
                    (1.0 / m.dist) / total_inv
                };
                WeightEntry { node: m.node, cov: m.cov, weight }
            })
            .collect();
        WeightMap { origin, stage, entries }
    }

    /// Weight to `node` summed over covariates; zero for non-members.
    pub fn weight(&self, node: usize) -> f64 {
        self.entries.iter().filter(|e| e.node == node).map(|e| e.weight).sum()
    }

    pub fn weight_cov(&self, node: usize, cov: usize) -> f64 {
        self.entries
            .iter()
            .find(|e| e.node == node && e.cov == cov)
            .map_or(0.0, |e| e.weight)
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|e| e.weight).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.iter().all(|e| e.weight == 0.0)
    }
}

/// Precomputed stage layers for every node, used where weights are needed
/// repeatedly under changing observation masks.
#[derive(Debug, Clone)]
pub struct StageTable {
    layers: Vec<Vec<Vec<StageMember>>>,
}

impl StageTable {
    pub fn build(net: &Network, max_stage: usize, allowed: Option<&[bool]>) -> Result<Self> {
        let layers = (0..net.n_nodes())
            .map(|i| net.stage_layers(i, max_stage, allowed))
            .collect::<Result<Vec<_>>>()?;
        Ok(StageTable { layers })
    }

    pub fn max_stage(&self) -> usize {
        self.layers.first().map_or(0, Vec::len)
    }

    pub fn members(&self, i: usize, r: usize) -> &[StageMember] {
        &self.layers[i][r - 1]
    }

    pub fn weights(&self, i: usize, r: usize, observed: Option<&[bool]>) -> WeightMap {
        WeightMap::from_members(i, r, self.members(i, r), observed)
    }
}

/// Connection weights for every node and stage, memoised per observation
/// pattern (and per network when the topology changes over time).
#[derive(Debug)]
pub struct WeightCache<'a> {
    net: &'a Network,
    max_stage: usize,
    mode: MaskMode,
    full: StageTable,
    by_mask: BTreeMap<Vec<bool>, Vec<Vec<WeightMap>>>,
}

impl<'a> WeightCache<'a> {
    pub fn new(net: &'a Network, max_stage: usize, mode: MaskMode) -> Result<Self> {
        let full = StageTable::build(net, max_stage, None)?;
        Ok(WeightCache { net, max_stage, mode, full, by_mask: BTreeMap::new() })
    }

    pub fn network(&self) -> &'a Network {
        self.net
    }

    /// Weights `[node][stage - 1]` when only nodes flagged in `observed`
    /// carry data.
    pub fn get(&mut self, observed: &[bool]) -> Result<&[Vec<WeightMap>]> {
        if observed.len() != self.net.n_nodes() {
            return Err(Error::DimensionMismatch("mask length differs from node count".into()));
        }
        if !self.by_mask.contains_key(observed) {
            let sub;
            let table = match self.mode {
                MaskMode::Reweight => &self.full,
                MaskMode::Subgraph => {
                    sub = StageTable::build(self.net, self.max_stage, Some(observed))?;
                    &sub
                }
            };
            let maps = (0..self.net.n_nodes())
                .map(|i| (1..=self.max_stage).map(|r| table.weights(i, r, Some(observed))).collect())
                .collect();
            self.by_mask.insert(observed.to_vec(), maps);
        }
        Ok(&self.by_mask[observed])
    }
}

/// Weighted neighbour sum for covariate `cov`: `Σ_q ω_{i,q,cov} x_q`.
/// Weights are renormalised over the members whose value is present; the
/// result is zero when no member is observed.
pub fn neighbour_regressor(values: &[Option<f64>], weights: &WeightMap, cov: usize) -> f64 {
    let live = weights.entries.iter().filter(|e| e.weight > 0.0 && values[e.node].is_some());
    let total: f64 = live.clone().map(|e| e.weight).sum();
    if total == 0.0 {
        return 0.0;
    }
    // Already normalised over the observed members: use weights as they are.
    let as_is = total == weights.total();
    live.filter(|e| e.cov == cov)
        .map(|e| {
            let w = if as_is { e.weight } else { e.weight / total };
            w * values[e.node].unwrap_or(0.0)
        })
        .sum()
}
