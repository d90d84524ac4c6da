//! Random-network search for prediction and information-criterion grids.
//!
//! Searches are split into independent per-network evaluations so that a
//! caller can run them in parallel; [`NetworkSearch::finish`] reduces the
//! scores in candidate order, so the table does not depend on scheduling.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::estimate::{fit, Criterion};
use crate::forecast::{predict, prediction_error};
use crate::model::{AlphaMode, ModelSpec};
use crate::network::{Edge, Network};
use crate::rng::RngStream;
use crate::series::SeriesMatrix;

/// Undirected G(n, prob) graph with unit distances and one covariate.
/// Pairs `(i, j)`, `i < j`, are visited in lexicographic order and each is
/// kept when its uniform draw is below `prob`.
pub fn erdos_renyi(seed: u64, n_nodes: usize, prob: f64) -> Result<Network> {
    if !(0.0..=1.0).contains(&prob) {
        return Err(Error::InvalidArgument(format!("edge probability {prob} outside [0, 1]")));
    }
    let mut rng = RngStream::new(seed);
    let mut edges = Vec::new();
    for i in 0..n_nodes {
        for j in i + 1..n_nodes {
            if rng.next_uniform() < prob {
                edges.push(Edge::unit(i, j));
            }
        }
    }
    Network::with_default_names(n_nodes, false, 1, edges)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub specs: Vec<ModelSpec>,
    pub n_networks: usize,
    pub prob: f64,
    /// Network `k` uses seed `master_seed + k`.
    pub master_seed: u64,
    /// Number of leading rows used for fitting.
    pub train_end: usize,
    /// One-based row scored against the forecast; at least `train_end + 1`.
    pub target: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreRow {
    pub seed: u64,
    pub spec_id: usize,
    /// Infinite when the candidate could not be fitted.
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    /// Candidate order: network-major, spec-minor.
    pub table: Vec<ScoreRow>,
    /// Ascending error, ties by `(seed, spec_id)`.
    pub ranked: Vec<ScoreRow>,
    pub best: ScoreRow,
    pub best_network: Network,
}

#[derive(Debug, Clone)]
pub struct NetworkSearch<'a> {
    vts: &'a SeriesMatrix,
    cfg: SearchConfig,
    train: SeriesMatrix,
}

impl<'a> NetworkSearch<'a> {
    pub fn new(vts: &'a SeriesMatrix, cfg: SearchConfig) -> Result<Self> {
        if cfg.specs.is_empty() || cfg.n_networks == 0 {
            return Err(Error::InvalidArgument("search needs at least one spec and one network".into()));
        }
        if cfg.train_end == 0 || cfg.target <= cfg.train_end || cfg.target > vts.n_times() {
            return Err(Error::InvalidArgument(format!(
                "need 0 < train_end < target <= {}, got train_end {} and target {}",
                vts.n_times(),
                cfg.train_end,
                cfg.target
            )));
        }
        let train = vts.slice_rows(0, cfg.train_end)?;
        Ok(NetworkSearch { vts, cfg, train })
    }

    pub fn config(&self) -> &SearchConfig {
        &self.cfg
    }

    pub fn n_networks(&self) -> usize {
        self.cfg.n_networks
    }

    pub fn seed(&self, k: usize) -> u64 {
        self.cfg.master_seed.wrapping_add(k as u64)
    }

    pub fn network(&self, k: usize) -> Result<Network> {
        erdos_renyi(self.seed(k), self.vts.n_nodes(), self.cfg.prob)?.renamed(self.vts.names().to_vec())
    }

    /// Prediction errors of every spec on network `k`.
    pub fn evaluate(&self, k: usize) -> Result<Vec<f64>> {
        let net = self.network(k)?;
        let h = self.cfg.target - self.cfg.train_end;
        let actual = self.vts.row(self.cfg.target - 1);
        Ok(self
            .cfg
            .specs
            .iter()
            .map(|spec| {
                fit(&self.train, &net, spec)
                    .and_then(|f| predict(&net, spec, &f.coef, &self.train, h))
                    .and_then(|pred| prediction_error(pred.row(h - 1), actual))
                    .ok()
                    .filter(|e| !e.is_nan())
                    .unwrap_or(f64::INFINITY)
            })
            .collect())
    }

    /// Builds the result from `scores[k]`, as returned by `evaluate(k)`.
    pub fn finish(&self, scores: Vec<Vec<f64>>) -> Result<SearchResult> {
        if scores.len() != self.cfg.n_networks || scores.iter().any(|s| s.len() != self.cfg.specs.len()) {
            return Err(Error::DimensionMismatch("score table shape".into()));
        }
        let table: Vec<ScoreRow> = scores
            .iter()
            .enumerate()
            .flat_map(|(k, row)| {
                let seed = self.seed(k);
                row.iter().enumerate().map(move |(spec_id, &error)| ScoreRow { seed, spec_id, error })
            })
            .collect();
        let mut ranked = table.clone();
        ranked.sort_by(|a, b| {
            a.error
                .partial_cmp(&b.error)
                .unwrap_or(Ordering::Equal)
                .then(a.seed.cmp(&b.seed))
                .then(a.spec_id.cmp(&b.spec_id))
        });
        let best = ranked[0];
        if !best.error.is_finite() {
            return Err(Error::NoCandidateFits);
        }
        let k = best.seed.wrapping_sub(self.cfg.master_seed) as usize;
        Ok(SearchResult { table, ranked, best, best_network: self.network(k)? })
    }

    pub fn run(&self) -> Result<SearchResult> {
        let scores = (0..self.n_networks()).map(|k| self.evaluate(k)).collect::<Result<Vec<_>>>()?;
        self.finish(scores)
    }
}

/// Every stage vector with `s_j <= max_stage[j]`, in lexicographic order.
pub fn stage_grid(max_stage: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &m in max_stage {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=m).map(move |s| {
                    let mut v = prefix.clone();
                    v.push(s);
                    v
                })
            })
            .collect();
    }
    out
}

/// Specs for each lag order in `orders` with all stage vectors up to
/// `max_stage` in every lag.
pub fn candidate_specs(orders: &[usize], max_stage: usize, alpha_mode: &AlphaMode) -> Result<Vec<ModelSpec>> {
    let mut out = Vec::new();
    for &p in orders {
        for s in stage_grid(&vec![max_stage; p]) {
            out.push(ModelSpec::new(p, s, 1, alpha_mode.clone())?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IcEntry {
    pub spec: ModelSpec,
    pub n_params: usize,
    /// `None` when the spec could not be fitted.
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IcGrid {
    pub criterion: Criterion,
    pub entries: Vec<IcEntry>,
    /// Index of the minimising entry.
    pub best: Option<usize>,
}

impl IcGrid {
    /// Assembles a grid from per-spec results in candidate order. Ties go
    /// to the smaller parameter count, then the lexicographically smaller
    /// `(p, s)`.
    pub fn from_values(criterion: Criterion, n_nodes: usize, specs: &[ModelSpec], values: Vec<Option<f64>>) -> Self {
        let entries: Vec<IcEntry> = specs
            .iter()
            .zip(values)
            .map(|(spec, value)| IcEntry {
                spec: spec.clone(),
                n_params: spec.n_params(n_nodes),
                value: value.filter(|v| !v.is_nan()),
            })
            .collect();
        let order_key = |e: &IcEntry| {
            let mut k = vec![e.spec.p()];
            k.extend_from_slice(e.spec.stages());
            k
        };
        let best = (0..entries.len()).filter(|&k| entries[k].value.is_some()).min_by(|&a, &b| {
            let (ea, eb) = (&entries[a], &entries[b]);
            ea.value
                .partial_cmp(&eb.value)
                .unwrap_or(Ordering::Equal)
                .then(ea.n_params.cmp(&eb.n_params))
                .then_with(|| order_key(ea).cmp(&order_key(eb)))
        });
        IcGrid { criterion, entries, best }
    }

    pub fn best_entry(&self) -> Option<&IcEntry> {
        self.best.map(|k| &self.entries[k])
    }
}

/// Criterion value of one candidate.
pub fn ic_value(vts: &SeriesMatrix, net: &Network, spec: &ModelSpec, criterion: Criterion) -> Result<f64> {
    fit(vts, net, spec).map(|f| f.criterion(criterion))
}

/// Serial grid over `specs`; failed fits become missing cells.
pub fn ic_grid(vts: &SeriesMatrix, net: &Network, specs: &[ModelSpec], criterion: Criterion) -> IcGrid {
    let values = specs.iter().map(|s| ic_value(vts, net, s, criterion).ok()).collect();
    IcGrid::from_values(criterion, vts.n_nodes(), specs, values)
}

/// Divides each node by its sample standard deviation (denominator
/// `n - 1`) over the observed values in the first `window_end` rows.
pub fn normalize_by_node_sd(vts: &SeriesMatrix, window_end: usize) -> Result<(SeriesMatrix, Vec<f64>)> {
    if window_end > vts.n_times() {
        return Err(Error::InvalidArgument(format!(
            "window end {window_end} beyond {} rows",
            vts.n_times()
        )));
    }
    let scales = (0..vts.n_nodes())
        .map(|i| {
            let xs: Vec<f64> = (0..window_end).filter_map(|t| vts.get(t, i)).collect();
            if xs.len() < 2 {
                return Err(Error::ZeroVariance(i + 1));
            }
            let mean = xs.iter().sum::<f64>() / xs.len() as f64;
            let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (xs.len() - 1) as f64;
            let sd = libm::sqrt(var);
            if sd > 0.0 && sd.is_finite() {
                Ok(sd)
            } else {
                Err(Error::ZeroVariance(i + 1))
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok((vts.map(|_, i, x| x / scales[i]), scales))
}

pub fn denormalize(vts: &SeriesMatrix, scales: &[f64]) -> Result<SeriesMatrix> {
    if scales.len() != vts.n_nodes() {
        return Err(Error::DimensionMismatch("one scale per node required".into()));
    }
    Ok(vts.map(|_, i, x| x * scales[i]))
}
